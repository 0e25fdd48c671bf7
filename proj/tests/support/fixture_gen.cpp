// Writes a synthetic blob dataset (packs + classes.txt) for CLI tests.
#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "fixtures.hpp"

int main(int argc, char **argv) {
  CLI::App app{"synthetic IFP1 fixture generator"};
  std::string out;
  fixtures::BlobSpec spec;
  std::size_t train_per_class = 0;
  std::string test_out;
  app.add_option("out", out, "output directory")->required();
  app.add_option("--seed", spec.seed);
  app.add_option("--classes", spec.classes);
  app.add_option("--packs", spec.packs_per_class, "packs per class");
  app.add_option("--delta", spec.delta, "feature channels");
  app.add_option("--noise", spec.noise);
  app.add_option("--split", train_per_class, "packs per class kept in <out>; the rest go to --test-out");
  app.add_option("--test-out", test_out);
  CLI11_PARSE(app, argc, argv);
  try {
    auto set = fixtures::make_blobs(spec);
    if (train_per_class > 0 && !test_out.empty()) {
      fixtures::BlobSet train = set;
      fixtures::BlobSet test = set;
      train.packs.clear();
      test.packs.clear();
      fixtures::split_per_class(set.packs, spec.classes, train_per_class, train.packs, test.packs);
      fixtures::write_blob_dir(train, out);
      fixtures::write_blob_dir(test, test_out);
    } else {
      fixtures::write_blob_dir(set, out);
    }
  } catch (const std::exception &e) {
    std::fprintf(stderr, "fixture_gen: %s\n", e.what());
    return 1;
  }
  return 0;
}
