#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "ifcm/error.hpp"
#include "ifcm/model_io.hpp"
#include "ifcm/training.hpp"

using namespace ifcm;

namespace {

double grid_x(std::size_t k) { return static_cast<double>(k) / 1000.0; }

// Direct similarity formula, written independently of the library.
std::vector<double> similarity_oracle(const std::vector<Vector> &d_set, const std::vector<Vector> &meds) {
  std::vector<double> z(meds.size(), 0.0);
  for (const auto &d : d_set) {
    std::vector<double> dist;
    for (const auto &r : meds) {
      double s = 0;
      for (std::size_t k = 0; k < d.size(); ++k) s += (d[k] - r[k]) * (d[k] - r[k]);
      dist.push_back(std::sqrt(s));
    }
    double total = 0;
    for (double x : dist) total += x;
    for (std::size_t m = 0; m < meds.size(); ++m) z[m] += 1.0 - dist[m] / total;
  }
  for (auto &v : z) v /= static_cast<double>(d_set.size());
  return z;
}

std::vector<Vector> random_vectors(std::mt19937_64 &rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vector> out(n, Vector(dim));
  for (auto &v : out)
    for (auto &x : v) x = u(rng);
  return out;
}

TrainingConfig small_config(std::size_t clusters) {
  TrainingConfig cfg;
  cfg.clusters_per_class = clusters;
  cfg.e_b = 5;
  cfg.e_q = 5;
  return cfg;
}

}  // namespace

TEST_CASE("mine_concepts on a one-dimensional example") {
  std::vector<ClassFeatures> classes{{1, "a", {{0.0}, {0.1}, {0.2}, {5.0}, {5.1}, {5.2}}}, {2, "b", {{9.0}, {9.5}}}};
  const auto meds = mine_concepts(classes, 2, 1);
  REQUIRE(meds.size() == 4);
  std::set<double> a{meds[0].vector[0], meds[1].vector[0]};
  CHECK(a == std::set<double>{0.1, 5.1});
  CHECK(meds[0].class_id == 1);
  CHECK(meds[2].class_id == 2);
  CHECK(meds[0].concept_label == "a-part1");
  CHECK(meds[3].concept_label == "b-part2");
  CHECK_THROWS_AS((void)mine_concepts(classes, 3, 1), TrainingError);

  // deterministic for a seed, medoids are members
  const auto again = mine_concepts(classes, 2, 1);
  for (std::size_t k = 0; k < meds.size(); ++k) CHECK(again[k].vector == meds[k].vector);
}

TEST_CASE("similarity examples") {
  const std::vector<Vector> meds{{0.0, 0.0}, {1.0, 0.0}};
  const std::vector<Vector> at_first{{0.0, 0.0}};
  const auto z = similarity(at_first, meds);
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 0.0);
  const std::vector<Vector> middle{{0.5, 0.0}};
  const auto zm = similarity(middle, meds);
  CHECK(zm[0] == 0.5);
  CHECK(zm[1] == 0.5);

  // coincident medoids: no distance information, every term is 1 - 1/M
  const std::vector<Vector> same{{0.3}, {0.3}};
  const std::vector<Vector> at{{0.3}};
  CHECK(similarity(at, same) == std::vector<double>{0.5, 0.5});

  const std::vector<Vector> one{{0.0, 0.0}};
  CHECK_THROWS_AS((void)similarity(at_first, one), InvalidValueError);
  CHECK_THROWS_AS((void)similarity(std::vector<Vector>{}, meds), InvalidValueError);
  const std::vector<Vector> wrong{{0.0, 0.0, 0.0}};
  CHECK_THROWS_AS((void)similarity(wrong, meds), DimensionMismatchError);
}

TEST_CASE("similarity matches the direct formula and its sum identity") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 200; ++round) {
    const std::size_t dim = 1 + rng() % 6, m = 2 + rng() % 6, p = 1 + rng() % 10;
    const auto meds = random_vectors(rng, m, dim);
    const auto d = random_vectors(rng, p, dim);
    const auto got = similarity(d, meds);
    const auto want = similarity_oracle(d, meds);
    double sum = 0;
    for (std::size_t k = 0; k < m; ++k) {
      REQUIRE(std::abs(got[k] - want[k]) <= 1e-12);
      REQUIRE(got[k] >= 0.0);
      REQUIRE(got[k] <= 1.0);
      sum += got[k];
    }
    // per region the ratios sum to one, so the normalized scores sum to M - 1
    REQUIRE(std::abs(sum - static_cast<double>(m - 1)) <= 1e-12);

    // permuting medoids permutes the output
    std::vector<std::size_t> perm(m);
    for (std::size_t k = 0; k < m; ++k) perm[k] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vector> pm;
    for (auto k : perm) pm.push_back(meds[k]);
    const auto pz = similarity(d, pm);
    for (std::size_t k = 0; k < m; ++k) REQUIRE(std::abs(pz[k] - got[perm[k]]) <= 1e-12);
  }
}

TEST_CASE("fuzzy-set families") {
  std::vector<double> values(10, 0.1);
  values.insert(values.end(), 10, 0.9);
  for (auto shape : {MfShape::gaussian, MfShape::triangular}) {
    const auto fam = build_mf_family(values, 2, shape);
    REQUIRE(fam.size() == 2);
    // peaks at the two medoids (shoulders reach full membership there too)
    CHECK(fam[0](0.1) == 1.0);
    CHECK(fam[1](0.9) == 1.0);
    CHECK(fam[0](0.9) < 1.0);
    CHECK(fam[1](0.1) < 1.0);
  }

  const std::vector<double> constant(7, 0.4);
  const auto single = build_mf_family(constant, 1, MfShape::triangular);
  REQUIRE(single.size() == 1);
  for (std::size_t k = 0; k <= 1000; ++k) CHECK(single[0](grid_x(k)) == 1.0);
  const auto single_g = build_mf_family(constant, 3, MfShape::gaussian);
  REQUIRE(single_g.size() == 1);
  CHECK(single_g[0].apex() == doctest::Approx(0.4));

  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 1);
  for (int round = 0; round < 40; ++round) {
    std::vector<double> vs(5 + rng() % 30);
    for (auto &v : vs) v = u(rng);
    for (auto shape : {MfShape::gaussian, MfShape::triangular}) {
      const auto fam = build_mf_family(vs, 2 + rng() % 5, shape);
      for (std::size_t k = 0; k <= 1000; ++k) {
        double best = 0;
        for (const auto &f : fam) best = std::max(best, f(grid_x(k)));
        REQUIRE(best > 0.0);
      }
      for (std::size_t k = 1; k < fam.size(); ++k) REQUIRE(fam[k - 1].apex() < fam[k].apex());
    }
  }
}

TEST_CASE("pairing keeps exactly the grid-valid pairs") {
  const auto b = MembershipFunction::trapezoidal(0.6, 0.9, 0.9, 1.0);
  const auto q = MembershipFunction::triangular(0.0, 0.1, 0.4);
  const std::vector<MembershipFunction> bf{b}, qf{q};
  const auto ok = pair_ifs(bf, qf);
  REQUIRE(ok.sets.size() == 1);
  CHECK_FALSE(ok.scaled);
  CHECK(ok.sets[0].label == "Very High");

  const std::vector<MembershipFunction> same{MembershipFunction::triangular(0, 0.5, 1)};
  const auto fallback = pair_ifs(same, same);
  CHECK(fallback.scaled);
  REQUIRE(fallback.sets.size() == 1);
  CHECK(ifs_validate(fallback.sets[0]));
  CHECK(fallback.sets[0].mu(0.5) == 0.5);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  auto random_tri = [&]() {
    double a = u(rng), c = u(rng);
    if (a > c) std::swap(a, c);
    if (c - a < 0.01) c = std::min(1.0, a + 0.2), a = std::max(0.0, c - 0.2);
    return MembershipFunction::triangular(a, 0.5 * (a + c), c);
  };
  for (int round = 0; round < 30; ++round) {
    std::vector<MembershipFunction> bs, qs;
    for (int k = 0; k < 3; ++k) {
      bs.push_back(random_tri());
      qs.push_back(random_tri());
    }
    std::size_t expected = 0;
    for (const auto &bb : bs) {
      for (const auto &qq : qs) {
        bool valid = true;
        for (std::size_t k = 0; k <= 1000; ++k) valid = valid && bb(grid_x(k)) + qq(grid_x(k)) <= 1.0 + 1e-12;
        expected += valid ? 1 : 0;
      }
    }
    const auto got = pair_ifs(bs, qs);
    if (expected == 0) {
      CHECK(got.scaled);
      CHECK(got.sets.size() == 9);
    } else {
      CHECK_FALSE(got.scaled);
      CHECK(got.sets.size() == expected);
    }
  }
}

TEST_CASE("input-output weights") {
  const IntuitionisticFuzzySet s{MembershipFunction::trapezoidal(0.5, 0.8, 1, 1),
                                 MembershipFunction::triangular(0, 0, 0.4), "x"};
  const std::vector<IntuitionisticFuzzySet> one{s};
  const std::vector<double> at{0.7, 0.7, 0.7};
  const auto rel = weight_input_output(one, at);
  REQUIRE(rel.centroid);
  CHECK(*rel.centroid == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(rel.weight.mu() == doctest::Approx(s.mu(0.7)));
  CHECK(rel.weight.gamma() == doctest::Approx(s.gamma(0.7)));

  const IntuitionisticFuzzySet sym{FuzzyFunction::scaled(MembershipFunction::triangular(0, 0.5, 1), 0.8),
                                   FuzzyFunction::constant(0.1), "x"};
  const std::vector<IntuitionisticFuzzySet> syms{sym};
  const std::vector<double> pair{0.2, 0.8};
  const auto mid = weight_input_output(syms, pair);
  CHECK(*mid.centroid == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mid.weight.mu() == doctest::Approx(0.8));

  // composed-operations oracle
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0, 1);
  for (int round = 0; round < 50; ++round) {
    const std::vector<IntuitionisticFuzzySet> two{fixtures::random_ifs(rng), fixtures::random_ifs(rng)};
    std::vector<double> sims(10);
    for (auto &v : sims) v = u(rng);
    double num = 0, den = 0;
    for (double z : sims) {
      const double mu = std::max(two[0].mu(z), two[1].mu(z));
      const double ga = std::min(two[0].gamma(z), two[1].gamma(z));
      if (mu - ga > 0) {
        num += (mu - ga) * z;
        den += mu - ga;
      }
    }
    const auto r = weight_input_output(two, sims);
    if (den <= 0) {
      CHECK(r.neutral());
      CHECK(r.weight == IfValue{});
      continue;
    }
    REQUIRE(r.centroid);
    const double z = num / den;
    CHECK(std::abs(*r.centroid - z) <= 1e-10);
    CHECK(std::abs(r.weight.mu() - std::max(two[0].mu(z), two[1].mu(z))) <= 1e-9);
  }
}

TEST_CASE("input-input weights") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<IntuitionisticFuzzySet> set{fixtures::random_ifs(rng), fixtures::random_ifs(rng)};
  std::vector<double> sims(8);
  for (auto &v : sims) v = u(rng);
  const auto io = weight_input_output(set, sims);
  const auto ii = weight_input_input(set, set, sims, sims);
  // pooling the same samples twice only changes summation order
  REQUIRE(io.centroid.has_value() == ii.centroid.has_value());
  if (io.centroid) {
    CHECK(*ii.centroid == doctest::Approx(*io.centroid).epsilon(1e-12));
    CHECK(ii.weight.mu() == doctest::Approx(io.weight.mu()).epsilon(1e-9));
    CHECK(ii.weight.gamma() == doctest::Approx(io.weight.gamma()).epsilon(1e-9));
  }

  const std::vector<IntuitionisticFuzzySet> low{{MembershipFunction::triangular(0, 0.1, 0.3),
                                                 MembershipFunction::trapezoidal(0.5, 0.8, 1, 1), "l"}};
  const std::vector<IntuitionisticFuzzySet> high{{MembershipFunction::triangular(0.6, 0.9, 1),
                                                  MembershipFunction::triangular(0, 0.1, 0.4), "h"}};
  const std::vector<double> zl{0.1, 0.2}, zh{0.8, 0.9};
  const auto dis = weight_input_input(low, high, zl, zh);
  CHECK(dis.neutral());
  CHECK(dis.weight == IfValue{});
}

TEST_CASE("training topology and invariants") {
  fixtures::BlobSpec spec;
  spec.packs_per_class = 12;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "class1"}, {2, "class2"}, {3, "class3"}};
  const auto model = train(samples, classes, small_config(2));
  CHECK(model.input_count() == 6);
  CHECK(model.concept_count() == 9);
  std::size_t io = 0, ii = 0;
  for (const auto &e : model.edges) (e.kind == EdgeKind::input_output ? io : ii)++;
  CHECK(io == 6 * 3);
  CHECK(ii == 6 * 5);
  for (const auto &lib : model.libraries) CHECK(ifs_validate(lib.relation));
  for (const auto &e : model.edges) CHECK(ifs_validate(e.relation));

  const auto w = model.weight_matrix();
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      if (i < 6 && j < 6) CHECK(w(i, j) == w(j, i));
      if (i >= 6) CHECK(w(i, j) == IfValue{});
    }
  }

  // cross-class edges carry the own-class evidence with roles swapped
  for (const auto &e : model.edges) {
    if (e.kind != EdgeKind::input_output) continue;
    const auto own = w(e.from, model.output_index(model.medoids[e.from].class_id));
    if (model.concepts[e.to].class_id != model.medoids[e.from].class_id) CHECK(e.weight == own.swapped());
  }
}

TEST_CASE("minimal two-class topology") {
  fixtures::BlobSpec spec;
  spec.classes = 2;
  spec.packs_per_class = 6;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "a"}, {2, "b"}};
  const auto model = train(samples, classes, small_config(1));
  CHECK(model.concept_count() == 4);
  std::size_t io = 0, ii = 0;
  for (const auto &e : model.edges) (e.kind == EdgeKind::input_output ? io : ii)++;
  CHECK(io == 4);
  CHECK(ii == 2);
}

TEST_CASE("training preconditions") {
  fixtures::BlobSpec spec;
  spec.packs_per_class = 3;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "class1"}, {2, "class2"}, {3, "class3"}};
  try {
    (void)train(samples, classes, small_config(4));
    FAIL("expected a training error");
  } catch (const TrainingError &e) {
    CHECK(std::string(e.what()).find("class2") != std::string::npos);
  }
  const std::vector<ClassSpec> lonely{{1, "class1"}};
  CHECK_THROWS_AS((void)train(samples, lonely, small_config(1)), TrainingError);
  TrainingConfig bad = small_config(1);
  bad.e_b = 1;
  CHECK_THROWS_AS((void)train(samples, classes, bad), InvalidValueError);
}

TEST_CASE("training is deterministic") {
  fixtures::BlobSpec spec;
  spec.packs_per_class = 10;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "class1"}, {2, "class2"}, {3, "class3"}};
  CHECK(model_to_text(train(samples, classes, small_config(2))) ==
        model_to_text(train(samples, classes, small_config(2))));
}

TEST_CASE("class manifest parsing") {
  const auto cs = parse_class_manifest("# header\n2,dog\r\n\n1,cat\n");
  REQUIRE(cs.size() == 2);
  CHECK(cs[0] == ClassSpec{1, "cat"});
  CHECK(cs[1] == ClassSpec{2, "dog"});
  CHECK(parse_class_manifest("1,a,b\n2,c\n")[0].name == "a,b");
  CHECK_THROWS_AS((void)parse_class_manifest(""), FormatError);
  CHECK_THROWS_AS((void)parse_class_manifest("1,a\n1,b\n"), FormatError);
  CHECK_THROWS_AS((void)parse_class_manifest("1,a\n3,b\n"), FormatError);
  CHECK_THROWS_AS((void)parse_class_manifest("x,a\n"), FormatError);
  CHECK_THROWS_AS((void)parse_class_manifest("1\n"), FormatError);
  CHECK_THROWS_AS((void)parse_class_manifest("1,\n"), FormatError);
}

TEST_CASE("grid search") {
  fixtures::BlobSpec spec;
  spec.packs_per_class = 9;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "class1"}, {2, "class2"}, {3, "class3"}};
  const TrainingConfig base;

  const auto single = grid_search(samples, classes, base, {2, 2}, {4, 4}, 3);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.best.clusters_per_class == 2);
  CHECK(single.best.e_b == 4);
  CHECK(single.best.e_q == 4);

  const auto fwd = grid_search(samples, classes, base, {1, 3}, {3, 4}, 3);
  const auto rev = grid_search(samples, classes, base, {3, 1}, {4, 3}, 3);
  REQUIRE(fwd.rows.size() == 6);
  CHECK(fwd.best.clusters_per_class == rev.best.clusters_per_class);
  CHECK(fwd.best.e_b == rev.best.e_b);
  for (std::size_t k = 1; k < fwd.rows.size(); ++k) {
    const auto &a = fwd.rows[k - 1], &b = fwd.rows[k];
    CHECK(a.accuracy >= b.accuracy);
    if (a.accuracy == b.accuracy) CHECK(a.model_size <= b.model_size);
  }
  CHECK(fwd.rows.front().accuracy >= 0.9);

  CHECK_THROWS_AS((void)grid_search(samples, classes, base, {2, 2}, {4, 4}, 1), InvalidValueError);
}
