#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "ifcm/error.hpp"
#include "ifcm/inference.hpp"
#include "ifcm/training.hpp"

using namespace ifcm;

namespace {

// Hand-built model: one input concept per class on a 1-D feature line, own
// class edge `w`, other classes the swapped weight, inputs linked by `link`.
IfcmModel toy_model(std::size_t classes, IfValue w, IfValue link) {
  IfcmModel m;
  const IntuitionisticFuzzySet rel{MembershipFunction::triangular(0, 0.5, 1),
                                   FuzzyFunction::constant(0.0), "rel"};
  const std::size_t inputs = std::max<std::size_t>(classes, 2);
  for (std::size_t c = 0; c < classes; ++c) m.classes.push_back({static_cast<std::int32_t>(c + 1), "k" + std::to_string(c + 1)});
  for (std::size_t i = 0; i < inputs; ++i) {
    const auto cls = static_cast<std::int32_t>(i % classes + 1);
    m.medoids.push_back({{static_cast<double>(i)}, cls, "k" + std::to_string(cls) + "-part" + std::to_string(i + 1)});
    m.libraries.push_back({{}, {}, {rel}, false, rel});
    m.concepts.push_back({ConceptKind::input, m.medoids.back().concept_label, cls});
  }
  for (const auto &c : m.classes) m.concepts.push_back({ConceptKind::output, c.name, c.id});
  for (std::size_t i = 0; i < inputs; ++i) {
    for (std::size_t c = 0; c < classes; ++c) {
      const bool own = m.medoids[i].class_id == m.classes[c].id;
      m.edges.push_back({i, inputs + c, EdgeKind::input_output, own ? w : w.swapped(), rel, 0.5, false});
    }
    for (std::size_t j = 0; j < inputs; ++j) {
      if (j != i) m.edges.push_back({i, j, EdgeKind::input_input, link, rel, 0.5, false});
    }
  }
  return m;
}

}  // namespace

TEST_CASE("state vector at the relation apex") {
  const auto m = toy_model(2, IfValue(0.7, 0.2), IfValue(0.3, 0.3));
  // equidistant from both medoids: z = 0.5 for both, the triangle apex
  const std::vector<Vector> d{{0.5}};
  const auto s = build_state_vector(d, m);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == IfValue(1.0, 0.0));
  CHECK(s[1] == IfValue(1.0, 0.0));
  CHECK(s[2] == IfValue(0.0, 1.0));
  CHECK(s[3] == IfValue(0.0, 1.0));
  const std::vector<Vector> wrong{{0.5, 0.5}};
  CHECK_THROWS_AS((void)build_state_vector(wrong, m), DimensionMismatchError);
}

TEST_CASE("state vector replays training-time characterization") {
  fixtures::BlobSpec spec;
  spec.packs_per_class = 8;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "class1"}, {2, "class2"}, {3, "class3"}};
  TrainingConfig cfg;
  cfg.clusters_per_class = 2;
  const auto model = train(samples, classes, cfg);
  for (const auto &s : samples) {
    const auto state = build_state_vector(s.regions, model);
    const auto z = similarity(s.regions, model.medoids);
    for (std::size_t m = 0; m < model.input_count(); ++m) {
      const auto &rel = model.libraries[m].relation;
      REQUIRE(state[m].mu() == rel.mu(z[m]));
      REQUIRE(std::abs(state[m].gamma() - std::min(rel.gamma(z[m]), 1.0 - rel.mu(z[m]))) <= 1e-12);
    }
    for (std::size_t c = 0; c < 3; ++c) REQUIRE(state[model.input_count() + c] == IfValue(0.0, 1.0));
  }
}

TEST_CASE("single-class model picks that class") {
  const auto m = toy_model(1, IfValue(0.6, 0.1), IfValue(0.2, 0.2));
  const IfcmState s{IfValue(0.3, 0.4), IfValue(0.1, 0.8), IfValue(0.0, 1.0)};
  const auto d = classify(m, s);
  CHECK(d.predicted == 1);
  CHECK_FALSE(d.runner_up);
  CHECK(d.outputs.size() == 1);
}

TEST_CASE("symmetric two-class tie goes to class 1") {
  const auto m = toy_model(2, IfValue(0.6, 0.2), IfValue(0.3, 0.3));
  const IfcmState s{IfValue(0.5, 0.3), IfValue(0.5, 0.3), IfValue(0.0, 1.0), IfValue(0.0, 1.0)};
  const auto d = classify(m, s);
  REQUIRE(d.outputs.size() == 2);
  CHECK(d.outputs[0].value == d.outputs[1].value);
  CHECK(d.predicted == 1);
  CHECK(d.runner_up == 2);
  CHECK_THROWS_AS((void)classify(m, IfcmState{IfValue(0.5, 0.3)}), DimensionMismatchError);
}

TEST_CASE("stronger evidence wins and the decision is deterministic") {
  const auto m = toy_model(2, IfValue(0.6, 0.2), IfValue(0.1, 0.1));
  const IfcmState s{IfValue(0.2, 0.7), IfValue(0.9, 0.05), IfValue(0.0, 1.0), IfValue(0.0, 1.0)};
  const auto a = classify(m, s);
  const auto b = classify(m, s);
  CHECK(a.predicted == 2);
  CHECK(a.trace.states == b.trace.states);
  CHECK(trace_export(a) == trace_export(b));
  CHECK(a.converged);
  for (const auto &v : a.trace.final_state()) CHECK(v.gamma() < 1e-4);
}

TEST_CASE("explanation golden text") {
  IfcmModel m;
  m.classes = {{1, "Flamingo"}, {2, "Rhino"}};
  m.medoids = {{{0.0}, 1, "Flamingo-head"}, {{1.0}, 2, "Rhino-body"}};
  m.concepts = {{ConceptKind::input, "Flamingo-head", 1},
                {ConceptKind::input, "Rhino-body", 2},
                {ConceptKind::output, "Flamingo", 1},
                {ConceptKind::output, "Rhino", 2}};

  ClassDecision d;
  d.config = m.reasoning();
  REQUIRE(d.config.sustained == 2);
  // sustained concepts report 1 - mu - F^-1(gamma); pick gamma so that is 0.03
  const IfValue head(0.95, std::tanh(0.02));
  const IfValue body(0.1, 0.0);
  const IfcmState s0{IfValue(0.95, 0.04), IfValue(0.1, 0.5), IfValue(0.0, 1.0), IfValue(0.0, 1.0)};
  d.trace.states = {s0, {head, body, IfValue(0.9, 0.0), IfValue(0.3, 0.0)}};
  d.trace.iterations = 1;
  d.trace.converged = true;
  d.iterations = 1;
  d.converged = true;
  d.predicted = 1;
  d.runner_up = 2;

  const auto e = explain(d, s0, m);
  REQUIRE(e.positive.size() == 1);
  CHECK(e.positive[0].hesitancy == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(e.positive[0].similarity_term == "Very High");
  CHECK(e.positive[0].hesitancy_term == "Very Low");
  CHECK(e.positive[0].polarity == Polarity::positive);
  REQUIRE(e.negative.size() == 1);
  CHECK(e.negative[0].polarity == Polarity::negative);
  CHECK(e.text() ==
        "- The input image is classified as \"Flamingo\" because it has (a) Very High similarity with Very Low "
        "hesitancy with C_1 = \"Flamingo-head\".\n"
        "- The input image cannot be classified as \"Rhino\" because it has (a) Very Low similarity with Very High "
        "hesitancy with C_2 = \"Rhino-body\".\n");
  CHECK(e.text().find("Very High similarity with Very Low hesitancy") != std::string::npos);
}

TEST_CASE("explanation clauses stay within their class") {
  fixtures::BlobSpec spec;
  spec.packs_per_class = 8;
  const auto samples = fixtures::blob_regions(spec);
  const std::vector<ClassSpec> classes{{1, "class1"}, {2, "class2"}, {3, "class3"}};
  TrainingConfig cfg;
  cfg.clusters_per_class = 2;
  const auto model = train(samples, classes, cfg);
  const auto s0 = build_state_vector(samples[0].regions, model);
  const auto d = classify(model, s0);
  const auto e = explain(d, s0, model);
  CHECK(e.positive.size() == 2);
  CHECK(e.negative.size() == 2);
  for (const auto &c : e.positive) CHECK(model.concepts[c.concept_index].class_id == d.predicted);
  for (const auto &c : e.negative) CHECK(model.concepts[c.concept_index].class_id == *d.runner_up);
  const LinguisticPartition part(5);
  const auto &terms = part.terms();
  for (const auto &c : e.positive) {
    bool found = false;
    for (const auto &t : terms) found = found || t.label == c.similarity_term;
    CHECK(found);
  }
}

TEST_CASE("a medium membership maps to Medium") {
  CHECK(LinguisticPartition(5).label_for(0.5) == "Medium");
}

TEST_CASE("trace export") {
  ClassDecision d;
  d.trace.states = {{IfValue(0.5, 0.2), IfValue(0.0, 1.0)}, {IfValue(0.6, 0.1), IfValue(0.3, 0.4)}};
  d.trace.iterations = 1;
  const auto csv = trace_export(d);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,concept_id,mu,gamma,hesitancy");
  std::istringstream again(csv);
  const auto rows = read_trace_csv(again);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].iteration == 0);
  CHECK(rows[3].iteration == 1);
  CHECK(rows[3].concept_id == 1);
  const auto direct = trace_rows(d.trace, d.config);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(rows[k].mu == doctest::Approx(direct[k].mu).epsilon(1e-8));
    CHECK(rows[k].gamma == doctest::Approx(direct[k].gamma).epsilon(1e-8));
    CHECK(rows[k].hesitancy == doctest::Approx(direct[k].hesitancy).epsilon(1e-8));
  }
}
