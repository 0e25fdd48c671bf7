#include "ifcm/inference.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ifcm/error.hpp"
#include "ifcm/training.hpp"

namespace ifcm {

IfcmState build_state_vector(std::span<const Vector> d_set, const IfcmModel &model) {
  const std::size_t dim = model.feature_dim();
  for (const auto &d : d_set) {
    if (d.size() != dim) {
      throw DimensionMismatchError("region feature dimension " + std::to_string(d.size()) +
                                   " does not match the model's " + std::to_string(dim));
    }
  }
  const auto z = similarity(d_set, model.medoids);
  IfcmState state;
  state.reserve(model.concept_count());
  for (std::size_t m = 0; m < z.size(); ++m) {
    const auto &rel = model.libraries[m].relation;
    // Grid validity leaves room for a 1e-12 overshoot between grid points.
    state.push_back(IfValue::clamped(rel.mu(z[m]), rel.gamma(z[m])));
  }
  for (std::size_t c = 0; c < model.classes.size(); ++c) state.emplace_back(0.0, 1.0);
  return state;
}

ClassDecision classify(const IfcmModel &model, const IfcmState &state, const ReasoningConfig &cfg) {
  if (state.size() != model.concept_count()) {
    throw DimensionMismatchError("state has " + std::to_string(state.size()) + " concepts, model has " +
                                 std::to_string(model.concept_count()));
  }
  if (model.classes.empty()) throw InvalidValueError("model has no output concepts");
  ClassDecision d;
  d.config = cfg;
  d.trace = run_reasoning(state, model.weight_matrix(), cfg);
  d.iterations = d.trace.iterations;
  d.converged = d.trace.converged;
  const auto &final_state = d.trace.final_state();
  for (const auto &c : model.classes) {
    const IfValue v = final_state[model.output_index(c.id)];
    d.outputs.push_back({c.id, v, real_hesitancy(v, cfg)});
  }
  std::vector<std::size_t> order(d.outputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &x = d.outputs[a];
    const auto &y = d.outputs[b];
    if (x.value.mu() != y.value.mu()) return x.value.mu() > y.value.mu();
    if (x.real_hesitancy != y.real_hesitancy) return x.real_hesitancy < y.real_hesitancy;
    return x.class_id < y.class_id;
  });
  d.predicted = d.outputs[order[0]].class_id;
  if (order.size() > 1) d.runner_up = d.outputs[order[1]].class_id;
  return d;
}

ClassDecision classify(const IfcmModel &model, const IfcmState &state) {
  return classify(model, state, model.reasoning());
}

namespace {

std::vector<Clause> clauses_for(std::int32_t class_id, Polarity polarity, const ClassDecision &decision,
                                const IfcmState &state0, const IfcmModel &model, const LinguisticPartition &part) {
  std::vector<Clause> out;
  const auto &fin = decision.trace.final_state();
  for (std::size_t m = 0; m < model.input_count(); ++m) {
    if (model.concepts[m].class_id != class_id) continue;
    Clause c;
    c.concept_index = m;
    c.concept_label = model.concepts[m].label;
    c.class_id = class_id;
    c.initial_mu = state0[m].mu();
    c.mu = fin[m].mu();
    c.hesitancy = reported_hesitancy(fin[m], decision.config, m, decision.trace.iterations);
    c.similarity_term = part.label_for(c.mu);
    c.hesitancy_term = part.label_for(c.hesitancy);
    c.polarity = polarity;
    out.push_back(std::move(c));
  }
  return out;
}

std::string render(const std::string &lead, const std::string &class_name, const std::vector<Clause> &clauses) {
  std::ostringstream s;
  s << "- The input image " << lead << " \"" << class_name << "\" because it has ";
  for (std::size_t k = 0; k < clauses.size(); ++k) {
    const auto &c = clauses[k];
    if (k > 0) s << "; ";
    s << '(' << static_cast<char>('a' + k % 26) << ") " << c.similarity_term << " similarity with "
      << c.hesitancy_term << " hesitancy with C_" << c.concept_index + 1 << " = \"" << c.concept_label << '"';
  }
  s << '.';
  return s.str();
}

}  // namespace

Explanation explain(const ClassDecision &decision, const IfcmState &state0, const IfcmModel &model) {
  if (decision.trace.states.empty() || state0.size() != model.concept_count()) {
    throw DimensionMismatchError("decision does not belong to this model");
  }
  const LinguisticPartition part = model.partition();
  Explanation e;
  e.predicted = decision.predicted;
  e.predicted_name = model.class_spec(decision.predicted).name;
  e.positive = clauses_for(decision.predicted, Polarity::positive, decision, state0, model, part);
  if (decision.runner_up) {
    e.runner_up = decision.runner_up;
    e.runner_up_name = model.class_spec(*decision.runner_up).name;
    e.negative = clauses_for(*decision.runner_up, Polarity::negative, decision, state0, model, part);
  }
  return e;
}

std::string Explanation::text() const {
  std::string out = render("is classified as", predicted_name, positive) + '\n';
  if (runner_up) out += render("cannot be classified as", runner_up_name, negative) + '\n';
  return out;
}

std::string trace_export(const ClassDecision &decision) {
  std::ostringstream s;
  write_trace_csv(s, trace_rows(decision.trace, decision.config));
  return s.str();
}

}  // namespace ifcm
