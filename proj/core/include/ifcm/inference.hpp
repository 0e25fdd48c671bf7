#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifcm/model.hpp"
#include "ifcm/reasoning.hpp"

namespace ifcm {

/// Initial state: <mu, gamma> of each medoid's relation IFS at the observed
/// similarity, followed by <0, 1> for every output concept.
[[nodiscard]] IfcmState build_state_vector(std::span<const Vector> d_set, const IfcmModel &model);

struct OutputScore {
  std::int32_t class_id = 0;
  IfValue value;
  double real_hesitancy = 0.0;
};

struct ClassDecision {
  std::int32_t predicted = 0;
  std::optional<std::int32_t> runner_up;
  std::vector<OutputScore> outputs;
  std::size_t iterations = 0;
  bool converged = false;
  ReasoningTrace trace;
  ReasoningConfig config;
};

/// Reasons to steady state and picks the output with the highest final
/// membership; ties go to lower real hesitancy, then to the lower class id.
[[nodiscard]] ClassDecision classify(const IfcmModel &model, const IfcmState &state, const ReasoningConfig &cfg);
[[nodiscard]] ClassDecision classify(const IfcmModel &model, const IfcmState &state);

enum class Polarity { positive, negative };

struct Clause {
  std::size_t concept_index = 0;
  std::string concept_label;
  std::int32_t class_id = 0;
  double initial_mu = 0.0;
  double mu = 0.0;
  double hesitancy = 0.0;
  std::string similarity_term;
  std::string hesitancy_term;
  Polarity polarity = Polarity::positive;
};

struct Explanation {
  std::int32_t predicted = 0;
  std::string predicted_name;
  std::optional<std::int32_t> runner_up;
  std::string runner_up_name;
  std::vector<Clause> positive;
  std::vector<Clause> negative;

  /// Two bullet lines: why the winning class, why not the runner-up.
  [[nodiscard]] std::string text() const;
};

[[nodiscard]] Explanation explain(const ClassDecision &decision, const IfcmState &state0, const IfcmModel &model);

/// Trace of the decision as CSV (see write_trace_csv).
[[nodiscard]] std::string trace_export(const ClassDecision &decision);

}  // namespace ifcm
