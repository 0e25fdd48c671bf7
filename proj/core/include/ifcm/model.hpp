#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifcm/features.hpp"
#include "ifcm/ifs.hpp"
#include "ifcm/kmeans.hpp"
#include "ifcm/reasoning.hpp"

namespace ifcm {

struct ClassSpec {
  std::int32_t id = 0;
  std::string name;
  friend bool operator==(const ClassSpec &, const ClassSpec &) = default;
};

enum class MfShape { triangular, gaussian };

/// Inclusive integer range; `first` may exceed `last` for descending order.
struct IntRange {
  std::size_t first = 0;
  std::size_t last = 0;
  friend bool operator==(const IntRange &, const IntRange &) = default;
};

struct TrainingConfig {
  std::size_t clusters_per_class = 5;
  std::size_t e_b = 5;
  std::size_t e_q = 5;
  MfShape mf_shape = MfShape::gaussian;
  IntRange cluster_range{5, 50};
  IntRange set_range{5, 15};
  std::uint64_t seed = 20240601;
  std::size_t partition_levels = 5;
  RegionOptions regions{};
  ReasoningConfig reasoning{};
  /// Hold input-concept membership at the observed evidence during
  /// classification (see ReasoningConfig::sustained).
  bool sustain_inputs = true;

  void validate() const;
};

struct Medoid {
  Vector vector;
  std::int32_t class_id = 0;
  std::string concept_label;
};

enum class ConceptKind { input, output };

struct Concept {
  ConceptKind kind = ConceptKind::input;
  std::string label;
  std::int32_t class_id = 0;
};

/// IFS library of one medoid concept: the fuzzy-set families built from
/// same-class (B) and other-class (Q) similarities, the valid pairs, and
/// their union, which characterizes the concept's similarity evidence.
struct MedoidLibrary {
  std::vector<MembershipFunction> b_family;
  std::vector<MembershipFunction> q_family;
  std::vector<IntuitionisticFuzzySet> pairs;
  bool scaled = false;
  IntuitionisticFuzzySet relation;
};

enum class EdgeKind { input_output, input_input };

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeKind kind = EdgeKind::input_output;
  IfValue weight;
  IntuitionisticFuzzySet relation;
  /// Defuzzified similarity the weight was read at; empty for neutral edges.
  std::optional<double> centroid;
  bool neutral = false;
};

struct ModelDiagnostics {
  std::size_t neutral_edges = 0;
  std::size_t scaled_libraries = 0;
  friend bool operator==(const ModelDiagnostics &, const ModelDiagnostics &) = default;
};

/// Trained intuitionistic FCM. Concepts are ordered inputs first (one per
/// medoid), then one output per class in class order.
struct IfcmModel {
  std::vector<ClassSpec> classes;
  std::vector<Concept> concepts;
  std::vector<Medoid> medoids;
  std::vector<MedoidLibrary> libraries;
  std::vector<Edge> edges;
  TrainingConfig config;
  ModelDiagnostics diagnostics;

  [[nodiscard]] std::size_t input_count() const { return medoids.size(); }
  [[nodiscard]] std::size_t concept_count() const { return concepts.size(); }
  [[nodiscard]] std::size_t output_index(std::int32_t class_id) const;
  [[nodiscard]] const ClassSpec &class_spec(std::int32_t class_id) const;
  [[nodiscard]] std::size_t feature_dim() const { return medoids.empty() ? 0 : medoids.front().vector.size(); }

  [[nodiscard]] IfWeightMatrix weight_matrix() const;
  [[nodiscard]] ReasoningConfig reasoning() const;
  [[nodiscard]] LinguisticPartition partition() const { return LinguisticPartition(config.partition_levels); }

  /// Throws Error describing the first broken invariant.
  void validate() const;
};

}  // namespace ifcm
