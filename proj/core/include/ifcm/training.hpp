#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifcm/model.hpp"
#include "ifcm/pack.hpp"

namespace ifcm {

/// Region feature vectors of one labelled training image.
struct LabeledRegions {
  std::string image_id;
  std::int32_t class_id = 0;
  std::vector<Vector> regions;
};

struct ClassFeatures {
  std::int32_t class_id = 0;
  std::string name;
  std::vector<Vector> vectors;
};

/// Per class: k-means into m_f clusters, each centroid snapped to its nearest
/// member. Concept labels are "<class name>-part<k>".
[[nodiscard]] std::vector<Medoid> mine_concepts(std::span<const ClassFeatures> classes, std::size_t m_f,
                                                std::uint64_t seed);

/// Normalized similarity of a region set to every medoid:
/// z_m = (1/P') sum_p (1 - |d_p - r_m| / sum_i |d_p - r_i|).
[[nodiscard]] std::vector<double> similarity(std::span<const Vector> d_set, std::span<const Vector> medoids);
[[nodiscard]] std::vector<double> similarity(std::span<const Vector> d_set, std::span<const Medoid> medoids);

/// Fuzzy-set family over [0,1] peaking at the 1-D k-means medoids of
/// `values`. Triangles reach the neighbouring medoids; the outermost sets
/// become shoulders so the family covers [0,1] without gaps.
[[nodiscard]] std::vector<MembershipFunction> build_mf_family(std::span<const double> values, std::size_t e,
                                                              MfShape shape, std::uint64_t seed = 7);

struct PairingResult {
  std::vector<IntuitionisticFuzzySet> sets;
  /// True when no raw pair was valid and both families were halved.
  bool scaled = false;
};

/// Every (B, Q) pair forming a valid IFS, labelled by the B apex term.
[[nodiscard]] PairingResult pair_ifs(std::span<const MembershipFunction> b_family,
                                     std::span<const MembershipFunction> q_family,
                                     const LinguisticPartition &partition = LinguisticPartition(5));

struct EdgeRelation {
  IfValue weight;
  IntuitionisticFuzzySet relation;
  std::optional<double> centroid;
  [[nodiscard]] bool neutral() const { return !centroid.has_value(); }
};

/// Union of the medoid's IFSs, defuzzified over its same-class similarities.
[[nodiscard]] EdgeRelation weight_input_output(std::span<const IntuitionisticFuzzySet> ifs_set,
                                               std::span<const double> same_class_sims);

/// Intersection of both medoids' unions, defuzzified over the pooled samples.
[[nodiscard]] EdgeRelation weight_input_input(std::span<const IntuitionisticFuzzySet> ifs_i,
                                              std::span<const IntuitionisticFuzzySet> ifs_j,
                                              std::span<const double> sims_i, std::span<const double> sims_j);

[[nodiscard]] IfcmModel train(std::span<const LabeledRegions> samples, std::span<const ClassSpec> classes,
                              const TrainingConfig &cfg);

/// Runs the region pipeline on every pack, then trains.
[[nodiscard]] IfcmModel train(std::span<const FeaturePack> packs, std::span<const ClassSpec> classes,
                              const TrainingConfig &cfg);

[[nodiscard]] std::vector<LabeledRegions> prepare_samples(std::span<const FeaturePack> packs,
                                                          const RegionOptions &opts);

struct GridRow {
  std::size_t clusters = 0;
  std::size_t sets = 0;
  double accuracy = 0.0;
  /// Concept count of a model trained with this configuration.
  std::size_t model_size = 0;
  std::string error;
};

struct GridSearchResult {
  TrainingConfig best;
  /// Sorted by accuracy descending, then model size and set count ascending.
  std::vector<GridRow> rows;
};

/// Exhaustive search over (clusters per class, E_b = E_q) scored by mean
/// stratified k-fold accuracy. Ties go to the smaller model.
[[nodiscard]] GridSearchResult grid_search(std::span<const LabeledRegions> samples, std::span<const ClassSpec> classes,
                                           const TrainingConfig &base, IntRange cluster_range, IntRange set_range,
                                           std::size_t folds);

[[nodiscard]] std::vector<ClassSpec> parse_class_manifest(std::string_view text);
[[nodiscard]] std::vector<ClassSpec> read_class_manifest(const std::filesystem::path &path);

}  // namespace ifcm
