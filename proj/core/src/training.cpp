#include "ifcm/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ifcm/error.hpp"
#include "ifcm/inference.hpp"

namespace ifcm {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void TrainingConfig::validate() const {
  if (clusters_per_class < 1) throw InvalidValueError("clusters per class must be >= 1");
  if (e_b < 2 || e_q < 2) throw InvalidValueError("fuzzy-set counts E_b and E_q must be >= 2");
  if (partition_levels != 3 && partition_levels != 5 && partition_levels != 7) {
    throw InvalidValueError("partition levels must be 3, 5 or 7");
  }
  reasoning.validate();
}

std::vector<Medoid> mine_concepts(std::span<const ClassFeatures> classes, std::size_t m_f, std::uint64_t seed) {
  if (m_f < 1) throw InvalidValueError("mine_concepts: m_f must be >= 1");
  std::vector<Medoid> out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto &cls = classes[c];
    if (cls.vectors.size() < m_f) {
      throw TrainingError("class '" + cls.name + "' has " + std::to_string(cls.vectors.size()) +
                          " feature vectors, fewer than " + std::to_string(m_f) + " clusters");
    }
    KMeansOptions opts;
    opts.seed = mix_seed(seed, static_cast<std::uint64_t>(c));
    const KMeansResult km = kmeans(cls.vectors, m_f, opts);
    const auto members = snap_to_members(cls.vectors, km);
    for (std::size_t k = 0; k < members.size(); ++k) {
      out.push_back({cls.vectors[members[k]], cls.class_id, cls.name + "-part" + std::to_string(k + 1)});
    }
  }
  return out;
}

std::vector<double> similarity(std::span<const Vector> d_set, std::span<const Vector> medoids) {
  const std::size_t m = medoids.size();
  if (m < 2) throw InvalidValueError("similarity needs at least two medoids");
  if (d_set.empty()) throw InvalidValueError("similarity needs at least one region");
  const std::size_t dim = medoids.front().size();
  for (const auto &r : medoids) {
    if (r.size() != dim) throw DimensionMismatchError("medoids differ in dimension");
  }
  std::vector<double> z(m, 0.0);
  std::vector<double> dist(m);
  for (const auto &d : d_set) {
    if (d.size() != dim) {
      throw DimensionMismatchError("region feature dimension " + std::to_string(d.size()) +
                                   " does not match medoid dimension " + std::to_string(dim));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      dist[i] = euclidean_distance(d, medoids[i]);
      total += dist[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      z[i] += total > 0.0 ? 1.0 - dist[i] / total : 1.0 - 1.0 / static_cast<double>(m);
    }
  }
  const auto p = static_cast<double>(d_set.size());
  for (auto &v : z) v = std::clamp(v / p, 0.0, 1.0);
  return z;
}

std::vector<double> similarity(std::span<const Vector> d_set, std::span<const Medoid> medoids) {
  std::vector<Vector> vectors;
  vectors.reserve(medoids.size());
  for (const auto &m : medoids) vectors.push_back(m.vector);
  return similarity(d_set, vectors);
}

std::vector<MembershipFunction> build_mf_family(std::span<const double> values, std::size_t e, MfShape shape,
                                                std::uint64_t seed) {
  if (values.empty()) throw InvalidValueError("build_mf_family needs at least one value");
  if (e < 1) throw InvalidValueError("build_mf_family: e must be >= 1");
  std::set<double> distinct(values.begin(), values.end());
  e = std::min(e, distinct.size());

  std::vector<Vector> points;
  points.reserve(values.size());
  for (double v : values) points.push_back({std::clamp(v, 0.0, 1.0)});
  KMeansOptions opts;
  opts.seed = seed;
  const KMeansResult km = kmeans(points, e, opts);
  std::vector<double> apexes;
  for (std::size_t idx : snap_to_members(points, km)) apexes.push_back(points[idx][0]);
  std::sort(apexes.begin(), apexes.end());
  apexes.erase(std::unique(apexes.begin(), apexes.end()), apexes.end());

  const std::size_t n = apexes.size();
  std::vector<MembershipFunction> family;
  family.reserve(n);
  if (shape == MfShape::gaussian) {
    for (std::size_t k = 0; k < n; ++k) {
      double gap = 1.0;
      if (k > 0) gap = std::min(gap, apexes[k] - apexes[k - 1]);
      if (k + 1 < n) gap = std::min(gap, apexes[k + 1] - apexes[k]);
      family.push_back(MembershipFunction::gaussian(apexes[k], std::max(0.05, 0.5 * gap)));
    }
    return family;
  }
  if (n == 1) {
    family.push_back(MembershipFunction::trapezoidal(0.0, 0.0, 1.0, 1.0));
    return family;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0) {
      family.push_back(MembershipFunction::trapezoidal(0.0, 0.0, apexes[0], apexes[1]));
    } else if (k + 1 == n) {
      family.push_back(MembershipFunction::trapezoidal(apexes[k - 1], apexes[k], 1.0, 1.0));
    } else {
      family.push_back(MembershipFunction::triangular(apexes[k - 1], apexes[k], apexes[k + 1]));
    }
  }
  return family;
}

PairingResult pair_ifs(std::span<const MembershipFunction> b_family, std::span<const MembershipFunction> q_family,
                       const LinguisticPartition &partition) {
  if (b_family.empty() || q_family.empty()) throw EmptyAggregationError("pair_ifs needs non-empty families");
  PairingResult out;
  for (const auto &b : b_family) {
    for (const auto &q : q_family) {
      IntuitionisticFuzzySet s{b, q, partition.label_for(b.apex())};
      if (ifs_validate(s)) out.sets.push_back(std::move(s));
    }
  }
  if (!out.sets.empty()) return out;
  out.scaled = true;
  for (const auto &b : b_family) {
    for (const auto &q : q_family) {
      out.sets.push_back(
          {FuzzyFunction::scaled(b, 0.5), FuzzyFunction::scaled(q, 0.5), partition.label_for(b.apex())});
    }
  }
  return out;
}

namespace {

EdgeRelation defuzzify(IntuitionisticFuzzySet relation, std::span<const double> samples) {
  EdgeRelation out{IfValue{}, std::move(relation), std::nullopt};
  try {
    const double z = icoa(out.relation, samples);
    out.weight = IfValue::clamped(out.relation.mu(z), out.relation.gamma(z));
    out.centroid = z;
  } catch (const IndeterminateRelationError &) {
    out.weight = IfValue{};
  }
  return out;
}

}  // namespace

EdgeRelation weight_input_output(std::span<const IntuitionisticFuzzySet> ifs_set,
                                 std::span<const double> same_class_sims) {
  return defuzzify(ifs_union(ifs_set), same_class_sims);
}

EdgeRelation weight_input_input(std::span<const IntuitionisticFuzzySet> ifs_i,
                                std::span<const IntuitionisticFuzzySet> ifs_j, std::span<const double> sims_i,
                                std::span<const double> sims_j) {
  std::vector<double> pooled(sims_i.begin(), sims_i.end());
  pooled.insert(pooled.end(), sims_j.begin(), sims_j.end());
  return defuzzify(ifs_intersection(ifs_union(ifs_i), ifs_union(ifs_j)), pooled);
}

IfcmModel train(std::span<const LabeledRegions> samples, std::span<const ClassSpec> classes,
                const TrainingConfig &cfg) {
  cfg.validate();
  if (classes.size() < 2) throw TrainingError("training needs at least two classes");
  std::map<std::int32_t, std::size_t> class_pos;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!class_pos.emplace(classes[c].id, c).second) {
      throw TrainingError("duplicate class id " + std::to_string(classes[c].id));
    }
  }

  std::vector<ClassFeatures> per_class(classes.size());
  std::vector<std::size_t> images(classes.size(), 0);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    per_class[c].class_id = classes[c].id;
    per_class[c].name = classes[c].name;
  }
  for (const auto &s : samples) {
    const auto it = class_pos.find(s.class_id);
    if (it == class_pos.end()) {
      throw TrainingError("image '" + s.image_id + "' has class " + std::to_string(s.class_id) +
                          " missing from the class list");
    }
    if (s.regions.empty()) throw TrainingError("image '" + s.image_id + "' has no regions");
    auto &pc = per_class[it->second];
    pc.vectors.insert(pc.vectors.end(), s.regions.begin(), s.regions.end());
    ++images[it->second];
  }
  std::string short_classes;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (images[c] < cfg.clusters_per_class) {
      if (!short_classes.empty()) short_classes += ", ";
      short_classes += classes[c].name + " (" + std::to_string(images[c]) + " images)";
    }
  }
  if (!short_classes.empty()) {
    throw TrainingError("classes with fewer than " + std::to_string(cfg.clusters_per_class) +
                        " training images: " + short_classes);
  }

  IfcmModel model;
  model.classes.assign(classes.begin(), classes.end());
  model.config = cfg;
  model.medoids = mine_concepts(per_class, cfg.clusters_per_class, cfg.seed);
  const std::size_t m_count = model.medoids.size();
  const std::size_t f_count = classes.size();

  std::vector<std::vector<double>> z_by_image;
  z_by_image.reserve(samples.size());
  for (const auto &s : samples) z_by_image.push_back(similarity(s.regions, model.medoids));

  const LinguisticPartition partition(cfg.partition_levels);
  std::vector<std::vector<double>> same_sims(m_count);
  model.libraries.reserve(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    std::vector<double> other;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      (samples[k].class_id == model.medoids[m].class_id ? same_sims[m] : other).push_back(z_by_image[k][m]);
    }
    MedoidLibrary lib;
    lib.b_family = build_mf_family(same_sims[m], cfg.e_b, cfg.mf_shape, mix_seed(cfg.seed, 1000 + 2 * m));
    lib.q_family = build_mf_family(other, cfg.e_q, cfg.mf_shape, mix_seed(cfg.seed, 1001 + 2 * m));
    PairingResult paired = pair_ifs(lib.b_family, lib.q_family, partition);
    lib.pairs = std::move(paired.sets);
    lib.scaled = paired.scaled;
    lib.relation = ifs_union(lib.pairs);
    lib.relation.label = model.medoids[m].concept_label;
    if (lib.scaled) ++model.diagnostics.scaled_libraries;
    model.libraries.push_back(std::move(lib));
  }

  for (const auto &m : model.medoids) model.concepts.push_back({ConceptKind::input, m.concept_label, m.class_id});
  for (const auto &c : classes) model.concepts.push_back({ConceptKind::output, c.name, c.id});

  auto add_edge = [&](std::size_t from, std::size_t to, EdgeKind kind, const EdgeRelation &rel) {
    Edge e;
    e.from = from;
    e.to = to;
    e.kind = kind;
    e.weight = rel.weight;
    e.relation = rel.relation;
    e.centroid = rel.centroid;
    e.neutral = rel.neutral();
    if (e.neutral) ++model.diagnostics.neutral_edges;
    model.edges.push_back(std::move(e));
  };

  for (std::size_t m = 0; m < m_count; ++m) {
    EdgeRelation own = weight_input_output(model.libraries[m].pairs, same_sims[m]);
    own.relation.label = model.medoids[m].concept_label;
    for (std::size_t c = 0; c < f_count; ++c) {
      const std::size_t out_idx = m_count + c;
      if (classes[c].id == model.medoids[m].class_id) {
        add_edge(m, out_idx, EdgeKind::input_output, own);
      } else {
        // Evidence for the owning class counts against every other class.
        EdgeRelation against{own.weight.swapped(), own.relation.swapped(), own.centroid};
        add_edge(m, out_idx, EdgeKind::input_output, against);
      }
    }
  }
  for (std::size_t i = 0; i < m_count; ++i) {
    for (std::size_t j = i + 1; j < m_count; ++j) {
      EdgeRelation rel =
          weight_input_input(model.libraries[i].pairs, model.libraries[j].pairs, same_sims[i], same_sims[j]);
      rel.relation.label = model.medoids[i].concept_label + " & " + model.medoids[j].concept_label;
      add_edge(i, j, EdgeKind::input_input, rel);
      add_edge(j, i, EdgeKind::input_input, rel);
    }
  }
  model.validate();
  return model;
}

std::vector<LabeledRegions> prepare_samples(std::span<const FeaturePack> packs, const RegionOptions &opts) {
  std::vector<LabeledRegions> out;
  out.reserve(packs.size());
  for (const auto &p : packs) {
    if (!p.class_id) throw TrainingError("pack '" + p.image_id + "' has no class id");
    out.push_back({p.image_id, *p.class_id, extract_regions(p, opts)});
  }
  return out;
}

IfcmModel train(std::span<const FeaturePack> packs, std::span<const ClassSpec> classes, const TrainingConfig &cfg) {
  const auto samples = prepare_samples(packs, cfg.regions);
  return train(samples, classes, cfg);
}

namespace {

std::vector<std::size_t> range_values(IntRange r) {
  std::vector<std::size_t> v;
  if (r.first <= r.last) {
    for (std::size_t x = r.first; x <= r.last; ++x) v.push_back(x);
  } else {
    for (std::size_t x = r.first + 1; x-- > r.last;) v.push_back(x);
  }
  return v;
}

bool row_before(const GridRow &a, const GridRow &b) {
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  if (a.model_size != b.model_size) return a.model_size < b.model_size;
  return a.sets < b.sets;
}

}  // namespace

GridSearchResult grid_search(std::span<const LabeledRegions> samples, std::span<const ClassSpec> classes,
                             const TrainingConfig &base, IntRange cluster_range, IntRange set_range,
                             std::size_t folds) {
  if (folds < 2) throw InvalidValueError("grid search needs at least 2 folds");
  const auto cluster_values = range_values(cluster_range);
  const auto set_values = range_values(set_range);
  if (cluster_values.empty() || set_values.empty()) throw InvalidValueError("grid search ranges must be non-empty");

  // Stratified fold assignment: round-robin within each class, in input order.
  std::vector<std::size_t> fold_of(samples.size());
  std::map<std::int32_t, std::size_t> seen;
  for (std::size_t k = 0; k < samples.size(); ++k) fold_of[k] = seen[samples[k].class_id]++ % folds;

  GridSearchResult result;
  for (std::size_t clusters : cluster_values) {
    for (std::size_t sets : set_values) {
      TrainingConfig cfg = base;
      cfg.clusters_per_class = clusters;
      cfg.e_b = sets;
      cfg.e_q = sets;
      GridRow row{clusters, sets, 0.0, clusters * classes.size() + classes.size(), {}};
      std::size_t correct = 0;
      std::size_t total = 0;
      try {
        for (std::size_t f = 0; f < folds; ++f) {
          std::vector<LabeledRegions> train_set;
          std::vector<const LabeledRegions *> test_set;
          for (std::size_t k = 0; k < samples.size(); ++k) {
            if (fold_of[k] == f) {
              test_set.push_back(&samples[k]);
            } else {
              train_set.push_back(samples[k]);
            }
          }
          const IfcmModel model = train(train_set, classes, cfg);
          for (const auto *s : test_set) {
            const ClassDecision d = classify(model, build_state_vector(s->regions, model));
            correct += d.predicted == s->class_id ? 1 : 0;
            ++total;
          }
        }
        row.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
      } catch (const Error &e) {
        row.accuracy = 0.0;
        row.error = e.what();
      }
      result.rows.push_back(std::move(row));
    }
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), row_before);
  result.best = base;
  result.best.clusters_per_class = result.rows.front().clusters;
  result.best.e_b = result.rows.front().sets;
  result.best.e_q = result.rows.front().sets;
  result.best.cluster_range = cluster_range;
  result.best.set_range = set_range;
  return result;
}

std::vector<ClassSpec> parse_class_manifest(std::string_view text) {
  std::vector<ClassSpec> out;
  std::set<std::int32_t> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("class manifest line " + std::to_string(line_no) + ": expected 'class_id,name'");
    }
    ClassSpec spec;
    try {
      std::size_t used = 0;
      const std::string id_text = line.substr(0, comma);
      spec.id = static_cast<std::int32_t>(std::stoi(id_text, &used));
      if (used != id_text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error &) {
      throw FormatError("class manifest line " + std::to_string(line_no) + ": bad class id");
    }
    spec.name = line.substr(comma + 1);
    if (spec.name.empty()) throw FormatError("class manifest line " + std::to_string(line_no) + ": empty name");
    if (!ids.insert(spec.id).second) {
      throw FormatError("class manifest line " + std::to_string(line_no) + ": duplicate id");
    }
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw FormatError("class manifest is empty");
  std::sort(out.begin(), out.end(), [](const ClassSpec &a, const ClassSpec &b) { return a.id < b.id; });
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k].id != out[k - 1].id + 1) throw FormatError("class ids must be contiguous");
  }
  return out;
}

std::vector<ClassSpec> read_class_manifest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open class manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_class_manifest(ss.str());
}

}  // namespace ifcm
