#include "ifcm/model.hpp"

#include <map>
#include <set>

#include "ifcm/error.hpp"

namespace ifcm {

std::size_t IfcmModel::output_index(std::int32_t class_id) const {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].id == class_id) return medoids.size() + c;
  }
  throw InvalidValueError("unknown class id " + std::to_string(class_id));
}

const ClassSpec &IfcmModel::class_spec(std::int32_t class_id) const {
  for (const auto &c : classes) {
    if (c.id == class_id) return c;
  }
  throw InvalidValueError("unknown class id " + std::to_string(class_id));
}

IfWeightMatrix IfcmModel::weight_matrix() const {
  IfWeightMatrix w(concept_count());
  for (const auto &e : edges) w.set(e.from, e.to, e.weight);
  return w;
}

ReasoningConfig IfcmModel::reasoning() const {
  ReasoningConfig cfg = config.reasoning;
  cfg.sustained = config.sustain_inputs ? input_count() : 0;
  return cfg;
}

void IfcmModel::validate() const {
  config.validate();
  if (classes.empty()) throw Error("model has no classes");
  std::set<std::int32_t> ids;
  for (const auto &c : classes) {
    if (!ids.insert(c.id).second) throw Error("duplicate class id " + std::to_string(c.id));
  }
  const std::size_t m_count = medoids.size();
  const std::size_t f_count = classes.size();
  if (concepts.size() != m_count + f_count) throw Error("concept count is not medoids + classes");
  if (libraries.size() != m_count) throw Error("one IFS library per medoid expected");
  const std::size_t dim = feature_dim();
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto &md = medoids[m];
    if (md.vector.empty() || md.vector.size() != dim) throw Error("medoid vectors differ in dimension");
    if (!ids.count(md.class_id)) throw Error("medoid refers to an unknown class");
    const auto &c = concepts[m];
    if (c.kind != ConceptKind::input || c.class_id != md.class_id || c.label != md.concept_label) {
      throw Error("input concept " + std::to_string(m) + " does not match its medoid");
    }
    if (!ifs_validate(libraries[m].relation)) throw Error("relation IFS of concept " + c.label + " is invalid");
  }
  for (std::size_t c = 0; c < f_count; ++c) {
    const auto &k = concepts[m_count + c];
    if (k.kind != ConceptKind::output || k.class_id != classes[c].id) {
      throw Error("output concept " + std::to_string(m_count + c) + " does not match class order");
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t io = 0;
  std::size_t ii = 0;
  std::size_t neutral = 0;
  for (const auto &e : edges) {
    if (e.from >= m_count) throw Error("edges may only leave input concepts");
    if (e.to >= concepts.size() || e.from == e.to) throw Error("edge endpoint out of range");
    if (!seen.insert({e.from, e.to}).second) throw Error("duplicate edge");
    const bool to_output = e.to >= m_count;
    if (to_output != (e.kind == EdgeKind::input_output)) throw Error("edge kind disagrees with its endpoints");
    (to_output ? io : ii) += 1;
    if (e.neutral != !e.centroid.has_value()) throw Error("edge neutrality disagrees with its centroid");
    neutral += e.neutral ? 1 : 0;
  }
  if (!edges.empty()) {
    if (io != m_count * f_count || ii != m_count * (m_count - 1)) throw Error("model topology is incomplete");
    std::map<std::pair<std::size_t, std::size_t>, IfValue> ii_weight;
    for (const auto &e : edges) {
      if (e.kind == EdgeKind::input_input) ii_weight.emplace(std::pair{e.from, e.to}, e.weight);
    }
    for (const auto &[key, w] : ii_weight) {
      const auto it = ii_weight.find({key.second, key.first});
      if (it == ii_weight.end() || !(it->second == w)) throw Error("input-input weights are not symmetric");
    }
  }
  if (neutral != diagnostics.neutral_edges) throw Error("neutral edge count disagrees with diagnostics");
}

}  // namespace ifcm
