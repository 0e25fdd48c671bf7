#include "ifcm/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ifcm/error.hpp"
#include "ifcm/pack.hpp"

namespace ifcm {

namespace {

using nlohmann::json;

constexpr const char *kFormatName = "ifcm-model";

json mf_to_json(const MembershipFunction &mf) {
  return std::visit(
      [](const auto &s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Triangular>) {
          return {{"shape", "triangular"}, {"params", {s.a, s.b, s.c}}};
        } else if constexpr (std::is_same_v<T, Trapezoidal>) {
          return {{"shape", "trapezoidal"}, {"params", {s.a, s.b, s.c, s.d}}};
        } else {
          return {{"shape", "gaussian"}, {"params", {s.center, s.sigma}}};
        }
      },
      mf.shape());
}

MembershipFunction mf_from_json(const json &j) {
  const auto shape = j.at("shape").get<std::string>();
  const auto p = j.at("params").get<std::vector<double>>();
  if (shape == "triangular" && p.size() == 3) return MembershipFunction::triangular(p[0], p[1], p[2]);
  if (shape == "trapezoidal" && p.size() == 4) return MembershipFunction::trapezoidal(p[0], p[1], p[2], p[3]);
  if (shape == "gaussian" && p.size() == 2) return MembershipFunction::gaussian(p[0], p[1]);
  throw CorruptionError("unknown membership shape '" + shape + "'");
}

json fn_to_json(const FuzzyFunction &f) {
  switch (f.op()) {
    case FuzzyFunction::Op::leaf:
      return {{"op", "leaf"}, {"mf", mf_to_json(f.leaf())}};
    case FuzzyFunction::Op::constant:
      return {{"op", "constant"}, {"value", f.factor()}};
    case FuzzyFunction::Op::scale:
      return {{"op", "scale"}, {"factor", f.factor()}, {"arg", fn_to_json(f.args().front())}};
    case FuzzyFunction::Op::max:
    case FuzzyFunction::Op::min: {
      json args = json::array();
      for (const auto &a : f.args()) args.push_back(fn_to_json(a));
      return {{"op", f.op() == FuzzyFunction::Op::max ? "max" : "min"}, {"args", std::move(args)}};
    }
  }
  throw Error("unreachable fuzzy function op");
}

FuzzyFunction fn_from_json(const json &j) {
  const auto op = j.at("op").get<std::string>();
  if (op == "leaf") return FuzzyFunction(mf_from_json(j.at("mf")));
  if (op == "constant") return FuzzyFunction::constant(j.at("value").get<double>());
  if (op == "scale") return FuzzyFunction::scaled(fn_from_json(j.at("arg")), j.at("factor").get<double>());
  if (op == "max" || op == "min") {
    std::vector<FuzzyFunction> args;
    for (const auto &a : j.at("args")) args.push_back(fn_from_json(a));
    if (args.size() < 2) throw CorruptionError("composite fuzzy function needs at least two arguments");
    return op == "max" ? FuzzyFunction::maximum(std::move(args)) : FuzzyFunction::minimum(std::move(args));
  }
  throw CorruptionError("unknown fuzzy function op '" + op + "'");
}

json ifs_to_json(const IntuitionisticFuzzySet &s) {
  return {{"mu", fn_to_json(s.mu)}, {"gamma", fn_to_json(s.gamma)}, {"label", s.label}};
}

IntuitionisticFuzzySet ifs_from_json(const json &j) {
  return {fn_from_json(j.at("mu")), fn_from_json(j.at("gamma")), j.at("label").get<std::string>()};
}

bool same_functions(const IntuitionisticFuzzySet &a, const IntuitionisticFuzzySet &b) {
  return a.mu == b.mu && a.gamma == b.gamma;
}

// Mirrors ifs_intersection without the grid re-check; used to rebuild edge
// relations that are stored by reference.
IntuitionisticFuzzySet intersect(const IntuitionisticFuzzySet &a, const IntuitionisticFuzzySet &b) {
  if (same_functions(a, b)) return a;
  return {FuzzyFunction::minimum({a.mu, b.mu}), FuzzyFunction::maximum({a.gamma, b.gamma}), {}};
}

json transfer_to_json(const TransferFunction &t) {
  const char *kind = t.kind() == TransferKind::sigmoid ? "sigmoid" : t.kind() == TransferKind::tanh ? "tanh" : "identity";
  return {{"kind", kind}, {"steepness", t.steepness()}};
}

TransferFunction transfer_from_json(const json &j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "sigmoid") return TransferFunction::sigmoid(j.at("steepness").get<double>());
  if (kind == "tanh") return TransferFunction::tanh();
  if (kind == "identity") return TransferFunction::identity();
  throw CorruptionError("unknown transfer function '" + kind + "'");
}

json config_to_json(const TrainingConfig &c) {
  return {
      {"clusters_per_class", c.clusters_per_class},
      {"e_b", c.e_b},
      {"e_q", c.e_q},
      {"mf_shape", c.mf_shape == MfShape::gaussian ? "gaussian" : "triangular"},
      {"cluster_range", {c.cluster_range.first, c.cluster_range.last}},
      {"set_range", {c.set_range.first, c.set_range.last}},
      {"seed", c.seed},
      {"partition_levels", c.partition_levels},
      {"regions",
       {{"superpixels", c.regions.superpixels},
        {"compactness", c.regions.slic.compactness},
        {"slic_iterations", c.regions.slic.iterations}}},
      {"reasoning",
       {{"epsilon", c.reasoning.epsilon},
        {"max_iters", c.reasoning.max_iters},
        {"transfer_mu", transfer_to_json(c.reasoning.transfer_mu)},
        {"transfer_gamma", transfer_to_json(c.reasoning.transfer_gamma)}}},
      {"sustain_inputs", c.sustain_inputs},
  };
}

IntRange range_from_json(const json &j) {
  const auto v = j.get<std::vector<std::size_t>>();
  if (v.size() != 2) throw CorruptionError("range must have two entries");
  return {v[0], v[1]};
}

TrainingConfig config_from_json(const json &j) {
  TrainingConfig c;
  c.clusters_per_class = j.at("clusters_per_class").get<std::size_t>();
  c.e_b = j.at("e_b").get<std::size_t>();
  c.e_q = j.at("e_q").get<std::size_t>();
  const auto shape = j.at("mf_shape").get<std::string>();
  if (shape != "gaussian" && shape != "triangular") throw CorruptionError("unknown mf shape '" + shape + "'");
  c.mf_shape = shape == "gaussian" ? MfShape::gaussian : MfShape::triangular;
  c.cluster_range = range_from_json(j.at("cluster_range"));
  c.set_range = range_from_json(j.at("set_range"));
  c.seed = j.at("seed").get<std::uint64_t>();
  c.partition_levels = j.at("partition_levels").get<std::size_t>();
  const auto &r = j.at("regions");
  c.regions.superpixels = r.at("superpixels").get<std::size_t>();
  c.regions.slic.compactness = r.at("compactness").get<double>();
  c.regions.slic.iterations = r.at("slic_iterations").get<std::size_t>();
  const auto &q = j.at("reasoning");
  c.reasoning.epsilon = q.at("epsilon").get<double>();
  c.reasoning.max_iters = q.at("max_iters").get<std::size_t>();
  c.reasoning.transfer_mu = transfer_from_json(q.at("transfer_mu"));
  c.reasoning.transfer_gamma = transfer_from_json(q.at("transfer_gamma"));
  c.sustain_inputs = j.at("sustain_inputs").get<bool>();
  return c;
}

json edge_relation_to_json(const Edge &e, const IfcmModel &model) {
  const auto &libs = model.libraries;
  if (e.kind == EdgeKind::input_output && e.from < libs.size()) {
    const auto &rel = libs[e.from].relation;
    if (same_functions(e.relation, rel)) return {{"ref", "library"}, {"swapped", false}, {"label", e.relation.label}};
    if (same_functions(e.relation, rel.swapped())) {
      return {{"ref", "library"}, {"swapped", true}, {"label", e.relation.label}};
    }
  }
  if (e.kind == EdgeKind::input_input && e.from < libs.size() && e.to < libs.size()) {
    const std::size_t a = std::min(e.from, e.to);
    const std::size_t b = std::max(e.from, e.to);
    if (same_functions(e.relation, intersect(libs[a].relation, libs[b].relation))) {
      return {{"ref", "intersection"}, {"label", e.relation.label}};
    }
  }
  return {{"ref", "inline"}, {"ifs", ifs_to_json(e.relation)}};
}

IntuitionisticFuzzySet edge_relation_from_json(const json &j, std::size_t from, std::size_t to,
                                               const std::vector<MedoidLibrary> &libs) {
  const auto ref = j.at("ref").get<std::string>();
  if (ref == "inline") return ifs_from_json(j.at("ifs"));
  if (from >= libs.size() || (ref == "intersection" && to >= libs.size())) {
    throw CorruptionError("edge relation refers to a missing library");
  }
  IntuitionisticFuzzySet out;
  if (ref == "library") {
    out = j.at("swapped").get<bool>() ? libs[from].relation.swapped() : libs[from].relation;
  } else if (ref == "intersection") {
    out = intersect(libs[std::min(from, to)].relation, libs[std::max(from, to)].relation);
  } else {
    throw CorruptionError("unknown edge relation reference '" + ref + "'");
  }
  out.label = j.at("label").get<std::string>();
  return out;
}

json model_to_json(const IfcmModel &model) {
  json classes = json::array();
  for (const auto &c : model.classes) classes.push_back({{"id", c.id}, {"name", c.name}});

  json concepts = json::array();
  for (std::size_t k = 0; k < model.concepts.size(); ++k) {
    const auto &c = model.concepts[k];
    json entry{{"id", k},
               {"kind", c.kind == ConceptKind::input ? "input" : "output"},
               {"label", c.label},
               {"class_id", c.class_id}};
    if (c.kind == ConceptKind::input && k < model.medoids.size()) entry["medoid"] = model.medoids[k].vector;
    concepts.push_back(std::move(entry));
  }

  json libraries = json::array();
  for (const auto &lib : model.libraries) {
    json b = json::array();
    json q = json::array();
    json pairs = json::array();
    for (const auto &mf : lib.b_family) b.push_back(mf_to_json(mf));
    for (const auto &mf : lib.q_family) q.push_back(mf_to_json(mf));
    for (const auto &s : lib.pairs) pairs.push_back(ifs_to_json(s));
    libraries.push_back(
        {{"b_family", b}, {"q_family", q}, {"pairs", pairs}, {"scaled", lib.scaled}, {"relation", ifs_to_json(lib.relation)}});
  }

  json edges = json::array();
  for (const auto &e : model.edges) {
    json entry{{"from", e.from},
               {"to", e.to},
               {"kind", e.kind == EdgeKind::input_output ? "input_output" : "input_input"},
               {"w_mu", e.weight.mu()},
               {"w_gamma", e.weight.gamma()},
               {"neutral", e.neutral},
               {"relation", edge_relation_to_json(e, model)}};
    entry["centroid"] = e.centroid ? json(*e.centroid) : json(nullptr);
    edges.push_back(std::move(entry));
  }

  json terms = json::array();
  const LinguisticPartition partition = model.partition();
  for (const auto &t : partition.terms()) terms.push_back({{"label", t.label}, {"mf", mf_to_json(t.mf)}});

  return {
      {"format", kFormatName},
      {"version", kModelFormatVersion},
      {"classes", classes},
      {"concepts", concepts},
      {"libraries", libraries},
      {"edges", edges},
      {"partition", {{"levels", model.config.partition_levels}, {"terms", terms}}},
      {"config", config_to_json(model.config)},
      {"diagnostics",
       {{"neutral_edges", model.diagnostics.neutral_edges},
        {"scaled_libraries", model.diagnostics.scaled_libraries}}},
  };
}

IfcmModel model_from_json(const json &j) {
  IfcmModel m;
  m.config = config_from_json(j.at("config"));
  for (const auto &c : j.at("classes")) m.classes.push_back({c.at("id").get<std::int32_t>(), c.at("name").get<std::string>()});

  const auto &concepts = j.at("concepts");
  for (std::size_t k = 0; k < concepts.size(); ++k) {
    const auto &c = concepts[k];
    if (c.at("id").get<std::size_t>() != k) throw CorruptionError("concept ids must be consecutive");
    const auto kind = c.at("kind").get<std::string>();
    if (kind != "input" && kind != "output") throw CorruptionError("unknown concept kind '" + kind + "'");
    Concept con{kind == "input" ? ConceptKind::input : ConceptKind::output, c.at("label").get<std::string>(),
                c.at("class_id").get<std::int32_t>()};
    if (con.kind == ConceptKind::input) {
      if (m.medoids.size() != k) throw CorruptionError("input concepts must precede output concepts");
      m.medoids.push_back({c.at("medoid").get<Vector>(), con.class_id, con.label});
    }
    m.concepts.push_back(std::move(con));
  }

  for (const auto &l : j.at("libraries")) {
    MedoidLibrary lib;
    for (const auto &mf : l.at("b_family")) lib.b_family.push_back(mf_from_json(mf));
    for (const auto &mf : l.at("q_family")) lib.q_family.push_back(mf_from_json(mf));
    for (const auto &s : l.at("pairs")) lib.pairs.push_back(ifs_from_json(s));
    lib.scaled = l.at("scaled").get<bool>();
    lib.relation = ifs_from_json(l.at("relation"));
    m.libraries.push_back(std::move(lib));
  }

  for (const auto &e : j.at("edges")) {
    Edge edge;
    edge.from = e.at("from").get<std::size_t>();
    edge.to = e.at("to").get<std::size_t>();
    const auto kind = e.at("kind").get<std::string>();
    if (kind != "input_output" && kind != "input_input") throw CorruptionError("unknown edge kind '" + kind + "'");
    edge.kind = kind == "input_output" ? EdgeKind::input_output : EdgeKind::input_input;
    edge.weight = IfValue(e.at("w_mu").get<double>(), e.at("w_gamma").get<double>());
    edge.neutral = e.at("neutral").get<bool>();
    if (!e.at("centroid").is_null()) edge.centroid = e.at("centroid").get<double>();
    edge.relation = edge_relation_from_json(e.at("relation"), edge.from, edge.to, m.libraries);
    m.edges.push_back(std::move(edge));
  }

  const auto &part = j.at("partition");
  if (part.at("levels").get<std::size_t>() != m.config.partition_levels) {
    throw CorruptionError("partition levels disagree with the training config");
  }
  const auto &d = j.at("diagnostics");
  m.diagnostics.neutral_edges = d.at("neutral_edges").get<std::size_t>();
  m.diagnostics.scaled_libraries = d.at("scaled_libraries").get<std::size_t>();
  return m;
}

}  // namespace

std::string model_to_text(const IfcmModel &model) { return model_to_json(model).dump(1) + '\n'; }

IfcmModel model_from_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw CorruptionError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != kFormatName) {
    throw FormatError("not an ifcm model file");
  }
  if (!j.contains("version") || j["version"] != kModelFormatVersion) {
    throw FormatError("unsupported model format version");
  }
  try {
    IfcmModel m = model_from_json(j);
    m.validate();
    return m;
  } catch (const json::exception &e) {
    throw CorruptionError(std::string("malformed model file: ") + e.what());
  } catch (const FormatError &) {
    throw;
  } catch (const CorruptionError &) {
    throw;
  } catch (const Error &e) {
    throw CorruptionError(std::string("model file violates an invariant: ") + e.what());
  }
}

void save_model(const std::filesystem::path &path, const IfcmModel &model) {
  write_file_atomic(path, model_to_text(model));
}

IfcmModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptionError("cannot open model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_text(ss.str());
}

}  // namespace ifcm
