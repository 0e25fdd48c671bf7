#include "ifcm/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ifcm/error.hpp"

namespace ifcm {

namespace {

bool finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double eval_triangular(const Triangular &t, double x) {
  if (x < t.a || x > t.c) return 0.0;
  if (x == t.b) return 1.0;
  if (x < t.b) return (x - t.a) / (t.b - t.a);
  return (t.c - x) / (t.c - t.b);
}

double eval_trapezoidal(const Trapezoidal &t, double x) {
  if (x < t.a || x > t.d) return 0.0;
  if (x < t.b) return (x - t.a) / (t.b - t.a);
  if (x <= t.c) return 1.0;
  return (t.d - x) / (t.d - t.c);
}

double eval_gaussian(const Gaussian &g, double x) {
  const double u = (x - g.center) / g.sigma;
  return std::exp(-0.5 * u * u);
}

}  // namespace

IfValue::IfValue(double mu, double gamma) : mu_(mu), gamma_(gamma) {
  if (!(mu >= 0.0 && mu <= 1.0) || !(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidValueError("IfValue component outside [0,1]: <" + std::to_string(mu) + ", " +
                            std::to_string(gamma) + ">");
  }
  if (mu + gamma > 1.0 + kValidityTolerance) {
    throw InvalidValueError("IfValue violates mu + gamma <= 1: <" + std::to_string(mu) + ", " +
                            std::to_string(gamma) + ">");
  }
}

IfValue IfValue::clamped(double mu, double gamma) {
  mu = std::isnan(mu) ? 0.0 : std::clamp(mu, 0.0, 1.0);
  gamma = std::isnan(gamma) ? 0.0 : std::clamp(gamma, 0.0, 1.0);
  if (mu + gamma > 1.0) gamma = 1.0 - mu;
  return IfValue(mu, gamma);
}

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
  if (!finite({a, b, c}) || !(a <= b && b <= c) || a == c) {
    throw InvalidShapeError("triangular membership requires a <= b <= c with a < c");
  }
  return MembershipFunction(Triangular{a, b, c});
}

MembershipFunction MembershipFunction::trapezoidal(double a, double b, double c, double d) {
  if (!finite({a, b, c, d}) || !(a <= b && b <= c && c <= d)) {
    throw InvalidShapeError("trapezoidal membership requires a <= b <= c <= d");
  }
  return MembershipFunction(Trapezoidal{a, b, c, d});
}

MembershipFunction MembershipFunction::gaussian(double center, double sigma) {
  if (!finite({center, sigma}) || !(sigma > 0.0)) {
    throw InvalidShapeError("gaussian membership requires sigma > 0");
  }
  return MembershipFunction(Gaussian{center, sigma});
}

double MembershipFunction::operator()(double x) const {
  return std::visit(
      [x](const auto &s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Triangular>) {
          return eval_triangular(s, x);
        } else if constexpr (std::is_same_v<T, Trapezoidal>) {
          return eval_trapezoidal(s, x);
        } else {
          return eval_gaussian(s, x);
        }
      },
      shape_);
}

double MembershipFunction::apex() const {
  return std::visit(
      [](const auto &s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Triangular>) {
          return s.b;
        } else if constexpr (std::is_same_v<T, Trapezoidal>) {
          return 0.5 * (s.b + s.c);
        } else {
          return s.center;
        }
      },
      shape_);
}

double mf_eval(const MembershipFunction &mf, double x) { return mf(x); }

// ---------------------------------------------------------------------------

struct FuzzyFunction::Node {
  Op op = Op::leaf;
  std::optional<MembershipFunction> leaf;
  std::vector<FuzzyFunction> args;
  double factor = 1.0;
};

FuzzyFunction::FuzzyFunction() : FuzzyFunction(constant(0.0)) {}

FuzzyFunction FuzzyFunction::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw InvalidShapeError("constant degree must lie in [0,1]");
  return FuzzyFunction(std::make_shared<const Node>(Node{Op::constant, std::nullopt, {}, value}));
}

FuzzyFunction::FuzzyFunction(MembershipFunction mf)
    : node_(std::make_shared<const Node>(Node{Op::leaf, mf, {}, 1.0})) {}

FuzzyFunction FuzzyFunction::maximum(std::vector<FuzzyFunction> args) {
  if (args.empty()) throw EmptyAggregationError("max over an empty list of functions");
  if (args.size() == 1) return args.front();
  return FuzzyFunction(std::make_shared<const Node>(Node{Op::max, std::nullopt, std::move(args), 1.0}));
}

FuzzyFunction FuzzyFunction::minimum(std::vector<FuzzyFunction> args) {
  if (args.empty()) throw EmptyAggregationError("min over an empty list of functions");
  if (args.size() == 1) return args.front();
  return FuzzyFunction(std::make_shared<const Node>(Node{Op::min, std::nullopt, std::move(args), 1.0}));
}

FuzzyFunction FuzzyFunction::scaled(FuzzyFunction arg, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) throw InvalidShapeError("scale factor must lie in [0,1]");
  std::vector<FuzzyFunction> args{std::move(arg)};
  return FuzzyFunction(std::make_shared<const Node>(Node{Op::scale, std::nullopt, std::move(args), factor}));
}

double FuzzyFunction::operator()(double x) const {
  const Node &n = *node_;
  switch (n.op) {
    case Op::leaf:
      return (*n.leaf)(x);
    case Op::max: {
      double best = 0.0;
      for (const auto &a : n.args) best = std::max(best, a(x));
      return best;
    }
    case Op::min: {
      double best = 1.0;
      for (const auto &a : n.args) best = std::min(best, a(x));
      return best;
    }
    case Op::scale:
      return n.factor * n.args.front()(x);
    case Op::constant:
      return n.factor;
  }
  return 0.0;
}

FuzzyFunction::Op FuzzyFunction::op() const { return node_->op; }

const MembershipFunction &FuzzyFunction::leaf() const {
  if (node_->op != Op::leaf) throw Error("FuzzyFunction::leaf on a composite node");
  return *node_->leaf;
}

std::span<const FuzzyFunction> FuzzyFunction::args() const { return node_->args; }

double FuzzyFunction::factor() const { return node_->factor; }

bool operator==(const FuzzyFunction &lhs, const FuzzyFunction &rhs) {
  if (lhs.node_ == rhs.node_) return true;
  const auto &a = *lhs.node_;
  const auto &b = *rhs.node_;
  if (a.op != b.op || a.factor != b.factor || a.leaf != b.leaf) return false;
  return std::equal(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

// ---------------------------------------------------------------------------

bool ifs_validate(const IntuitionisticFuzzySet &s, std::size_t grid_n) {
  if (grid_n < 2) throw InvalidValueError("validation grid needs at least 2 points");
  const double step = 1.0 / static_cast<double>(grid_n - 1);
  for (std::size_t k = 0; k < grid_n; ++k) {
    const double x = k + 1 == grid_n ? 1.0 : static_cast<double>(k) * step;
    const double m = s.mu(x);
    const double g = s.gamma(x);
    if (m < 0.0 || g < 0.0 || m + g > 1.0 + kValidityTolerance) return false;
  }
  return true;
}

namespace {

std::string combined_label(std::span<const IntuitionisticFuzzySet> sets) {
  const std::string &first = sets.front().label;
  const bool same = std::all_of(sets.begin(), sets.end(), [&](const auto &s) { return s.label == first; });
  return same ? first : std::string{};
}

}  // namespace

IntuitionisticFuzzySet ifs_union(std::span<const IntuitionisticFuzzySet> sets) {
  if (sets.empty()) throw EmptyAggregationError("union of an empty list of IFSs");
  if (sets.size() == 1) return sets.front();
  std::vector<FuzzyFunction> mus;
  std::vector<FuzzyFunction> gammas;
  mus.reserve(sets.size());
  gammas.reserve(sets.size());
  for (const auto &s : sets) {
    mus.push_back(s.mu);
    gammas.push_back(s.gamma);
  }
  IntuitionisticFuzzySet out{FuzzyFunction::maximum(std::move(mus)), FuzzyFunction::minimum(std::move(gammas)),
                             combined_label(sets)};
  if (!ifs_validate(out)) throw InvalidResultError("IFS union violates mu + gamma <= 1");
  return out;
}

IntuitionisticFuzzySet ifs_intersection(const IntuitionisticFuzzySet &s1, const IntuitionisticFuzzySet &s2) {
  if (s1.mu == s2.mu && s1.gamma == s2.gamma) return s1;
  IntuitionisticFuzzySet out{FuzzyFunction::minimum({s1.mu, s2.mu}), FuzzyFunction::maximum({s1.gamma, s2.gamma}),
                             s1.label == s2.label ? s1.label : std::string{}};
  if (!ifs_validate(out)) throw InvalidResultError("IFS intersection violates mu + gamma <= 1");
  return out;
}

double icoa(const IntuitionisticFuzzySet &s, std::span<const double> samples) {
  if (samples.empty()) throw EmptyAggregationError("icoa needs at least one sample");
  double num = 0.0;
  double den = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (double z : samples) {
    if (!(z >= 0.0 && z <= 1.0)) throw InvalidValueError("icoa sample outside [0,1]");
    const double w = s.mu(z) - s.gamma(z);
    if (w > 0.0) {
      num += w * z;
      den += w;
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
  }
  if (!(den > 0.0)) throw IndeterminateRelationError("no sample has membership above non-membership");
  // a weighted mean; rounding must not push it past the retained samples
  return std::clamp(num / den, lo, hi);
}

// ---------------------------------------------------------------------------

std::vector<LinguisticTerm> linguistic_partition(std::size_t levels) {
  static const std::vector<std::string> three{"Low", "Medium", "High"};
  static const std::vector<std::string> five{"Very Low", "Low", "Medium", "High", "Very High"};
  static const std::vector<std::string> seven{"Extremely Low", "Very Low", "Low", "Medium",
                                              "High", "Very High", "Extremely High"};
  const std::vector<std::string> *labels = nullptr;
  switch (levels) {
    case 3: labels = &three; break;
    case 5: labels = &five; break;
    case 7: labels = &seven; break;
    default:
      throw InvalidValueError("linguistic partition supports 3, 5 or 7 levels, got " + std::to_string(levels));
  }
  const double last = static_cast<double>(levels - 1);
  std::vector<LinguisticTerm> terms;
  terms.reserve(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    const double apex = static_cast<double>(k) / last;
    const double left = k == 0 ? 0.0 : static_cast<double>(k - 1) / last;
    const double right = k + 1 == levels ? 1.0 : static_cast<double>(k + 1) / last;
    terms.push_back({(*labels)[k], MembershipFunction::triangular(left, apex, right)});
  }
  return terms;
}

LinguisticPartition::LinguisticPartition(std::size_t levels) : terms_(linguistic_partition(levels)) {}

std::size_t LinguisticPartition::classify(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const double v = terms_[k].mf(x);
    if (v >= best_value - kValidityTolerance) {
      best = k;
      best_value = std::max(v, best_value);
    }
  }
  return best;
}

}  // namespace ifcm
