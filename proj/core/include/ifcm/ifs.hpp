#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ifcm {

inline constexpr double kValidityTolerance = 1e-12;
inline constexpr std::size_t kValidationGridPoints = 1001;

/// A <membership, non-membership> pair with mu + gamma <= 1.
class IfValue {
 public:
  constexpr IfValue() = default;

  /// Throws InvalidValueError when a component leaves [0,1] or the sum
  /// exceeds 1 by more than kValidityTolerance.
  IfValue(double mu, double gamma);

  /// Clamps each component to [0,1], then shrinks gamma to 1 - mu if needed.
  static IfValue clamped(double mu, double gamma);

  [[nodiscard]] constexpr double mu() const { return mu_; }
  [[nodiscard]] constexpr double gamma() const { return gamma_; }
  [[nodiscard]] constexpr double hesitancy() const { return 1.0 - mu_ - gamma_; }

  [[nodiscard]] IfValue swapped() const { return IfValue(gamma_, mu_); }

  friend constexpr bool operator==(const IfValue &, const IfValue &) = default;

 private:
  double mu_ = 0.0;
  double gamma_ = 0.0;
};

[[nodiscard]] inline double hesitancy(const IfValue &v) { return v.hesitancy(); }

struct Triangular {
  double a, b, c;
  friend bool operator==(const Triangular &, const Triangular &) = default;
};

struct Trapezoidal {
  double a, b, c, d;
  friend bool operator==(const Trapezoidal &, const Trapezoidal &) = default;
};

struct Gaussian {
  double center, sigma;
  friend bool operator==(const Gaussian &, const Gaussian &) = default;
};

/// Primitive membership function over the similarity domain [0,1].
///
/// Feet may coincide with the apex (a == b or c == d), which turns the
/// corresponding side into a shoulder. Construction validates the shape.
class MembershipFunction {
 public:
  using Shape = std::variant<Triangular, Trapezoidal, Gaussian>;

  static MembershipFunction triangular(double a, double b, double c);
  static MembershipFunction trapezoidal(double a, double b, double c, double d);
  static MembershipFunction gaussian(double center, double sigma);

  [[nodiscard]] double operator()(double x) const;

  /// Location of the peak; the plateau midpoint for trapezoids.
  [[nodiscard]] double apex() const;
  [[nodiscard]] const Shape &shape() const { return shape_; }

  friend bool operator==(const MembershipFunction &, const MembershipFunction &) = default;

 private:
  explicit MembershipFunction(Shape s) : shape_(s) {}
  Shape shape_;
};

[[nodiscard]] double mf_eval(const MembershipFunction &mf, double x);

/// Immutable expression tree of max / min / scale nodes over primitive
/// membership functions. Subtrees are shared, so copies are cheap.
class FuzzyFunction {
 public:
  enum class Op { leaf, max, min, scale, constant };

  /// The zero function.
  FuzzyFunction();
  FuzzyFunction(MembershipFunction mf);  // NOLINT(google-explicit-constructor)

  static FuzzyFunction constant(double value);
  static FuzzyFunction maximum(std::vector<FuzzyFunction> args);
  static FuzzyFunction minimum(std::vector<FuzzyFunction> args);
  static FuzzyFunction scaled(FuzzyFunction arg, double factor);

  [[nodiscard]] double operator()(double x) const;

  [[nodiscard]] Op op() const;
  /// Only valid for Op::leaf.
  [[nodiscard]] const MembershipFunction &leaf() const;
  [[nodiscard]] std::span<const FuzzyFunction> args() const;
  /// Scale factor, or the value of a constant.
  [[nodiscard]] double factor() const;

  /// Structural equality (same tree shape and parameters).
  friend bool operator==(const FuzzyFunction &lhs, const FuzzyFunction &rhs);

 private:
  struct Node;
  explicit FuzzyFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Paired membership / non-membership functions with a linguistic label.
/// Validity is not enforced on construction; see ifs_validate.
struct IntuitionisticFuzzySet {
  FuzzyFunction mu;
  FuzzyFunction gamma;
  std::string label;

  [[nodiscard]] double membership(double x) const { return mu(x); }
  [[nodiscard]] double non_membership(double x) const { return gamma(x); }
  /// Throws InvalidValueError if the set is invalid at x.
  [[nodiscard]] IfValue at(double x) const { return IfValue(mu(x), gamma(x)); }

  /// Membership and non-membership roles exchanged. Validity is preserved.
  [[nodiscard]] IntuitionisticFuzzySet swapped() const { return {gamma, mu, label}; }
};

/// True iff mu(x) + gamma(x) <= 1 + kValidityTolerance at every point of a
/// uniform grid_n-point grid over [0,1]. Component ranges are checked too.
[[nodiscard]] bool ifs_validate(const IntuitionisticFuzzySet &s, std::size_t grid_n = kValidationGridPoints);

/// Pointwise max of memberships, min of non-memberships.
[[nodiscard]] IntuitionisticFuzzySet ifs_union(std::span<const IntuitionisticFuzzySet> sets);

/// Pointwise min of memberships, max of non-memberships.
[[nodiscard]] IntuitionisticFuzzySet ifs_intersection(const IntuitionisticFuzzySet &s1,
                                                      const IntuitionisticFuzzySet &s2);

/// Intuitionistic center of area: the (mu - gamma)-weighted mean of the
/// samples at which mu > gamma. Throws IndeterminateRelationError when no
/// sample qualifies.
[[nodiscard]] double icoa(const IntuitionisticFuzzySet &s, std::span<const double> samples);

struct LinguisticTerm {
  std::string label;
  MembershipFunction mf;
};

/// Uniform triangular partition of [0,1] with shoulders at both ends.
class LinguisticPartition {
 public:
  /// levels must be 3, 5 or 7.
  explicit LinguisticPartition(std::size_t levels = 5);

  [[nodiscard]] std::size_t levels() const { return terms_.size(); }
  [[nodiscard]] const std::vector<LinguisticTerm> &terms() const { return terms_; }

  /// Index of the maximum-membership term; ties go to the higher term.
  [[nodiscard]] std::size_t classify(double x) const;
  [[nodiscard]] const std::string &label_for(double x) const { return terms_[classify(x)].label; }

 private:
  std::vector<LinguisticTerm> terms_;
};

[[nodiscard]] std::vector<LinguisticTerm> linguistic_partition(std::size_t levels);

}  // namespace ifcm
