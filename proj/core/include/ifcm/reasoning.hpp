#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ifcm/error.hpp"
#include "ifcm/ifs.hpp"

namespace ifcm {

enum class TransferKind { sigmoid, tanh, identity };

/// Strictly increasing map of [0,1] into [0,1], invertible on its image.
class TransferFunction {
 public:
  static TransferFunction sigmoid(double steepness = 1.0);
  static TransferFunction tanh();
  static TransferFunction identity();

  [[nodiscard]] double operator()(double x) const;
  /// Throws OutOfImageError when y lies outside [image_low(), image_high()].
  [[nodiscard]] double inverse(double y) const;

  [[nodiscard]] double image_low() const;
  [[nodiscard]] double image_high() const;

  [[nodiscard]] TransferKind kind() const { return kind_; }
  [[nodiscard]] double steepness() const { return steepness_; }

  friend bool operator==(const TransferFunction &, const TransferFunction &) = default;

 private:
  TransferFunction(TransferKind kind, double steepness) : kind_(kind), steepness_(steepness) {}
  TransferKind kind_;
  double steepness_;
};

/// Square matrix indexed (from, to); entry (j, i) is the influence of
/// concept j on concept i. The diagonal is pinned to the no-relation value.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const T &operator()(std::size_t from, std::size_t to) const { return data_[from * n_ + to]; }

  void set(std::size_t from, std::size_t to, const T &value);

  friend bool operator==(const SquareMatrix &, const SquareMatrix &) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

template <typename T>
void SquareMatrix<T>::set(std::size_t from, std::size_t to, const T &value) {
  if (from >= n_ || to >= n_) throw DimensionMismatchError("weight index out of range");
  if (from == to && !(value == T{})) throw InvalidValueError("self-loops are not allowed");
  data_[from * n_ + to] = value;
}

/// Baseline FCM weights in [-1, 1].
using RealWeightMatrix = SquareMatrix<double>;
/// iFCM-II weights; <0,0> is "no relation".
using IfWeightMatrix = SquareMatrix<IfValue>;

using FcmState = std::vector<double>;
using IfcmState = std::vector<IfValue>;

struct ReasoningConfig {
  double epsilon = 1e-5;
  std::size_t max_iters = 100;
  TransferFunction transfer_mu = TransferFunction::tanh();
  TransferFunction transfer_gamma = TransferFunction::tanh();
  /// The first `sustained` concepts keep their membership across
  /// iterations (external evidence); their non-membership still follows the
  /// regular update. Zero gives the unmodified iFCM-II dynamics.
  std::size_t sustained = 0;

  void validate() const;
  friend bool operator==(const ReasoningConfig &, const ReasoningConfig &) = default;
};

struct ReasoningDiagnostics {
  /// Steps where mu' + gamma' > 1 forced gamma' down to 1 - mu'.
  std::size_t renormalized = 0;
};

struct ReasoningTrace {
  std::vector<IfcmState> states;
  bool converged = false;
  std::size_t iterations = 0;
  ReasoningDiagnostics diagnostics;

  [[nodiscard]] const IfcmState &final_state() const { return states.back(); }
};

struct FcmTrace {
  std::vector<FcmState> states;
  bool converged = false;
  std::size_t iterations = 0;
};

/// One Kosko update: A_i' = f(A_i + sum_{j != i} A_j * w_ji).
[[nodiscard]] FcmState fcm_step(std::span<const double> state, const RealWeightMatrix &w, const TransferFunction &f);

/// Probabilistic-OR fold of the products v_j * w_j. Empty input gives 0.
[[nodiscard]] double sigma_accumulate(std::span<const double> mu_values, std::span<const double> mu_weights);

/// One iFCM-II update of every concept.
[[nodiscard]] IfcmState ifcm_step(std::span<const IfValue> state, const IfWeightMatrix &w, const ReasoningConfig &cfg,
                                  ReasoningDiagnostics *diagnostics = nullptr);

/// Iterates ifcm_step until the L-infinity change of both the membership
/// and non-membership vectors drops below epsilon, or max_iters is reached.
[[nodiscard]] ReasoningTrace run_reasoning(IfcmState state0, const IfWeightMatrix &w, const ReasoningConfig &cfg);

[[nodiscard]] FcmTrace run_fcm(FcmState state0, const RealWeightMatrix &w, const TransferFunction &f,
                               double epsilon = 1e-5, std::size_t max_iters = 100);

/// 1 - F_mu^-1(mu) - F_gamma^-1(gamma), clamped to [0,1]. `clamped` is set
/// when the raw value fell outside [0,1].
[[nodiscard]] double real_hesitancy(const IfValue &v, const ReasoningConfig &cfg, bool *clamped = nullptr);

/// Hesitancy reported for a concept at a given iteration: the real
/// hesitancy once the transfer functions have been applied, with only the
/// non-membership inverted for sustained concepts. At t = 0 it is the plain
/// 1 - mu - gamma.
[[nodiscard]] double reported_hesitancy(const IfValue &v, const ReasoningConfig &cfg, std::size_t concept_id,
                                        std::size_t iteration);

struct TraceRow {
  std::size_t iteration = 0;
  std::size_t concept_id = 0;
  double mu = 0.0;
  double gamma = 0.0;
  double hesitancy = 0.0;
  friend bool operator==(const TraceRow &, const TraceRow &) = default;
};

/// Row per (iteration, concept); hesitancy per reported_hesitancy.
[[nodiscard]] std::vector<TraceRow> trace_rows(const ReasoningTrace &trace, const ReasoningConfig &cfg);

/// CSV with header "iteration,concept_id,mu,gamma,hesitancy" and 9
/// significant digits per real.
void write_trace_csv(std::ostream &out, std::span<const TraceRow> rows);
[[nodiscard]] std::vector<TraceRow> read_trace_csv(std::istream &in);

}  // namespace ifcm
