#include "ifcm/reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ifcm {

namespace {

double logistic(double x, double steepness) { return 1.0 / (1.0 + std::exp(-steepness * x)); }

constexpr double kImageTolerance = 1e-12;

}  // namespace

TransferFunction TransferFunction::sigmoid(double steepness) {
  if (!(steepness > 0.0) || !std::isfinite(steepness)) throw InvalidValueError("sigmoid steepness must be > 0");
  return {TransferKind::sigmoid, steepness};
}

TransferFunction TransferFunction::tanh() { return {TransferKind::tanh, 1.0}; }

TransferFunction TransferFunction::identity() { return {TransferKind::identity, 1.0}; }

double TransferFunction::operator()(double x) const {
  switch (kind_) {
    case TransferKind::sigmoid:
      return logistic(x, steepness_);
    case TransferKind::tanh:
      return std::tanh(x);
    case TransferKind::identity:
      return x;
  }
  return x;
}

double TransferFunction::image_low() const { return (*this)(0.0); }

double TransferFunction::image_high() const { return (*this)(1.0); }

double TransferFunction::inverse(double y) const {
  const double lo = image_low();
  const double hi = image_high();
  if (!(y >= lo - kImageTolerance && y <= hi + kImageTolerance)) {
    throw OutOfImageError("value " + std::to_string(y) + " outside transfer image [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
  y = std::clamp(y, lo, hi);
  switch (kind_) {
    case TransferKind::sigmoid:
      return std::log(y / (1.0 - y)) / steepness_;
    case TransferKind::tanh:
      return std::atanh(y);
    case TransferKind::identity:
      return y;
  }
  return y;
}

void ReasoningConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidValueError("reasoning epsilon must be > 0");
  if (max_iters < 1) throw InvalidValueError("reasoning max_iters must be >= 1");
}

FcmState fcm_step(std::span<const double> state, const RealWeightMatrix &w, const TransferFunction &f) {
  const std::size_t n = state.size();
  if (w.size() != n) throw DimensionMismatchError("FCM state and weight matrix sizes differ");
  FcmState next(n);
  for (std::size_t i = 0; i < n; ++i) {
    double arg = state[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) arg += state[j] * w(j, i);
    }
    next[i] = f(arg);
  }
  return next;
}

double sigma_accumulate(std::span<const double> mu_values, std::span<const double> mu_weights) {
  if (mu_values.size() != mu_weights.size()) throw DimensionMismatchError("sigma_accumulate: length mismatch");
  double sigma = 0.0;
  for (std::size_t j = 0; j < mu_values.size(); ++j) {
    const double p = mu_values[j] * mu_weights[j];
    sigma = sigma + p - sigma * p;
  }
  return sigma;
}

IfcmState ifcm_step(std::span<const IfValue> state, const IfWeightMatrix &w, const ReasoningConfig &cfg,
                    ReasoningDiagnostics *diagnostics) {
  const std::size_t n = state.size();
  if (w.size() != n) throw DimensionMismatchError("iFCM state and weight matrix sizes differ");
  IfcmState next;
  next.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const IfValue &vi = state[i];
    double sigma = 0.0;
    double product = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const IfValue &vj = state[j];
      const IfValue &wji = w(j, i);
      const double p = vj.mu() * wji.mu();
      sigma = sigma + p - sigma * p;
      product *= vj.gamma() + wji.gamma() - vj.gamma() * wji.gamma();
    }
    double mu = i < cfg.sustained ? vi.mu() : cfg.transfer_mu(vi.mu() + (1.0 - vi.mu()) * sigma);
    double gamma = cfg.transfer_gamma(vi.gamma() * product);
    mu = std::clamp(mu, 0.0, 1.0);
    gamma = std::clamp(gamma, 0.0, 1.0);
    if (mu + gamma > 1.0) {
      gamma = 1.0 - mu;
      if (diagnostics != nullptr) ++diagnostics->renormalized;
    }
    next.emplace_back(mu, gamma);
  }
  return next;
}

ReasoningTrace run_reasoning(IfcmState state0, const IfWeightMatrix &w, const ReasoningConfig &cfg) {
  cfg.validate();
  if (w.size() != state0.size()) throw DimensionMismatchError("iFCM state and weight matrix sizes differ");
  ReasoningTrace trace;
  trace.states.reserve(cfg.max_iters + 1);
  trace.states.push_back(std::move(state0));
  for (std::size_t t = 0; t < cfg.max_iters; ++t) {
    const IfcmState &prev = trace.states.back();
    IfcmState next = ifcm_step(prev, w, cfg, &trace.diagnostics);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      change = std::max({change, std::abs(next[i].mu() - prev[i].mu()), std::abs(next[i].gamma() - prev[i].gamma())});
    }
    trace.states.push_back(std::move(next));
    if (change < cfg.epsilon) {
      trace.converged = true;
      break;
    }
  }
  trace.iterations = trace.states.size() - 1;
  return trace;
}

FcmTrace run_fcm(FcmState state0, const RealWeightMatrix &w, const TransferFunction &f, double epsilon,
                 std::size_t max_iters) {
  if (!(epsilon > 0.0) || max_iters < 1) throw InvalidValueError("invalid FCM reasoning parameters");
  FcmTrace trace;
  trace.states.push_back(std::move(state0));
  for (std::size_t t = 0; t < max_iters; ++t) {
    const FcmState &prev = trace.states.back();
    FcmState next = fcm_step(prev, w, f);
    double d = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) d = std::max(d, std::abs(next[i] - prev[i]));
    trace.states.push_back(std::move(next));
    if (d < epsilon) {
      trace.converged = true;
      break;
    }
  }
  trace.iterations = trace.states.size() - 1;
  return trace;
}

double real_hesitancy(const IfValue &v, const ReasoningConfig &cfg, bool *clamped) {
  const double raw = 1.0 - cfg.transfer_mu.inverse(v.mu()) - cfg.transfer_gamma.inverse(v.gamma());
  const double out = std::clamp(raw, 0.0, 1.0);
  if (clamped != nullptr) *clamped = out != raw;
  return out;
}

double reported_hesitancy(const IfValue &v, const ReasoningConfig &cfg, std::size_t concept_id,
                          std::size_t iteration) {
  if (iteration == 0) return v.hesitancy();
  if (concept_id < cfg.sustained) {
    return std::clamp(1.0 - v.mu() - cfg.transfer_gamma.inverse(v.gamma()), 0.0, 1.0);
  }
  return real_hesitancy(v, cfg);
}

std::vector<TraceRow> trace_rows(const ReasoningTrace &trace, const ReasoningConfig &cfg) {
  std::vector<TraceRow> rows;
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    const auto &state = trace.states[t];
    for (std::size_t i = 0; i < state.size(); ++i) {
      rows.push_back({t, i, state[i].mu(), state[i].gamma(), reported_hesitancy(state[i], cfg, i, t)});
    }
  }
  return rows;
}

namespace {

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream &out, std::span<const TraceRow> rows) {
  out << "iteration,concept_id,mu,gamma,hesitancy\n";
  for (const auto &r : rows) {
    out << r.iteration << ',' << r.concept_id << ',' << format9(r.mu) << ',' << format9(r.gamma) << ','
        << format9(r.hesitancy) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "iteration,concept_id,mu,gamma,hesitancy") {
    throw FormatError("trace CSV: unexpected header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw FormatError("trace CSV: expected 5 columns in '" + line + "'");
    try {
      rows.push_back({std::stoul(cells[0]), std::stoul(cells[1]), std::stod(cells[2]), std::stod(cells[3]),
                      std::stod(cells[4])});
    } catch (const std::logic_error &) {
      throw FormatError("trace CSV: malformed row '" + line + "'");
    }
  }
  return rows;
}

}  // namespace ifcm
