#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pscd/types.hpp"

namespace pscd {

// Posterior risk and utility functionals of (W over S_t, S_t, S_{t+1}).
//
// "kept" means S_{t+1}; "removed" means S_t \ S_{t+1}. All functions are
// symmetric in their inputs, so callers may pass weights in any order.

/// 1 - prod(1 - W) over kept streams.
double lfwer(std::span<const double> kept);

/// P(at least m kept streams have already changed); W are independent
/// Bernoulli success probabilities. Poisson-binomial tail by dynamic
/// programming over counts 0..m-1 plus an absorbing ">= m" bucket.
double glfwer(std::span<const double> kept, int m);

/// Mean W over kept streams; 0 when nothing is kept.
double lfnr(std::span<const double> kept);

/// Mean (1 - W) over removed streams; 0 when nothing is removed.
double lfdr(std::span<const double> removed);

/// Sum of W over kept streams.
double iadd(std::span<const double> kept);

/// Sum of 1 - g(W) over kept streams, g(W) = h + (1 - h) W and h = pi_t / S_t.
double iarl(std::span<const double> kept, double hazard);

/// Same, given g(W) values directly (aligned with `kept`).
double iarl(std::span<const double> kept, std::span<const double> change_by_now);

enum class MetricKind { kLfwer, kGlfwer, kLfnr, kLfdr, kIadd, kIarl };

struct MetricSpec {
  MetricKind kind = MetricKind::kLfnr;
  int m = 1;     // only used by GLFWER
  int sign = 1;  // +1, or -1 for the "neg-" wrapper

  /// Names: lfwer, glfwer:m, lfnr, lfdr, iadd, iarl, each optionally
  /// prefixed with "neg-".
  static MetricSpec parse(std::string_view name);
  std::string name() const;

  MetricSpec negated() const {
    MetricSpec s = *this;
    s.sign = -sign;
    return s;
  }

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

inline MetricSpec lfwer_spec() { return {MetricKind::kLfwer, 1, 1}; }
inline MetricSpec glfwer_spec(int m) { return {MetricKind::kGlfwer, m, 1}; }
inline MetricSpec lfnr_spec() { return {MetricKind::kLfnr, 1, 1}; }
inline MetricSpec lfdr_spec() { return {MetricKind::kLfdr, 1, 1}; }
inline MetricSpec iadd_spec() { return {MetricKind::kIadd, 1, 1}; }
inline MetricSpec iarl_spec() { return {MetricKind::kIarl, 1, 1}; }

struct RiskUtilityPair {
  MetricSpec risk;
  MetricSpec utility;
  double alpha = 0.1;

  /// True when risk is one of LFWER, GLFWER, LFNR, IADD, LFDR, -IARL and
  /// utility one of IARL, -LFDR, -LFWER, -GLFWER, -LFNR, -IADD. These are the
  /// combinations for which the sorted-prefix rule is exact.
  bool admissible() const;
};

/// Every admissible (risk, utility) combination, GLFWER at the given m.
std::vector<std::pair<MetricSpec, MetricSpec>> admissible_combinations(int glfwer_m);

/// The posterior snapshot {W_{k,t}}_{k in S_t} a metric is evaluated on.
struct StepView {
  std::span<const StreamId> active;  // S_t, sorted ascending
  std::span<const double> weight;    // W aligned with `active`
  double hazard = 0.0;               // pi_t / P(tau >= t)
};

/// Metric value when `kept` stays active and `removed` is deactivated.
double evaluate_split(const MetricSpec& spec, std::span<const double> kept,
                      std::span<const double> removed, double hazard);

/// r_t or u_t for the transition S_t -> next. `next` must be sorted and a
/// subset of view.active, otherwise InvalidArgument.
double evaluate(const MetricSpec& spec, const StepView& view,
                std::span<const StreamId> next);

/// Metric value for every sorted prefix: entry n is the value when S_{t+1}
/// holds the n streams with the smallest W. `sorted_weight` must be ascending.
/// Cost is O(|S_t|) except GLFWER, which is O(|S_t| m).
std::vector<double> prefix_values(const MetricSpec& spec,
                                  std::span<const double> sorted_weight, double hazard);

/// min(risk(S_t -> {}), risk(S_t -> S_t)) <= alpha.
bool check_assumption1(const RiskUtilityPair& pair, const StepView& view);

/// C[p][k] for p = 0..p_max and k = 1..p (C[p][0] unused) of the symmetric
/// polynomial sum_k C_{p,k} e_k(u_1, ..., u_p).
using CoefficientTable = std::vector<std::vector<double>>;

struct MonotonicityReport {
  bool entrywise = false;
  bool appending = false;
};

/// Checks the sufficient inequalities for a polynomial metric to be
/// entrywise increasing and appending increasing:
///   sum_{k=1}^{p-i} C_{p,k} binom(p-i-1, k-1) >= 0,        i = 0..p-1
///   sum_{k=1}^{p-i} (C_{p+1,k} - C_{p,k}) binom(p-i, k) >= 0, i = 0..p
/// The second family needs C_{p+1}, so it is checked for p < p_max.
/// Passing is sufficient, not necessary.
MonotonicityReport check_polynomial_monotonicity(const CoefficientTable& c,
                                                 double tolerance = 1e-12);

/// Coefficients of LFWER, GLFWER, LFNR and IADD (with sign) as symmetric
/// polynomials in the kept weights. Throws for LFDR and IARL.
CoefficientTable polynomial_coefficients(const MetricSpec& spec, int p_max);

}  // namespace pscd
