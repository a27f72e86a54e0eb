#pragma once

#include <map>
#include <span>
#include <vector>

#include "pscd/metrics.hpp"
#include "pscd/policy.hpp"
#include "pscd/prior.hpp"

namespace pscd {

// Brute-force references. Everything here is exponential and meant for tiny
// instances only.

/// P(at least m of the indicators are 1) by summing over all 2^|W|
/// configurations. Rejects |W| > 20 and m < 1.
double enumerate_glfwer(std::span<const double> weight, int m);

/// Same contract as select_general, computed by plain recursive enumeration
/// of subsets through the id-based metric evaluation.
Selection exhaustive_local_optimum(const StepView& view, const RiskUtilityPair& pair);

/// Finite-horizon decision problem with i.i.d. streams and discrete data.
struct MdpInstance {
  std::size_t streams = 3;
  Time horizon = 2;                  // largest target time r supported
  std::vector<double> pre_pmf;       // p(x), x = 0..A-1
  std::vector<double> post_pmf;      // q(x)
  std::vector<double> prior_head;    // P(tau = l), l = 0..
  double prior_never = 0.0;          // P(tau = inf)
  RiskUtilityPair pair;

  ChangePointPrior prior() const;
  void validate() const;
};

/// Bernoulli 0.01 / 0.99 streams, K = 3, tau uniform on {0,1,2}, alpha = 0.51,
/// risk LFDR, utility -IADD.
MdpInstance counterexample_instance();

/// One realized step of a history: the observation of every stream (-1 for
/// streams that were not active) and the action S_{l+1} as a bit mask.
struct HistoryStep {
  std::vector<int> observation;
  std::uint32_t action = 0;
};

struct PolicyEntry {
  Time t = 0;
  std::vector<HistoryStep> history;  // steps 1..t; the last action is unset
  std::uint32_t active = 0;          // S_t
  std::vector<double> weight;        // W_{k,t}, all K streams (0 if inactive)
  double probability = 0.0;          // P(H_t = h_t) under the actions taken
  double value = 0.0;                // V_t^{(r)}(h_t)
  std::vector<std::uint32_t> feasible;
  std::vector<double> q_value;       // aligned with `feasible`
  std::vector<std::uint32_t> optimal;
};

/// Key of a history: observations and actions flattened in time order.
using HistoryKey = std::vector<int>;

struct PolicyTable {
  Time r = 0;
  double value = 0.0;  // V_0^{(r)}
  std::map<HistoryKey, PolicyEntry> entries;
  /// Histories at which no action met the risk bound.
  std::vector<HistoryKey> infeasible;

  /// Entry for t = 1 after observing `x` on all streams.
  const PolicyEntry& first_step(std::span<const int> x) const;
};

/// Maximal total number of histories a single solve may visit.
inline constexpr std::size_t kMaxMdpHistories = 100000;

/// V_t^{(r)} and the set of maximizing actions at every history h_t with
/// 1 <= t <= r, reached through any sequence of feasible actions.
PolicyTable backward_induction(const MdpInstance& instance, Time r);

/// E[U_r] under the sequential procedure using `rule` at every step.
double policy_value(const MdpInstance& instance, Time r, Rule rule);

/// True when no single sequential decision maximizes E[U_r] for every
/// r = 1..r_max at once, i.e. following the optimal sets of all targets
/// simultaneously reaches a history where they share no action.
bool verify_no_uniform_optimum(const MdpInstance& instance, Time r_max = 2);

std::vector<StreamId> mask_to_ids(std::uint32_t mask, std::size_t streams);

}  // namespace pscd
