#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pscd/ground_truth.hpp"
#include "pscd/metrics.hpp"
#include "pscd/prior.hpp"
#include "pscd/stream_model.hpp"

namespace pscd {

/// Largest active set the exhaustive rule accepts (2^20 subsets).
inline constexpr std::size_t kMaxExhaustiveStreams = 20;

/// Utilities within this relative distance of the optimum count as ties.
inline constexpr double kUtilityTieTolerance = 1e-12;

struct Selection {
  std::vector<StreamId> next;  // S_{t+1}, sorted
  double risk = 0.0;
  double utility = 0.0;
};

enum class Rule { kGeneral, kSimplified };

Rule parse_rule(std::string_view name);
std::string rule_name(Rule rule);

/// Enumerates every subset of S_t and returns a utility maximizer among those
/// with risk <= alpha. Ties (within kUtilityTieTolerance) go to the largest
/// subset, then to the lexicographically smallest sorted id list.
/// Throws SizeGuard above kMaxExhaustiveStreams and Infeasible when no subset
/// meets the risk constraint.
Selection select_general(const StepView& view, const RiskUtilityPair& pair);

/// Sorts W ascending (ties by stream id) and searches only the |S_t| + 1
/// prefixes. Ties in utility go to the longest prefix. Exact whenever risk
/// and utility respond monotonically to swapping a kept stream for a removed
/// one with smaller W.
Selection select_simplified(const StepView& view, const RiskUtilityPair& pair);

Selection select(Rule rule, const StepView& view, const RiskUtilityPair& pair);

struct TraceStep {
  Time t = 0;
  std::vector<StreamId> active;  // S_t
  std::vector<double> weight;    // W_{k,t} over S_t; empty unless recorded
  double hazard = 0.0;
  double risk = 0.0;
  double utility = 0.0;
};

/// Everything a run of the sequential procedure decided. Step t (1-based)
/// observed S_t and chose S_{t+1}; the last choice is `final_active`.
struct DecisionTrace {
  std::size_t streams = 0;
  Time horizon = 0;
  std::vector<TraceStep> steps;
  std::vector<StreamId> final_active;
  /// N_k = sup{t : k in S_t}; kNever when the stream was still active after
  /// the last step (censored at the horizon).
  std::vector<Time> detection;
  /// tau_k when the data were simulated; empty otherwise.
  std::vector<Time> change_points;

  Time last_step() const { return static_cast<Time>(steps.size()); }

  /// S_t for t >= 1. Past the last step this is the final active set.
  std::span<const StreamId> active_at(Time t) const;
  /// S_t \ S_{t+1}.
  std::vector<StreamId> removed_at(Time t) const;
};

struct RunOptions {
  bool record_weights = true;
};

/// Runs the sequential procedure from S_1 = {0..K-1}: observe the active
/// streams, update their posteriors, select S_{t+1}, deactivate the rest.
/// Stops once nothing is active or after step `horizon`.
DecisionTrace run_sequential(const StreamModel& model, const ChangePointPrior& prior,
                             ObservationSource& source, const RiskUtilityPair& pair,
                             Rule rule, Time horizon, const RunOptions& options = {});

/// Stopping-time view of a trace: T_q = min{t > T_{q-1} : S_t \ S_{t+1} != {}}
/// and D_q = S_{T_q} \ S_{T_q + 1}.
std::vector<std::pair<Time, std::vector<StreamId>>> detection_schedule(
    const DecisionTrace& trace);

}  // namespace pscd
