#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pscd/policy.hpp"
#include "pscd/prior.hpp"
#include "pscd/stream_model.hpp"

namespace pscd {

// Ex-post evaluation of one trace against its true change points. Every
// function reads tau from trace.change_points and throws if it is empty.

/// Share of S_t \ S_{t+1} that had not changed yet (tau_k >= t).
double fdp_t(const DecisionTrace& trace, Time t);
/// Share of S_{t+1} that had already changed (tau_k < t).
double fnp_t(const DecisionTrace& trace, Time t);
/// Kept streams with tau_k < t.
std::size_t idd_t(const DecisionTrace& trace, Time t);
/// Kept streams with tau_k > t; t = 0 refers to S_1.
std::size_t irl_t(const DecisionTrace& trace, Time t);

/// Per-trace quantities behind the aggregates, deadline N.
double afdr_of(const DecisionTrace& trace, Time deadline);
double tadd_of(const DecisionTrace& trace, Time deadline);
double tarl_of(const DecisionTrace& trace, Time deadline);

enum class GfwerStop { kHorizon, kFirstDetection };

/// Stopping time T: the last step, or T_1 (falls back to the last step when
/// nothing was ever deactivated).
Time stopping_time(const DecisionTrace& trace, GfwerStop stop);
/// Indicator of at least m kept, already changed streams at time T.
bool gfwer_event(const DecisionTrace& trace, int m, GfwerStop stop);

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // sample sd / sqrt(n); 0 for a single value
};

Estimate mean_se(std::span<const double> values);

Estimate afdr(std::span<const DecisionTrace> traces, Time deadline);
Estimate tadd(std::span<const DecisionTrace> traces, Time deadline);
Estimate tarl(std::span<const DecisionTrace> traces, Time deadline);
Estimate gfwer(std::span<const DecisionTrace> traces, int m, GfwerStop stop);

struct PriorSpec {
  ChangePointPrior::Kind kind = ChangePointPrior::Kind::kGeometric;
  double pi_inf = 0.2;
  double theta = 0.1;              // geometric only
  std::vector<double> head;        // tabulated only
  std::optional<double> tail_ratio;

  ChangePointPrior build(Time horizon) const;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model = GaussianShift{};
  PriorSpec prior;
  RiskUtilityPair pair{lfdr_spec(), iadd_spec().negated(), 0.1};
  Rule rule = Rule::kSimplified;
  std::size_t streams = 100;
  Time horizon = 500;
  Time deadline = 500;
  std::size_t replications = 300;
  std::uint64_t seed = 1;
  std::optional<int> gfwer_m;  // defaults to the GLFWER m of the risk, else 1
  GfwerStop gfwer_stop = GfwerStop::kHorizon;
  /// Worker cap; 0 means PSCD_THREADS or the hardware concurrency.
  unsigned threads = 0;

  int effective_gfwer_m() const;
  void validate() const;
};

struct AggregateReport {
  std::size_t streams = 0;
  double alpha = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  Estimate afdr;
  Estimate tadd;
  Estimate tarl;
  Estimate gfwer;

  // Across-replication means per t = 1..horizon (index t - 1).
  std::vector<double> mean_fdp;
  std::vector<double> se_fdp;
  std::vector<double> mean_fnp;
  std::vector<double> se_fnp;
  std::vector<double> mean_idd;
  std::vector<double> mean_irl;
  std::vector<double> mean_active;  // |S_t|
  double mean_irl0 = 0.0;           // IRL at t = 0

  std::size_t steps = 0;            // selection steps over all replications
  std::size_t risk_violations = 0;  // steps with recorded risk > alpha
};

/// One replication: draws lambdas (complex model), change points and data from
/// the replication's own seed and runs the procedure.
DecisionTrace run_replication(const ExperimentConfig& config, std::size_t index,
                              bool record_weights = false);

/// Runs all replications on a worker pool and reduces them in replication
/// order, so the report depends only on the config.
AggregateReport run_experiment(const ExperimentConfig& config);

/// Worker count for `requested` (0 = automatic) and `jobs` work items.
unsigned worker_count(unsigned requested, std::size_t jobs);

}  // namespace pscd
