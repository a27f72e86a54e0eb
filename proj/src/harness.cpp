#include "pscd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "pscd/ground_truth.hpp"
#include "pscd/numeric.hpp"

namespace pscd {
namespace {

const std::vector<Time>& truth_of(const DecisionTrace& trace) {
  if (trace.change_points.size() != trace.streams) {
    throw InvalidArgument("trace carries no ground truth");
  }
  return trace.change_points;
}

Time cap(Time a, Time b) { return std::min(a, b); }

struct ReplicationSummary {
  double afdr = 0.0;
  double tadd = 0.0;
  double tarl = 0.0;
  double gfwer = 0.0;
  std::vector<double> fdp, fnp, idd, irl, active;
  double irl0 = 0.0;
  std::size_t steps = 0;
  std::size_t violations = 0;
};

ReplicationSummary summarize(const ExperimentConfig& config, const DecisionTrace& trace) {
  ReplicationSummary s;
  s.afdr = afdr_of(trace, config.deadline);
  s.tadd = tadd_of(trace, config.deadline);
  s.tarl = tarl_of(trace, config.deadline);
  s.gfwer = gfwer_event(trace, config.effective_gfwer_m(), config.gfwer_stop) ? 1.0 : 0.0;
  const auto n = static_cast<std::size_t>(config.horizon);
  s.fdp.resize(n);
  s.fnp.resize(n);
  s.idd.resize(n);
  s.irl.resize(n);
  s.active.resize(n);
  for (Time t = 1; t <= config.horizon; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    s.fdp[i] = fdp_t(trace, t);
    s.fnp[i] = fnp_t(trace, t);
    s.idd[i] = static_cast<double>(idd_t(trace, t));
    s.irl[i] = static_cast<double>(irl_t(trace, t));
    s.active[i] = static_cast<double>(trace.active_at(t).size());
  }
  s.irl0 = static_cast<double>(irl_t(trace, 0));
  s.steps = trace.steps.size();
  for (const auto& step : trace.steps) {
    if (step.risk > config.pair.alpha) ++s.violations;
  }
  return s;
}

}  // namespace

double fdp_t(const DecisionTrace& trace, Time t) {
  const auto& tau = truth_of(trace);
  const auto removed = trace.removed_at(t);
  std::size_t wrong = 0;
  for (StreamId k : removed) wrong += tau[k] >= t ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(std::max<std::size_t>(1, removed.size()));
}

double fnp_t(const DecisionTrace& trace, Time t) {
  const auto kept = trace.active_at(t + 1);
  return static_cast<double>(idd_t(trace, t)) /
         static_cast<double>(std::max<std::size_t>(1, kept.size()));
}

std::size_t idd_t(const DecisionTrace& trace, Time t) {
  const auto& tau = truth_of(trace);
  std::size_t n = 0;
  for (StreamId k : trace.active_at(t + 1)) n += tau[k] < t ? 1 : 0;
  return n;
}

std::size_t irl_t(const DecisionTrace& trace, Time t) {
  const auto& tau = truth_of(trace);
  std::size_t n = 0;
  for (StreamId k : trace.active_at(t + 1)) n += tau[k] > t ? 1 : 0;
  return n;
}

double afdr_of(const DecisionTrace& trace, Time deadline) {
  const auto& tau = truth_of(trace);
  std::size_t detections = 0;
  std::size_t false_ones = 0;
  for (std::size_t k = 0; k < trace.streams; ++k) {
    const Time n = trace.detection[k];
    if (n >= deadline) continue;
    ++detections;
    false_ones += tau[k] >= n ? 1 : 0;
  }
  return static_cast<double>(false_ones) /
         static_cast<double>(std::max<std::size_t>(1, detections));
}

double tadd_of(const DecisionTrace& trace, Time deadline) {
  const auto& tau = truth_of(trace);
  double total = 0.0;
  for (std::size_t k = 0; k < trace.streams; ++k) {
    const Time end = cap(trace.detection[k], deadline);
    if (tau[k] == kNever || end <= tau[k] + 1) continue;
    total += static_cast<double>(end - tau[k] - 1);
  }
  return total;
}

double tarl_of(const DecisionTrace& trace, Time deadline) {
  const auto& tau = truth_of(trace);
  double total = 0.0;
  for (std::size_t k = 0; k < trace.streams; ++k) {
    total += static_cast<double>(cap(cap(tau[k], trace.detection[k]), deadline));
  }
  return total;
}

Time stopping_time(const DecisionTrace& trace, GfwerStop stop) {
  if (stop == GfwerStop::kFirstDetection) {
    for (Time t = 1; t <= trace.last_step(); ++t) {
      if (!trace.removed_at(t).empty()) return t;
    }
  }
  return std::max<Time>(1, trace.last_step());
}

bool gfwer_event(const DecisionTrace& trace, int m, GfwerStop stop) {
  if (m < 1) throw InvalidArgument("gfwer: m must be at least 1");
  return idd_t(trace, stopping_time(trace, stop)) >= static_cast<std::size_t>(m);
}

Estimate mean_se(std::span<const double> values) {
  Estimate e;
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

namespace {

template <typename F>
Estimate over_traces(std::span<const DecisionTrace> traces, F f) {
  std::vector<double> v;
  v.reserve(traces.size());
  for (const auto& tr : traces) v.push_back(f(tr));
  return mean_se(v);
}

}  // namespace

Estimate afdr(std::span<const DecisionTrace> traces, Time deadline) {
  return over_traces(traces, [&](const DecisionTrace& t) { return afdr_of(t, deadline); });
}

Estimate tadd(std::span<const DecisionTrace> traces, Time deadline) {
  return over_traces(traces, [&](const DecisionTrace& t) { return tadd_of(t, deadline); });
}

Estimate tarl(std::span<const DecisionTrace> traces, Time deadline) {
  return over_traces(traces, [&](const DecisionTrace& t) { return tarl_of(t, deadline); });
}

Estimate gfwer(std::span<const DecisionTrace> traces, int m, GfwerStop stop) {
  return over_traces(traces,
                     [&](const DecisionTrace& t) { return gfwer_event(t, m, stop) ? 1.0 : 0.0; });
}

ChangePointPrior PriorSpec::build(Time horizon) const {
  if (kind == ChangePointPrior::Kind::kGeometric) {
    return ChangePointPrior::geometric(pi_inf, theta, horizon);
  }
  return ChangePointPrior::tabulated(head, pi_inf, horizon, tail_ratio);
}

int ExperimentConfig::effective_gfwer_m() const {
  if (gfwer_m) return *gfwer_m;
  if (pair.risk.kind == MetricKind::kGlfwer) return pair.risk.m;
  return 1;
}

void ExperimentConfig::validate() const {
  if (streams == 0) throw ConfigError("run.K must be positive");
  if (horizon < 1) throw ConfigError("run.horizon must be at least 1");
  if (deadline < 2) throw ConfigError("run.deadline must be at least 2");
  if (replications == 0) throw ConfigError("run.replications must be positive");
  if (effective_gfwer_m() < 1) throw ConfigError("run.gfwer_m must be at least 1");
  if (!std::isfinite(pair.alpha)) throw ConfigError("policy.alpha must be finite");
  if (rule == Rule::kGeneral && streams > kMaxExhaustiveStreams) {
    throw ConfigError("the general rule supports at most " +
                      std::to_string(kMaxExhaustiveStreams) + " streams");
  }
  try {
    (void)prior.build(horizon);
    Rng rng(seed);
    (void)instantiate(model, streams, rng);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

DecisionTrace run_replication(const ExperimentConfig& config, std::size_t index,
                              bool record_weights) {
  const std::uint64_t seed = derive_seed(config.seed, index);
  const ChangePointPrior prior = config.prior.build(config.horizon);
  Rng model_rng(derive_seed(seed, 1));
  const StreamModel model = instantiate(config.model, config.streams, model_rng);
  GroundTruth truth = sample_truth(model, prior, config.streams, seed);
  return run_sequential(model, prior, truth, config.pair, config.rule, config.horizon,
                        RunOptions{record_weights});
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("PSCD_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

AggregateReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t reps = config.replications;
  std::vector<ReplicationSummary> results(reps);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < reps; i = next++) {
      try {
        results[i] = summarize(config, run_replication(config, i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };
  const unsigned workers = worker_count(config.threads, reps);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  AggregateReport report;
  report.streams = config.streams;
  report.alpha = config.pair.alpha;
  report.replications = reps;
  report.seed = config.seed;

  auto column = [&](auto member) {
    std::vector<double> v(reps);
    for (std::size_t i = 0; i < reps; ++i) v[i] = results[i].*member;
    return mean_se(v);
  };
  report.afdr = column(&ReplicationSummary::afdr);
  report.tadd = column(&ReplicationSummary::tadd);
  report.tarl = column(&ReplicationSummary::tarl);
  report.gfwer = column(&ReplicationSummary::gfwer);
  report.mean_irl0 = column(&ReplicationSummary::irl0).mean;

  const auto n = static_cast<std::size_t>(config.horizon);
  report.mean_fdp.resize(n);
  report.se_fdp.resize(n);
  report.mean_fnp.resize(n);
  report.se_fnp.resize(n);
  report.mean_idd.resize(n);
  report.mean_irl.resize(n);
  report.mean_active.resize(n);
  std::vector<double> v(reps);
  auto per_t = [&](auto member, std::size_t i) {
    for (std::size_t r = 0; r < reps; ++r) v[r] = (results[r].*member)[i];
    return mean_se(v);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Estimate fdp = per_t(&ReplicationSummary::fdp, i);
    const Estimate fnp = per_t(&ReplicationSummary::fnp, i);
    report.mean_fdp[i] = fdp.mean;
    report.se_fdp[i] = fdp.se;
    report.mean_fnp[i] = fnp.mean;
    report.se_fnp[i] = fnp.se;
    report.mean_idd[i] = per_t(&ReplicationSummary::idd, i).mean;
    report.mean_irl[i] = per_t(&ReplicationSummary::irl, i).mean;
    report.mean_active[i] = per_t(&ReplicationSummary::active, i).mean;
  }
  for (const auto& r : results) {
    report.steps += r.steps;
    report.risk_violations += r.violations;
  }
  return report;
}

}  // namespace pscd
