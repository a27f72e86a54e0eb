#include "pscd/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "pscd/posterior.hpp"

namespace pscd {
namespace {

double tie_floor(double best) {
  return best - kUtilityTieTolerance * std::max(1.0, std::abs(best));
}

void require_view(const StepView& view) {
  if (view.active.size() != view.weight.size()) {
    throw InvalidArgument("step view: ids and weights differ in length");
  }
}

}  // namespace

Rule parse_rule(std::string_view name) {
  if (name == "general") return Rule::kGeneral;
  if (name == "simplified") return Rule::kSimplified;
  throw InvalidArgument("unknown rule '" + std::string(name) +
                        "' (expected general or simplified)");
}

std::string rule_name(Rule rule) {
  return rule == Rule::kGeneral ? "general" : "simplified";
}

Selection select_general(const StepView& view, const RiskUtilityPair& pair) {
  require_view(view);
  const std::size_t n = view.active.size();
  if (n > kMaxExhaustiveStreams) {
    throw SizeGuard("exhaustive selection over " + std::to_string(n) +
                    " streams exceeds the limit of " +
                    std::to_string(kMaxExhaustiveStreams) + "; use the simplified rule");
  }
  const std::uint32_t subsets = 1u << n;
  std::vector<double> risk(subsets);
  std::vector<double> utility(subsets);
  std::vector<double> kept;
  std::vector<double> removed;
  kept.reserve(n);
  removed.reserve(n);
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    kept.clear();
    removed.clear();
    for (std::size_t i = 0; i < n; ++i) {
      ((mask >> i) & 1u ? kept : removed).push_back(view.weight[i]);
    }
    risk[mask] = evaluate_split(pair.risk, kept, removed, view.hazard);
    if (risk[mask] <= pair.alpha) {
      utility[mask] = evaluate_split(pair.utility, kept, removed, view.hazard);
      best = std::max(best, utility[mask]);
      any = true;
    }
  }
  if (!any) throw Infeasible("no subset of the active streams meets the risk bound");

  // Bit i is the i-th smallest id, so among equal-size sets the
  // lexicographically smallest id list is the one whose lowest differing bit
  // is set.
  const double floor = tie_floor(best);
  std::uint32_t chosen = 0;
  int chosen_size = -1;
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    if (!(risk[mask] <= pair.alpha) || utility[mask] < floor) continue;
    const int size = std::popcount(mask);
    bool better = size > chosen_size;
    if (size == chosen_size) {
      const std::uint32_t diff = mask ^ chosen;
      better = diff != 0 && (mask & (diff & -diff)) != 0;
    }
    if (better) {
      chosen = mask;
      chosen_size = size;
    }
  }

  Selection sel;
  for (std::size_t i = 0; i < n; ++i) {
    if ((chosen >> i) & 1u) sel.next.push_back(view.active[i]);
  }
  sel.risk = risk[chosen];
  sel.utility = utility[chosen];
  return sel;
}

Selection select_simplified(const StepView& view, const RiskUtilityPair& pair) {
  require_view(view);
  const std::size_t n = view.active.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (view.weight[a] != view.weight[b]) return view.weight[a] < view.weight[b];
    return view.active[a] < view.active[b];
  });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = view.weight[order[i]];

  const std::vector<double> gamma = prefix_values(pair.risk, sorted, view.hazard);
  const std::vector<double> mu = prefix_values(pair.utility, sorted, view.hazard);

  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k <= n; ++k) {
    if (gamma[k] <= pair.alpha) {
      best = std::max(best, mu[k]);
      any = true;
    }
  }
  if (!any) throw Infeasible("no prefix of the sorted active streams meets the risk bound");

  const double floor = tie_floor(best);
  std::size_t cut = 0;
  for (std::size_t k = n + 1; k-- > 0;) {
    if (gamma[k] <= pair.alpha && mu[k] >= floor) {
      cut = k;
      break;
    }
  }

  Selection sel;
  sel.next.reserve(cut);
  for (std::size_t i = 0; i < cut; ++i) sel.next.push_back(view.active[order[i]]);
  std::sort(sel.next.begin(), sel.next.end());
  sel.risk = gamma[cut];
  sel.utility = mu[cut];
  return sel;
}

Selection select(Rule rule, const StepView& view, const RiskUtilityPair& pair) {
  return rule == Rule::kGeneral ? select_general(view, pair)
                                : select_simplified(view, pair);
}

std::span<const StreamId> DecisionTrace::active_at(Time t) const {
  if (t < 1) throw InvalidArgument("active sets are indexed from t = 1");
  if (t <= last_step()) return steps[static_cast<std::size_t>(t - 1)].active;
  return final_active;
}

std::vector<StreamId> DecisionTrace::removed_at(Time t) const {
  const auto now = active_at(t);
  const auto next = active_at(t + 1);
  std::vector<StreamId> out;
  std::set_difference(now.begin(), now.end(), next.begin(), next.end(),
                      std::back_inserter(out));
  return out;
}

DecisionTrace run_sequential(const StreamModel& model, const ChangePointPrior& prior,
                             ObservationSource& source, const RiskUtilityPair& pair,
                             Rule rule, Time horizon, const RunOptions& options) {
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  const std::size_t k_total = model.streams();
  if (source.streams() != k_total) {
    throw InvalidArgument("observation source and model disagree on the stream count");
  }

  DecisionTrace trace;
  trace.streams = k_total;
  trace.horizon = horizon;
  trace.detection.assign(k_total, kNever);
  if (const auto* truth = dynamic_cast<const GroundTruth*>(&source)) {
    trace.change_points = truth->change_points();
  }

  PosteriorState state(k_total);
  std::vector<double> log_lr;
  for (Time t = 1; t <= horizon && !state.empty(); ++t) {
    const auto active = state.active();
    log_lr.resize(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      log_lr[i] = model.log_likelihood_ratio(active[i], t, source.observe(active[i], t));
    }
    state.advance(prior, log_lr);

    const std::vector<double> weight = state.weights();
    const StepView view{state.active(), weight, prior.hazard(t)};
    Selection sel = select(rule, view, pair);

    TraceStep step;
    step.t = t;
    step.active.assign(active.begin(), active.end());
    if (options.record_weights) step.weight = weight;
    step.hazard = view.hazard;
    step.risk = sel.risk;
    step.utility = sel.utility;

    std::size_t j = 0;
    for (StreamId k : step.active) {
      if (j < sel.next.size() && sel.next[j] == k) {
        ++j;
      } else {
        trace.detection[k] = t;
      }
    }
    state.retain(sel.next);
    trace.steps.push_back(std::move(step));
  }
  trace.final_active.assign(state.active().begin(), state.active().end());
  return trace;
}

std::vector<std::pair<Time, std::vector<StreamId>>> detection_schedule(
    const DecisionTrace& trace) {
  std::vector<std::pair<Time, std::vector<StreamId>>> out;
  for (Time t = 1; t <= trace.last_step(); ++t) {
    auto removed = trace.removed_at(t);
    if (!removed.empty()) out.emplace_back(t, std::move(removed));
  }
  return out;
}

}  // namespace pscd
