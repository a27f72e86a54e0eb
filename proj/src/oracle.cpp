#include "pscd/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "pscd/posterior.hpp"

namespace pscd {

double enumerate_glfwer(std::span<const double> weight, int m) {
  if (m < 1) throw InvalidArgument("enumerate_glfwer: m must be at least 1");
  const std::size_t n = weight.size();
  if (n > 20) throw SizeGuard("enumerate_glfwer: at most 20 weights");
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < m) continue;
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      p *= (mask >> i) & 1u ? weight[i] : 1.0 - weight[i];
    }
    total += p;
  }
  return total;
}

Selection exhaustive_local_optimum(const StepView& view, const RiskUtilityPair& pair) {
  struct Candidate {
    std::vector<StreamId> set;
    double risk;
    double utility;
  };
  std::vector<Candidate> feasible;
  std::vector<StreamId> current;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == view.active.size()) {
      const double risk = evaluate(pair.risk, view, current);
      if (risk <= pair.alpha) {
        feasible.push_back({current, risk, evaluate(pair.utility, view, current)});
      }
      return;
    }
    walk(i + 1);
    current.push_back(view.active[i]);
    walk(i + 1);
    current.pop_back();
  };
  walk(0);
  if (feasible.empty()) throw Infeasible("no feasible subset");

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : feasible) best = std::max(best, c.utility);
  const double floor = best - kUtilityTieTolerance * std::max(1.0, std::abs(best));
  const Candidate* chosen = nullptr;
  for (const auto& c : feasible) {
    if (c.utility < floor) continue;
    if (chosen == nullptr || c.set.size() > chosen->set.size() ||
        (c.set.size() == chosen->set.size() && c.set < chosen->set)) {
      chosen = &c;
    }
  }
  return {chosen->set, chosen->risk, chosen->utility};
}

ChangePointPrior MdpInstance::prior() const {
  return ChangePointPrior::tabulated(prior_head, prior_never, horizon);
}

void MdpInstance::validate() const {
  if (streams == 0 || streams > 8) throw InvalidArgument("mdp: need 1..8 streams");
  if (horizon < 1) throw InvalidArgument("mdp: horizon must be at least 1");
  if (pre_pmf.empty() || pre_pmf.size() != post_pmf.size()) {
    throw InvalidArgument("mdp: pre and post pmfs must share a nonempty alphabet");
  }
  for (std::size_t x = 0; x < pre_pmf.size(); ++x) {
    if (!(pre_pmf[x] > 0.0) || !(post_pmf[x] > 0.0)) {
      throw InvalidArgument("mdp: pmf entries must be positive");
    }
  }
  double pre = 0.0, post = 0.0;
  for (std::size_t x = 0; x < pre_pmf.size(); ++x) {
    pre += pre_pmf[x];
    post += post_pmf[x];
  }
  if (std::abs(pre - 1.0) > 1e-9 || std::abs(post - 1.0) > 1e-9) {
    throw InvalidArgument("mdp: pmfs must sum to 1");
  }
  (void)prior();
}

MdpInstance counterexample_instance() {
  MdpInstance inst;
  inst.streams = 3;
  inst.horizon = 2;
  inst.pre_pmf = {0.99, 0.01};
  inst.post_pmf = {0.01, 0.99};
  inst.prior_head = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  inst.prior_never = 0.0;
  inst.pair = {lfdr_spec(), iadd_spec().negated(), 0.51};
  return inst;
}

std::vector<StreamId> mask_to_ids(std::uint32_t mask, std::size_t streams) {
  std::vector<StreamId> ids;
  for (std::size_t k = 0; k < streams; ++k) {
    if ((mask >> k) & 1u) ids.push_back(static_cast<StreamId>(k));
  }
  return ids;
}

const PolicyEntry& PolicyTable::first_step(std::span<const int> x) const {
  const auto it = entries.find(HistoryKey(x.begin(), x.end()));
  if (it == entries.end()) throw InvalidArgument("no history with that first observation");
  return it->second;
}

namespace {

std::uint32_t ids_to_mask(std::span<const StreamId> ids) {
  std::uint32_t mask = 0;
  for (StreamId k : ids) mask |= 1u << k;
  return mask;
}

/// A realized history h_t together with the filtering state it induces.
struct Node {
  PosteriorState state;
  HistoryKey key;
  std::vector<HistoryStep> steps;
  double probability = 1.0;
};

struct Child {
  Node node;
  double probability;  // P(x_{t+1} | h_t, S_{t+1})
};

class Mdp {
 public:
  explicit Mdp(const MdpInstance& inst)
      : inst_(inst), prior_(inst.prior()), alphabet_(inst.pre_pmf.size()) {
    inst.validate();
    for (std::size_t x = 0; x < alphabet_; ++x) {
      log_lr_.push_back(std::log(inst.post_pmf[x]) - std::log(inst.pre_pmf[x]));
    }
  }

  Node root() const { return {PosteriorState(inst_.streams), {}, {}, 1.0}; }

  /// Every positive-probability continuation of `node` after choosing
  /// S_{t+1} = action (for the root the action is S_1 = all streams).
  std::vector<Child> children(const Node& node, std::uint32_t action) const {
    const Time t = node.state.time();
    const double hazard = prior_.hazard(t);
    PosteriorState next = node.state;
    const std::vector<StreamId> keep = mask_to_ids(action, inst_.streams);
    next.retain(keep);

    std::vector<double> g(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      g[i] = change_by_now(next.weight_at(i), hazard);
    }

    std::vector<Child> out;
    std::vector<int> x(keep.size(), 0);
    std::vector<double> lr(keep.size());
    while (true) {
      double p = 1.0;
      for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto xi = static_cast<std::size_t>(x[i]);
        p *= g[i] * inst_.post_pmf[xi] + (1.0 - g[i]) * inst_.pre_pmf[xi];
        lr[i] = log_lr_[xi];
      }
      if (p > 0.0) {
        Node child{next, node.key, node.steps, node.probability * p};
        child.state.advance(prior_, lr);
        if (t > 0) {
          child.key.push_back(static_cast<int>(action));
          child.steps.back().action = action;
        }
        HistoryStep step;
        step.observation.assign(inst_.streams, -1);
        for (std::size_t i = 0; i < keep.size(); ++i) step.observation[keep[i]] = x[i];
        child.key.insert(child.key.end(), step.observation.begin(), step.observation.end());
        child.steps.push_back(std::move(step));
        out.push_back({std::move(child), p});
      }
      std::size_t i = 0;
      while (i < x.size() && ++x[i] == static_cast<int>(alphabet_)) x[i++] = 0;
      if (i == x.size()) break;
    }
    return out;
  }

  std::uint32_t all() const { return (1u << inst_.streams) - 1u; }

  StepView view(const Node& node, std::vector<double>& weight) const {
    weight = node.state.weights();
    return {node.state.active(), weight, prior_.hazard(node.state.time())};
  }

  /// Actions S_{t+1} subset of S_t with risk <= alpha.
  std::vector<std::uint32_t> feasible(const Node& node) const {
    std::vector<double> weight;
    const StepView v = view(node, weight);
    const std::uint32_t active = ids_to_mask(node.state.active());
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = active;; s = (s - 1) & active) {
      const auto ids = mask_to_ids(s, inst_.streams);
      if (evaluate(inst_.pair.risk, v, ids) <= inst_.pair.alpha) out.push_back(s);
      if (s == 0) break;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  double utility(const Node& node, std::uint32_t action) const {
    std::vector<double> weight;
    const StepView v = view(node, weight);
    return evaluate(inst_.pair.utility, v, mask_to_ids(action, inst_.streams));
  }

  const MdpInstance& instance() const { return inst_; }
  const ChangePointPrior& prior() const { return prior_; }

 private:
  const MdpInstance& inst_;
  ChangePointPrior prior_;
  std::size_t alphabet_;
  std::vector<double> log_lr_;
};

class Solver {
 public:
  Solver(const Mdp& mdp, Time r, PolicyTable& table) : mdp_(mdp), r_(r), table_(table) {}

  double value(const Node& node) {
    if (table_.entries.size() >= kMaxMdpHistories) {
      throw SizeGuard("mdp: more than " + std::to_string(kMaxMdpHistories) + " histories");
    }
    const Time t = node.state.time();
    PolicyEntry entry;
    entry.t = t;
    entry.history = node.steps;
    entry.active = ids_to_mask(node.state.active());
    entry.weight.assign(mdp_.instance().streams, 0.0);
    for (std::size_t i = 0; i < node.state.size(); ++i) {
      entry.weight[node.state.active()[i]] = node.state.weight_at(i);
    }
    entry.probability = node.probability;
    entry.feasible = mdp_.feasible(node);

    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t s : entry.feasible) {
      double q = 0.0;
      if (t == r_) {
        q = mdp_.utility(node, s);
      } else {
        for (const Child& c : mdp_.children(node, s)) q += c.probability * value(c.node);
      }
      entry.q_value.push_back(q);
      best = std::max(best, q);
    }
    if (entry.feasible.empty()) table_.infeasible.push_back(node.key);
    const double floor = best - kUtilityTieTolerance * std::max(1.0, std::abs(best));
    for (std::size_t i = 0; i < entry.feasible.size(); ++i) {
      if (entry.q_value[i] >= floor) entry.optimal.push_back(entry.feasible[i]);
    }
    entry.value = best;
    table_.entries.emplace(node.key, std::move(entry));
    return best;
  }

 private:
  const Mdp& mdp_;
  Time r_;
  PolicyTable& table_;
};

void check_target(const MdpInstance& instance, Time r) {
  if (r < 1 || r > instance.horizon) {
    throw InvalidArgument("mdp: target time must lie in 1..horizon");
  }
}

}  // namespace

PolicyTable backward_induction(const MdpInstance& instance, Time r) {
  check_target(instance, r);
  const Mdp mdp(instance);
  PolicyTable table;
  table.r = r;
  Solver solver(mdp, r, table);
  const Node root = mdp.root();
  for (const Child& c : mdp.children(root, mdp.all())) {
    table.value += c.probability * solver.value(c.node);
  }
  return table;
}

double policy_value(const MdpInstance& instance, Time r, Rule rule) {
  check_target(instance, r);
  const Mdp mdp(instance);
  std::function<double(const Node&)> value = [&](const Node& node) {
    std::vector<double> weight;
    const StepView v = mdp.view(node, weight);
    const Selection sel = select(rule, v, instance.pair);
    const std::uint32_t action = ids_to_mask(sel.next);
    if (node.state.time() == r) return sel.utility;
    double total = 0.0;
    for (const Child& c : mdp.children(node, action)) total += c.probability * value(c.node);
    return total;
  };
  double total = 0.0;
  for (const Child& c : mdp.children(mdp.root(), mdp.all())) {
    total += c.probability * value(c.node);
  }
  return total;
}

bool verify_no_uniform_optimum(const MdpInstance& instance, Time r_max) {
  check_target(instance, r_max);
  const Mdp mdp(instance);
  std::vector<PolicyTable> tables;
  for (Time r = 1; r <= r_max; ++r) tables.push_back(backward_induction(instance, r));

  // A decision is optimal for target r iff it picks an r-optimal action at
  // every history it reaches before r. Search for one decision that does so
  // for all targets at once.
  std::function<bool(const Node&)> consistent = [&](const Node& node) {
    const Time t = node.state.time();
    std::optional<std::vector<std::uint32_t>> candidates;
    for (Time r = t; r <= r_max; ++r) {
      const auto& opt = tables[static_cast<std::size_t>(r - 1)].entries.at(node.key).optimal;
      if (!candidates) {
        candidates = opt;
      } else {
        std::vector<std::uint32_t> both;
        std::set_intersection(candidates->begin(), candidates->end(), opt.begin(), opt.end(),
                              std::back_inserter(both));
        candidates = std::move(both);
      }
    }
    if (t == r_max) return !candidates->empty();
    for (std::uint32_t a : *candidates) {
      const auto next = mdp.children(node, a);
      if (std::all_of(next.begin(), next.end(),
                      [&](const Child& c) { return consistent(c.node); })) {
        return true;
      }
    }
    return false;
  };

  const auto first = mdp.children(mdp.root(), mdp.all());
  return !std::all_of(first.begin(), first.end(),
                      [&](const Child& c) { return consistent(c.node); });
}

}  // namespace pscd
