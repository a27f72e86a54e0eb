#include "pscd/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

#include "pscd/ground_truth.hpp"
#include "pscd/numeric.hpp"
#include "pscd/posterior.hpp"

namespace pscd {
namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string set_text(std::uint32_t mask, std::size_t streams) {
  std::string s = "{";
  bool first = true;
  for (StreamId k : mask_to_ids(mask, streams)) {
    s += (first ? "" : ",") + std::to_string(k + 1);
    first = false;
  }
  return s + "}";
}

std::string sets_text(const std::vector<std::uint32_t>& masks, std::size_t streams) {
  std::string s;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    s += (i ? " or " : "") + set_text(masks[i], streams);
  }
  return s;
}

/// Weights with a mix of shapes: uniform, piled up near 0 or 1, and ties.
std::vector<double> random_weights(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  const int shape = std::uniform_int_distribution<int>(0, 3)(rng);
  for (auto& x : w) {
    const double v = u(rng);
    switch (shape) {
      case 0: x = v; break;
      case 1: x = v * v * v; break;
      case 2: x = 1.0 - v * v * v; break;
      default: x = std::round(v * 4.0) / 4.0; break;
    }
  }
  return w;
}

}  // namespace

bool CheckReport::ok() const {
  return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
}

void CheckReport::add(std::string name, bool pass, std::string detail) {
  lines.push_back({std::move(name), pass, std::move(detail)});
}

void CheckReport::append(const CheckReport& other) {
  lines.insert(lines.end(), other.lines.begin(), other.lines.end());
}

void CheckReport::print(std::ostream& out) const {
  for (const auto& l : lines) {
    out << (l.pass ? "PASS " : "FAIL ") << l.name << ": " << l.detail << '\n';
  }
}

CheckReport check_posterior(std::size_t trials, Time length, std::uint64_t seed) {
  const auto prior = ChangePointPrior::geometric(0.2, 0.1, length);
  const StreamModel model(GaussianShift{0.0, 1.0, 1.0}, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    GroundTruth truth = sample_truth(model, prior, 1, s);
    PosteriorState state(1);
    std::vector<double> log_lr;
    for (Time t = 1; t <= length; ++t) {
      const double l = model.log_likelihood_ratio(0, t, truth.observe(0, t));
      log_lr.push_back(l);
      state.advance(prior, std::span<const double>(&l, 1));
      worst = std::max(worst, std::abs(state.weight_at(0) - direct_posterior(prior, log_lr)));
    }
  }
  CheckReport r;
  r.add("posterior recursion vs direct sum", worst < 1e-10,
        "max |dW| = " + sci(worst) + " over " + std::to_string(trials) + " trajectories");
  return r;
}

CheckReport check_selection(std::size_t instances, std::size_t max_streams,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(0, max_streams);
  double worst_gap = 0.0;
  std::size_t risk_breaches = 0;
  std::size_t general_mismatch = 0;
  std::size_t set_divergence = 0;
  std::size_t cases = 0;

  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t n = size(rng);
    const std::vector<double> w = random_weights(n, rng);
    std::vector<StreamId> ids(n);
    for (std::size_t k = 0; k < n; ++k) ids[k] = static_cast<StreamId>(k);
    const double hazard = 0.3 * u(rng);
    const StepView view{ids, w, hazard};
    const int m = std::uniform_int_distribution<int>(1, 3)(rng);

    for (const auto& [risk, utility] : admissible_combinations(m)) {
      const double none = evaluate(risk, view, {});
      const double all = evaluate(risk, view, ids);
      const double alpha = std::min(none, all) + u(rng) * std::abs(all - none);
      const RiskUtilityPair pair{risk, utility, alpha};
      const Selection fast = select_simplified(view, pair);
      const Selection slow = exhaustive_local_optimum(view, pair);
      const Selection general = select_general(view, pair);
      const double gap = std::abs(fast.utility - slow.utility);
      worst_gap = std::max(worst_gap, gap / std::max(1.0, std::abs(slow.utility)));
      if (!(fast.risk <= alpha)) ++risk_breaches;
      if (general.next != slow.next) ++general_mismatch;
      if (fast.next != slow.next) ++set_divergence;
      ++cases;
    }
  }

  CheckReport r;
  r.add("simplified rule attains the exhaustive optimum", worst_gap <= 1e-12,
        "max relative utility gap = " + sci(worst_gap) + " over " + std::to_string(cases) +
            " instance/pair cases");
  r.add("simplified rule respects the risk bound", risk_breaches == 0,
        std::to_string(risk_breaches) + " breaches");
  r.add("general rule equals the exhaustive oracle", general_mismatch == 0,
        std::to_string(general_mismatch) + " set mismatches");
  // Set equality between the two rules is informational only.
  r.add("simplified vs exhaustive selected sets (informational)", true,
        std::to_string(set_divergence) + " of " + std::to_string(cases) +
            " cases chose a different set with equal utility");
  return r;
}

CheckReport check_glfwer(std::size_t instances, std::size_t max_streams, int max_m,
                         std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size(0, max_streams);
  std::uniform_int_distribution<int> em(1, max_m);
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto w = random_weights(size(rng), rng);
    const int m = em(rng);
    worst = std::max(worst, std::abs(glfwer(w, m) - enumerate_glfwer(w, m)));
  }
  CheckReport r;
  r.add("GLFWER dynamic program vs enumeration", worst < 1e-12,
        "max |d| = " + sci(worst) + " over " + std::to_string(instances) + " instances");
  return r;
}

CheckReport check_counterexample(const MdpInstance& instance) {
  CheckReport r;
  if (instance.streams != 3 || instance.pre_pmf.size() != 2) {
    r.add("counterexample tables", false, "needs three binary streams");
    return r;
  }
  // Expected optimal S_2 per first observation (x1, x2, x3), ids 0-based as
  // bit masks.
  const std::map<std::vector<int>, std::vector<std::uint32_t>> expect_r1 = {
      {{0, 0, 1}, {0b001, 0b010}}, {{0, 1, 0}, {0b001, 0b100}},
      {{1, 0, 0}, {0b010, 0b100}}, {{0, 0, 0}, {0b111}},
      {{1, 1, 1}, {0}},            {{0, 1, 1}, {0}},
      {{1, 0, 1}, {0}},            {{1, 1, 0}, {0}}};
  std::map<std::vector<int>, std::vector<std::uint32_t>> expect_r2 = expect_r1;
  for (auto& [x, sets] : expect_r2) {
    if (std::count(x.begin(), x.end(), 1) <= 1) sets = {0b111};
  }

  for (Time target : {Time{1}, Time{2}}) {
    const PolicyTable table = backward_induction(instance, target);
    const auto& expect = target == 1 ? expect_r1 : expect_r2;
    for (const auto& [x, sets] : expect) {
      const PolicyEntry& e = table.first_step(x);
      std::string label = "r=" + std::to_string(target) + " X=(" + std::to_string(x[0]) +
                          "," + std::to_string(x[1]) + "," + std::to_string(x[2]) + ")";
      if (e.optimal == sets) {
        r.add("optimal S_2 at " + label, true, "got " + sets_text(e.optimal, 3));
        continue;
      }
      // The text lists only the empty set where several actions are worth
      // exactly the same. Accept extra optimal actions only when their value
      // is bit-identical to that of the listed action.
      bool exact_tie = false;
      if (sets == std::vector<std::uint32_t>{0}) {
        const auto it = std::find(e.feasible.begin(), e.feasible.end(), 0u);
        if (it != e.feasible.end()) {
          const double q_empty = e.q_value[static_cast<std::size_t>(it - e.feasible.begin())];
          exact_tie = std::find(e.optimal.begin(), e.optimal.end(), 0u) != e.optimal.end();
          for (std::size_t i = 0; i < e.feasible.size(); ++i) {
            const bool optimal = std::find(e.optimal.begin(), e.optimal.end(), e.feasible[i]) !=
                                 e.optimal.end();
            if (optimal && e.q_value[i] != q_empty) exact_tie = false;
          }
        }
      }
      r.add("optimal S_2 at " + label, exact_tie,
            "got " + sets_text(e.optimal, 3) + ", expected " + sets_text(sets, 3) +
                (exact_tie ? " (listed action optimal; the others tie with it exactly)" : ""));
    }
    r.add("no infeasible history for r=" + std::to_string(target), table.infeasible.empty(),
          std::to_string(table.infeasible.size()) + " infeasible histories");
  }
  const bool none = verify_no_uniform_optimum(instance, 2);
  r.add("no uniformly optimal decision exists", none,
        none ? "r=1 and r=2 optimal actions cannot be followed together"
             : "a decision optimal for both targets was found");
  return r;
}

CheckReport check_uniform_optimality() {
  MdpInstance inst;
  inst.streams = 2;
  inst.horizon = 3;
  inst.pre_pmf = {0.8, 0.2};
  inst.post_pmf = {0.2, 0.8};
  inst.prior_head = {0.2, 0.15, 0.1, 0.1};
  inst.prior_never = 0.45;
  inst.pair = {lfnr_spec(), iarl_spec(), 0.3};

  CheckReport r;
  for (Time target = 1; target <= inst.horizon; ++target) {
    const double best = backward_induction(inst, target).value;
    const double got = policy_value(inst, target, Rule::kSimplified);
    r.add("simplified procedure attains V_0 for r=" + std::to_string(target),
          std::abs(best - got) <= 1e-9,
          "E[U_r] = " + sci(got) + ", V_0 = " + sci(best));
  }
  const bool none = verify_no_uniform_optimum(inst, inst.horizon);
  r.add("a uniformly optimal decision exists for LFNR / IARL", !none,
        none ? "targets conflict" : "all targets can be served together");

  MdpInstance single = inst;
  single.streams = 1;
  single.pair = {lfnr_spec(), iarl_spec(), 1.0};
  const bool single_none = verify_no_uniform_optimum(single, single.horizon);
  r.add("single stream with alpha = 1 has a uniform optimum", !single_none,
        single_none ? "targets conflict" : "keep-all is optimal throughout");
  return r;
}

CheckReport run_check_suite(const std::string& suite, std::uint64_t seed) {
  CheckReport r;
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "posterior") {
    r.append(check_posterior(500, 50, derive_seed(seed, 1)));
    known = true;
  }
  if (all || suite == "selection") {
    r.append(check_selection(1000, 12, derive_seed(seed, 2)));
    known = true;
  }
  if (all || suite == "glfwer") {
    r.append(check_glfwer(500, 15, 5, derive_seed(seed, 3)));
    known = true;
  }
  if (all || suite == "counterexample") {
    r.append(check_counterexample(counterexample_instance()));
    known = true;
  }
  if (all || suite == "mdp") {
    r.append(check_uniform_optimality());
    known = true;
  }
  if (!known) {
    throw InvalidArgument("unknown suite '" + suite +
                          "' (posterior, selection, glfwer, mdp, counterexample, all)");
  }
  return r;
}

}  // namespace pscd
