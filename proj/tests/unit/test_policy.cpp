#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <vector>

#include "pscd/checks.hpp"
#include "pscd/ground_truth.hpp"
#include "pscd/oracle.hpp"
#include "pscd/policy.hpp"
#include "pscd/posterior.hpp"

using namespace pscd;

namespace {

using Ids = std::vector<StreamId>;

DecisionTrace two_drops_trace() {
  DecisionTrace tr;
  tr.streams = 3;
  tr.horizon = 6;
  const std::vector<Ids> sets = {{0, 1, 2}, {0, 1, 2}, {0, 1}, {0, 1}, {0}, {0}};
  for (std::size_t i = 0; i < sets.size(); ++i) {
    TraceStep s;
    s.t = static_cast<Time>(i + 1);
    s.active = sets[i];
    tr.steps.push_back(s);
  }
  tr.final_active = {0};
  tr.detection = {kNever, 4, 2};
  return tr;
}

}  // namespace

TEST_SUITE("policy") {
  TEST_CASE("only the empty set is feasible") {
    const Ids s = {0};
    const std::vector<double> w = {0.9};
    const RiskUtilityPair pair{lfnr_spec(), iarl_spec(), 0.1};
    for (Rule rule : {Rule::kGeneral, Rule::kSimplified}) {
      const auto sel = select(rule, {s, w, 0.1}, pair);
      CHECK(sel.next.empty());
      CHECK(sel.risk == 0.0);
    }
  }

  TEST_CASE("both streams kept when both are unlikely to have changed") {
    const Ids s = {0, 1};
    const std::vector<double> w = {0.05, 0.05};
    const RiskUtilityPair pair{lfnr_spec(), iarl_spec(), 0.1};
    CHECK(select_general({s, w, 0.1}, pair).next == s);
    CHECK(select_simplified({s, w, 0.1}, pair).next == s);
  }

  TEST_CASE("counterexample first step with no signal keeps everything") {
    const MdpInstance inst = counterexample_instance();
    const auto prior = inst.prior();
    const StreamModel model(BernoulliPair{0.01, 0.99}, 3);
    PosteriorState state(3);
    std::vector<double> l(3, model.log_likelihood_ratio(0, 1, {0.0}));
    state.advance(prior, l);
    const auto w = state.weights();
    const Ids ids = {0, 1, 2};
    const StepView view{ids, w, prior.hazard(1)};
    CHECK(select_general(view, inst.pair).next == ids);
    CHECK(exhaustive_local_optimum(view, inst.pair).next == ids);
  }

  TEST_CASE("simplified rule picks the longest feasible prefix") {
    const Ids s = {0, 1, 2, 3};
    const std::vector<double> w = {0.9, 0.02, 0.2, 0.05};
    const RiskUtilityPair pair{lfnr_spec(), iarl_spec(), 0.1};
    const auto sel = select_simplified({s, w, 0.05}, pair);
    CHECK(sel.next == Ids{1, 2, 3});
    CHECK(sel.risk == doctest::Approx(0.09));
  }

  TEST_CASE("zero weights keep everything") {
    const Ids s = {0, 1, 2, 3, 4};
    const std::vector<double> w(5, 0.0);
    CHECK(select_simplified({s, w, 0.0}, {lfnr_spec(), iarl_spec(), 0.1}).next == s);
  }

  TEST_CASE("lfdr with a loose bound removes everything") {
    const Ids s = {0, 1, 2};
    const std::vector<double> w = {0.1, 0.4, 0.7};
    const RiskUtilityPair pair{lfdr_spec(), iadd_spec().negated(), 1.0};
    CHECK(select_simplified({s, w, 0.1}, pair).next.empty());
    CHECK(select_general({s, w, 0.1}, pair).next.empty());
  }

  TEST_CASE("general rule tie-breaking") {
    // Every subset has utility 0 under -IADD when all W are 0: keep all.
    const Ids s = {0, 1, 2};
    const std::vector<double> zero(3, 0.0);
    CHECK(select_general({s, zero, 0.0}, {lfnr_spec(), iadd_spec().negated(), 0.1}).next == s);
    // Two singletons tie: the smaller id wins.
    const std::vector<double> w = {0.5, 0.5, 0.99};
    const RiskUtilityPair pair{lfwer_spec(), iarl_spec(), 0.6};
    CHECK(select_general({s, w, 0.0}, pair).next == Ids{0});
  }

  TEST_CASE("size guard and infeasibility") {
    Ids many(21);
    for (StreamId k = 0; k < 21; ++k) many[k] = k;
    const std::vector<double> w(21, 0.1);
    const RiskUtilityPair pair{lfnr_spec(), iarl_spec(), 0.1};
    CHECK_THROWS_AS(select_general({many, w, 0.1}, pair), SizeGuard);
    CHECK_NOTHROW(select_simplified({many, w, 0.1}, pair));
    const RiskUtilityPair impossible{iarl_spec().negated(), lfdr_spec().negated(), -100.0};
    CHECK_THROWS_AS(select_simplified({many, w, 0.1}, impossible), Infeasible);
    CHECK_THROWS_AS(select_general({Ids{0, 1}, std::vector<double>{0.1, 0.1}, 0.1}, impossible),
                    Infeasible);
  }

  TEST_CASE("rule names") {
    CHECK(parse_rule("general") == Rule::kGeneral);
    CHECK(rule_name(parse_rule("simplified")) == "simplified");
    CHECK_THROWS_AS(parse_rule("greedy"), InvalidArgument);
  }

  TEST_CASE("simplified rule is locally optimal") {
    const auto r = check_selection(150, 10, 99);
    r.print(std::cout);
    CHECK(r.ok());
  }

  TEST_CASE("a stream that changed at 0 is detected quickly") {
    const auto prior = ChangePointPrior::tabulated({0.999}, 0.001, 100);
    const StreamModel model(GaussianShift{0.0, 3.0, 1.0}, 1);
    GroundTruth truth(model, {0}, 5);
    const auto tr = run_sequential(model, prior, truth, {lfnr_spec(), iarl_spec(), 0.1},
                                   Rule::kSimplified, 100);
    REQUIRE(tr.detection.size() == 1);
    CHECK(tr.detection[0] != kNever);
    CHECK(tr.detection[0] <= 5);
  }

  TEST_CASE("traces are nested and respect the risk bound") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 200);
    const StreamModel model(GaussianShift{0.0, 1.0, 1.0}, 100);
    for (const auto& pair : {RiskUtilityPair{lfdr_spec(), iadd_spec().negated(), 0.1},
                             RiskUtilityPair{lfnr_spec(), iarl_spec(), 0.1}}) {
      auto truth = sample_truth(model, prior, 100, 21);
      const auto tr = run_sequential(model, prior, truth, pair, Rule::kSimplified, 200);
      CHECK(tr.change_points == truth.change_points());
      for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        CHECK(tr.steps[i].risk <= pair.alpha);
        CHECK(tr.steps[i].weight.size() == tr.steps[i].active.size());
        const auto next = tr.active_at(static_cast<Time>(i + 2));
        CHECK(std::includes(tr.steps[i].active.begin(), tr.steps[i].active.end(), next.begin(),
                            next.end()));
      }
      for (std::size_t k = 0; k < tr.streams; ++k) {
        const bool still = std::binary_search(tr.final_active.begin(), tr.final_active.end(),
                                              static_cast<StreamId>(k));
        CHECK((tr.detection[k] == kNever) == still);
      }
    }
  }

  TEST_CASE("general and simplified rules agree on a small run") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 60);
    const StreamModel model(GaussianShift{0.0, 1.0, 1.0}, 8);
    const RiskUtilityPair pair{lfnr_spec(), iarl_spec(), 0.1};
    auto a = sample_truth(model, prior, 8, 3);
    auto b = sample_truth(model, prior, 8, 3);
    const auto ta = run_sequential(model, prior, a, pair, Rule::kGeneral, 60);
    const auto tb = run_sequential(model, prior, b, pair, Rule::kSimplified, 60);
    CHECK(ta.detection == tb.detection);
  }

  TEST_CASE("detection schedule") {
    const auto sched = detection_schedule(two_drops_trace());
    REQUIRE(sched.size() == 2);
    CHECK(sched[0].first == 2);
    CHECK(sched[0].second == Ids{2});
    CHECK(sched[1].first == 4);
    CHECK(sched[1].second == Ids{1});

    DecisionTrace none = two_drops_trace();
    for (auto& s : none.steps) s.active = {0, 1, 2};
    none.final_active = {0, 1, 2};
    none.detection = {kNever, kNever, kNever};
    CHECK(detection_schedule(none).empty());

    DecisionTrace drop;
    drop.streams = 4;
    drop.horizon = 10;
    drop.steps.push_back({1, {0, 1, 2, 3}, {}, 0.1, 0.0, 0.0});
    drop.detection = {1, 1, 1, 1};
    const auto one = detection_schedule(drop);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first == 1);
    CHECK(one[0].second == Ids{0, 1, 2, 3});
  }
}
