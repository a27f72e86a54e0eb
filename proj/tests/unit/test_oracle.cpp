#include <doctest.h>

#include <cmath>
#include <iostream>
#include <vector>

#include "pscd/checks.hpp"
#include "pscd/oracle.hpp"

using namespace pscd;

TEST_SUITE("oracle") {
  TEST_CASE("glfwer enumeration") {
    CHECK(enumerate_glfwer(std::vector<double>{0.5, 0.5}, 2) == doctest::Approx(0.25));
    CHECK(enumerate_glfwer(std::vector<double>{}, 1) == 0.0);
    CHECK_THROWS_AS((void)enumerate_glfwer(std::vector<double>{0.5}, 0), InvalidArgument);
    CHECK_THROWS_AS((void)enumerate_glfwer(std::vector<double>(21, 0.5), 1), SizeGuard);
  }

  TEST_CASE("exhaustive local optimum mirrors the general rule") {
    const RiskUtilityPair lfnr_iarl{lfnr_spec(), iarl_spec(), 0.1};
    const std::vector<StreamId> one = {0};
    CHECK(exhaustive_local_optimum({one, std::vector<double>{0.9}, 0.1}, lfnr_iarl).next.empty());
    const std::vector<StreamId> two = {0, 1};
    CHECK(exhaustive_local_optimum({two, std::vector<double>{0.05, 0.05}, 0.1}, lfnr_iarl).next ==
          two);
  }

  TEST_CASE("counterexample decision tables") {
    const auto r = check_counterexample(counterexample_instance());
    r.print(std::cout);
    CHECK(r.ok());
  }

  TEST_CASE("counterexample r = 1 at a single positive observation") {
    const auto table = backward_induction(counterexample_instance(), 1);
    const auto& e = table.first_step(std::vector<int>{0, 0, 1});
    CHECK(e.optimal == std::vector<std::uint32_t>{0b001, 0b010});
    const auto table2 = backward_induction(counterexample_instance(), 2);
    const auto& e2 = table2.first_step(std::vector<int>{0, 0, 1});
    CHECK(e2.optimal == std::vector<std::uint32_t>{0b111});
    CHECK(verify_no_uniform_optimum(counterexample_instance(), 2));
  }

  TEST_CASE("uniform optimum exists for lfnr / iarl") {
    const auto r = check_uniform_optimality();
    r.print(std::cout);
    CHECK(r.ok());
  }

  TEST_CASE("uninformative data makes every first observation equivalent") {
    MdpInstance inst;
    inst.streams = 2;
    inst.horizon = 2;
    inst.pre_pmf = {0.5, 0.5};
    inst.post_pmf = {0.5, 0.5};
    inst.prior_head = {0.6, 0.2};
    inst.prior_never = 0.2;
    inst.pair = {lfdr_spec(), iadd_spec().negated(), 0.3};
    for (Time r : {Time{1}, Time{2}}) {
      const auto table = backward_induction(inst, r);
      const auto& ref = table.first_step(std::vector<int>{0, 0});
      for (const auto& x : {std::vector<int>{0, 1}, {1, 0}, {1, 1}}) {
        const auto& e = table.first_step(x);
        CHECK(e.value == doctest::Approx(ref.value).epsilon(1e-14));
        CHECK(e.optimal == ref.optimal);
        CHECK(e.q_value.size() == ref.q_value.size());
      }
    }
  }

  TEST_CASE("a change certain at time 0 cannot be filtered past t = 0") {
    MdpInstance inst;
    inst.streams = 1;
    inst.horizon = 1;
    inst.pre_pmf = {0.5, 0.5};
    inst.post_pmf = {0.5, 0.5};
    inst.prior_head = {1.0};
    inst.prior_never = 0.0;
    inst.pair = {lfnr_spec(), iarl_spec(), 0.1};
    CHECK_THROWS_AS(backward_induction(inst, 1), SurvivalExhausted);
  }

  TEST_CASE("instance validation") {
    MdpInstance inst = counterexample_instance();
    inst.post_pmf = {0.5, 0.4};
    CHECK_THROWS_AS(inst.validate(), InvalidArgument);
    inst = counterexample_instance();
    CHECK_THROWS_AS(backward_induction(inst, 3), InvalidArgument);
  }

  TEST_CASE("infeasible histories are reported") {
    MdpInstance inst = counterexample_instance();
    inst.pair = {iarl_spec().negated(), lfdr_spec().negated(), -10.0};
    const auto table = backward_induction(inst, 1);
    CHECK_FALSE(table.infeasible.empty());
  }

  TEST_CASE("mask conversion") {
    CHECK(mask_to_ids(0b101, 3) == std::vector<StreamId>{0, 2});
    CHECK(mask_to_ids(0, 3).empty());
  }
}
