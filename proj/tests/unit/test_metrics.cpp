#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pscd/metrics.hpp"
#include "pscd/oracle.hpp"

using namespace pscd;

namespace {

using V = std::vector<double>;

std::vector<double> random_w(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  V w(n);
  for (auto& x : w) x = u(rng);
  return w;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("lfwer") {
    CHECK(lfwer(V{}) == 0.0);
    CHECK(lfwer(V{0.5, 0.5}) == doctest::Approx(0.75));
    CHECK(lfwer(V{1.0, 0.3}) == 1.0);
  }

  TEST_CASE("glfwer") {
    CHECK(glfwer(V{0.5, 0.5}, 2) == doctest::Approx(0.25));
    CHECK(glfwer(V{0.5, 0.5}, 1) == doctest::Approx(0.75));
    CHECK(glfwer(V{0.5, 0.9}, 3) == 0.0);
    CHECK(glfwer(V{}, 1) == 0.0);
    CHECK_THROWS_AS((void)glfwer(V{0.5}, 0), InvalidArgument);
  }

  TEST_CASE("glfwer with m = 1 is lfwer") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
      const auto w = random_w(i % 15, rng);
      CHECK(glfwer(w, 1) == doctest::Approx(lfwer(w)).epsilon(1e-14));
    }
  }

  TEST_CASE("lfnr, lfdr, iadd, iarl") {
    CHECK(lfnr(V{0.1, 0.3}) == doctest::Approx(0.2));
    CHECK(lfnr(V{}) == 0.0);
    CHECK(lfnr(V{1, 1, 1}) == 1.0);
    CHECK(lfdr(V{0.9, 0.7}) == doctest::Approx(0.2));
    CHECK(lfdr(V{}) == 0.0);
    CHECK(lfdr(V{1.0}) == 0.0);
    CHECK(iadd(V{}) == 0.0);
    CHECK(iadd(V{0.2, 0.3}) == doctest::Approx(0.5));
    CHECK(iadd(V{1, 1}) == 2.0);
    CHECK(iarl(V{}, 0.2) == 0.0);
    CHECK(iarl(V{1.0}, 0.3) == 0.0);
    CHECK(iarl(V{0.5}, 0.2) == doctest::Approx(0.4));
  }

  TEST_CASE("ranges") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
      const auto w = random_w(i % 12, rng);
      const double n = static_cast<double>(w.size());
      for (double v : {lfwer(w), glfwer(w, 2), lfnr(w), lfdr(w)}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(iadd(w) <= n);
      CHECK(iarl(w, 0.1) <= n);
      CHECK(iadd(w) + iarl(w, 0.1) <= n + 1e-12);
    }
  }

  TEST_CASE("glfwer is nonincreasing in m and nondecreasing in each weight") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      auto w = random_w(1 + i % 10, rng);
      for (int m = 1; m < 6; ++m) CHECK(glfwer(w, m + 1) <= glfwer(w, m) + 1e-15);
      const double before = glfwer(w, 2);
      w[0] = std::min(1.0, w[0] + 0.1);
      CHECK(glfwer(w, 2) >= before - 1e-15);
    }
  }

  TEST_CASE("dynamic program agrees with enumeration") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 300; ++i) {
      const auto w = random_w(i % 14, rng);
      for (int m = 1; m <= 4; ++m) CHECK(std::abs(glfwer(w, m) - enumerate_glfwer(w, m)) < 1e-12);
    }
  }

  TEST_CASE("evaluate on ids") {
    const std::vector<StreamId> active = {0, 3, 5};
    const V w = {0.2, 0.9, 0.4};
    const StepView view{active, w, 0.1};
    CHECK(evaluate(lfdr_spec(), view, active) == 0.0);
    CHECK(evaluate(lfnr_spec(), view, {}) == 0.0);
    CHECK(evaluate(lfdr_spec(), view, std::vector<StreamId>{0, 5}) == doctest::Approx(0.1));
    CHECK(evaluate(iadd_spec().negated(), view, std::vector<StreamId>{0, 5}) ==
          doctest::Approx(-0.6));
    CHECK_THROWS_AS((void)evaluate(lfnr_spec(), view, std::vector<StreamId>{1}),
                    InvalidArgument);
    CHECK_THROWS_AS((void)evaluate(lfnr_spec(), view, std::vector<StreamId>{5, 0}),
                    InvalidArgument);
  }

  TEST_CASE("prefix values match evaluation of each prefix") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
      auto w = random_w(i % 10, rng);
      std::sort(w.begin(), w.end());
      std::vector<StreamId> ids(w.size());
      for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<StreamId>(k);
      const StepView view{ids, w, 0.07};
      for (const auto& [risk, utility] : admissible_combinations(2)) {
        for (const auto& spec : {risk, utility}) {
          const auto pv = prefix_values(spec, w, 0.07);
          REQUIRE(pv.size() == w.size() + 1);
          for (std::size_t n = 0; n <= w.size(); ++n) {
            const std::span<const StreamId> prefix(ids.data(), n);
            CHECK(pv[n] == doctest::Approx(evaluate(spec, view, prefix)).epsilon(1e-12));
          }
        }
      }
    }
  }

  TEST_CASE("swapping a kept stream for a removed one with smaller weight") {
    // Admissible risks do not increase and admissible utilities do not
    // decrease when a kept stream is replaced by a removed one with smaller W.
    std::mt19937_64 rng(6);
    for (int i = 0; i < 500; ++i) {
      const auto w = random_w(2 + i % 8, rng);
      std::vector<StreamId> ids(w.size());
      for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<StreamId>(k);
      const StepView view{ids, w, 0.05};
      std::vector<StreamId> kept;
      for (StreamId k : ids) {
        if (rng() % 2) kept.push_back(k);
      }
      if (kept.empty() || kept.size() == ids.size()) continue;
      const StreamId big = *std::max_element(kept.begin(), kept.end(),
                                             [&](StreamId a, StreamId b) { return w[a] < w[b]; });
      StreamId small = big;
      for (StreamId k : ids) {
        if (std::find(kept.begin(), kept.end(), k) == kept.end() && w[k] < w[big]) small = k;
      }
      if (small == big) continue;
      auto swapped = kept;
      std::replace(swapped.begin(), swapped.end(), big, small);
      std::sort(swapped.begin(), swapped.end());
      for (const auto& [risk, utility] : admissible_combinations(2)) {
        CHECK(evaluate(risk, view, swapped) <= evaluate(risk, view, kept) + 1e-12);
        CHECK(evaluate(utility, view, swapped) >= evaluate(utility, view, kept) - 1e-12);
      }
    }
  }

  TEST_CASE("feasibility of the extreme decisions") {
    const std::vector<StreamId> ids = {0, 1, 2};
    const V w = {0.3, 0.6, 0.9};
    const StepView view{ids, w, 0.1};
    CHECK(check_assumption1({lfnr_spec(), iarl_spec(), 0.1}, view));
    CHECK(check_assumption1({lfdr_spec(), iadd_spec().negated(), 0.0}, view));
    CHECK_FALSE(check_assumption1({iarl_spec().negated(), lfdr_spec().negated(), -5.0}, view));
  }

  TEST_CASE("metric names round trip") {
    for (const char* name : {"lfwer", "glfwer:3", "lfnr", "lfdr", "iadd", "iarl", "neg-iadd",
                             "neg-glfwer:2", "neg-iarl"}) {
      CHECK(MetricSpec::parse(name).name() == name);
    }
    CHECK(MetricSpec::parse("neg-lfdr") == lfdr_spec().negated());
    CHECK_THROWS_AS(MetricSpec::parse("fdr"), InvalidArgument);
    CHECK_THROWS_AS(MetricSpec::parse("glfwer:0"), InvalidArgument);
  }

  TEST_CASE("admissible combinations") {
    const auto combos = admissible_combinations(2);
    CHECK(combos.size() == 36);
    for (const auto& [r, u] : combos) CHECK(RiskUtilityPair{r, u, 0.1}.admissible());
    CHECK_FALSE(RiskUtilityPair{iarl_spec(), lfdr_spec(), 0.1}.admissible());
  }

  TEST_CASE("polynomial monotonicity checker") {
    CoefficientTable lfwer2 = {{}, {0.0, 1.0}, {0.0, 1.0, -1.0}};
    CHECK(check_polynomial_monotonicity(lfwer2).entrywise);

    const auto lfnr_c = polynomial_coefficients(lfnr_spec(), 4);
    const auto rep = check_polynomial_monotonicity(lfnr_c);
    CHECK(rep.entrywise);
    CHECK_FALSE(rep.appending);

    CoefficientTable zero = {{}, {0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}};
    const auto z = check_polynomial_monotonicity(zero);
    CHECK(z.entrywise);
    CHECK(z.appending);

    const auto lfwer_c = polynomial_coefficients(lfwer_spec(), 5);
    CHECK(lfwer_c[2][1] == doctest::Approx(1.0));
    CHECK(lfwer_c[2][2] == doctest::Approx(-1.0));
    const auto lw = check_polynomial_monotonicity(lfwer_c);
    CHECK(lw.entrywise);
    CHECK(lw.appending);
    CHECK_THROWS_AS(polynomial_coefficients(lfdr_spec(), 3), InvalidArgument);
  }
}
