#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pscd/checks.hpp"
#include "pscd/ground_truth.hpp"
#include "pscd/numeric.hpp"
#include "pscd/posterior.hpp"

using namespace pscd;

namespace {

void step(PosteriorState& s, const ChangePointPrior& prior, double l) {
  std::vector<double> v(s.size(), l);
  s.advance(prior, v);
}

}  // namespace

TEST_SUITE("posterior") {
  TEST_CASE("first step with an uninformative likelihood returns the prior") {
    const auto half = ChangePointPrior::tabulated({0.5}, 0.5, 5);
    PosteriorState s(1);
    step(s, half, 0.0);
    CHECK(s.log_q()[0] == doctest::Approx(0.0));
    CHECK(s.weight_at(0) == doctest::Approx(0.5));

    const auto geo = ChangePointPrior::geometric(0.2, 0.1, 5);
    PosteriorState g(1);
    step(g, geo, 0.0);
    CHECK(g.weight_at(0) == doctest::Approx(0.08).epsilon(1e-14));
  }

  TEST_CASE("large evidence saturates without overflow") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 500);
    PosteriorState s(1);
    std::vector<double> lr;
    for (int i = 0; i < 300; ++i) {
      step(s, prior, 50.0);
      lr.push_back(50.0);
    }
    CHECK(std::abs(s.weight_at(0) - 1.0) < 1e-12);
    CHECK(std::abs(s.weight_at(0) - direct_posterior(prior, lr)) < 1e-12);
    CHECK(std::isfinite(s.log_q()[0]));
  }

  TEST_CASE("non-finite evidence is rejected") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 5);
    PosteriorState s(1);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(s.advance(prior, std::vector<double>{inf}), InvalidArgument);
    CHECK_THROWS_AS(s.advance(prior, std::vector<double>{0.0, 0.0}), InvalidArgument);
  }

  TEST_CASE("advancing past the prior horizon fails") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 2);
    PosteriorState s(1);
    for (int i = 0; i < 3; ++i) step(s, prior, 0.0);
    CHECK_THROWS(step(s, prior, 0.0));
  }

  TEST_CASE("change-by-now probability") {
    CHECK(change_by_now(0.0, 0.08 / 0.92) == doctest::Approx(0.0869565).epsilon(1e-6));
    CHECK(change_by_now(1.0, 0.3) == 1.0);
    CHECK(change_by_now(0.5, 0.2) == doctest::Approx(0.6));
    for (double w : {0.0, 0.1, 0.7, 1.0}) {
      for (double h : {0.0, 0.05, 0.5}) {
        CHECK(change_by_now(w, h) - w == doctest::Approx(h * (1.0 - w)));
      }
    }
  }

  TEST_CASE("change-by-now for a state") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 10);
    PosteriorState s(2);
    s.advance(prior, std::vector<double>{0.3, -0.3});
    const double w = s.weight_of(1);
    CHECK(posterior_change_by_now(s, prior, 1) ==
          doctest::Approx(change_by_now(w, prior.hazard(1))));
    s.retain(std::vector<StreamId>{0});
    CHECK_THROWS_AS((void)posterior_change_by_now(s, prior, 1), InvalidArgument);
  }

  TEST_CASE("direct sum matches the recursion") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 60);
    PosteriorState s(1);
    step(s, prior, 0.7);
    CHECK(s.weight_at(0) == direct_posterior(prior, std::vector<double>{0.7}));

    const auto r = check_posterior(50, 50, 17);
    CHECK(r.ok());
  }

  TEST_CASE("prior-only posterior has the closed form") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 40);
    PosteriorState s(1);
    double before = 0.0;
    for (Time t = 1; t <= 40; ++t) {
      before += prior.mass(t - 1);
      step(s, prior, 0.0);
      CHECK(s.weight_at(0) ==
            doctest::Approx(before / (before + prior.survival(t))).epsilon(1e-12));
    }
  }

  TEST_CASE("weight increases with the likelihood ratio") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 10);
    PosteriorState base(1);
    step(base, prior, 0.2);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double l = -10.0 + 0.2 * i;
      const auto next = advance(base, prior, std::vector<double>{l});
      CHECK(next.weight_at(0) >= prev);
      prev = next.weight_at(0);
    }
  }

  TEST_CASE("retain keeps the listed streams only") {
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 10);
    PosteriorState s(4);
    s.advance(prior, std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const double w2 = s.weight_of(2);
    s.retain(std::vector<StreamId>{0, 2});
    CHECK(s.size() == 2);
    CHECK(s.weight_of(2) == w2);
    CHECK_FALSE(s.position(1).has_value());
    CHECK_THROWS_AS(s.retain(std::vector<StreamId>{1}), InvalidArgument);
  }

  TEST_CASE("posterior is calibrated on average") {
    // E[W_t] = P(tau < t) under the prior.
    const auto prior = ChangePointPrior::geometric(0.2, 0.1, 30);
    const StreamModel model(GaussianShift{0.0, 1.0, 1.0}, 1);
    const int n = 20000;
    const std::vector<Time> checkpoints = {1, 5, 20};
    std::vector<double> sum(checkpoints.size(), 0.0), sq(checkpoints.size(), 0.0);
    for (int i = 0; i < n; ++i) {
      auto truth = sample_truth(model, prior, 1, derive_seed(77, i));
      PosteriorState s(1);
      std::size_t c = 0;
      for (Time t = 1; t <= 20; ++t) {
        const double l = model.log_likelihood_ratio(0, t, truth.observe(0, t));
        s.advance(prior, std::span<const double>(&l, 1));
        if (t == checkpoints[c]) {
          sum[c] += s.weight_at(0);
          sq[c] += s.weight_at(0) * s.weight_at(0);
          ++c;
          if (c == checkpoints.size()) break;
        }
      }
    }
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const double mean = sum[c] / n;
      const double se = std::sqrt((sq[c] / n - mean * mean) / n);
      const double expected = 1.0 - prior.survival(checkpoints[c]);
      CHECK(std::abs(mean - expected) <= 4.0 * se + 1e-12);
    }
  }
}
