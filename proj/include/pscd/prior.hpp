#pragma once

#include <optional>
#include <random>
#include <vector>

#include "pscd/types.hpp"

namespace pscd {

using Rng = std::mt19937_64;

/// Distribution of a single change point tau over {0, 1, 2, ...} plus an atom
/// at infinity ("never changes").
///
/// Internally every prior is an explicit head pi_0..pi_{n-1}, optionally
/// followed by a geometric tail pi_t = m0 * rho^(t - n), plus pi_inf. The
/// geometric-with-atom kind is the special case of an empty head.
///
/// Survival masses P(tau >= t) are cached for t in [0, horizon + 1] using
/// the recursion survival(t + 1) = survival(t) - mass(t). Construction fails if
/// any survival up to the horizon is not strictly positive, since the
/// posterior recursion divides by it.
class ChangePointPrior {
 public:
  enum class Kind { kGeometric, kTabulated };

  /// pi_t = (1 - pi_inf) * theta * (1 - theta)^t.
  static ChangePointPrior geometric(double pi_inf, double theta, Time horizon);

  /// Explicit head with an atom at infinity. Without a tail ratio the head
  /// must carry all finite mass (1 - pi_inf - sum(head) < 1e-9); with one the
  /// residual must match the geometric continuation of the last head entry.
  static ChangePointPrior tabulated(std::vector<double> head, double pi_inf,
                                    Time horizon,
                                    std::optional<double> tail_ratio = {});

  /// Head of a negative-binomial-shaped prior:
  /// pi_t = (1 - pi_inf) * C(t + shape - 1, shape - 1) theta^shape (1 - theta)^t.
  static std::vector<double> negative_binomial_head(int shape, double theta,
                                                    double pi_inf,
                                                    std::size_t length);

  Kind kind() const { return kind_; }
  Time horizon() const { return horizon_; }

  /// pi_t for finite t >= 0.
  double mass(Time t) const;
  /// pi_inf.
  double mass_never() const { return pi_inf_; }
  /// P(tau >= t) for 0 <= t <= horizon + 1.
  double survival(Time t) const;
  /// pi_t / P(tau >= t): the prior probability that the change happens at t
  /// given that it has not happened before t.
  double hazard(Time t) const;

  const std::vector<double>& head() const { return head_; }
  std::optional<double> tail_ratio() const;

  /// Draws tau; kNever for the atom at infinity.
  Time sample(Rng& rng) const;

 private:
  ChangePointPrior() = default;
  void build_survival();

  Kind kind_ = Kind::kGeometric;
  std::vector<double> head_;
  bool has_tail_ = false;
  Time tail_start_ = 0;
  double tail_first_ = 0.0;
  double tail_ratio_ = 0.0;
  double pi_inf_ = 0.0;
  Time horizon_ = 0;
  std::vector<double> survival_;
};

}  // namespace pscd
