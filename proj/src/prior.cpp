#include "pscd/prior.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "pscd/numeric.hpp"

namespace pscd {
namespace {

constexpr double kMassTolerance = 1e-9;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " +
                          std::to_string(p));
  }
}

}  // namespace

ChangePointPrior ChangePointPrior::geometric(double pi_inf, double theta,
                                             Time horizon) {
  require_probability(pi_inf, "pi_inf");
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw InvalidArgument("theta must lie in (0, 1]");
  }
  if (horizon < 0) throw InvalidArgument("horizon must be non-negative");
  ChangePointPrior p;
  p.kind_ = Kind::kGeometric;
  p.pi_inf_ = pi_inf;
  p.has_tail_ = true;
  p.tail_start_ = 0;
  p.tail_first_ = (1.0 - pi_inf) * theta;
  p.tail_ratio_ = 1.0 - theta;
  p.horizon_ = horizon;
  p.build_survival();
  return p;
}

ChangePointPrior ChangePointPrior::tabulated(std::vector<double> head,
                                             double pi_inf, Time horizon,
                                             std::optional<double> tail_ratio) {
  require_probability(pi_inf, "pi_inf");
  if (horizon < 0) throw InvalidArgument("horizon must be non-negative");
  for (double m : head) require_probability(m, "head mass");
  const double head_sum = std::accumulate(head.begin(), head.end(), 0.0);
  const double residual = 1.0 - pi_inf - head_sum;
  if (residual < -kMassTolerance) {
    throw InvalidArgument("prior masses sum to more than one");
  }

  ChangePointPrior p;
  p.kind_ = Kind::kTabulated;
  p.pi_inf_ = pi_inf;
  p.horizon_ = horizon;
  if (tail_ratio) {
    const double rho = *tail_ratio;
    if (!(rho >= 0.0 && rho < 1.0)) {
      throw InvalidArgument("tail ratio must lie in [0, 1)");
    }
    if (head.empty()) {
      throw InvalidArgument("a geometric tail needs a non-empty head");
    }
    const double first = head.back() * rho;
    const double tail_total = first / (1.0 - rho);
    if (std::abs(residual - tail_total) > kMassTolerance) {
      throw InvalidArgument(
          "geometric tail does not account for the residual prior mass");
    }
    p.has_tail_ = true;
    p.tail_start_ = static_cast<Time>(head.size());
    p.tail_first_ = first;
    p.tail_ratio_ = rho;
  } else if (residual > kMassTolerance) {
    throw InvalidArgument(
        "tabulated prior head leaves " + std::to_string(residual) +
        " of mass unassigned; extend the head or give a tail ratio");
  }
  p.head_ = std::move(head);
  p.build_survival();
  return p;
}

std::vector<double> ChangePointPrior::negative_binomial_head(int shape,
                                                             double theta,
                                                             double pi_inf,
                                                             std::size_t length) {
  if (shape < 1) throw InvalidArgument("shape must be >= 1");
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw InvalidArgument("theta must lie in (0, 1]");
  }
  require_probability(pi_inf, "pi_inf");
  std::vector<double> head(length);
  const double log_scale = std::log1p(-pi_inf) + shape * std::log(theta);
  const double log_fail = std::log1p(-theta);
  for (std::size_t t = 0; t < length; ++t) {
    const double log_coef = std::lgamma(static_cast<double>(t + shape)) -
                            std::lgamma(static_cast<double>(shape)) -
                            std::lgamma(static_cast<double>(t + 1));
    head[t] = std::exp(log_scale + log_coef + static_cast<double>(t) * log_fail);
  }
  return head;
}

double ChangePointPrior::mass(Time t) const {
  if (t < 0) throw InvalidArgument("time index must be non-negative");
  if (t == kNever) return pi_inf_;
  if (t < static_cast<Time>(head_.size())) return head_[static_cast<std::size_t>(t)];
  if (!has_tail_) return 0.0;
  return tail_first_ * std::pow(tail_ratio_, static_cast<double>(t - tail_start_));
}

double ChangePointPrior::survival(Time t) const {
  if (t < 0) throw InvalidArgument("time index must be non-negative");
  if (t >= static_cast<Time>(survival_.size())) {
    throw InvalidArgument("survival requested past horizon + 1 (t = " +
                          std::to_string(t) + ")");
  }
  return survival_[static_cast<std::size_t>(t)];
}

double ChangePointPrior::hazard(Time t) const {
  const double s = survival(t);
  if (!(s > 0.0)) {
    throw SurvivalExhausted("P(tau >= " + std::to_string(t) + ") is zero");
  }
  return mass(t) / s;
}

std::optional<double> ChangePointPrior::tail_ratio() const {
  if (!has_tail_) return std::nullopt;
  return tail_ratio_;
}

void ChangePointPrior::build_survival() {
  survival_.assign(static_cast<std::size_t>(horizon_) + 2, 0.0);
  survival_[0] = 1.0;
  for (Time t = 0; t <= horizon_; ++t) {
    const auto i = static_cast<std::size_t>(t);
    survival_[i + 1] = survival_[i] - mass(t);
    if (!(survival_[i] > 0.0)) {
      throw SurvivalExhausted("prior survival P(tau >= " + std::to_string(t) +
                              ") is not positive within the horizon " +
                              std::to_string(horizon_));
    }
  }
}

Time ChangePointPrior::sample(Rng& rng) const {
  double u = std::generate_canonical<double, 53>(rng);
  if (u < pi_inf_) return kNever;
  u -= pi_inf_;
  for (std::size_t t = 0; t < head_.size(); ++t) {
    if (u < head_[t]) return static_cast<Time>(t);
    u -= head_[t];
  }
  if (has_tail_ && tail_first_ > 0.0) {
    if (tail_ratio_ == 0.0) return tail_start_;
    const double total = tail_first_ / (1.0 - tail_ratio_);
    const double v = std::min(u / total, 1.0 - 1e-16);
    const double j = std::floor(std::log1p(-v) / std::log(tail_ratio_));
    return tail_start_ + static_cast<Time>(j);
  }
  // Rounding left a sliver of mass unassigned; put it on the last atom.
  if (pi_inf_ > 0.0 || head_.empty()) return kNever;
  return static_cast<Time>(head_.size()) - 1;
}

}  // namespace pscd
