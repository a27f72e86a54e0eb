#include "pscd/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pscd/numeric.hpp"

namespace pscd {

PosteriorState::PosteriorState(std::size_t streams)
    : active_(streams), log_q_(streams, kNegInf) {
  for (std::size_t k = 0; k < streams; ++k) active_[k] = static_cast<StreamId>(k);
}

PosteriorState::PosteriorState(std::vector<StreamId> active)
    : active_(std::move(active)), log_q_(active_.size(), kNegInf) {
  if (!std::is_sorted(active_.begin(), active_.end()) ||
      std::adjacent_find(active_.begin(), active_.end()) != active_.end()) {
    throw InvalidArgument("active stream ids must be sorted and unique");
  }
}

double PosteriorState::weight_at(std::size_t i) const { return logistic(log_q_.at(i)); }

double PosteriorState::weight_of(StreamId k) const {
  const auto pos = position(k);
  if (!pos) throw InvalidArgument("stream " + std::to_string(k) + " is not active");
  return weight_at(*pos);
}

std::vector<double> PosteriorState::weights() const {
  std::vector<double> w(log_q_.size());
  std::transform(log_q_.begin(), log_q_.end(), w.begin(), logistic);
  return w;
}

std::optional<std::size_t> PosteriorState::position(StreamId k) const {
  const auto it = std::lower_bound(active_.begin(), active_.end(), k);
  if (it == active_.end() || *it != k) return std::nullopt;
  return static_cast<std::size_t>(it - active_.begin());
}

void PosteriorState::advance(const ChangePointPrior& prior,
                             std::span<const double> log_lr) {
  if (log_lr.size() != active_.size()) {
    throw InvalidArgument("need one log-likelihood ratio per active stream");
  }
  const double surv_now = prior.survival(t_);
  const double surv_next = prior.survival(t_ + 1);
  if (!(surv_next > 0.0)) {
    throw SurvivalExhausted("P(tau >= " + std::to_string(t_ + 1) + ") is zero");
  }
  const double log_surv_now = std::log(surv_now);
  const double log_surv_next = std::log(surv_next);
  const double mass = prior.mass(t_);
  const double log_mass = mass > 0.0 ? std::log(mass) : kNegInf;

  for (std::size_t i = 0; i < log_q_.size(); ++i) {
    const double l = log_lr[i];
    if (!std::isfinite(l)) throw InvalidArgument("log-likelihood ratio must be finite");
    log_q_[i] = l + log_sum_exp(log_surv_now + log_q_[i], log_mass) - log_surv_next;
  }
  ++t_;
}

void PosteriorState::retain(std::span<const StreamId> keep) {
  std::vector<StreamId> ids;
  std::vector<double> lq;
  ids.reserve(keep.size());
  lq.reserve(keep.size());
  StreamId prev = 0;
  bool first = true;
  for (StreamId k : keep) {
    if (!first && k <= prev) throw InvalidArgument("retained ids must be sorted and unique");
    const auto pos = position(k);
    if (!pos) throw InvalidArgument("cannot retain inactive stream " + std::to_string(k));
    ids.push_back(k);
    lq.push_back(log_q_[*pos]);
    prev = k;
    first = false;
  }
  active_ = std::move(ids);
  log_q_ = std::move(lq);
}

PosteriorState advance(PosteriorState state, const ChangePointPrior& prior,
                       std::span<const double> log_lr) {
  state.advance(prior, log_lr);
  return state;
}

double posterior_change_by_now(const PosteriorState& state,
                               const ChangePointPrior& prior, StreamId k) {
  return change_by_now(state.weight_of(k), prior.hazard(state.time()));
}

double direct_posterior(const ChangePointPrior& prior, std::span<const double> log_lr) {
  const auto t = static_cast<Time>(log_lr.size());
  if (t < 1) throw InvalidArgument("direct posterior needs t >= 1");
  const double surv = prior.survival(t);
  if (!(surv > 0.0)) {
    throw SurvivalExhausted("P(tau >= " + std::to_string(t) + ") is zero");
  }
  // terms[s] = log pi_s + sum_{r=s+1}^{t} log L_r, built from the back.
  std::vector<double> terms(static_cast<std::size_t>(t));
  double suffix = 0.0;
  for (Time s = t - 1; s >= 0; --s) {
    suffix += log_lr[static_cast<std::size_t>(s)];
    const double m = prior.mass(s);
    terms[static_cast<std::size_t>(s)] = m > 0.0 ? std::log(m) + suffix : kNegInf;
  }
  const double log_q = log_sum_exp(terms) - std::log(surv);
  return logistic(log_q);
}

double direct_posterior(const ChangePointPrior& prior, const StreamModel& model,
                        StreamId k, std::span<const Observation> observations) {
  std::vector<double> log_lr(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    log_lr[i] = model.log_likelihood_ratio(k, static_cast<Time>(i + 1), observations[i]);
  }
  return direct_posterior(prior, log_lr);
}

}  // namespace pscd
