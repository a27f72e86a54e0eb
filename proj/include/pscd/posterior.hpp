#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pscd/prior.hpp"
#include "pscd/stream_model.hpp"
#include "pscd/types.hpp"

namespace pscd {

/// Filtering posterior for the active streams at time t.
///
/// Each stream carries log Q_{k,t}, where W_{k,t} = P(tau_k < t | F_t) =
/// Q / (Q + 1). Q starts at 0 (log Q = -inf). The update is done in log space
/// because Q is a running product of likelihood ratios and leaves the range
/// of a double after a few hundred post-change steps.
///
/// Deactivated streams are removed with retain(); the state never holds data
/// for streams that are no longer observed.
class PosteriorState {
 public:
  /// Streams 0..streams-1, all active, t = 0.
  explicit PosteriorState(std::size_t streams);
  /// The given streams (sorted, unique), t = 0.
  explicit PosteriorState(std::vector<StreamId> active);

  Time time() const { return t_; }
  std::size_t size() const { return active_.size(); }
  bool empty() const { return active_.empty(); }

  std::span<const StreamId> active() const { return active_; }
  std::span<const double> log_q() const { return log_q_; }

  /// W for the i-th active stream.
  double weight_at(std::size_t i) const;
  /// W for stream k; throws if k is not active.
  double weight_of(StreamId k) const;
  std::vector<double> weights() const;

  std::optional<std::size_t> position(StreamId k) const;

  /// One step of the recursion
  ///   log Q_{t+1} = log L_{t+1} + logsumexp(log S_t + log Q_t, log pi_t) - log S_{t+1}
  /// with S the prior survival. `log_lr` is aligned with active(). Throws
  /// SurvivalExhausted if S_{t+1} <= 0 and InvalidArgument for non-finite
  /// input.
  void advance(const ChangePointPrior& prior, std::span<const double> log_lr);

  /// Drops every stream not in `keep`. `keep` must be sorted and a subset of
  /// active().
  void retain(std::span<const StreamId> keep);

 private:
  Time t_ = 0;
  std::vector<StreamId> active_;
  std::vector<double> log_q_;
};

/// Functional form of PosteriorState::advance.
PosteriorState advance(PosteriorState state, const ChangePointPrior& prior,
                       std::span<const double> log_lr);

/// g(W) = P(tau <= t | F_t) = h + (1 - h) W with h = pi_t / P(tau >= t).
inline double change_by_now(double weight, double hazard) {
  return hazard + (1.0 - hazard) * weight;
}

/// g(W_{k,t}) for an active stream of `state`.
double posterior_change_by_now(const PosteriorState& state,
                               const ChangePointPrior& prior, StreamId k);

/// W_t evaluated straight from the definition
///   Q_t = S_t^{-1} sum_{s<t} pi_s prod_{r=s+1..t} L_r
/// using log-sum-exp over s. `log_lr` holds log L_1..log L_t. Shares no code
/// with PosteriorState::advance and serves as its reference.
double direct_posterior(const ChangePointPrior& prior, std::span<const double> log_lr);

/// Same, starting from raw observations of stream k.
double direct_posterior(const ChangePointPrior& prior, const StreamModel& model,
                        StreamId k, std::span<const Observation> observations);

}  // namespace pscd
