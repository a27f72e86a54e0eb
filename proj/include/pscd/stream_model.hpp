#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "pscd/prior.hpp"
#include "pscd/types.hpp"

namespace pscd {

/// One observation. Real-valued models use `re` only; complex models use
/// both parts and depend on the data through the energy re^2 + im^2.
struct Observation {
  double re = 0.0;
  double im = 0.0;

  double energy() const { return re * re + im * im; }
};

/// N(mu0, sigma^2) before the change, N(mu1, sigma^2) after.
struct GaussianShift {
  double mu0 = 0.0;
  double mu1 = 1.0;
  double sigma = 1.0;
};

/// CN(0, sigma2) before the change, CN(0, sigma2 + lambda_k) after. One
/// lambda per stream, or a single value shared by all streams.
struct ComplexGaussianEnergy {
  double sigma2 = 1.0;
  std::vector<double> lambda;
};

/// Bernoulli(p0) before the change, Bernoulli(p1) after.
struct BernoulliPair {
  double p0 = 0.5;
  double p1 = 0.5;
};

using StreamKind = std::variant<GaussianShift, ComplexGaussianEnergy, BernoulliPair>;

/// Pre- and post-change densities for K streams. Time-homogeneous: the time
/// argument is accepted for interface fidelity and ignored by the built-in
/// kinds. Immutable after construction.
class StreamModel {
 public:
  StreamModel(StreamKind kind, std::size_t streams);

  std::size_t streams() const { return streams_; }
  const StreamKind& kind() const { return kind_; }

  double pre_logpdf(StreamId k, Time t, const Observation& x) const;
  double post_logpdf(StreamId k, Time t, const Observation& x) const;

  /// log q_{k,t}(x) - log p_{k,t}(x). Throws InvalidArgument for non-finite or
  /// out-of-support observations.
  double log_likelihood_ratio(StreamId k, Time t, const Observation& x) const;

  Observation sample_pre(StreamId k, Time t, Rng& rng) const;
  Observation sample_post(StreamId k, Time t, Rng& rng) const;

 private:
  double lambda(StreamId k) const;
  void check_stream(StreamId k) const;

  StreamKind kind_;
  std::size_t streams_;
};

/// Configuration-level description of a model. Differs from StreamKind only
/// for the complex kind, whose per-stream lambdas may be drawn at
/// instantiation time from U[lambda_min, lambda_max].
struct ComplexGaussianEnergySpec {
  double sigma2 = 2.0;
  std::vector<double> lambda;  // fixed values; empty means "draw uniformly"
  double lambda_min = 1.0;
  double lambda_max = 2.0;
};

using ModelSpec = std::variant<GaussianShift, ComplexGaussianEnergySpec, BernoulliPair>;

/// Builds the model for one replication. Draws lambdas from `rng` only when
/// the spec asks for random lambdas.
StreamModel instantiate(const ModelSpec& spec, std::size_t streams, Rng& rng);

}  // namespace pscd
