#include "pscd/stream_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pscd {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const Observation& x) {
  if (!std::isfinite(x.re) || !std::isfinite(x.im)) {
    throw InvalidArgument("observation is not finite");
  }
}

double normal_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Density of CN(0, v) at a point with squared modulus `energy`.
double complex_normal_logpdf(double energy, double v) {
  return -std::log(std::numbers::pi * v) - energy / v;
}

int bernoulli_outcome(const Observation& x) {
  if (x.im != 0.0 || (x.re != 0.0 && x.re != 1.0)) {
    throw InvalidArgument("Bernoulli observation must be 0 or 1");
  }
  return x.re == 1.0 ? 1 : 0;
}

Observation draw_complex(double variance, Rng& rng) {
  std::normal_distribution<double> part(0.0, std::sqrt(variance / 2.0));
  const double re = part(rng);
  const double im = part(rng);
  return {re, im};
}

}  // namespace

StreamModel::StreamModel(StreamKind kind, std::size_t streams)
    : kind_(std::move(kind)), streams_(streams) {
  if (streams_ == 0) throw InvalidArgument("model needs at least one stream");
  std::visit(Overloaded{
                 [](const GaussianShift& g) {
                   if (!(g.sigma > 0.0) || !std::isfinite(g.mu0) ||
                       !std::isfinite(g.mu1)) {
                     throw InvalidArgument("gaussian-shift needs finite means and sigma > 0");
                   }
                 },
                 [this](const ComplexGaussianEnergy& c) {
                   if (!(c.sigma2 > 0.0)) {
                     throw InvalidArgument("complex-gaussian-energy needs sigma2 > 0");
                   }
                   if (c.lambda.size() != 1 && c.lambda.size() != streams_) {
                     throw InvalidArgument(
                         "complex-gaussian-energy needs one lambda or one per stream");
                   }
                   for (double l : c.lambda) {
                     if (!(l > 0.0) || !std::isfinite(l)) {
                       throw InvalidArgument("lambda must be positive and finite");
                     }
                   }
                 },
                 [](const BernoulliPair& b) {
                   if (!(b.p0 > 0.0 && b.p0 < 1.0 && b.p1 > 0.0 && b.p1 < 1.0)) {
                     throw InvalidArgument("bernoulli probabilities must lie in (0, 1)");
                   }
                 },
             },
             kind_);
}

void StreamModel::check_stream(StreamId k) const {
  if (k >= streams_) {
    throw InvalidArgument("stream id " + std::to_string(k) + " out of range");
  }
}

double StreamModel::lambda(StreamId k) const {
  const auto& c = std::get<ComplexGaussianEnergy>(kind_);
  return c.lambda.size() == 1 ? c.lambda.front() : c.lambda[k];
}

double StreamModel::pre_logpdf(StreamId k, Time /*t*/, const Observation& x) const {
  check_stream(k);
  require_finite(x);
  return std::visit(
      Overloaded{
          [&](const GaussianShift& g) { return normal_logpdf(x.re, g.mu0, g.sigma); },
          [&](const ComplexGaussianEnergy& c) {
            return complex_normal_logpdf(x.energy(), c.sigma2);
          },
          [&](const BernoulliPair& b) {
            return bernoulli_outcome(x) == 1 ? std::log(b.p0) : std::log1p(-b.p0);
          },
      },
      kind_);
}

double StreamModel::post_logpdf(StreamId k, Time /*t*/, const Observation& x) const {
  check_stream(k);
  require_finite(x);
  return std::visit(
      Overloaded{
          [&](const GaussianShift& g) { return normal_logpdf(x.re, g.mu1, g.sigma); },
          [&](const ComplexGaussianEnergy& c) {
            return complex_normal_logpdf(x.energy(), c.sigma2 + lambda(k));
          },
          [&](const BernoulliPair& b) {
            return bernoulli_outcome(x) == 1 ? std::log(b.p1) : std::log1p(-b.p1);
          },
      },
      kind_);
}

double StreamModel::log_likelihood_ratio(StreamId k, Time /*t*/,
                                         const Observation& x) const {
  check_stream(k);
  require_finite(x);
  return std::visit(
      Overloaded{
          [&](const GaussianShift& g) {
            // Closed form keeps the ratio exact for large |x|.
            const double s2 = g.sigma * g.sigma;
            return (g.mu1 - g.mu0) * (x.re - 0.5 * (g.mu0 + g.mu1)) / s2;
          },
          [&](const ComplexGaussianEnergy& c) {
            const double l = lambda(k);
            const double total = c.sigma2 + l;
            return std::log(c.sigma2 / total) + x.energy() * l / (c.sigma2 * total);
          },
          [&](const BernoulliPair& b) {
            return bernoulli_outcome(x) == 1 ? std::log(b.p1 / b.p0)
                                             : std::log((1.0 - b.p1) / (1.0 - b.p0));
          },
      },
      kind_);
}

Observation StreamModel::sample_pre(StreamId k, Time /*t*/, Rng& rng) const {
  check_stream(k);
  return std::visit(
      Overloaded{
          [&](const GaussianShift& g) {
            return Observation{std::normal_distribution<double>(g.mu0, g.sigma)(rng), 0.0};
          },
          [&](const ComplexGaussianEnergy& c) { return draw_complex(c.sigma2, rng); },
          [&](const BernoulliPair& b) {
            return Observation{std::bernoulli_distribution(b.p0)(rng) ? 1.0 : 0.0, 0.0};
          },
      },
      kind_);
}

Observation StreamModel::sample_post(StreamId k, Time /*t*/, Rng& rng) const {
  check_stream(k);
  return std::visit(
      Overloaded{
          [&](const GaussianShift& g) {
            return Observation{std::normal_distribution<double>(g.mu1, g.sigma)(rng), 0.0};
          },
          [&](const ComplexGaussianEnergy& c) {
            return draw_complex(c.sigma2 + lambda(k), rng);
          },
          [&](const BernoulliPair& b) {
            return Observation{std::bernoulli_distribution(b.p1)(rng) ? 1.0 : 0.0, 0.0};
          },
      },
      kind_);
}

StreamModel instantiate(const ModelSpec& spec, std::size_t streams, Rng& rng) {
  return std::visit(
      Overloaded{
          [&](const GaussianShift& g) { return StreamModel(g, streams); },
          [&](const BernoulliPair& b) { return StreamModel(b, streams); },
          [&](const ComplexGaussianEnergySpec& c) {
            ComplexGaussianEnergy kind{c.sigma2, c.lambda};
            if (kind.lambda.empty()) {
              if (!(c.lambda_min > 0.0 && c.lambda_max >= c.lambda_min)) {
                throw InvalidArgument("lambda range must satisfy 0 < min <= max");
              }
              std::uniform_real_distribution<double> draw(c.lambda_min, c.lambda_max);
              kind.lambda.resize(streams);
              for (auto& l : kind.lambda) l = draw(rng);
            }
            return StreamModel(std::move(kind), streams);
          },
      },
      spec);
}

}  // namespace pscd
