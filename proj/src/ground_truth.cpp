#include "pscd/ground_truth.hpp"

#include <string>

#include "pscd/numeric.hpp"

namespace pscd {

GroundTruth::GroundTruth(StreamModel model, std::vector<Time> change_points,
                         std::uint64_t seed)
    : model_(std::move(model)),
      change_points_(std::move(change_points)),
      next_time_(change_points_.size(), 1) {
  if (change_points_.empty()) throw InvalidArgument("need at least one stream");
  if (model_.streams() != change_points_.size()) {
    throw InvalidArgument("model and change points disagree on the stream count");
  }
  engines_.reserve(change_points_.size());
  for (std::size_t k = 0; k < change_points_.size(); ++k) {
    engines_.emplace_back(derive_seed(seed, k));
  }
}

Observation GroundTruth::observe(StreamId k, Time t) {
  if (k >= change_points_.size()) {
    throw InvalidArgument("stream id " + std::to_string(k) + " out of range");
  }
  if (t != next_time_[k]) {
    throw InvalidArgument("stream " + std::to_string(k) + " must be read at t = " +
                          std::to_string(next_time_[k]) + ", got " + std::to_string(t));
  }
  ++next_time_[k];
  const Time tau = change_points_[k];
  return t <= tau ? model_.sample_pre(k, t, engines_[k])
                  : model_.sample_post(k, t, engines_[k]);
}

GroundTruth sample_truth(const StreamModel& model, const ChangePointPrior& prior,
                         std::size_t streams, std::uint64_t seed) {
  if (streams == 0) throw InvalidArgument("K must be at least 1");
  Rng rng(derive_seed(seed, 0xC4A9E5ULL));
  std::vector<Time> tau(streams);
  for (auto& t : tau) t = prior.sample(rng);
  return GroundTruth(model, std::move(tau), derive_seed(seed, 0x0B5E7ULL));
}

RecordedSource::RecordedSource(std::vector<std::vector<Observation>> data)
    : data_(std::move(data)) {}

Observation RecordedSource::observe(StreamId k, Time t) {
  if (k >= data_.size()) throw InvalidArgument("stream id out of range");
  if (t < 1 || t > static_cast<Time>(data_[k].size())) {
    throw InvalidArgument("no recorded observation for stream " + std::to_string(k) +
                          " at t = " + std::to_string(t));
  }
  return data_[k][static_cast<std::size_t>(t - 1)];
}

}  // namespace pscd
