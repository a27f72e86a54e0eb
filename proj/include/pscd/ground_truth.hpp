#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pscd/prior.hpp"
#include "pscd/stream_model.hpp"

namespace pscd {

/// Anything that can hand out X_{k,t}. Each stream is read in time order,
/// t = 1, 2, ..., and only while it is active.
class ObservationSource {
 public:
  virtual ~ObservationSource() = default;
  virtual std::size_t streams() const = 0;
  virtual Observation observe(StreamId k, Time t) = 0;
};

/// Simulated world: change points plus a lazy observation generator.
/// X_{k,t} is drawn from the pre-change density iff t <= tau_k. Every stream
/// owns its own random substream, so the data a stream produces does not
/// depend on which other streams are still being read.
class GroundTruth final : public ObservationSource {
 public:
  GroundTruth(StreamModel model, std::vector<Time> change_points, std::uint64_t seed);

  std::size_t streams() const override { return change_points_.size(); }
  const std::vector<Time>& change_points() const { return change_points_; }
  const StreamModel& model() const { return model_; }

  /// Requires t == 1 + (number of earlier reads of stream k).
  Observation observe(StreamId k, Time t) override;

 private:
  StreamModel model_;
  std::vector<Time> change_points_;
  std::vector<Rng> engines_;
  std::vector<Time> next_time_;
};

/// tau_k i.i.d. from the prior; deterministic given the seed.
GroundTruth sample_truth(const StreamModel& model, const ChangePointPrior& prior,
                         std::size_t streams, std::uint64_t seed);

/// Replays a fixed table of observations, rows = streams, columns = t = 1..T.
class RecordedSource final : public ObservationSource {
 public:
  explicit RecordedSource(std::vector<std::vector<Observation>> data);

  std::size_t streams() const override { return data_.size(); }
  Observation observe(StreamId k, Time t) override;

 private:
  std::vector<std::vector<Observation>> data_;
};

}  // namespace pscd
