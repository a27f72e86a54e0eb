#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pscd {

/// Discrete time index. Change points live in {0, 1, 2, ...} plus "never".
using Time = std::int64_t;

/// Sentinel for tau = infinity and for detection times censored at the horizon.
inline constexpr Time kNever = std::numeric_limits<Time>::max();

/// Streams are numbered 0..K-1 internally.
using StreamId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The prior survival mass P(tau >= t) reached zero before it was needed.
class SurvivalExhausted : public Error {
 public:
  using Error::Error;
};

/// Exhaustive subset enumeration was asked for too many streams.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

/// No subset satisfies the risk constraint at some step.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline std::string time_to_string(Time t) {
  return t == kNever ? std::string("inf") : std::to_string(t);
}

}  // namespace pscd
