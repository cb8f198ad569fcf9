#pragma once

#include <stdexcept>
#include <string>

namespace swarm {

// Base class for all library errors; the CLI maps these to a single
// machine-readable "error: ..." line and a nonzero exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct PlacementError : Error { using Error::Error; };
struct SamplingExhaustedError : Error { using Error::Error; };
struct EpisodeFinishedError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct PenetrationError : Error { using Error::Error; };
struct CheckpointError : Error { using Error::Error; };
struct ModeError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace swarm
