#pragma once

#include <stdexcept>
#include <string>

namespace siaftp {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value fell outside the representable range of an AttributeSpec.
struct RangeError : Error {
  using Error::Error;
};

// A differential exceeded the signed magnitude range of its spec.
struct SaturationError : Error {
  using Error::Error;
};

// Normalizer fitting failed (degenerate attribute).
struct FitError : Error {
  using Error::Error;
};

// Bad or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

// An operation was invoked before its required state was prepared.
struct StateError : Error {
  using Error::Error;
};

// A stage was started without its prerequisite checkpoints.
struct OrchestrationError : Error {
  using Error::Error;
};

// Checkpoint checksum mismatch or truncated file.
struct IntegrityError : Error {
  using Error::Error;
};

// Checkpoint format version is not supported.
struct VersionError : Error {
  using Error::Error;
};

// The episode generator could not realize the requested intent; callers
// resample with a fresh stream.
struct GenerationRejected : Error {
  using Error::Error;
};

// Training loss became non-finite.
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace siaftp
