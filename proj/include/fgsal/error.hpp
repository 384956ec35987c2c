#pragma once

#include <stdexcept>
#include <string>

namespace fgsal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File missing or unreadable.
struct IoError : Error {
  using Error::Error;
};

/// Bytes exist but cannot be decoded, or decoded content violates a hard
/// format constraint (e.g. images smaller than 8x8).
struct FormatError : Error {
  using Error::Error;
};

/// Argument outside an operation's documented domain.
struct ParamError : Error {
  using Error::Error;
};

/// Two inputs that must agree in shape do not.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A window or rectangle falls outside the image.
struct BoundsError : Error {
  using Error::Error;
};

/// Adaptive thresholding found no split: every region landed on one side.
struct DegenerateForeground : Error {
  using Error::Error;
};

/// Foreground mask lacks a foreground or background region.
struct DegenerateMask : Error {
  using Error::Error;
};

/// Ground-truth mask has no positive pixel.
struct EmptyGroundTruth : Error {
  using Error::Error;
};

}  // namespace fgsal
