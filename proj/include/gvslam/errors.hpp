#pragma once

#include <stdexcept>
#include <string>

namespace gvslam {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NonPositiveDepth : Error {
  using Error::Error;
};
struct NearPiRotation : Error {
  using Error::Error;
};
struct OutOfBounds : Error {
  using Error::Error;
};
struct SingularHeadBlock : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct EmptyUpdate : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct NoValidPixels : Error {
  using Error::Error;
};
struct TrackingLost : Error {
  using Error::Error;
};
struct MissingIndexFile : Error {
  using Error::Error;
};
struct NoAssociations : Error {
  using Error::Error;
};
struct TooFewSamples : Error {
  using Error::Error;
};
struct DegenerateTrajectory : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

}  // namespace gvslam
