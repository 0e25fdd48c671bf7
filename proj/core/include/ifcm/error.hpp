#pragma once

#include <stdexcept>
#include <string>

namespace ifcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidValueError : public Error {
 public:
  using Error::Error;
};

class EmptyAggregationError : public Error {
 public:
  using Error::Error;
};

/// A set-algebra result that breaks mu + gamma <= 1 on the validation grid.
class InvalidResultError : public Error {
 public:
  using Error::Error;
};

/// No sample carries more membership than non-membership, so the
/// intuitionistic centroid is undefined.
class IndeterminateRelationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class OutOfImageError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Unrecognized magic, version or header field in a serialized file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Payload length or content disagrees with the declared header.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ifcm
