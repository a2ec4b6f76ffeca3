#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lidaraug {

// Two families so front-ends can map failures onto exit codes:
// ValidationError for bad inputs/parameters, IoError for file-system problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// geometry
class ZeroVector : public ValidationError {
 public:
  ZeroVector() : ValidationError("point is at the origin; azimuth undefined") {}
};

class NonPositiveScale : public ValidationError {
 public:
  explicit NonPositiveScale(double scale)
      : ValidationError("scale must be positive, got " + std::to_string(scale)) {}
};

// target mixing
class SectorPackingFailed : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateAzimuth : public ValidationError {
 public:
  DegenerateAzimuth() : ValidationError("box center lies on the z-axis; azimuth undefined") {}
};

// adversarial mixing
class EmptyBoxList : public ValidationError {
 public:
  EmptyBoxList() : ValidationError("surrogate loss needs at least one box") {}
};

class OneSidedEmpty : public ValidationError {
 public:
  OneSidedEmpty()
      : ValidationError("consistency loss undefined: exactly one prediction set is empty") {}
};

// pipeline
class EmptyDataset : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// io
class TruncatedFile : public IoError {
 public:
  TruncatedFile(const std::string& path, std::size_t bytes)
      : IoError(path + ": length " + std::to_string(bytes) + " is not a multiple of 16 bytes") {}
};

class NonFiniteValue : public IoError {
 public:
  using IoError::IoError;
};

class MalformedRecord : public ValidationError {
 public:
  MalformedRecord(const std::string& path, std::size_t line, const std::string& why)
      : ValidationError(path + ":" + std::to_string(line) + ": " + why), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace lidaraug
