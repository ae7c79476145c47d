#pragma once

#include <stdexcept>
#include <string>

namespace swid {

/// Shapes or dimensions do not agree with the declared network/model layout.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration or model value violates its documented invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed, truncated or version-incompatible model/dataset file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Kalman recursion produced non-finite values or a non-factorizable
/// innovation covariance.
class FilterDivergence : public std::runtime_error {
 public:
  FilterDivergence(const std::string& what, long time_index)
      : std::runtime_error(what + " (t=" + std::to_string(time_index) + ")"),
        time_index_(time_index) {}

  long time_index() const noexcept { return time_index_; }

 private:
  long time_index_;
};

/// The requested enumeration exceeds the configured candidate cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swid
