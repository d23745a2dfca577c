#pragma once

#include <stdexcept>
#include <string>

namespace hessq {

/// Invalid input (bad index set, inconsistent parameters, wrong class).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An order or index outside its admissible range.
class range_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The requested construction exists only for some asymptotic cases.
class unsupported_case_error : public argument_error {
 public:
  using argument_error::argument_error;
};

/// A value at or below a lower threshold (e.g. c <= c_*); carries the threshold.
class threshold_error : public std::runtime_error {
 public:
  threshold_error(const std::string& what, double threshold)
      : std::runtime_error(what), threshold_(threshold) {}
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

/// A numerical procedure failed to reach its tolerance; carries what it achieved.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace hessq
