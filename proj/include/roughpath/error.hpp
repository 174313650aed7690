#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rp {

/// Bad shapes, mismatched grids, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A required capability (e.g. a derivative) is missing from a user-supplied field.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical blow-up. Carries the time at which the state became non-finite or
/// exceeded the guard, and the partition interval when raised inside a scheme.
class Diverged : public std::runtime_error {
 public:
  Diverged(const std::string& what, double time, long interval = -1)
      : std::runtime_error(what), time_(time), interval_(interval) {}

  double time() const noexcept { return time_; }
  long interval() const noexcept { return interval_; }

 private:
  double time_;
  long interval_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace rp
