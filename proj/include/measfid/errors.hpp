#pragma once

#include <stdexcept>
#include <string>

namespace measfid {

// Precondition violation on caller-supplied arguments.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A computation ran but could not meet its accuracy contract. Carries the
// best available estimate so callers can still report something useful.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string &what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

  private:
    double best_estimate_;
    double error_bound_;
};

// The model assigns zero probability to what was asked of it, e.g. an
// observation with vanishing likelihood everywhere on the prior's support.
class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace measfid
