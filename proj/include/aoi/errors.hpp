#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Argument outside the domain of a function (negative age, state not in support).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Operation not defined for this transmission model kind (e.g. expectations of a Trace).
class UnsupportedModelError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Frequency constraint cannot be met even with the maximum wait.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Expected stage penalty at the maximum wait is not finite.
class UnboundedPenaltyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// E[Y + z(Y)] is zero, so the average-penalty ratio is undefined.
class DegenerateModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Lag-1 correlation of a zero-variance process.
class UndefinedCorrelationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Configuration rejected during validation; `path` names the offending field.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

}  // namespace aoi
