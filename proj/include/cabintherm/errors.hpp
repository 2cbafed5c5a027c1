#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cabintherm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (parameters, COP tables, layouts).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario data or aggregation inputs.
class DataError : public Error {
 public:
  using Error::Error;
};

// A model function produced a non-finite value or an inner iteration failed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> last_residuals = {})
      : Error(what), last_residuals_(std::move(last_residuals)) {}

  const std::vector<double>& last_residuals() const { return last_residuals_; }

 private:
  std::vector<double> last_residuals_;
};

}  // namespace cabintherm
