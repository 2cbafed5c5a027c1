#pragma once

#include <span>
#include <string>
#include <vector>

#include "cabintherm/errors.hpp"
#include "cabintherm/solver.hpp"

namespace cabintherm {

// Raised when any scenario of a batch fails. The message lists every failed
// scenario; nothing is silently dropped.
class BatchError : public SolverError {
 public:
  BatchError(const std::string& what, std::vector<std::string> failed)
      : SolverError(what), failed_(std::move(failed)) {}
  const std::vector<std::string>& failed_ids() const { return failed_; }

 private:
  std::vector<std::string> failed_;
};

struct BatchOptions {
  SolverKind solver = SolverKind::optimization;
  int jobs = 0;  // 0: all available threads; 1: the serial kernel
};

// Reference implementation: one scenario after another.
std::vector<SolveResult> solve_batch_serial(std::span<const Scenario> scenarios, const ThermalModel& model,
                                            SolverKind solver);

// Same results, bit for bit, with the scenarios spread over `jobs` threads
// (OpenMP; falls back to the serial kernel when built without it).
std::vector<SolveResult> solve_batch_parallel(std::span<const Scenario> scenarios, const ThermalModel& model,
                                              SolverKind solver, int jobs = 0);

std::vector<SolveResult> solve_batch(std::span<const Scenario> scenarios, const ThermalModel& model,
                                     const BatchOptions& options = {});

int available_threads();

}  // namespace cabintherm
