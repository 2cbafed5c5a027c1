#include "cabintherm/batch.hpp"

#include <exception>
#include <optional>

#include <fmt/format.h>

#ifdef CABINTHERM_HAVE_OPENMP
#include <omp.h>
#endif

namespace cabintherm {
namespace {

void raise_failures(std::span<const Scenario> scenarios, const std::vector<std::string>& messages) {
  std::vector<std::string> ids;
  std::string detail;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].empty()) continue;
    ids.push_back(scenarios[i].id);
    if (ids.size() <= 20) detail += fmt::format("\n  {}: {}", scenarios[i].id, messages[i]);
  }
  if (ids.empty()) return;
  if (ids.size() > 20) detail += fmt::format("\n  ... and {} more", ids.size() - 20);
  std::string what = fmt::format("{} of {} scenario(s) failed:{}", ids.size(), scenarios.size(), detail);
  throw BatchError(what, std::move(ids));
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

int available_threads() {
#ifdef CABINTHERM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<SolveResult> solve_batch_serial(std::span<const Scenario> scenarios, const ThermalModel& model,
                                            SolverKind solver) {
  std::vector<SolveResult> out(scenarios.size());
  std::vector<std::string> errors(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    try {
      out[i] = solve_best(scenarios[i], model, solver);
    } catch (...) {
      errors[i] = describe(std::current_exception());
      if (errors[i].empty()) errors[i] = "failed";
    }
  }
  raise_failures(scenarios, errors);
  return out;
}

std::vector<SolveResult> solve_batch_parallel(std::span<const Scenario> scenarios, const ThermalModel& model,
                                              SolverKind solver, int jobs) {
#ifdef CABINTHERM_HAVE_OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(scenarios.size());
  std::vector<SolveResult> out(scenarios.size());
  std::vector<std::string> errors(scenarios.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = solve_best(scenarios[i], model, solver);
    } catch (...) {
      errors[i] = describe(std::current_exception());
      if (errors[i].empty()) errors[i] = "failed";
    }
  }
  raise_failures(scenarios, errors);
  return out;
#else
  (void)jobs;
  return solve_batch_serial(scenarios, model, solver);
#endif
}

std::vector<SolveResult> solve_batch(std::span<const Scenario> scenarios, const ThermalModel& model,
                                     const BatchOptions& options) {
  if (options.jobs == 1) return solve_batch_serial(scenarios, model, options.solver);
  return solve_batch_parallel(scenarios, model, options.solver, options.jobs);
}

}  // namespace cabintherm
