#ifndef HJACOBI_SRC_DRIVE_HPP
#define HJACOBI_SRC_DRIVE_HPP

#include <cmath>
#include <cstdint>

#include "hjacobi/error.hpp"
#include "hjacobi/report.hpp"

namespace hjacobi::detail {

/// Initial guesses whose residual is already at direct-solve accuracy count
/// as converged before any cycle runs.
inline constexpr double solved_relative_to_rhs = 1e-10;

inline void check_finite(double residual, std::uint64_t cycle) {
  if (!std::isfinite(residual)) {
    fail(ErrorCode::numerical_failure,
         "non-finite residual after cycle " + std::to_string(cycle));
  }
}

/// Shared outer loop. `step` advances one cycle, `residual` evaluates
/// ||b - A x|| of the current iterate.
template <typename Step, typename Residual>
ConvergenceReport drive_to_tolerance(Step&& step, Residual&& residual, double rhs_norm,
                                     double tolerance_factor, std::uint64_t max_cycles,
                                     std::uint64_t check_interval,
                                     std::uint64_t subiterations) {
  ConvergenceReport report;
  report.subiterations_per_cycle = subiterations;
  report.initial_residual = residual();
  check_finite(report.initial_residual, 0);
  report.residual_history.push_back(report.initial_residual);

  if (report.initial_residual <= solved_relative_to_rhs * rhs_norm) {
    report.converged = true;
    return report;
  }

  const double target = tolerance_factor * report.initial_residual;
  while (report.cycles < max_cycles) {
    step();
    ++report.cycles;
    if (report.cycles % check_interval != 0 && report.cycles != max_cycles) continue;
    const double r = residual();
    check_finite(r, report.cycles);
    report.residual_history.push_back(r);
    if (r <= target) {
      report.converged = true;
      break;
    }
  }
  report.total_updates = report.cycles * subiterations;
  return report;
}

} // namespace hjacobi::detail

#endif
