#ifndef HJACOBI_CLASSIC_HPP
#define HJACOBI_CLASSIC_HPP

#include <cstdint>

#include "hjacobi/report.hpp"
#include "hjacobi/stencil.hpp"

namespace hjacobi {

struct ClassicSolveConfig {
  double tolerance_factor = 1e-4;
  std::uint64_t max_iterations = 10'000'000;
  std::uint64_t residual_check_interval = 1;
  /// Threads used per sweep; results do not depend on it.
  unsigned workers = 1;

  void validate() const;
};

/// One full-grid Jacobi sweep: next <- update(current). `current` is read
/// only; `next` must be a distinct grid of the same shape.
void classic_sweep(const StencilProblem1D& problem, const SolutionGrid& current,
                   SolutionGrid& next, unsigned workers = 1);
void classic_sweep(const StencilProblem2D& problem, const SolutionGrid& current,
                   SolutionGrid& next, unsigned workers = 1);
void classic_sweep(const Problem& problem, const SolutionGrid& current, SolutionGrid& next,
                   unsigned workers = 1);

struct SolveResult {
  SolutionGrid solution;
  ConvergenceReport report;
};

/// Double-buffered Jacobi iteration advanced one sweep at a time.
class ClassicJacobi {
public:
  ClassicJacobi(Problem problem, SolutionGrid initial, unsigned workers = 1);

  /// Sweep into the back buffer, then exchange buffers.
  void step();

  [[nodiscard]] const SolutionGrid& current() const noexcept { return current_; }
  [[nodiscard]] const Problem& problem() const noexcept { return problem_; }
  [[nodiscard]] std::uint64_t iterations() const noexcept { return iterations_; }
  [[nodiscard]] double residual() const { return residual_norm(problem_, current_); }

private:
  Problem problem_;
  SolutionGrid current_;
  SolutionGrid next_;
  unsigned workers_;
  std::uint64_t iterations_ = 0;
};

/// Iterate until ||r|| <= tolerance_factor * ||r0|| or max_iterations.
/// Non-convergence is reported, not thrown; a NaN/Inf residual throws
/// Error(numerical_failure).
SolveResult classic_solve(const Problem& problem, SolutionGrid initial_guess,
                          const ClassicSolveConfig& config);

} // namespace hjacobi

#endif
