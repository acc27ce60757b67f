#include "hjacobi/classic.hpp"

#include <cmath>

#include "drive.hpp"
#include "hjacobi/parallel.hpp"

namespace hjacobi {

void ClassicSolveConfig::validate() const {
  if (!(tolerance_factor > 0.0 && tolerance_factor < 1.0)) {
    fail(ErrorCode::invalid_config, "tolerance_factor must lie in (0, 1)");
  }
  if (max_iterations < 1) fail(ErrorCode::invalid_config, "max_iterations must be at least 1");
  if (residual_check_interval < 1) {
    fail(ErrorCode::invalid_config, "residual_check_interval must be at least 1");
  }
}

namespace {

void require_buffers(GridShape shape, const SolutionGrid& current, const SolutionGrid& next) {
  if (current.shape() != shape || next.shape() != shape) {
    fail(ErrorCode::invalid_argument, "sweep buffers do not match the problem shape");
  }
  if (&current == &next) fail(ErrorCode::invalid_argument, "sweep buffers must be distinct");
}

double rhs_norm(const Problem& problem) {
  return std::visit(
      [](const auto& p) {
        double sum = 0.0;
        for (double b : p.rhs) sum += b * b;
        return std::sqrt(sum);
      },
      problem);
}

void sweep_into(const StencilProblem1D& p, const SolutionGrid& current, SolutionGrid& next,
                unsigned workers) {
  const std::size_t n = p.n_interior;
  const auto in = current.values();
  const auto out = next.values();
  detail::parallel_for_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double left = i > 0 ? in[i - 1] : 0.0;
      const double right = i + 1 < n ? in[i + 1] : 0.0;
      out[i] = kernel::update_1d(left, right, p.rhs[i], p.sub[i], p.sup[i], p.diag[i]);
    }
  });
}

void sweep_into(const StencilProblem2D& p, const SolutionGrid& current, SolutionGrid& next,
                unsigned workers) {
  const std::size_t nx = p.nx;
  const std::size_t ny = p.ny;
  const auto in = current.values();
  const auto out = next.values();
  // Rows are the unit of work.
  detail::parallel_for_chunks(ny, workers, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t j = row_begin; j < row_end; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t id = j * nx + i;
        const double w = i > 0 ? in[id - 1] : 0.0;
        const double e = i + 1 < nx ? in[id + 1] : 0.0;
        const double s = j > 0 ? in[id - nx] : 0.0;
        const double n = j + 1 < ny ? in[id + nx] : 0.0;
        out[id] = kernel::update_2d(w, e, s, n, p.rhs[id], p.coeffs);
      }
    }
  });
}

} // namespace

void classic_sweep(const StencilProblem1D& p, const SolutionGrid& current, SolutionGrid& next,
                   unsigned workers) {
  p.validate();
  require_buffers(shape_of(p), current, next);
  sweep_into(p, current, next, workers);
}

void classic_sweep(const StencilProblem2D& p, const SolutionGrid& current, SolutionGrid& next,
                   unsigned workers) {
  p.validate();
  require_buffers(shape_of(p), current, next);
  sweep_into(p, current, next, workers);
}

void classic_sweep(const Problem& problem, const SolutionGrid& current, SolutionGrid& next,
                   unsigned workers) {
  std::visit([&](const auto& p) { classic_sweep(p, current, next, workers); }, problem);
}

ClassicJacobi::ClassicJacobi(Problem problem, SolutionGrid initial, unsigned workers)
    : problem_(std::move(problem)), current_(std::move(initial)), workers_(workers) {
  std::visit([](const auto& p) { p.validate(); }, problem_);
  if (current_.shape() != shape_of(problem_)) {
    fail(ErrorCode::invalid_argument, "initial guess does not match the problem shape");
  }
  next_ = SolutionGrid(current_.shape());
}

void ClassicJacobi::step() {
  // Problem and buffers were checked at construction.
  std::visit([&](const auto& p) { sweep_into(p, current_, next_, workers_); }, problem_);
  current_.swap(next_);
  ++iterations_;
}

SolveResult classic_solve(const Problem& problem, SolutionGrid initial_guess,
                          const ClassicSolveConfig& config) {
  config.validate();
  ClassicJacobi solver(problem, std::move(initial_guess), config.workers);
  ConvergenceReport report = detail::drive_to_tolerance(
      [&] { solver.step(); }, [&] { return solver.residual(); }, rhs_norm(problem),
      config.tolerance_factor, config.max_iterations, config.residual_check_interval, 1);
  return {solver.current(), std::move(report)};
}

} // namespace hjacobi
