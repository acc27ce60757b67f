#include "hjacobi/stencil.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>
#include <string>

namespace hjacobi {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::invalid_argument: return "invalid argument";
  case ErrorCode::invalid_problem: return "invalid problem";
  case ErrorCode::invalid_config: return "invalid configuration";
  case ErrorCode::singular_system: return "singular system";
  case ErrorCode::numerical_failure: return "numerical failure";
  case ErrorCode::size_limit: return "size limit exceeded";
  case ErrorCode::io_error: return "I/O error";
  }
  return "unknown error";
}

void StencilProblem1D::validate() const {
  if (n_interior < 1) fail(ErrorCode::invalid_problem, "1D problem needs at least one interior DOF");
  if (!(dx > 0.0)) fail(ErrorCode::invalid_problem, "grid spacing dx must be positive");
  if (sub.size() != n_interior || diag.size() != n_interior || sup.size() != n_interior ||
      rhs.size() != n_interior) {
    fail(ErrorCode::invalid_problem, "coefficient and rhs vectors must have length n_interior");
  }
  for (std::size_t i = 0; i < n_interior; ++i) {
    if (diag[i] == 0.0) {
      fail(ErrorCode::invalid_problem, "zero diagonal coefficient in row " + std::to_string(i));
    }
  }
}

void StencilProblem2D::validate() const {
  if (nx < 1 || ny < 1) fail(ErrorCode::invalid_problem, "2D problem needs nx, ny >= 1");
  if (!(dx > 0.0) || !(dy > 0.0)) fail(ErrorCode::invalid_problem, "grid spacings must be positive");
  if (coeffs.center == 0.0) fail(ErrorCode::invalid_problem, "zero center coefficient");
  if (rhs.size() != nx * ny) fail(ErrorCode::invalid_problem, "rhs length must equal nx*ny");
}

GridShape shape_of(const StencilProblem1D& problem) noexcept {
  return GridShape::line(problem.n_interior);
}

GridShape shape_of(const StencilProblem2D& problem) noexcept {
  return GridShape::plane(problem.nx, problem.ny);
}

GridShape shape_of(const Problem& problem) noexcept {
  return std::visit([](const auto& p) { return shape_of(p); }, problem);
}

SolutionGrid::SolutionGrid(GridShape shape, double fill)
    : shape_(shape), values_(shape.dof_count(), fill) {}

SolutionGrid::SolutionGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.dof_count()) {
    fail(ErrorCode::invalid_argument, "value count does not match grid shape");
  }
}

double SolutionGrid::at(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(shape_.nx);
  if (i < -1 || i > n) fail(ErrorCode::invalid_argument, "index beyond the boundary ring");
  if (i == -1 || i == n) return 0.0;
  return values_[static_cast<std::size_t>(i)];
}

double SolutionGrid::at(std::ptrdiff_t i, std::ptrdiff_t j) const {
  const auto nx = static_cast<std::ptrdiff_t>(shape_.nx);
  const auto ny = static_cast<std::ptrdiff_t>(shape_.ny);
  if (i < -1 || i > nx || j < -1 || j > ny) {
    fail(ErrorCode::invalid_argument, "index beyond the boundary ring");
  }
  if (i == -1 || i == nx || j == -1 || j == ny) return 0.0;
  return values_[static_cast<std::size_t>(j * nx + i)];
}

void SolutionGrid::swap(SolutionGrid& other) noexcept {
  std::swap(shape_, other.shape_);
  values_.swap(other.values_);
}

double jacobi_update_1d(double left, double right, double rhs, double sub, double sup,
                        double diag) {
  if (diag == 0.0) fail(ErrorCode::invalid_problem, "zero diagonal coefficient");
  return kernel::update_1d(left, right, rhs, sub, sup, diag);
}

double jacobi_update_2d(double west, double east, double south, double north, double rhs,
                        const Stencil5& coeffs) {
  if (coeffs.center == 0.0) fail(ErrorCode::invalid_problem, "zero center coefficient");
  return kernel::update_2d(west, east, south, north, rhs, coeffs);
}

StencilProblem1D build_poisson_1d(std::size_t n_interior) {
  if (n_interior < 1) fail(ErrorCode::invalid_argument, "problem size must be at least 1");
  StencilProblem1D p;
  p.n_interior = n_interior;
  p.dx = 1.0 / static_cast<double>(n_interior + 1);
  const double inv_dx2 = 1.0 / (p.dx * p.dx);
  p.sub.assign(n_interior, -inv_dx2);
  p.sup.assign(n_interior, -inv_dx2);
  p.diag.assign(n_interior, 2.0 * inv_dx2);
  p.rhs.assign(n_interior, 1.0);
  return p;
}

StencilProblem2D build_poisson_2d(std::size_t nx, std::size_t ny) {
  if (nx < 1 || ny < 1) fail(ErrorCode::invalid_argument, "problem size must be at least 1x1");
  StencilProblem2D p;
  p.nx = nx;
  p.ny = ny;
  p.dx = 1.0 / static_cast<double>(nx + 1);
  p.dy = 1.0 / static_cast<double>(ny + 1);
  const double inv_dx2 = 1.0 / (p.dx * p.dx);
  const double inv_dy2 = 1.0 / (p.dy * p.dy);
  p.coeffs = Stencil5{-inv_dx2, -inv_dx2, -inv_dy2, -inv_dy2, 2.0 * inv_dx2 + 2.0 * inv_dy2};
  p.rhs.assign(nx * ny, 1.0);
  return p;
}

namespace {

void require_shape(GridShape expected, const SolutionGrid& x) {
  if (x.shape() != expected) fail(ErrorCode::invalid_argument, "grid shape does not match problem");
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double e : v) sum += e * e;
  return std::sqrt(sum);
}

double l2_residual(std::span<const double> rhs, std::span<const double> ax) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const double r = rhs[i] - ax[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

// y = D^-1 (A - D) x, the (negated) Jacobi iteration matrix applied to x.
void apply_offdiag_scaled(const StencilProblem1D& p, std::span<const double> x,
                          std::span<double> y) {
  const std::size_t n = p.n_interior;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? x[i - 1] : 0.0;
    const double right = i + 1 < n ? x[i + 1] : 0.0;
    y[i] = (p.sub[i] * left + p.sup[i] * right) / p.diag[i];
  }
}

void apply_offdiag_scaled(const StencilProblem2D& p, std::span<const double> x,
                          std::span<double> y) {
  const std::size_t nx = p.nx;
  const std::size_t ny = p.ny;
  const Stencil5& c = p.coeffs;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t id = j * nx + i;
      const double w = i > 0 ? x[id - 1] : 0.0;
      const double e = i + 1 < nx ? x[id + 1] : 0.0;
      const double s = j > 0 ? x[id - nx] : 0.0;
      const double n = j + 1 < ny ? x[id + nx] : 0.0;
      y[id] = (c.west * w + c.east * e + c.south * s + c.north * n) / c.center;
    }
  }
}

template <typename P>
double power_iteration(const P& p, std::size_t dofs, std::size_t iterations) {
  if (iterations < 1) fail(ErrorCode::invalid_argument, "iterations must be at least 1");
  if (dofs > oracle_dof_limit) {
    fail(ErrorCode::size_limit, "spectral radius estimate refused above " +
                                    std::to_string(oracle_dof_limit) + " DOFs");
  }
  // Positive start vector: for M-matrix stencils the iteration matrix is
  // nonnegative and its Perron vector is positive, so no dominant component
  // is missing.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> x(dofs);
  for (auto& v : x) v = dist(rng);
  const double x_norm = l2_norm(x);
  for (auto& v : x) v /= x_norm;

  std::vector<double> y(dofs);
  double estimate = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    apply_offdiag_scaled(p, x, y);
    const double y_norm = l2_norm(y);
    if (y_norm == 0.0) return 0.0;
    const double previous = estimate;
    estimate = y_norm;
    for (std::size_t i = 0; i < dofs; ++i) x[i] = y[i] / y_norm;
    if (it > 0 && std::abs(estimate - previous) < 1e-8 * estimate) break;
  }
  return estimate;
}

} // namespace

std::vector<double> apply_operator(const StencilProblem1D& p, const SolutionGrid& x) {
  p.validate();
  require_shape(shape_of(p), x);
  const std::size_t n = p.n_interior;
  const auto v = x.values();
  std::vector<double> ax(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? v[i - 1] : 0.0;
    const double right = i + 1 < n ? v[i + 1] : 0.0;
    ax[i] = p.sub[i] * left + p.diag[i] * v[i] + p.sup[i] * right;
  }
  return ax;
}

std::vector<double> apply_operator(const StencilProblem2D& p, const SolutionGrid& x) {
  p.validate();
  require_shape(shape_of(p), x);
  const std::size_t nx = p.nx;
  const std::size_t ny = p.ny;
  const Stencil5& c = p.coeffs;
  const auto v = x.values();
  std::vector<double> ax(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t id = j * nx + i;
      const double w = i > 0 ? v[id - 1] : 0.0;
      const double e = i + 1 < nx ? v[id + 1] : 0.0;
      const double s = j > 0 ? v[id - nx] : 0.0;
      const double n = j + 1 < ny ? v[id + nx] : 0.0;
      ax[id] = c.west * w + c.east * e + c.south * s + c.north * n + c.center * v[id];
    }
  }
  return ax;
}

double residual_norm(const StencilProblem1D& p, const SolutionGrid& x) {
  return l2_residual(p.rhs, apply_operator(p, x));
}

double residual_norm(const StencilProblem2D& p, const SolutionGrid& x) {
  return l2_residual(p.rhs, apply_operator(p, x));
}

double residual_norm(const Problem& problem, const SolutionGrid& x) {
  return std::visit([&](const auto& p) { return residual_norm(p, x); }, problem);
}

SolutionGrid direct_solve_oracle(const StencilProblem1D& p) {
  p.validate();
  const std::size_t n = p.n_interior;
  if (n > oracle_dof_limit) fail(ErrorCode::size_limit, "direct solve refused: system too large");

  // Thomas algorithm, no pivoting.
  std::vector<double> c_prime(n);
  std::vector<double> d_prime(n);
  double pivot = p.diag[0];
  c_prime[0] = p.sup[0] / pivot;
  d_prime[0] = p.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = p.diag[i] - p.sub[i] * c_prime[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      fail(ErrorCode::singular_system, "zero pivot in tridiagonal elimination at row " +
                                           std::to_string(i));
    }
    c_prime[i] = p.sup[i] / pivot;
    d_prime[i] = (p.rhs[i] - p.sub[i] * d_prime[i - 1]) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d_prime[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];

  SolutionGrid grid(shape_of(p), std::move(x));
  if (residual_norm(p, grid) > 1e-10 * l2_norm(p.rhs)) {
    fail(ErrorCode::singular_system, "tridiagonal system is numerically singular");
  }
  return grid;
}

SolutionGrid direct_solve_oracle(const StencilProblem2D& p) {
  p.validate();
  const std::size_t nx = p.nx;
  const std::size_t ny = p.ny;
  const std::size_t n = nx * ny;
  if (n > oracle_dof_limit) fail(ErrorCode::size_limit, "direct solve refused: system too large");

  using Index = Eigen::Index;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(5 * n);
  const Stencil5& c = p.coeffs;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const auto row = static_cast<Index>(j * nx + i);
      entries.emplace_back(row, row, c.center);
      if (i > 0) entries.emplace_back(row, row - 1, c.west);
      if (i + 1 < nx) entries.emplace_back(row, row + 1, c.east);
      if (j > 0) entries.emplace_back(row, row - static_cast<Index>(nx), c.south);
      if (j + 1 < ny) entries.emplace_back(row, row + static_cast<Index>(nx), c.north);
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Index>(n), static_cast<Index>(n));
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) fail(ErrorCode::singular_system, "sparse LU factorization failed");
  const Eigen::Map<const Eigen::VectorXd> b(p.rhs.data(), static_cast<Index>(n));
  const Eigen::VectorXd sol = lu.solve(b);
  if (lu.info() != Eigen::Success) fail(ErrorCode::singular_system, "sparse LU solve failed");

  SolutionGrid grid(shape_of(p), std::vector<double>(sol.data(), sol.data() + n));
  if (residual_norm(p, grid) > 1e-10 * l2_norm(p.rhs)) {
    fail(ErrorCode::singular_system, "pentadiagonal system is numerically singular");
  }
  return grid;
}

SolutionGrid direct_solve_oracle(const Problem& problem) {
  return std::visit([](const auto& p) { return direct_solve_oracle(p); }, problem);
}

double spectral_radius_estimate(const StencilProblem1D& p, std::size_t iterations) {
  p.validate();
  return power_iteration(p, p.n_interior, iterations);
}

double spectral_radius_estimate(const StencilProblem2D& p, std::size_t iterations) {
  p.validate();
  return power_iteration(p, p.nx * p.ny, iterations);
}

double spectral_radius_estimate(const Problem& problem, std::size_t iterations) {
  return std::visit([&](const auto& p) { return spectral_radius_estimate(p, iterations); },
                    problem);
}

} // namespace hjacobi
