#ifndef HJACOBI_STENCIL_HPP
#define HJACOBI_STENCIL_HPP

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "hjacobi/error.hpp"

namespace hjacobi {

/// Largest system the direct-solve and spectral-radius oracles accept.
inline constexpr std::size_t oracle_dof_limit = 100000;

/// Tridiagonal system in stencil form. Row i couples x[i-1] (sub[i]),
/// x[i] (diag[i]) and x[i+1] (sup[i]); sub[0] and sup[n-1] multiply the
/// zero Dirichlet ring and never contribute.
struct StencilProblem1D {
  std::size_t n_interior = 0;
  double dx = 0.0;
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> sup;
  std::vector<double> rhs;

  /// Throws Error(invalid_problem) on a violated invariant.
  void validate() const;
};

/// The five constants of a pentadiagonal structured-grid stencil.
struct Stencil5 {
  double west = 0.0;
  double east = 0.0;
  double south = 0.0;
  double north = 0.0;
  double center = 0.0;
};

/// Pentadiagonal system on an nx-by-ny interior, row-major with x fastest.
struct StencilProblem2D {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  Stencil5 coeffs;
  std::vector<double> rhs;

  void validate() const;
};

using Problem = std::variant<StencilProblem1D, StencilProblem2D>;

struct GridShape {
  int dim = 1;
  std::size_t nx = 0;
  std::size_t ny = 1;

  [[nodiscard]] std::size_t dof_count() const noexcept { return nx * ny; }
  friend bool operator==(const GridShape&, const GridShape&) = default;

  static GridShape line(std::size_t n) { return {1, n, 1}; }
  static GridShape plane(std::size_t nx, std::size_t ny) { return {2, nx, ny}; }
};

GridShape shape_of(const StencilProblem1D& problem) noexcept;
GridShape shape_of(const StencilProblem2D& problem) noexcept;
GridShape shape_of(const Problem& problem) noexcept;

/// Interior DOF values with an implicit homogeneous Dirichlet ring: any read
/// one step outside the interior yields exactly 0.
class SolutionGrid {
public:
  SolutionGrid() = default;
  explicit SolutionGrid(GridShape shape, double fill = 0.0);
  SolutionGrid(GridShape shape, std::vector<double> values);

  [[nodiscard]] const GridShape& shape() const noexcept { return shape_; }
  [[nodiscard]] int dim() const noexcept { return shape_.dim; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }

  /// 1D read with boundary ring; valid for -1 <= i <= nx.
  [[nodiscard]] double at(std::ptrdiff_t i) const;
  /// 2D read with boundary ring; valid for -1 <= i <= nx, -1 <= j <= ny.
  [[nodiscard]] double at(std::ptrdiff_t i, std::ptrdiff_t j) const;

  void swap(SolutionGrid& other) noexcept;

  friend bool operator==(const SolutionGrid&, const SolutionGrid&) = default;

private:
  GridShape shape_{};
  std::vector<double> values_;
};

namespace kernel {

// Unchecked point updates shared by every sweep so that all solvers perform
// the same floating-point operations in the same order.
inline double update_1d(double left, double right, double rhs, double sub, double sup,
                        double diag) noexcept {
  return (rhs - sub * left - sup * right) / diag;
}

inline double update_2d(double west, double east, double south, double north, double rhs,
                        const Stencil5& c) noexcept {
  return (rhs - c.west * west - c.east * east - c.south * south - c.north * north) / c.center;
}

} // namespace kernel

/// Elemental Jacobi update of one tridiagonal row.
double jacobi_update_1d(double left, double right, double rhs, double sub, double sup,
                        double diag);

/// Elemental Jacobi update of one five-point stencil row.
double jacobi_update_2d(double west, double east, double south, double north, double rhs,
                        const Stencil5& coeffs);

/// -u'' = 1 on (0,1), u(0) = u(1) = 0, scaled by 1/dx^2.
StencilProblem1D build_poisson_1d(std::size_t n_interior);

/// -(u_xx + u_yy) = 1 on the unit square with zero Dirichlet data. The center
/// coefficient is 2/dx^2 + 2/dy^2.
StencilProblem2D build_poisson_2d(std::size_t nx, std::size_t ny);

/// A x with the zero ring applied at the domain edge.
std::vector<double> apply_operator(const StencilProblem1D& problem, const SolutionGrid& x);
std::vector<double> apply_operator(const StencilProblem2D& problem, const SolutionGrid& x);

/// ||b - A x||_2.
double residual_norm(const StencilProblem1D& problem, const SolutionGrid& x);
double residual_norm(const StencilProblem2D& problem, const SolutionGrid& x);
double residual_norm(const Problem& problem, const SolutionGrid& x);

/// Direct solve for test and reference use. Tridiagonal systems use the
/// Thomas algorithm; 2D systems a sparse LU factorization.
SolutionGrid direct_solve_oracle(const StencilProblem1D& problem);
SolutionGrid direct_solve_oracle(const StencilProblem2D& problem);
SolutionGrid direct_solve_oracle(const Problem& problem);

/// Power-iteration estimate of rho(D^-1 (A - D)). Stops when the estimate
/// changes by less than 1e-8 relative, or after `iterations` steps.
double spectral_radius_estimate(const StencilProblem1D& problem, std::size_t iterations);
double spectral_radius_estimate(const StencilProblem2D& problem, std::size_t iterations);
double spectral_radius_estimate(const Problem& problem, std::size_t iterations);

} // namespace hjacobi

#endif
