// Dense reference computations for tests. These assemble the matrix entry by
// entry from the problem coefficients and never call the library's stencil
// application, sweeps or solvers.
#ifndef HJACOBI_TESTS_DENSE_ORACLE_HPP
#define HJACOBI_TESTS_DENSE_ORACLE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "hjacobi/stencil.hpp"

namespace hjacobi::testing {

inline Eigen::MatrixXd dense_matrix(const StencilProblem1D& p) {
  const auto n = static_cast<Eigen::Index>(p.n_interior);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = p.diag[static_cast<std::size_t>(i)];
    if (i > 0) a(i, i - 1) = p.sub[static_cast<std::size_t>(i)];
    if (i + 1 < n) a(i, i + 1) = p.sup[static_cast<std::size_t>(i)];
  }
  return a;
}

inline Eigen::MatrixXd dense_matrix(const StencilProblem2D& p) {
  const auto nx = static_cast<Eigen::Index>(p.nx);
  const auto ny = static_cast<Eigen::Index>(p.ny);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nx * ny, nx * ny);
  const auto idx = [nx](Eigen::Index i, Eigen::Index j) { return j * nx + i; };
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const auto r = idx(i, j);
      a(r, r) = p.coeffs.center;
      if (i > 0) a(r, idx(i - 1, j)) = p.coeffs.west;
      if (i + 1 < nx) a(r, idx(i + 1, j)) = p.coeffs.east;
      if (j > 0) a(r, idx(i, j - 1)) = p.coeffs.south;
      if (j + 1 < ny) a(r, idx(i, j + 1)) = p.coeffs.north;
    }
  }
  return a;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

/// x_{n+1} = D^-1 (b - (A - D) x_n), dense.
inline Eigen::VectorXd dense_jacobi_step(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = a.diagonal();
  Eigen::MatrixXd off = a;
  off.diagonal().setZero();
  return (b - off * x).cwiseQuotient(d);
}

/// max |lambda| of D^-1 (A - D) via a dense eigensolver.
inline double dense_jacobi_spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd j = a;
  j.diagonal().setZero();
  for (Eigen::Index r = 0; r < a.rows(); ++r) j.row(r) /= a(r, r);
  Eigen::EigenSolver<Eigen::MatrixXd> es(j);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& e : v) e = dist(rng);
  return v;
}

inline double max_relative_difference(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

} // namespace hjacobi::testing

#endif
