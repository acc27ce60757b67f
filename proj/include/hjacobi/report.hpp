#ifndef HJACOBI_REPORT_HPP
#define HJACOBI_REPORT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hjacobi {

/// Per-cycle work and on-chip storage of the hierarchical solver.
struct ResourceFigures {
  std::uint64_t operational_blocks = 0;
  std::uint64_t operational_threads = 0;
  std::uint64_t shared_bytes_per_block = 0;
  /// True when every subdomain extent is a multiple of the 32-wide warp.
  bool warp_aligned = false;

  friend bool operator==(const ResourceFigures&, const ResourceFigures&) = default;
};

/// Outcome of an iterative solve. residual_history[0] is the initial
/// residual; each later entry is the residual after a checked cycle.
struct ConvergenceReport {
  double initial_residual = 0.0;
  std::vector<double> residual_history;
  std::uint64_t cycles = 0;
  std::uint64_t subiterations_per_cycle = 1;
  std::uint64_t total_updates = 0;
  bool converged = false;
  std::optional<ResourceFigures> resource;

  [[nodiscard]] double final_residual() const {
    return residual_history.empty() ? initial_residual : residual_history.back();
  }
};

} // namespace hjacobi

#endif
