#ifndef HJACOBI_HIER_HPP
#define HJACOBI_HIER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hjacobi/classic.hpp"
#include "hjacobi/report.hpp"
#include "hjacobi/stencil.hpp"

namespace hjacobi {

/// Parameters of the block-synchronous solver. The y fields are ignored for
/// 1D problems.
struct HierConfig {
  /// Interior subdomain extent per direction (threads per block).
  std::size_t tpb_x = 32;
  std::size_t tpb_y = 32;
  /// Local subiterations per cycle.
  std::size_t k = 16;
  /// Interior points shared by adjacent subdomains; even and below tpb.
  std::size_t overlap_x = 0;
  std::size_t overlap_y = 0;
  double tolerance_factor = 1e-4;
  std::uint64_t max_cycles = 1'000'000;
  /// Threads running blocks within a cycle; results do not depend on it.
  unsigned workers = 1;

  /// Throws Error(invalid_config). `dim` selects whether y fields are checked.
  void validate(int dim) const;
};

/// Half-open range of 0-based interior indices along one axis.
struct AxisRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
  [[nodiscard]] bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
  friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

/// One subdomain along one axis. Its halo spans [start - 1, start + extent]
/// where -1 and n denote the Dirichlet ring.
struct AxisBlock {
  std::size_t start = 0;
  std::size_t extent = 0;
  AxisRange owned;

  [[nodiscard]] AxisRange interior() const noexcept { return {start, start + extent}; }
  [[nodiscard]] std::size_t halo_extent() const noexcept { return extent + 2; }
  friend bool operator==(const AxisBlock&, const AxisBlock&) = default;
};

/// A subdomain: product of one x block and one y block. 1D problems carry a
/// unit y block {0, 1, [0, 1)}.
struct BlockDescriptor {
  AxisBlock x;
  AxisBlock y;
};

struct BlockPlan {
  GridShape shape;
  std::vector<AxisBlock> x_blocks;
  std::vector<AxisBlock> y_blocks;
  /// Row-major over (y block, x block).
  std::vector<BlockDescriptor> blocks;
};

/// Splits [0, n) into blocks of width tpb advancing by tpb - overlap. When
/// the stride does not divide n - tpb, the last block is shifted back so it
/// ends at n. In every overlap between neighbours the lower block owns the
/// lower half, taking the extra point when the overlap is odd.
std::vector<AxisBlock> partition_axis(std::size_t n, std::size_t tpb, std::size_t overlap);

BlockPlan make_block_plan(GridShape shape, const HierConfig& config);

/// Work per cycle and shared-memory footprint. operational_blocks always
/// equals make_block_plan(shape, config).blocks.size().
ResourceFigures resource_figures(GridShape shape, const HierConfig& config);

/// One block's private storage, laid out as a single allocation the way the
/// on-chip buffer would be: two halo-sized solution buffers followed by the
/// interior right-hand side.
class BlockWorkspace {
public:
  BlockWorkspace() = default;
  BlockWorkspace(int dim, std::size_t tpb_x, std::size_t tpb_y = 1);

  /// Number of 8-byte values held.
  [[nodiscard]] std::size_t value_count() const noexcept { return storage_.size(); }
  [[nodiscard]] std::size_t halo_width() const noexcept { return halo_w_; }
  [[nodiscard]] std::size_t halo_height() const noexcept { return halo_h_; }

  /// Halo-sized buffer holding the most recent subiterate.
  [[nodiscard]] std::span<const double> newest() const noexcept;

  /// Copy-in, k subiterations with the halo frozen, all on private storage.
  void load(const StencilProblem1D& problem, const SolutionGrid& snapshot,
            const BlockDescriptor& block);
  void load(const StencilProblem2D& problem, const SolutionGrid& snapshot,
            const BlockDescriptor& block);
  void subiterate(const StencilProblem1D& problem, const BlockDescriptor& block, std::size_t k);
  void subiterate(const StencilProblem2D& problem, const BlockDescriptor& block, std::size_t k);

  /// Owned values (row-major over the owned rectangle).
  [[nodiscard]] std::vector<double> owned_values(const BlockDescriptor& block) const;
  /// Write the owned values into their global positions.
  void write_owned(const BlockDescriptor& block, SolutionGrid& target) const;

private:
  [[nodiscard]] std::span<double> buffer(int which) noexcept;
  [[nodiscard]] std::span<double> local_rhs() noexcept;

  int dim_ = 1;
  std::size_t tpb_x_ = 0;
  std::size_t tpb_y_ = 1;
  std::size_t halo_w_ = 0;
  std::size_t halo_h_ = 1;
  int parity_ = 0;
  std::vector<double> storage_;
};

/// One cycle of one block against an immutable snapshot: copy-in, exactly k
/// local Jacobi subiterations with halo values held at their snapshot
/// values, return of the owned sub-range.
std::vector<double> run_block_cycle(const StencilProblem1D& problem, const SolutionGrid& snapshot,
                                    const BlockDescriptor& block, std::size_t k);
std::vector<double> run_block_cycle(const StencilProblem2D& problem, const SolutionGrid& snapshot,
                                    const BlockDescriptor& block, std::size_t k);
std::vector<double> run_block_cycle(const Problem& problem, const SolutionGrid& snapshot,
                                    const BlockDescriptor& block, std::size_t k);

/// Block-synchronous Jacobi advanced one cycle at a time.
class HierJacobi {
public:
  HierJacobi(Problem problem, SolutionGrid initial, const HierConfig& config);

  /// Snapshot the global array, run every block, write owned values back.
  void cycle();

  [[nodiscard]] const SolutionGrid& current() const noexcept { return current_; }
  [[nodiscard]] const BlockPlan& plan() const noexcept { return plan_; }
  [[nodiscard]] const HierConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::uint64_t cycles() const noexcept { return cycles_; }
  [[nodiscard]] double residual() const { return residual_norm(problem_, current_); }

private:
  Problem problem_;
  HierConfig config_;
  BlockPlan plan_;
  SolutionGrid current_;
  SolutionGrid next_;
  std::uint64_t cycles_ = 0;
};

/// Cycle until ||r|| <= tolerance_factor * ||r0|| or max_cycles. The report
/// carries resource figures; total_updates = cycles * k.
SolveResult hier_solve(const Problem& problem, SolutionGrid initial_guess,
                       const HierConfig& config);

} // namespace hjacobi

#endif
