#include "hjacobi/hier.hpp"

#include <cmath>
#include <string>

#include "drive.hpp"
#include "hjacobi/parallel.hpp"

namespace hjacobi {

namespace {

constexpr std::uint64_t bytes_per_value = 8;
constexpr std::size_t warp_width = 32;

void validate_axis(const char* axis, std::size_t tpb, std::size_t overlap) {
  const std::string name(axis);
  if (tpb < 1) fail(ErrorCode::invalid_config, "tpb" + name + " must be at least 1");
  if (overlap % 2 != 0) fail(ErrorCode::invalid_config, "overlap" + name + " must be even");
  if (overlap >= tpb) {
    fail(ErrorCode::invalid_config, "overlap" + name + " must be smaller than tpb" + name);
  }
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t axis_block_count(std::size_t n, std::size_t tpb, std::size_t overlap) {
  return ceil_div(n - tpb, tpb - overlap) + 1;
}

void require_fits(const char* axis, std::size_t n, std::size_t tpb) {
  if (tpb > n) {
    fail(ErrorCode::invalid_config, std::string("tpb") + axis + " = " + std::to_string(tpb) +
                                        " exceeds the " + std::to_string(n) +
                                        " interior points in that direction");
  }
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

const AxisBlock unit_axis_block{0, 1, AxisRange{0, 1}};

} // namespace

void HierConfig::validate(int dim) const {
  if (dim != 1 && dim != 2) fail(ErrorCode::invalid_config, "dimension must be 1 or 2");
  if (k < 1) fail(ErrorCode::invalid_config, "subiterations k must be at least 1");
  validate_axis(dim == 1 ? "" : "_x", tpb_x, overlap_x);
  if (dim == 2) validate_axis("_y", tpb_y, overlap_y);
  if (!(tolerance_factor > 0.0 && tolerance_factor < 1.0)) {
    fail(ErrorCode::invalid_config, "tolerance_factor must lie in (0, 1)");
  }
  if (max_cycles < 1) fail(ErrorCode::invalid_config, "max_cycles must be at least 1");
}

std::vector<AxisBlock> partition_axis(std::size_t n, std::size_t tpb, std::size_t overlap) {
  validate_axis("", tpb, overlap);
  require_fits("", n, tpb);
  const std::size_t stride = tpb - overlap;
  const std::size_t count = axis_block_count(n, tpb, overlap);

  std::vector<AxisBlock> blocks(count);
  for (std::size_t b = 0; b < count; ++b) {
    blocks[b].start = std::min(b * stride, n - tpb);
    blocks[b].extent = tpb;
  }
  blocks.front().owned.begin = 0;
  for (std::size_t b = 0; b + 1 < count; ++b) {
    const std::size_t shared = blocks[b].start + tpb - blocks[b + 1].start;
    const std::size_t split = blocks[b + 1].start + (shared + 1) / 2;
    blocks[b].owned.end = split;
    blocks[b + 1].owned.begin = split;
  }
  blocks.back().owned.end = n;
  return blocks;
}

BlockPlan make_block_plan(GridShape shape, const HierConfig& config) {
  config.validate(shape.dim);
  BlockPlan plan;
  plan.shape = shape;
  require_fits(shape.dim == 1 ? "" : "_x", shape.nx, config.tpb_x);
  plan.x_blocks = partition_axis(shape.nx, config.tpb_x, config.overlap_x);
  if (shape.dim == 2) {
    require_fits("_y", shape.ny, config.tpb_y);
    plan.y_blocks = partition_axis(shape.ny, config.tpb_y, config.overlap_y);
  } else {
    plan.y_blocks = {unit_axis_block};
  }
  plan.blocks.reserve(plan.x_blocks.size() * plan.y_blocks.size());
  for (const AxisBlock& y : plan.y_blocks) {
    for (const AxisBlock& x : plan.x_blocks) plan.blocks.push_back({x, y});
  }
  return plan;
}

ResourceFigures resource_figures(GridShape shape, const HierConfig& config) {
  config.validate(shape.dim);
  require_fits(shape.dim == 1 ? "" : "_x", shape.nx, config.tpb_x);
  ResourceFigures figures;
  const std::uint64_t tx = config.tpb_x;
  if (shape.dim == 1) {
    figures.operational_blocks = axis_block_count(shape.nx, config.tpb_x, config.overlap_x);
    figures.operational_threads = figures.operational_blocks * tx;
    figures.shared_bytes_per_block = bytes_per_value * (2 * (tx + 2) + tx);
  } else {
    require_fits("_y", shape.ny, config.tpb_y);
    const std::uint64_t ty = config.tpb_y;
    figures.operational_blocks = axis_block_count(shape.nx, config.tpb_x, config.overlap_x) *
                                 axis_block_count(shape.ny, config.tpb_y, config.overlap_y);
    figures.operational_threads = figures.operational_blocks * tx * ty;
    figures.shared_bytes_per_block = bytes_per_value * (2 * (tx + 2) * (ty + 2) + tx * ty);
  }
  // Rows of a subdomain map onto warps, so only the x extent matters.
  figures.warp_aligned = config.tpb_x % warp_width == 0;
  return figures;
}

BlockWorkspace::BlockWorkspace(int dim, std::size_t tpb_x, std::size_t tpb_y)
    : dim_(dim), tpb_x_(tpb_x), tpb_y_(dim == 2 ? tpb_y : 1), halo_w_(tpb_x + 2),
      halo_h_(dim == 2 ? tpb_y + 2 : 1) {
  storage_.assign(2 * halo_w_ * halo_h_ + tpb_x_ * tpb_y_, 0.0);
}

std::span<double> BlockWorkspace::buffer(int which) noexcept {
  const std::size_t halo = halo_w_ * halo_h_;
  return std::span<double>(storage_).subspan(static_cast<std::size_t>(which) * halo, halo);
}

std::span<double> BlockWorkspace::local_rhs() noexcept {
  const std::size_t halo = halo_w_ * halo_h_;
  return std::span<double>(storage_).subspan(2 * halo, tpb_x_ * tpb_y_);
}

std::span<const double> BlockWorkspace::newest() const noexcept {
  const std::size_t halo = halo_w_ * halo_h_;
  return std::span<const double>(storage_).subspan(static_cast<std::size_t>(parity_) * halo, halo);
}

void BlockWorkspace::load(const StencilProblem1D& problem, const SolutionGrid& snapshot,
                          const BlockDescriptor& block) {
  auto buf0 = buffer(0);
  auto buf1 = buffer(1);
  auto rhs = local_rhs();
  const auto first = static_cast<std::ptrdiff_t>(block.x.start) - 1;
  for (std::size_t li = 0; li < halo_w_; ++li) {
    const double v = snapshot.at(first + static_cast<std::ptrdiff_t>(li));
    buf0[li] = v;
    buf1[li] = v;
  }
  for (std::size_t li = 0; li < tpb_x_; ++li) rhs[li] = problem.rhs[block.x.start + li];
  parity_ = 0;
}

void BlockWorkspace::load(const StencilProblem2D& problem, const SolutionGrid& snapshot,
                          const BlockDescriptor& block) {
  auto buf0 = buffer(0);
  auto buf1 = buffer(1);
  auto rhs = local_rhs();
  const auto first_i = static_cast<std::ptrdiff_t>(block.x.start) - 1;
  const auto first_j = static_cast<std::ptrdiff_t>(block.y.start) - 1;
  for (std::size_t lj = 0; lj < halo_h_; ++lj) {
    for (std::size_t li = 0; li < halo_w_; ++li) {
      const double v = snapshot.at(first_i + static_cast<std::ptrdiff_t>(li),
                                   first_j + static_cast<std::ptrdiff_t>(lj));
      buf0[lj * halo_w_ + li] = v;
      buf1[lj * halo_w_ + li] = v;
    }
  }
  for (std::size_t lj = 0; lj < tpb_y_; ++lj) {
    const std::size_t row = (block.y.start + lj) * problem.nx + block.x.start;
    for (std::size_t li = 0; li < tpb_x_; ++li) rhs[lj * tpb_x_ + li] = problem.rhs[row + li];
  }
  parity_ = 0;
}

void BlockWorkspace::subiterate(const StencilProblem1D& problem, const BlockDescriptor& block,
                                std::size_t k) {
  const auto rhs = local_rhs();
  const std::size_t g0 = block.x.start;
  for (std::size_t s = 0; s < k; ++s) {
    const auto cur = buffer(parity_);
    const auto nxt = buffer(1 - parity_);
    for (std::size_t li = 1; li <= tpb_x_; ++li) {
      const std::size_t g = g0 + li - 1;
      nxt[li] = kernel::update_1d(cur[li - 1], cur[li + 1], rhs[li - 1], problem.sub[g],
                                  problem.sup[g], problem.diag[g]);
    }
    parity_ = 1 - parity_;
  }
}

void BlockWorkspace::subiterate(const StencilProblem2D& problem, const BlockDescriptor&,
                                std::size_t k) {
  const auto rhs = local_rhs();
  const std::size_t w = halo_w_;
  for (std::size_t s = 0; s < k; ++s) {
    const auto cur = buffer(parity_);
    const auto nxt = buffer(1 - parity_);
    for (std::size_t lj = 1; lj <= tpb_y_; ++lj) {
      for (std::size_t li = 1; li <= tpb_x_; ++li) {
        const std::size_t id = lj * w + li;
        nxt[id] = kernel::update_2d(cur[id - 1], cur[id + 1], cur[id - w], cur[id + w],
                                    rhs[(lj - 1) * tpb_x_ + (li - 1)], problem.coeffs);
      }
    }
    parity_ = 1 - parity_;
  }
}

std::vector<double> BlockWorkspace::owned_values(const BlockDescriptor& block) const {
  const auto src = newest();
  std::vector<double> out;
  out.reserve(block.x.owned.size() * block.y.owned.size());
  for (std::size_t gj = block.y.owned.begin; gj < block.y.owned.end; ++gj) {
    const std::size_t lj = dim_ == 2 ? gj - block.y.start + 1 : 0;
    for (std::size_t gi = block.x.owned.begin; gi < block.x.owned.end; ++gi) {
      out.push_back(src[lj * halo_w_ + (gi - block.x.start + 1)]);
    }
  }
  return out;
}

void BlockWorkspace::write_owned(const BlockDescriptor& block, SolutionGrid& target) const {
  const auto src = newest();
  const auto dst = target.values();
  const std::size_t nx = target.shape().nx;
  for (std::size_t gj = block.y.owned.begin; gj < block.y.owned.end; ++gj) {
    const std::size_t lj = dim_ == 2 ? gj - block.y.start + 1 : 0;
    for (std::size_t gi = block.x.owned.begin; gi < block.x.owned.end; ++gi) {
      dst[gj * nx + gi] = src[lj * halo_w_ + (gi - block.x.start + 1)];
    }
  }
}

namespace {

template <typename P>
void check_block(const P& problem, const SolutionGrid& snapshot, const BlockDescriptor& block,
                 std::size_t k) {
  problem.validate();
  const GridShape shape = shape_of(problem);
  if (snapshot.shape() != shape) {
    fail(ErrorCode::invalid_argument, "snapshot does not match the problem shape");
  }
  if (k < 1) fail(ErrorCode::invalid_config, "subiterations k must be at least 1");
  const auto axis_ok = [](const AxisBlock& b, std::size_t n) {
    return b.extent >= 1 && b.start + b.extent <= n && b.owned.begin >= b.start &&
           b.owned.end <= b.start + b.extent && b.owned.begin <= b.owned.end;
  };
  if (!axis_ok(block.x, shape.nx) || !axis_ok(block.y, shape.ny)) {
    fail(ErrorCode::invalid_argument, "block descriptor does not fit the grid");
  }
}

template <typename P>
std::vector<double> run_block_cycle_impl(const P& problem, const SolutionGrid& snapshot,
                                         const BlockDescriptor& block, std::size_t k) {
  check_block(problem, snapshot, block, k);
  BlockWorkspace ws(shape_of(problem).dim, block.x.extent, block.y.extent);
  ws.load(problem, snapshot, block);
  ws.subiterate(problem, block, k);
  return ws.owned_values(block);
}

} // namespace

std::vector<double> run_block_cycle(const StencilProblem1D& problem, const SolutionGrid& snapshot,
                                    const BlockDescriptor& block, std::size_t k) {
  return run_block_cycle_impl(problem, snapshot, block, k);
}

std::vector<double> run_block_cycle(const StencilProblem2D& problem, const SolutionGrid& snapshot,
                                    const BlockDescriptor& block, std::size_t k) {
  return run_block_cycle_impl(problem, snapshot, block, k);
}

std::vector<double> run_block_cycle(const Problem& problem, const SolutionGrid& snapshot,
                                    const BlockDescriptor& block, std::size_t k) {
  return std::visit([&](const auto& p) { return run_block_cycle(p, snapshot, block, k); },
                    problem);
}

HierJacobi::HierJacobi(Problem problem, SolutionGrid initial, const HierConfig& config)
    : problem_(std::move(problem)), config_(config), current_(std::move(initial)) {
  std::visit([](const auto& p) { p.validate(); }, problem_);
  const GridShape shape = shape_of(problem_);
  if (current_.shape() != shape) {
    fail(ErrorCode::invalid_argument, "initial guess does not match the problem shape");
  }
  plan_ = make_block_plan(shape, config_);
  next_ = SolutionGrid(shape);
}

void HierJacobi::cycle() {
  const GridShape shape = current_.shape();
  // current_ is the immutable snapshot for the whole cycle; owned ranges
  // tile the grid, so next_ is fully overwritten.
  std::visit(
      [&](const auto& p) {
        detail::parallel_for_chunks(
            plan_.blocks.size(), config_.workers, [&](std::size_t begin, std::size_t end) {
              BlockWorkspace ws(shape.dim, config_.tpb_x, config_.tpb_y);
              for (std::size_t b = begin; b < end; ++b) {
                const BlockDescriptor& block = plan_.blocks[b];
                ws.load(p, current_, block);
                ws.subiterate(p, block, config_.k);
                ws.write_owned(block, next_);
              }
            });
      },
      problem_);
  current_.swap(next_);
  ++cycles_;
}

SolveResult hier_solve(const Problem& problem, SolutionGrid initial_guess,
                       const HierConfig& config) {
  HierJacobi solver(problem, std::move(initial_guess), config);
  ConvergenceReport report = detail::drive_to_tolerance(
      [&] { solver.cycle(); }, [&] { return solver.residual(); }, rhs_norm(problem),
      config.tolerance_factor, config.max_cycles, 1, config.k);
  report.resource = resource_figures(shape_of(problem), config);
  return {solver.current(), std::move(report)};
}

} // namespace hjacobi
