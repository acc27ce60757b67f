#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dense_oracle.hpp"
#include "expect_error.hpp"
#include "hjacobi/hier.hpp"

namespace hjacobi {
namespace {

HierConfig config_1d(std::size_t tpb, std::size_t k, std::size_t overlap) {
  HierConfig c;
  c.tpb_x = tpb;
  c.k = k;
  c.overlap_x = overlap;
  return c;
}

HierConfig config_2d(std::size_t tpb, std::size_t k, std::size_t overlap) {
  HierConfig c = config_1d(tpb, k, overlap);
  c.tpb_y = tpb;
  c.overlap_y = overlap;
  return c;
}

// Counts how many blocks own each DOF; an exact cover has every count == 1.
std::vector<int> ownership_counts(const BlockPlan& plan) {
  std::vector<int> counts(plan.shape.dof_count(), 0);
  for (const BlockDescriptor& b : plan.blocks) {
    for (std::size_t j = b.y.owned.begin; j < b.y.owned.end; ++j) {
      for (std::size_t i = b.x.owned.begin; i < b.x.owned.end; ++i) ++counts[j * plan.shape.nx + i];
    }
  }
  return counts;
}

std::vector<std::pair<std::size_t, std::size_t>> owned_pairs(const std::vector<AxisBlock>& blocks) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& b : blocks) out.emplace_back(b.owned.begin, b.owned.end);
  return out;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

TEST(BlockPlan, TwelvePointsNoOverlap) {
  const auto blocks = partition_axis(12, 4, 0);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].start, 0u);
  EXPECT_EQ(blocks[1].start, 4u);
  EXPECT_EQ(blocks[2].start, 8u);
  EXPECT_EQ(owned_pairs(blocks), (Pairs{{0, 4}, {4, 8}, {8, 12}}));
}

TEST(BlockPlan, TwelvePointsTwoOverlap) {
  // 1-based interiors [1-4],[3-6],[5-8],[7-10],[9-12]; owned [1-3],[4-5],[6-7],[8-9],[10-12].
  const auto blocks = partition_axis(12, 4, 2);
  ASSERT_EQ(blocks.size(), 5u);
  for (std::size_t b = 0; b < 5; ++b) {
    EXPECT_EQ(blocks[b].start, 2 * b);
    EXPECT_EQ(blocks[b].extent, 4u);
  }
  EXPECT_EQ(owned_pairs(blocks), (Pairs{{0, 3}, {3, 5}, {5, 7}, {7, 9}, {9, 12}}));
}

TEST(BlockPlan, SingleBlockOwnsEverything) {
  for (std::size_t o : {0u, 2u, 4u}) {
    const auto blocks = partition_axis(8, 8, o);
    ASSERT_EQ(blocks.size(), 1u);
    EXPECT_EQ(blocks[0].owned, (AxisRange{0, 8}));
  }
}

TEST(BlockPlan, InexactTilingShiftsLastBlock) {
  // N=10, tpb=4: last block starts at 6, overlapping its predecessor by 2.
  const auto even = partition_axis(10, 4, 0);
  ASSERT_EQ(even.size(), 3u);
  EXPECT_EQ(even[2].start, 6u);
  EXPECT_EQ(owned_pairs(even), (Pairs{{0, 4}, {4, 7}, {7, 10}}));

  // N=11: one-point overlap, the predecessor keeps it.
  const auto odd = partition_axis(11, 4, 0);
  ASSERT_EQ(odd.size(), 3u);
  EXPECT_EQ(odd[2].start, 7u);
  EXPECT_EQ(owned_pairs(odd), (Pairs{{0, 4}, {4, 8}, {8, 11}}));
}

TEST(BlockPlan, InvalidConfigurationsRejected) {
  EXPECT_HJ_ERROR(partition_axis(64, 128, 0), ErrorCode::invalid_config);
  EXPECT_HJ_ERROR(partition_axis(64, 8, 8), ErrorCode::invalid_config);
  EXPECT_HJ_ERROR(partition_axis(64, 8, 3), ErrorCode::invalid_config);
  EXPECT_HJ_ERROR(partition_axis(64, 0, 0), ErrorCode::invalid_config);
  EXPECT_HJ_ERROR(make_block_plan(GridShape::line(8), config_1d(4, 0, 0)), ErrorCode::invalid_config);
  HierConfig c = config_2d(4, 2, 0);
  c.tpb_y = 9;
  EXPECT_HJ_ERROR(make_block_plan(GridShape::plane(8, 8), c), ErrorCode::invalid_config);
  c = config_2d(4, 2, 0);
  c.overlap_y = 4;
  EXPECT_HJ_ERROR(make_block_plan(GridShape::plane(8, 8), c), ErrorCode::invalid_config);
}

TEST(BlockPlan, TwoDimensionalLayoutIsProductOfAxes) {
  const BlockPlan plan = make_block_plan(GridShape::plane(12, 12), config_2d(4, 1, 0));
  EXPECT_EQ(plan.blocks.size(), 9u);
  const BlockPlan overlapped = make_block_plan(GridShape::plane(12, 8), config_2d(4, 1, 2));
  EXPECT_EQ(overlapped.x_blocks.size(), 5u);
  EXPECT_EQ(overlapped.y_blocks.size(), 3u);
  EXPECT_EQ(overlapped.blocks.size(), 15u);
  // Block (x=1, y=1) owns x in [3,5), y in [3,5): the middle of both overlaps.
  const BlockDescriptor& mid = overlapped.blocks[1 * 5 + 1];
  EXPECT_EQ(mid.x.owned, (AxisRange{3, 5}));
  EXPECT_EQ(mid.y.owned, (AxisRange{3, 5}));
  for (int c : ownership_counts(overlapped)) EXPECT_EQ(c, 1);
}

TEST(BlockPlanProperty, OwnedRangesExactlyCoverInterior) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(8, 512)(rng);
    const std::size_t tpb = std::uniform_int_distribution<std::size_t>(2, n)(rng);
    const std::size_t o = 2 * std::uniform_int_distribution<std::size_t>(0, (tpb - 2) / 2)(rng);
    const auto blocks = partition_axis(n, tpb, o);
    std::vector<int> counts(n, 0);
    for (const AxisBlock& b : blocks) {
      ASSERT_EQ(b.extent, tpb);
      ASSERT_LE(b.start + b.extent, n);
      ASSERT_GE(b.owned.begin, b.start);
      ASSERT_LE(b.owned.end, b.start + b.extent);
      for (std::size_t i = b.owned.begin; i < b.owned.end; ++i) ++counts[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(counts[i], 1) << "n=" << n << " tpb=" << tpb << " o=" << o << " i=" << i;
    }
  }
}

TEST(ResourceFigures, SharedBytesPerBlock) {
  EXPECT_EQ(resource_figures(GridShape::line(1024), config_1d(32, 16, 0)).shared_bytes_per_block, 800u);
  EXPECT_EQ(resource_figures(GridShape::plane(1024, 1024), config_2d(32, 16, 0)).shared_bytes_per_block,
            26688u);
}

TEST(ResourceFigures, OperationalBlocksAndThreads) {
  const auto r0 = resource_figures(GridShape::line(1024), config_1d(32, 16, 0));
  EXPECT_EQ(r0.operational_blocks, 32u);
  EXPECT_EQ(r0.operational_threads, 1024u);
  EXPECT_TRUE(r0.warp_aligned);

  const auto r16 = resource_figures(GridShape::line(1024), config_1d(32, 16, 16));
  EXPECT_EQ(r16.operational_threads, 2016u); // ((1024-16)/(32-16))*32

  EXPECT_EQ(resource_figures(GridShape::line(12), config_1d(4, 1, 0)).operational_blocks, 3u);
  EXPECT_EQ(resource_figures(GridShape::line(12), config_1d(4, 1, 2)).operational_blocks, 5u);

  const auto r2d = resource_figures(GridShape::plane(12, 12), config_2d(4, 1, 2));
  EXPECT_EQ(r2d.operational_blocks, 25u);
  EXPECT_EQ(r2d.operational_threads, 25u * 16u);
  EXPECT_FALSE(r2d.warp_aligned);
}

TEST(ResourceFigures, BlockCountMatchesPlan) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nx = std::uniform_int_distribution<std::size_t>(4, 90)(rng);
    const std::size_t ny = std::uniform_int_distribution<std::size_t>(4, 90)(rng);
    HierConfig c;
    c.tpb_x = std::uniform_int_distribution<std::size_t>(2, nx)(rng);
    c.tpb_y = std::uniform_int_distribution<std::size_t>(2, ny)(rng);
    c.overlap_x = 2 * std::uniform_int_distribution<std::size_t>(0, (c.tpb_x - 2) / 2)(rng);
    c.overlap_y = 2 * std::uniform_int_distribution<std::size_t>(0, (c.tpb_y - 2) / 2)(rng);
    const GridShape s = GridShape::plane(nx, ny);
    EXPECT_EQ(resource_figures(s, c).operational_blocks, make_block_plan(s, c).blocks.size());
    const GridShape l = GridShape::line(nx);
    EXPECT_EQ(resource_figures(l, c).operational_blocks, make_block_plan(l, c).blocks.size());
  }
}

TEST(BlockWorkspace, FootprintMatchesSharedMemoryFormula) {
  for (std::size_t tpb : {4u, 8u, 16u, 32u}) {
    EXPECT_EQ(BlockWorkspace(1, tpb).value_count(), 2 * (tpb + 2) + tpb);
    EXPECT_EQ(BlockWorkspace(2, tpb, tpb).value_count(), 2 * (tpb + 2) * (tpb + 2) + tpb * tpb);
    EXPECT_EQ(8 * BlockWorkspace(1, tpb).value_count(),
              resource_figures(GridShape::line(64), config_1d(tpb, 1, 0)).shared_bytes_per_block);
    EXPECT_EQ(8 * BlockWorkspace(2, tpb, tpb).value_count(),
              resource_figures(GridShape::plane(64, 64), config_2d(tpb, 1, 0)).shared_bytes_per_block);
  }
  EXPECT_EQ(BlockWorkspace(2, 8, 4).value_count(), 2u * 10u * 6u + 32u);
}

TEST(RunBlockCycle, SingleSubiterationEqualsClassicSweepOnOwnedRange) {
  std::mt19937_64 rng(21);
  const StencilProblem1D p = build_poisson_1d(30);
  const SolutionGrid snapshot(shape_of(p), testing::random_vector(30, rng));
  SolutionGrid swept(shape_of(p));
  classic_sweep(p, snapshot, swept);
  const BlockPlan plan = make_block_plan(shape_of(p), config_1d(8, 1, 2));
  for (const BlockDescriptor& b : plan.blocks) {
    const auto owned = run_block_cycle(p, snapshot, b, 1);
    ASSERT_EQ(owned.size(), b.x.owned.size());
    for (std::size_t i = 0; i < owned.size(); ++i) EXPECT_EQ(owned[i], swept.values()[b.x.owned.begin + i]);
  }

  const StencilProblem2D q = build_poisson_2d(13, 11);
  const SolutionGrid snap2(shape_of(q), testing::random_vector(13 * 11, rng));
  SolutionGrid swept2(shape_of(q));
  classic_sweep(q, snap2, swept2);
  const BlockPlan plan2 = make_block_plan(shape_of(q), config_2d(6, 1, 2));
  for (const BlockDescriptor& b : plan2.blocks) {
    const auto owned = run_block_cycle(q, snap2, b, 1);
    std::size_t at = 0;
    for (std::size_t j = b.y.owned.begin; j < b.y.owned.end; ++j) {
      for (std::size_t i = b.x.owned.begin; i < b.x.owned.end; ++i) {
        EXPECT_EQ(owned[at++], swept2.values()[j * 13 + i]);
      }
    }
  }
}

TEST(RunBlockCycle, SingleBlockDegeneratesToClassic) {
  const StencilProblem1D p = build_poisson_1d(4);
  const SolutionGrid snapshot(shape_of(p), 1.0);
  SolutionGrid a(shape_of(p));
  SolutionGrid b(shape_of(p));
  classic_sweep(p, snapshot, a);
  classic_sweep(p, a, b);
  const BlockPlan plan = make_block_plan(shape_of(p), config_1d(4, 2, 0));
  ASSERT_EQ(plan.blocks.size(), 1u);
  const auto owned = run_block_cycle(p, snapshot, plan.blocks[0], 2);
  EXPECT_EQ(owned, std::vector<double>(b.values().begin(), b.values().end()));

  const StencilProblem2D q = build_poisson_2d(5, 5);
  const SolutionGrid snap2(shape_of(q), 1.0);
  SolutionGrid c(shape_of(q));
  SolutionGrid d(shape_of(q));
  classic_sweep(q, snap2, c);
  classic_sweep(q, c, d);
  classic_sweep(q, d, c);
  const BlockPlan plan2 = make_block_plan(shape_of(q), config_2d(5, 3, 0));
  const auto owned2 = run_block_cycle(q, snap2, plan2.blocks[0], 3);
  EXPECT_EQ(owned2, std::vector<double>(c.values().begin(), c.values().end()));
}

TEST(RunBlockCycle, FrozenHaloMatchesScriptedReference) {
  // Snapshot 0.1*(1..8); block 0 iterates points 1..4 three times with point 5
  // frozen. Values frozen from tests/oracles/reference_jacobi.py.
  const StencilProblem1D p = build_poisson_1d(8);
  std::vector<double> snap(8);
  for (int i = 0; i < 8; ++i) snap[i] = 0.1 * (i + 1);
  const SolutionGrid snapshot(shape_of(p), snap);
  const BlockPlan plan = make_block_plan(shape_of(p), config_1d(4, 3, 0));
  const auto owned = run_block_cycle(p, snapshot, plan.blocks[0], 3);
  const double expected[4] = {0.11234567901234568, 0.21697530864197534, 0.3169753086419753,
                              0.4123456790123457};
  ASSERT_EQ(owned.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(owned[i], expected[i], 1e-15);
}

TEST(RunBlockCycle, OutputIgnoresValuesOutsideHalo) {
  std::mt19937_64 rng(4);
  const StencilProblem2D q = build_poisson_2d(20, 20);
  const SolutionGrid snapshot(shape_of(q), testing::random_vector(400, rng));
  const BlockPlan plan = make_block_plan(shape_of(q), config_2d(6, 5, 2));
  for (const BlockDescriptor& b : plan.blocks) {
    const auto base = run_block_cycle(q, snapshot, b, 5);
    SolutionGrid perturbed = snapshot;
    for (std::size_t j = 0; j < 20; ++j) {
      for (std::size_t i = 0; i < 20; ++i) {
        const bool in_halo = i + 1 >= b.x.start && i <= b.x.start + b.x.extent &&
                             j + 1 >= b.y.start && j <= b.y.start + b.y.extent;
        if (!in_halo) perturbed.values()[j * 20 + i] += 1e3;
      }
    }
    EXPECT_EQ(run_block_cycle(q, perturbed, b, 5), base);
  }
}

TEST(RunBlockCycle, SnapshotUnmodified) {
  const StencilProblem1D p = build_poisson_1d(16);
  const SolutionGrid snapshot(shape_of(p), 1.0);
  const SolutionGrid copy = snapshot;
  const BlockPlan plan = make_block_plan(shape_of(p), config_1d(4, 6, 2));
  for (const auto& b : plan.blocks) (void)run_block_cycle(p, snapshot, b, 6);
  EXPECT_EQ(snapshot, copy);
}

TEST(HierSolve, OneSubiterationMatchesClassicIterates) {
  const StencilProblem1D p = build_poisson_1d(48);
  HierJacobi hier(p, SolutionGrid(shape_of(p), 1.0), config_1d(12, 1, 0));
  ClassicJacobi classic(p, SolutionGrid(shape_of(p), 1.0));
  for (int it = 0; it < 100; ++it) {
    hier.cycle();
    classic.step();
    ASSERT_EQ(hier.current(), classic.current()) << "iteration " << it;
  }

  const SolveResult h = hier_solve(build_poisson_1d(16), SolutionGrid(GridShape::line(16), 1.0),
                                   config_1d(4, 1, 0));
  const SolveResult c = classic_solve(build_poisson_1d(16), SolutionGrid(GridShape::line(16), 1.0), {});
  EXPECT_EQ(h.report.cycles, c.report.cycles);
  EXPECT_EQ(h.report.residual_history, c.report.residual_history);
  EXPECT_EQ(h.solution, c.solution);
}

TEST(HierSolve, ExactGuessNeedsNoCycles) {
  const StencilProblem2D q = build_poisson_2d(16, 16);
  const SolveResult r = hier_solve(q, direct_solve_oracle(q), config_2d(8, 4, 2));
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.cycles, 0u);
}

TEST(HierSolve, OverlapReducesCyclesAt128) {
  // Cycle counts from the independent numpy run in tests/oracles/reference_jacobi.py.
  const StencilProblem1D p = build_poisson_1d(128);
  const SolveResult o0 = hier_solve(p, SolutionGrid(shape_of(p), 1.0), config_1d(16, 8, 0));
  const SolveResult o2 = hier_solve(p, SolutionGrid(shape_of(p), 1.0), config_1d(16, 8, 2));
  EXPECT_TRUE(o0.report.converged);
  EXPECT_TRUE(o2.report.converged);
  EXPECT_EQ(o0.report.cycles, 2247u);
  EXPECT_EQ(o2.report.cycles, 1673u);
  EXPECT_LE(o2.report.cycles, o0.report.cycles);
  EXPECT_EQ(o2.report.total_updates, o2.report.cycles * 8);
  ASSERT_TRUE(o2.report.resource.has_value());
  EXPECT_EQ(*o2.report.resource, resource_figures(shape_of(p), config_1d(16, 8, 2)));
}

TEST(HierSolve, DeterministicAcrossWorkersAndRuns) {
  const StencilProblem2D q = build_poisson_2d(24, 24);
  HierConfig c = config_2d(8, 6, 2);
  const SolveResult reference = hier_solve(q, SolutionGrid(shape_of(q), 1.0), c);
  for (unsigned workers : {1u, 2u, 5u}) {
    c.workers = workers;
    const SolveResult r = hier_solve(q, SolutionGrid(shape_of(q), 1.0), c);
    EXPECT_EQ(r.solution, reference.solution);
    EXPECT_EQ(r.report.cycles, reference.report.cycles);
    EXPECT_EQ(r.report.residual_history, reference.report.residual_history);
  }
}

TEST(HierSolve, CapAndErrors) {
  const StencilProblem1D p = build_poisson_1d(64);
  HierConfig c = config_1d(16, 4, 2);
  c.max_cycles = 3;
  const SolveResult r = hier_solve(p, SolutionGrid(shape_of(p), 1.0), c);
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.cycles, 3u);
  EXPECT_EQ(r.report.total_updates, 12u);

  StencilProblem1D nan = p;
  nan.rhs[10] = std::numeric_limits<double>::infinity();
  EXPECT_HJ_ERROR(hier_solve(nan, SolutionGrid(shape_of(p), 1.0), config_1d(16, 4, 0)),
                  ErrorCode::numerical_failure);
  EXPECT_HJ_ERROR(hier_solve(p, SolutionGrid(shape_of(p), 1.0), config_1d(128, 4, 0)),
                  ErrorCode::invalid_config);
  EXPECT_HJ_ERROR(hier_solve(p, SolutionGrid(GridShape::line(63), 1.0), config_1d(16, 4, 0)),
                  ErrorCode::invalid_argument);
}

} // namespace
} // namespace hjacobi
