#ifndef HJACOBI_EXPERIMENT_HPP
#define HJACOBI_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hjacobi/hier.hpp"
#include "hjacobi/report.hpp"
#include "hjacobi/stencil.hpp"

namespace hjacobi {

enum class SolverMode { classic, hier };

/// One experiment: a Poisson problem with ones rhs and ones initial guess,
/// and the solver parameters to run or sweep.
struct ExperimentSpec {
  int dim = 1;
  std::size_t nx = 1024;
  std::size_t ny = 1024;
  SolverMode mode = SolverMode::hier;
  std::size_t tpb_x = 32;
  std::size_t tpb_y = 32;
  std::vector<std::size_t> k_list{16};
  std::vector<std::size_t> overlap_list{0};
  double tolerance_factor = 1e-4;
  std::uint64_t max_cycles = 1'000'000;
  std::string output_path;
  /// Reserved for randomized right-hand sides; unused.
  std::uint64_t seed = 0;
  /// Sweep entries run concurrently on this many threads.
  unsigned workers = 1;

  /// Throws Error(invalid_config) or Error(invalid_argument). Every
  /// (k, overlap) pair must be a valid HierConfig for this grid.
  void validate() const;
  [[nodiscard]] GridShape shape() const;
};

Problem make_problem(const ExperimentSpec& spec);
HierConfig make_hier_config(const ExperimentSpec& spec, std::size_t k, std::size_t overlap);

struct SweepRecord {
  int dim = 1;
  std::size_t nx = 0;
  std::size_t ny = 1;
  std::size_t tpb_x = 0;
  std::size_t tpb_y = 1;
  std::size_t k = 0;
  std::size_t overlap = 0;
  std::uint64_t cycles = 0;
  std::uint64_t total_subiterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::uint64_t operational_blocks = 0;
  std::uint64_t operational_threads = 0;
  std::uint64_t shared_bytes_per_block = 0;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

inline constexpr std::string_view sweep_csv_header =
    "dim,n,tpb,k,overlap,cycles,total_subiterations,final_residual,converged,"
    "operational_blocks,operational_threads,shared_bytes_per_block";

inline constexpr std::string_view resource_csv_header =
    "dim,n,tpb,overlap,operational_blocks,operational_threads,shared_bytes_per_block";

/// Solve one (k, overlap) point of the sweep.
SweepRecord run_sweep_entry(const ExperimentSpec& spec, std::size_t k, std::size_t overlap);

/// Every (k, overlap) pair, rows sorted by k then overlap (duplicates
/// dropped) independent of completion order.
std::vector<SweepRecord> run_sweep(const ExperimentSpec& spec);

/// Resource rows across the overlap list; no solves. Cycle fields are zero.
std::vector<SweepRecord> resource_table(const ExperimentSpec& spec);

std::string format_sweep_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> parse_sweep_csv(std::string_view text);
std::string format_resource_csv(const std::vector<SweepRecord>& rows);

/// Write to a temporary sibling file, then rename over `path`. On failure
/// throws Error(io_error) and leaves no file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace hjacobi

#endif
