// hjacobi command-line driver: single solves, (k, overlap) sweeps and
// resource tables. Talks to the library only through the C API.
//
// Exit status: 0 success, 1 usage error, 2 non-convergence (solve),
// 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjacobi/hjacobi.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_converged = 2;
constexpr int exit_io = 3;

struct UsageError {
  std::string message;
};

struct Options {
  int dim = 1;
  std::size_t n = 1024;
  std::optional<std::size_t> ny;
  std::string mode = "hier";
  std::uint32_t tpb = 32;
  std::optional<std::uint32_t> tpb_y;
  std::optional<std::string> subiterations;
  std::optional<std::string> overlap;
  double tol_factor = 1e-4;
  std::uint64_t max_cycles = 1'000'000;
  std::string out;
  std::uint32_t workers = 1;
};

std::vector<std::uint32_t> parse_list(const std::string& flag, const std::string& text) {
  std::vector<std::uint32_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size() || v > UINT32_MAX) throw std::invalid_argument(item);
      values.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw UsageError{flag + ": '" + item + "' is not a non-negative integer"};
    }
  }
  if (values.empty()) throw UsageError{flag + ": list is empty"};
  return values;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--dim", o.dim, "Problem dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--n", o.n, "Interior points per direction")->check(CLI::PositiveNumber);
  cmd->add_option("--ny", o.ny, "Interior points in y (2D; defaults to --n)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tpb", o.tpb, "Subdomain interior width (threads per block)");
  cmd->add_option("--tpb-y", o.tpb_y, "Subdomain interior height (2D; defaults to --tpb)");
  cmd->add_option("--overlap", o.overlap, "Even overlap count, or comma list");
  cmd->add_option("--tol-factor", o.tol_factor, "Residual reduction factor");
  cmd->add_option("--max-cycles", o.max_cycles, "Cycle (iteration) cap");
  cmd->add_option("--out", o.out, "Output CSV path");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
}

hj_sweep_spec make_spec(const Options& o, const std::vector<std::uint32_t>& ks,
                        const std::vector<std::uint32_t>& overlaps) {
  hj_sweep_spec spec{};
  spec.dim = o.dim;
  spec.nx = o.n;
  spec.ny = o.ny.value_or(o.n);
  spec.tpb_x = o.tpb;
  spec.tpb_y = o.tpb_y.value_or(o.tpb);
  spec.k_list = ks.data();
  spec.k_count = ks.size();
  spec.overlap_list = overlaps.data();
  spec.overlap_count = overlaps.size();
  spec.tolerance_factor = o.tol_factor;
  spec.max_cycles = o.max_cycles;
  spec.workers = o.workers;
  return spec;
}

// Maps a library validation message onto the flag that controls it.
std::string offending_flag(const std::string& message) {
  if (message.find("overlap") != std::string::npos) return "--overlap";
  if (message.find("tpb") != std::string::npos) return "--tpb";
  if (message.find("subiteration") != std::string::npos) return "--subiterations";
  if (message.find("tolerance") != std::string::npos) return "--tol-factor";
  if (message.find("max") != std::string::npos) return "--max-cycles";
  if (message.find("dim") != std::string::npos) return "--dim";
  return "--n";
}

// Library errors caused by bad flag values are usage errors.
int status_exit(hj_status status) {
  const std::string message = hj_last_error_message();
  switch (status) {
  case HJ_ERR_INVALID_ARGUMENT:
  case HJ_ERR_INVALID_PROBLEM:
  case HJ_ERR_INVALID_CONFIG:
  case HJ_ERR_SIZE_LIMIT:
    std::cerr << "usage error: " << offending_flag(message) << ": " << message << '\n';
    return exit_usage;
  case HJ_ERR_NUMERICAL_FAILURE:
    std::cerr << "error: " << message << '\n';
    return exit_not_converged;
  default:
    std::cerr << "error: " << message << '\n';
    return exit_io;
  }
}

struct ProblemDeleter {
  void operator()(hj_problem* p) const { hj_problem_destroy(p); }
};
struct ReportDeleter {
  void operator()(hj_report* r) const { hj_report_destroy(r); }
};
struct SweepDeleter {
  void operator()(hj_sweep* s) const { hj_sweep_destroy(s); }
};

void print_resources(const hj_resource_figures& r, std::uint32_t tpb) {
  std::printf("operational blocks  : %llu\n", static_cast<unsigned long long>(r.operational_blocks));
  std::printf("operational threads : %llu\n", static_cast<unsigned long long>(r.operational_threads));
  std::printf("shared bytes/block  : %llu\n",
              static_cast<unsigned long long>(r.shared_bytes_per_block));
  if (!r.warp_aligned) std::printf("note                : tpb %u is not a multiple of 32\n", tpb);
}

int cmd_solve(const Options& o) {
  const auto ks = parse_list("--subiterations", o.subiterations.value_or("16"));
  const auto overlaps = parse_list("--overlap", o.overlap.value_or("0"));
  if (ks.size() != 1) throw UsageError{"--subiterations: solve takes a single value"};
  if (overlaps.size() != 1) throw UsageError{"--overlap: solve takes a single value"};
  if (o.mode != "classic" && o.mode != "hier") {
    throw UsageError{"--mode: expected 'classic' or 'hier', got '" + o.mode + "'"};
  }
  const bool hier = o.mode == "hier";
  const std::size_t ny = o.ny.value_or(o.n);

  hj_problem* raw_problem = nullptr;
  hj_status st = o.dim == 1 ? hj_problem_create_poisson_1d(o.n, &raw_problem)
                            : hj_problem_create_poisson_2d(o.n, ny, &raw_problem);
  if (st != HJ_OK) return status_exit(st);
  std::unique_ptr<hj_problem, ProblemDeleter> problem(raw_problem);

  hj_hier_config hcfg;
  hj_hier_config_default(&hcfg);
  hcfg.tpb_x = o.tpb;
  hcfg.tpb_y = o.tpb_y.value_or(o.tpb);
  hcfg.subiterations = ks.front();
  hcfg.overlap_x = overlaps.front();
  hcfg.overlap_y = overlaps.front();
  hcfg.tolerance_factor = o.tol_factor;
  hcfg.max_cycles = o.max_cycles;
  hcfg.workers = o.workers;

  hj_report* raw_report = nullptr;
  if (hier) {
    hj_resource_figures check{};
    st = hj_resource_figures_compute(o.dim, o.n, ny, &hcfg, &check);
    if (st != HJ_OK) return status_exit(st);
    st = hj_hier_solve(problem.get(), nullptr, 0, &hcfg, &raw_report);
  } else {
    hj_classic_config ccfg;
    hj_classic_config_default(&ccfg);
    ccfg.tolerance_factor = o.tol_factor;
    ccfg.max_iterations = o.max_cycles;
    ccfg.workers = o.workers;
    st = hj_classic_solve(problem.get(), nullptr, 0, &ccfg, &raw_report);
  }
  if (st != HJ_OK) return status_exit(st);
  std::unique_ptr<hj_report, ReportDeleter> report(raw_report);

  hj_report_summary s{};
  hj_report_get_summary(report.get(), &s);
  if (o.dim == 1) {
    std::printf("problem             : 1D Poisson, n=%zu\n", o.n);
  } else {
    std::printf("problem             : 2D Poisson, %zux%zu\n", o.n, ny);
  }
  if (hier) {
    std::printf("solver              : hier (tpb=%u", hcfg.tpb_x);
    if (o.dim == 2) std::printf("x%u", hcfg.tpb_y);
    std::printf(", k=%u, overlap=%u)\n", hcfg.subiterations, hcfg.overlap_x);
  } else {
    std::printf("solver              : classic\n");
  }
  std::printf("initial residual    : %.17g\n", s.initial_residual);
  std::printf("final residual      : %.17g\n", s.final_residual);
  std::printf("cycles              : %llu\n", static_cast<unsigned long long>(s.cycles));
  std::printf("total subiterations : %llu\n", static_cast<unsigned long long>(s.total_updates));
  std::printf("converged           : %s\n", s.converged ? "yes" : "no");
  if (s.has_resources) print_resources(s.resources, hcfg.tpb_x);
  return s.converged ? exit_ok : exit_not_converged;
}

int cmd_sweep(const Options& o) {
  const auto ks = parse_list("--subiterations", o.subiterations.value_or("4,8,16,32,64,128"));
  const auto overlaps = parse_list("--overlap", o.overlap.value_or("0"));
  if (o.out.empty()) throw UsageError{"--out: sweep needs an output path"};
  const hj_sweep_spec spec = make_spec(o, ks, overlaps);

  hj_sweep* raw = nullptr;
  hj_status st = hj_sweep_run(&spec, &raw);
  if (st != HJ_OK) return status_exit(st);
  std::unique_ptr<hj_sweep, SweepDeleter> sweep(raw);

  st = hj_sweep_write_csv(sweep.get(), o.out.c_str());
  if (st != HJ_OK) return status_exit(st);
  std::size_t unconverged = 0;
  for (std::size_t i = 0; i < hj_sweep_size(sweep.get()); ++i) {
    hj_sweep_record r{};
    hj_sweep_get_record(sweep.get(), i, &r);
    if (!r.converged) ++unconverged;
  }
  std::printf("wrote %zu rows to %s", hj_sweep_size(sweep.get()), o.out.c_str());
  if (unconverged > 0) std::printf(" (%zu not converged)", unconverged);
  std::printf("\n");
  return exit_ok;
}

int cmd_resources(const Options& o) {
  const auto overlaps = parse_list("--overlap", o.overlap.value_or("0"));
  const std::vector<std::uint32_t> ks{1};
  const hj_sweep_spec spec = make_spec(o, ks, overlaps);

  std::printf("%-8s %-20s %-20s %-20s\n", "overlap", "operational_blocks", "operational_threads",
              "shared_bytes_per_block");
  bool aligned = true;
  for (std::uint32_t ov : overlaps) {
    hj_hier_config cfg;
    hj_hier_config_default(&cfg);
    cfg.tpb_x = spec.tpb_x;
    cfg.tpb_y = spec.tpb_y;
    cfg.subiterations = 1;
    cfg.overlap_x = ov;
    cfg.overlap_y = ov;
    hj_resource_figures r{};
    const hj_status st = hj_resource_figures_compute(o.dim, spec.nx, spec.ny, &cfg, &r);
    if (st != HJ_OK) return status_exit(st);
    aligned = aligned && r.warp_aligned;
    std::printf("%-8u %-20llu %-20llu %-20llu\n", ov,
                static_cast<unsigned long long>(r.operational_blocks),
                static_cast<unsigned long long>(r.operational_threads),
                static_cast<unsigned long long>(r.shared_bytes_per_block));
  }
  if (!aligned) std::printf("note: tpb %u is not a multiple of 32\n", spec.tpb_x);
  if (!o.out.empty()) {
    const hj_status st = hj_resources_write_csv(&spec, o.out.c_str());
    if (st != HJ_OK) return status_exit(st);
  }
  return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classic and block-synchronous hierarchical Jacobi experiments"};
  app.require_subcommand(1);

  Options opts;
  auto* solve = app.add_subcommand("solve", "Run one solve and print a summary");
  add_common(solve, opts);
  solve->add_option("--mode", opts.mode, "classic | hier");
  solve->add_option("--subiterations", opts.subiterations, "Subiterations per cycle (k)");

  auto* sweep = app.add_subcommand("sweep", "Sweep (k, overlap) pairs and write CSV");
  add_common(sweep, opts);
  sweep->add_option("--subiterations", opts.subiterations, "Comma list of k values");

  auto* resources = app.add_subcommand("resources", "Tabulate the per-cycle resource model");
  add_common(resources, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*solve) return cmd_solve(opts);
    if (*sweep) return cmd_sweep(opts);
    return cmd_resources(opts);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << '\n';
    return exit_usage;
  }
}
