#include "hjacobi/hjacobi.h"

#include <exception>
#include <new>
#include <string>

#include "hjacobi/classic.hpp"
#include "hjacobi/experiment.hpp"
#include "hjacobi/hier.hpp"
#include "hjacobi/stencil.hpp"

struct hj_problem {
  hjacobi::Problem value;
};

struct hj_report {
  hjacobi::SolveResult value;
};

struct hj_sweep {
  std::vector<hjacobi::SweepRecord> rows;
};

namespace {

thread_local std::string last_error;

hj_status record(hj_status status, const char* message) {
  last_error = message;
  return status;
}

hj_status to_status(hjacobi::ErrorCode code) {
  switch (code) {
  case hjacobi::ErrorCode::invalid_argument: return HJ_ERR_INVALID_ARGUMENT;
  case hjacobi::ErrorCode::invalid_problem: return HJ_ERR_INVALID_PROBLEM;
  case hjacobi::ErrorCode::invalid_config: return HJ_ERR_INVALID_CONFIG;
  case hjacobi::ErrorCode::singular_system: return HJ_ERR_SINGULAR;
  case hjacobi::ErrorCode::numerical_failure: return HJ_ERR_NUMERICAL_FAILURE;
  case hjacobi::ErrorCode::size_limit: return HJ_ERR_SIZE_LIMIT;
  case hjacobi::ErrorCode::io_error: return HJ_ERR_IO;
  }
  return HJ_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes at the C boundary.
template <typename Fn>
hj_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return HJ_OK;
  } catch (const hjacobi::Error& e) {
    return record(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(HJ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(HJ_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(HJ_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool condition, const char* what) {
  if (!condition) hjacobi::fail(hjacobi::ErrorCode::invalid_argument, what);
}

std::vector<double> copy_in(const double* data, std::size_t n, const char* name) {
  require(data != nullptr, name);
  return std::vector<double>(data, data + n);
}

hjacobi::SolutionGrid initial_grid(const hjacobi::Problem& problem, const double* guess,
                                   std::size_t len) {
  const hjacobi::GridShape shape = hjacobi::shape_of(problem);
  if (guess == nullptr) return hjacobi::SolutionGrid(shape, 1.0);
  require(len == shape.dof_count(), "initial guess length does not match the problem");
  return hjacobi::SolutionGrid(shape, std::vector<double>(guess, guess + len));
}

hjacobi::SolutionGrid grid_view(const hjacobi::Problem& problem, const double* x,
                                std::size_t len) {
  require(x != nullptr, "null value array");
  const hjacobi::GridShape shape = hjacobi::shape_of(problem);
  require(len == shape.dof_count(), "value array length does not match the problem");
  return hjacobi::SolutionGrid(shape, std::vector<double>(x, x + len));
}

hjacobi::HierConfig to_cpp(const hj_hier_config& c) {
  hjacobi::HierConfig cfg;
  cfg.tpb_x = c.tpb_x;
  cfg.tpb_y = c.tpb_y;
  cfg.k = c.subiterations;
  cfg.overlap_x = c.overlap_x;
  cfg.overlap_y = c.overlap_y;
  cfg.tolerance_factor = c.tolerance_factor;
  cfg.max_cycles = c.max_cycles;
  cfg.workers = c.workers;
  return cfg;
}

hj_resource_figures to_c(const hjacobi::ResourceFigures& f) {
  return {f.operational_blocks, f.operational_threads, f.shared_bytes_per_block,
          f.warp_aligned ? 1 : 0};
}

hjacobi::ExperimentSpec to_cpp(const hj_sweep_spec& s) {
  require(s.k_list != nullptr || s.k_count == 0, "null k list");
  require(s.overlap_list != nullptr || s.overlap_count == 0, "null overlap list");
  hjacobi::ExperimentSpec spec;
  spec.dim = s.dim;
  spec.nx = s.nx;
  spec.ny = s.dim == 2 ? s.ny : 1;
  spec.mode = hjacobi::SolverMode::hier;
  spec.tpb_x = s.tpb_x;
  spec.tpb_y = s.dim == 2 ? s.tpb_y : 1;
  spec.k_list.assign(s.k_list, s.k_list + s.k_count);
  spec.overlap_list.assign(s.overlap_list, s.overlap_list + s.overlap_count);
  spec.tolerance_factor = s.tolerance_factor;
  spec.max_cycles = s.max_cycles;
  spec.workers = s.workers;
  return spec;
}

} // namespace

extern "C" {

const char* hj_status_string(hj_status status) {
  switch (status) {
  case HJ_OK: return "ok";
  case HJ_ERR_INVALID_ARGUMENT: return "invalid argument";
  case HJ_ERR_INVALID_PROBLEM: return "invalid problem";
  case HJ_ERR_INVALID_CONFIG: return "invalid configuration";
  case HJ_ERR_SINGULAR: return "singular system";
  case HJ_ERR_NUMERICAL_FAILURE: return "numerical failure";
  case HJ_ERR_SIZE_LIMIT: return "size limit exceeded";
  case HJ_ERR_IO: return "I/O error";
  case HJ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* hj_last_error_message(void) { return last_error.c_str(); }

hj_status hj_problem_create_poisson_1d(size_t n_interior, hj_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new hj_problem{hjacobi::build_poisson_1d(n_interior)};
  });
}

hj_status hj_problem_create_poisson_2d(size_t nx, size_t ny, hj_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new hj_problem{hjacobi::build_poisson_2d(nx, ny)};
  });
}

hj_status hj_problem_create_1d(size_t n_interior, double dx, const double* sub,
                               const double* diag, const double* sup, const double* rhs,
                               hj_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    hjacobi::StencilProblem1D p;
    p.n_interior = n_interior;
    p.dx = dx;
    p.sub = copy_in(sub, n_interior, "null sub array");
    p.diag = copy_in(diag, n_interior, "null diag array");
    p.sup = copy_in(sup, n_interior, "null sup array");
    p.rhs = copy_in(rhs, n_interior, "null rhs array");
    p.validate();
    *out = new hj_problem{std::move(p)};
  });
}

hj_status hj_problem_create_2d(size_t nx, size_t ny, double dx, double dy,
                               const hj_stencil5* coeffs, const double* rhs, hj_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(coeffs != nullptr, "null stencil coefficients");
    hjacobi::StencilProblem2D p;
    p.nx = nx;
    p.ny = ny;
    p.dx = dx;
    p.dy = dy;
    p.coeffs = {coeffs->west, coeffs->east, coeffs->south, coeffs->north, coeffs->center};
    p.rhs = copy_in(rhs, nx * ny, "null rhs array");
    p.validate();
    *out = new hj_problem{std::move(p)};
  });
}

void hj_problem_destroy(hj_problem* problem) { delete problem; }

hj_status hj_problem_get_info(const hj_problem* problem, hj_problem_info* out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    const hjacobi::GridShape shape = hjacobi::shape_of(problem->value);
    out->dim = shape.dim;
    out->nx = shape.nx;
    out->ny = shape.ny;
    out->dof_count = shape.dof_count();
    if (const auto* p1 = std::get_if<hjacobi::StencilProblem1D>(&problem->value)) {
      out->dx = p1->dx;
      out->dy = 0.0;
    } else {
      const auto& p2 = std::get<hjacobi::StencilProblem2D>(problem->value);
      out->dx = p2.dx;
      out->dy = p2.dy;
    }
  });
}

hj_status hj_residual_norm(const hj_problem* problem, const double* x, size_t len, double* out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    *out = hjacobi::residual_norm(problem->value, grid_view(problem->value, x, len));
  });
}

hj_status hj_direct_solve(const hj_problem* problem, double* x_out, size_t len) {
  return guarded([&] {
    require(problem != nullptr && x_out != nullptr, "null argument");
    require(len == hjacobi::shape_of(problem->value).dof_count(),
            "output length does not match the problem");
    const hjacobi::SolutionGrid x = hjacobi::direct_solve_oracle(problem->value);
    std::copy(x.values().begin(), x.values().end(), x_out);
  });
}

hj_status hj_spectral_radius(const hj_problem* problem, size_t iterations, double* out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    *out = hjacobi::spectral_radius_estimate(problem->value, iterations);
  });
}

void hj_classic_config_default(hj_classic_config* config) {
  if (config == nullptr) return;
  const hjacobi::ClassicSolveConfig d;
  *config = {d.tolerance_factor, d.max_iterations, d.residual_check_interval, d.workers};
}

void hj_hier_config_default(hj_hier_config* config) {
  if (config == nullptr) return;
  const hjacobi::HierConfig d;
  *config = {static_cast<uint32_t>(d.tpb_x),     static_cast<uint32_t>(d.tpb_y),
             static_cast<uint32_t>(d.k),         static_cast<uint32_t>(d.overlap_x),
             static_cast<uint32_t>(d.overlap_y), d.tolerance_factor,
             d.max_cycles,                       d.workers};
}

hj_status hj_classic_solve(const hj_problem* problem, const double* initial_guess, size_t len,
                           const hj_classic_config* config, hj_report** out) {
  return guarded([&] {
    require(problem != nullptr && config != nullptr && out != nullptr, "null argument");
    hjacobi::ClassicSolveConfig cfg;
    cfg.tolerance_factor = config->tolerance_factor;
    cfg.max_iterations = config->max_iterations;
    cfg.residual_check_interval = config->residual_check_interval;
    cfg.workers = config->workers;
    auto result =
        hjacobi::classic_solve(problem->value, initial_grid(problem->value, initial_guess, len), cfg);
    *out = new hj_report{std::move(result)};
  });
}

hj_status hj_hier_solve(const hj_problem* problem, const double* initial_guess, size_t len,
                        const hj_hier_config* config, hj_report** out) {
  return guarded([&] {
    require(problem != nullptr && config != nullptr && out != nullptr, "null argument");
    auto result = hjacobi::hier_solve(problem->value,
                                      initial_grid(problem->value, initial_guess, len),
                                      to_cpp(*config));
    *out = new hj_report{std::move(result)};
  });
}

hj_status hj_resource_figures_compute(int dim, size_t nx, size_t ny, const hj_hier_config* config,
                                      hj_resource_figures* out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    require(dim == 1 || dim == 2, "dim must be 1 or 2");
    const hjacobi::GridShape shape =
        dim == 1 ? hjacobi::GridShape::line(nx) : hjacobi::GridShape::plane(nx, ny);
    *out = to_c(hjacobi::resource_figures(shape, to_cpp(*config)));
  });
}

void hj_report_destroy(hj_report* report) { delete report; }

hj_status hj_report_get_summary(const hj_report* report, hj_report_summary* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    const hjacobi::ConvergenceReport& r = report->value.report;
    out->initial_residual = r.initial_residual;
    out->final_residual = r.final_residual();
    out->cycles = r.cycles;
    out->subiterations_per_cycle = r.subiterations_per_cycle;
    out->total_updates = r.total_updates;
    out->converged = r.converged ? 1 : 0;
    out->has_resources = r.resource.has_value() ? 1 : 0;
    out->resources = r.resource ? to_c(*r.resource) : hj_resource_figures{0, 0, 0, 0};
  });
}

size_t hj_report_history_length(const hj_report* report) {
  return report == nullptr ? 0 : report->value.report.residual_history.size();
}

hj_status hj_report_copy_history(const hj_report* report, double* out, size_t len) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    const auto& h = report->value.report.residual_history;
    require(len >= h.size(), "output buffer too small for residual history");
    std::copy(h.begin(), h.end(), out);
  });
}

hj_status hj_report_copy_solution(const hj_report* report, double* out, size_t len) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    const auto v = report->value.solution.values();
    require(len >= v.size(), "output buffer too small for solution");
    std::copy(v.begin(), v.end(), out);
  });
}

hj_status hj_sweep_run(const hj_sweep_spec* spec, hj_sweep** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = new hj_sweep{hjacobi::run_sweep(to_cpp(*spec))};
  });
}

void hj_sweep_destroy(hj_sweep* sweep) { delete sweep; }

size_t hj_sweep_size(const hj_sweep* sweep) { return sweep == nullptr ? 0 : sweep->rows.size(); }

hj_status hj_sweep_get_record(const hj_sweep* sweep, size_t index, hj_sweep_record* out) {
  return guarded([&] {
    require(sweep != nullptr && out != nullptr, "null argument");
    require(index < sweep->rows.size(), "record index out of range");
    const hjacobi::SweepRecord& r = sweep->rows[index];
    *out = {r.dim,
            r.nx,
            r.ny,
            static_cast<uint32_t>(r.tpb_x),
            static_cast<uint32_t>(r.tpb_y),
            static_cast<uint32_t>(r.k),
            static_cast<uint32_t>(r.overlap),
            r.cycles,
            r.total_subiterations,
            r.final_residual,
            r.converged ? 1 : 0,
            r.operational_blocks,
            r.operational_threads,
            r.shared_bytes_per_block};
  });
}

hj_status hj_sweep_write_csv(const hj_sweep* sweep, const char* path) {
  return guarded([&] {
    require(sweep != nullptr && path != nullptr, "null argument");
    hjacobi::write_file_atomic(path, hjacobi::format_sweep_csv(sweep->rows));
  });
}

hj_status hj_resources_write_csv(const hj_sweep_spec* spec, const char* path) {
  return guarded([&] {
    require(spec != nullptr && path != nullptr, "null argument");
    hjacobi::write_file_atomic(path, hjacobi::format_resource_csv(
                                         hjacobi::resource_table(to_cpp(*spec))));
  });
}

} // extern "C"
