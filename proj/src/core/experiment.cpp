#include "hjacobi/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "hjacobi/parallel.hpp"

namespace hjacobi {

namespace {

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

// "64" for square grids, "64x32" otherwise.
std::string extent_token(int dim, std::size_t x, std::size_t y) {
  if (dim == 1 || x == y) return std::to_string(x);
  return std::to_string(x) + "x" + std::to_string(y);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    fail(ErrorCode::invalid_argument,
         "CSV line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

void parse_extent(std::string_view field, int dim, std::size_t line, std::size_t& x,
                  std::size_t& y) {
  const auto sep = field.find('x');
  if (sep == std::string_view::npos) {
    x = parse_number<std::size_t>(field, line);
    y = dim == 1 ? 1 : x;
  } else {
    x = parse_number<std::size_t>(field.substr(0, sep), line);
    y = parse_number<std::size_t>(field.substr(sep + 1), line);
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

void fill_resources(SweepRecord& rec, const ResourceFigures& fig) {
  rec.operational_blocks = fig.operational_blocks;
  rec.operational_threads = fig.operational_threads;
  rec.shared_bytes_per_block = fig.shared_bytes_per_block;
}

} // namespace

void ExperimentSpec::validate() const {
  if (dim != 1 && dim != 2) fail(ErrorCode::invalid_argument, "dim must be 1 or 2");
  if (nx < 1 || (dim == 2 && ny < 1)) fail(ErrorCode::invalid_argument, "problem size must be >= 1");
  if (k_list.empty()) fail(ErrorCode::invalid_argument, "subiteration list is empty");
  if (overlap_list.empty()) fail(ErrorCode::invalid_argument, "overlap list is empty");
  if (!(tolerance_factor > 0.0 && tolerance_factor < 1.0)) {
    fail(ErrorCode::invalid_config, "tolerance factor must lie in (0, 1)");
  }
  if (max_cycles < 1) fail(ErrorCode::invalid_config, "max cycles must be at least 1");
  if (mode == SolverMode::classic) return;
  const GridShape s = shape();
  for (std::size_t k : k_list) {
    for (std::size_t o : overlap_list) {
      // Throws on the first bad pair.
      (void)resource_figures(s, make_hier_config(*this, k, o));
    }
  }
}

GridShape ExperimentSpec::shape() const {
  return dim == 1 ? GridShape::line(nx) : GridShape::plane(nx, ny);
}

Problem make_problem(const ExperimentSpec& spec) {
  if (spec.dim == 1) return build_poisson_1d(spec.nx);
  return build_poisson_2d(spec.nx, spec.ny);
}

HierConfig make_hier_config(const ExperimentSpec& spec, std::size_t k, std::size_t overlap) {
  HierConfig cfg;
  cfg.tpb_x = spec.tpb_x;
  cfg.tpb_y = spec.dim == 2 ? spec.tpb_y : 1;
  cfg.k = k;
  cfg.overlap_x = overlap;
  cfg.overlap_y = spec.dim == 2 ? overlap : 0;
  cfg.tolerance_factor = spec.tolerance_factor;
  cfg.max_cycles = spec.max_cycles;
  cfg.workers = 1;
  return cfg;
}

SweepRecord run_sweep_entry(const ExperimentSpec& spec, std::size_t k, std::size_t overlap) {
  const Problem problem = make_problem(spec);
  const HierConfig cfg = make_hier_config(spec, k, overlap);
  const SolveResult result = hier_solve(problem, SolutionGrid(spec.shape(), 1.0), cfg);

  SweepRecord rec;
  rec.dim = spec.dim;
  rec.nx = spec.nx;
  rec.ny = spec.dim == 2 ? spec.ny : 1;
  rec.tpb_x = spec.tpb_x;
  rec.tpb_y = spec.dim == 2 ? spec.tpb_y : 1;
  rec.k = k;
  rec.overlap = overlap;
  rec.cycles = result.report.cycles;
  rec.total_subiterations = result.report.total_updates;
  rec.final_residual = result.report.final_residual();
  rec.converged = result.report.converged;
  fill_resources(rec, *result.report.resource);
  return rec;
}

std::vector<SweepRecord> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const auto ks = sorted_unique(spec.k_list);
  const auto os = sorted_unique(spec.overlap_list);
  std::vector<SweepRecord> rows(ks.size() * os.size());
  detail::parallel_for_chunks(rows.size(), spec.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      rows[r] = run_sweep_entry(spec, ks[r / os.size()], os[r % os.size()]);
    }
  });
  return rows;
}

std::vector<SweepRecord> resource_table(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<SweepRecord> rows;
  for (std::size_t o : sorted_unique(spec.overlap_list)) {
    // k does not enter the resource model.
    const HierConfig cfg = make_hier_config(spec, spec.k_list.front(), o);
    SweepRecord rec;
    rec.dim = spec.dim;
    rec.nx = spec.nx;
    rec.ny = spec.dim == 2 ? spec.ny : 1;
    rec.tpb_x = spec.tpb_x;
    rec.tpb_y = spec.dim == 2 ? spec.tpb_y : 1;
    rec.overlap = o;
    fill_resources(rec, resource_figures(spec.shape(), cfg));
    rows.push_back(rec);
  }
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out(sweep_csv_header);
  out += '\n';
  for (const SweepRecord& r : records) {
    out += std::to_string(r.dim) + ',' + extent_token(r.dim, r.nx, r.ny) + ',' +
           extent_token(r.dim, r.tpb_x, r.tpb_y) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.overlap) + ',' + std::to_string(r.cycles) + ',' +
           std::to_string(r.total_subiterations) + ',' + format_double(r.final_residual) + ',' +
           (r.converged ? "true" : "false") + ',' + std::to_string(r.operational_blocks) + ',' +
           std::to_string(r.operational_threads) + ',' +
           std::to_string(r.shared_bytes_per_block) + '\n';
  }
  return out;
}

std::vector<SweepRecord> parse_sweep_csv(std::string_view text) {
  std::vector<SweepRecord> records;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != sweep_csv_header) fail(ErrorCode::invalid_argument, "unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 12) {
      fail(ErrorCode::invalid_argument, "CSV line " + std::to_string(line_no) + ": expected 12 fields");
    }
    SweepRecord r;
    r.dim = parse_number<int>(f[0], line_no);
    parse_extent(f[1], r.dim, line_no, r.nx, r.ny);
    parse_extent(f[2], r.dim, line_no, r.tpb_x, r.tpb_y);
    r.k = parse_number<std::size_t>(f[3], line_no);
    r.overlap = parse_number<std::size_t>(f[4], line_no);
    r.cycles = parse_number<std::uint64_t>(f[5], line_no);
    r.total_subiterations = parse_number<std::uint64_t>(f[6], line_no);
    r.final_residual = parse_number<double>(f[7], line_no);
    if (f[8] != "true" && f[8] != "false") {
      fail(ErrorCode::invalid_argument, "CSV line " + std::to_string(line_no) + ": bad flag");
    }
    r.converged = f[8] == "true";
    r.operational_blocks = parse_number<std::uint64_t>(f[9], line_no);
    r.operational_threads = parse_number<std::uint64_t>(f[10], line_no);
    r.shared_bytes_per_block = parse_number<std::uint64_t>(f[11], line_no);
    records.push_back(r);
  }
  if (!header_seen) fail(ErrorCode::invalid_argument, "CSV text has no header");
  return records;
}

std::string format_resource_csv(const std::vector<SweepRecord>& rows) {
  std::string out(resource_csv_header);
  out += '\n';
  for (const SweepRecord& r : rows) {
    out += std::to_string(r.dim) + ',' + extent_token(r.dim, r.nx, r.ny) + ',' +
           extent_token(r.dim, r.tpb_x, r.tpb_y) + ',' + std::to_string(r.overlap) + ',' +
           std::to_string(r.operational_blocks) + ',' + std::to_string(r.operational_threads) +
           ',' + std::to_string(r.shared_bytes_per_block) + '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.empty()) fail(ErrorCode::io_error, "empty output path");
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      fail(ErrorCode::io_error, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    fail(ErrorCode::io_error, "cannot move output into place at '" + path.string() + "': " +
                                  ec.message());
  }
}

} // namespace hjacobi
