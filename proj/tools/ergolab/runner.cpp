#include "runner.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acceptance.hpp"
#include "ergolab/format.hpp"
#include "ergolab/hyperbolic.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/pressure.hpp"
#include "ergolab/random.hpp"
#include "ergolab/svg.hpp"
#include "ergolab/transfer.hpp"

namespace fs = std::filesystem;

namespace ergolab::cli {

namespace {

// Triplet files above this many entries are skipped; the manifest says so.
constexpr std::size_t kMaxTriplets = 2000000;
// Heat maps are averaged down to at most this many cells per side.
constexpr int kHeatSide = 128;

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

PhasePoint start_point(const ExperimentConfig& cfg, const MapSystem& map, std::size_t word_length) {
  const bool given = cfg.has("run", "theta0") || cfg.has("run", "x0") || cfg.has("run", "word");
  if (!given) return sample_phase_points(map, 1, cfg.seed(), word_length).front();
  switch (map.kind()) {
    case MapKind::CircleTimesD: return CircleAngle(cfg.get_double("run", "theta0", 0.0));
    case MapKind::Quadratic: return IntervalCoord(cfg.get_double("run", "x0", 0.0));
    case MapKind::Viana: return CylinderPoint(cfg.get_double("run", "theta0", 0.0), cfg.get_double("run", "x0", 0.0));
    case MapKind::FullShift: {
      std::vector<std::uint8_t> w;
      for (char c : cfg.get_string("run", "word", "0")) w.push_back(static_cast<std::uint8_t>(c - '0'));
      return SymbolWord(map.shift().alphabet, std::move(w));
    }
  }
  throw ContractError("unknown map kind");
}

std::size_t count_arg(const ExperimentConfig& cfg, const char* key, long fallback) {
  long v = cfg.get_int("run", key, fallback);
  if (v < 0) throw ContractError(std::string("run.") + key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

void op_orbit(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  std::size_t n = count_arg(cfg, "n", 10);
  Orbit o = orbit(map, start_point(cfg, map, n + 1), n);
  out.csv("orbit.csv", orbit_csv(o));
  m.summary.push_back("orbit: " + std::to_string(n + 1) + " points of " + map.id());
}

void op_hyptimes(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  std::size_t n = count_arg(cfg, "n", 1000);
  double sigma = cfg.get_double("run", "sigma", 0.5);
  Orbit o = orbit(map, start_point(cfg, map, n + 1), n);
  HyperbolicTimeRecord rec = detect_pliss(o, sigma);
  out.csv("hyperbolic_times.csv", hyperbolic_times_csv(rec));
  out.csv("hyperbolic_frequency.csv", hyperbolic_summary_csv(rec));
  if (cfg.get_bool("output", "plots", true) && rec.horizon > 0) {
    Series s{"freq", {}, frequency_table(rec)};
    for (std::size_t i = 1; i <= rec.horizon; ++i) s.x.push_back(static_cast<double>(i));
    out.svg("hyperbolic_frequency.svg",
            svg_line_plot({s}, "hyperbolic-time frequency, sigma=" + fmt_double(sigma), "n", "freq", out.stamp()));
  }
  m.summary.push_back("hyperbolic times: " + std::to_string(rec.times.size()) + " of " +
                      std::to_string(rec.horizon) + (rec.truncated ? " (truncated at critical point)" : ""));
}

void op_classify(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  auto seeds = sample_phase_points(map, count_arg(cfg, "seeds", 500), cfg.seed());
  HClassification c = classify(map, seeds, cfg.get_double("run", "sigma", 0.9), count_arg(cfg, "horizon", 5000),
                               cfg.get_double("run", "threshold", 0.05));
  out.csv("classification.csv", classification_csv(c));
  m.summary.push_back("H fraction = " + fmt_double(c.h_fraction()) + " (H " + std::to_string(c.count(HLabel::H)) +
                      ", Hc " + std::to_string(c.count(HLabel::Hc)) + ", flagged " + std::to_string(c.flagged()) +
                      ")");
}

void op_verify_potential(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  Potential phi = cfg.potential(map);
  if (!phi.is_bump_pair()) throw ContractError("verify-potential needs [potential] kind = bump_pair");
  BirkhoffReport r = verify_bounded(phi, map, count_arg(cfg, "seeds", 1000), count_arg(cfg, "horizon", 100000),
                                    cfg.seed(), cfg.get_double("run", "tolerance", 1e-9));
  out.csv("birkhoff_report.csv", birkhoff_report_csv(r));
  m.passed = r.passed;
  m.summary.push_back(std::string(r.passed ? "PASS" : "FAIL") + " verify-potential: global max |S_n phi| = " +
                      fmt_double(r.global_max) + ", bound sup phi_b = " + fmt_double(r.bound.value_or(0.0)) +
                      ", excluded seeds " + std::to_string(r.excluded));
}

void op_birkhoff(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  Potential phi = cfg.potential(map);
  std::size_t n = count_arg(cfg, "n", 1000);
  Orbit o = orbit(map, start_point(cfg, map, n + 64), n);
  std::ostringstream csv;
  csv << "n,S_n\n";
  Series s{"S_n", {}, {}};
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    csv << i << ',' << fmt_double(sum) << '\n';
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(sum);
    if (i < n) sum += phi.evaluate_with_image(o.points[i], o.points[i + 1]);
  }
  out.csv("birkhoff.csv", csv.str());
  if (cfg.get_bool("output", "plots", true)) {
    out.svg("birkhoff.svg", svg_line_plot({s}, "Birkhoff sums of " + phi.id(), "n", "S_n", out.stamp()));
  }
  m.summary.push_back("S_" + std::to_string(n) + " = " + fmt_double(sum));
}

void write_estimate(const PressureEstimate& e, OutputSet& out, RunManifest& m, const std::string& stem) {
  out.csv(stem + "_table.csv", pressure_table_csv(e));
  out.csv(stem + "_summary.csv", "method,value,params_hash\n" + pressure_summary_line(e) + "\n");
  m.summary.push_back(to_string(e.method) + " pressure = " + fmt_double(e.value));
  m.summary.push_back("note: " + e.note);
}

void op_pressure_sep(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  Potential phi = cfg.potential(map);
  auto n_list = cfg.get_int_list("run", "n_list", {2, 4, 6, 8});
  auto eps_list = cfg.get_double_list("run", "eps", {0.01});
  PressureEstimate e = pressure_separated(map, phi, n_list, eps_list, count_arg(cfg, "resolution", 4096),
                                          count_arg(cfg, "x_resolution", 0));
  write_estimate(e, out, m, "pressure_sep");
  if (cfg.get_bool("output", "plots", true)) {
    std::vector<Series> curves;
    for (double eps : eps_list) {
      Series s{"eps=" + fmt_double(eps), {}, {}};
      for (const auto& row : e.rows) {
        if (row[1] == eps && row[0] > 0) {
          s.x.push_back(row[0]);
          s.y.push_back(row[4]);
        }
      }
      curves.push_back(std::move(s));
    }
    out.svg("pressure_sep.svg", svg_line_plot(curves, "(1/n) log Z_n", "n", "rate", out.stamp()));
  }
}

void op_pressure_shift(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  if (map.kind() != MapKind::FullShift) throw ContractError("pressure-shift needs [map] kind = full_shift");
  Potential phi = cfg.potential(map);
  LambdaSpec lambda = LambdaSpec::whole();
  if (cfg.has("run", "sub_alphabet")) {
    std::vector<int> s;
    for (char c : cfg.get_string("run", "sub_alphabet")) s.push_back(c - '0');
    lambda = LambdaSpec::sub_alphabet(s);
  }
  PressureEstimate e =
      relative_pressure_shift(map.shift().alphabet, phi, lambda, static_cast<int>(cfg.get_int("run", "N", 1)),
                              static_cast<int>(cfg.get_int("run", "n_max", 24)), cfg.get_double("run", "gamma_tol", 1e-7));
  write_estimate(e, out, m, "pressure_shift");
  m.summary.push_back("gamma* = " + fmt_double(e.value));
}

Grid grid_from(const ExperimentConfig& cfg, const MapSystem& map) {
  const bool two_d = map.kind() == MapKind::Viana;
  return Grid::for_map(map, static_cast<int>(cfg.get_int("run", "m", two_d ? 256 : 4096)),
                       static_cast<int>(cfg.get_int("run", "m_x", 0)));
}

UlamMode mode_from(const ExperimentConfig& cfg, const MapSystem& map) {
  const std::string fallback = map.is_one_dimensional() ? "exact" : "monte_carlo";
  if (cfg.get_string("run", "mode", fallback) == "exact") return UlamMode::exact();
  return UlamMode::monte_carlo(cfg.seed(), count_arg(cfg, "samples_per_cell", 64));
}

void op_ulam(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  Potential phi = cfg.potential(map);
  Grid grid = grid_from(cfg, map);
  UlamOperator op = build_ulam(map, grid, phi, mode_from(cfg, map));
  SpectralResult s = power_iterate(op, cfg.get_double("run", "tol", 1e-12), count_arg(cfg, "max_iter", 100000));
  if (op.val.size() <= kMaxTriplets) {
    out.text("ulam_operator.txt", ulam_triplets(op));
  } else {
    m.summary.push_back("operator has " + std::to_string(op.val.size()) + " entries; triplet export skipped");
  }
  std::ostringstream csv;
  csv << "cells,nnz,lambda,log_lambda,residual,iterations,converged\n"
      << grid.cells() << ',' << op.val.size() << ',' << fmt_double(s.lambda) << ',' << fmt_double(std::log(s.lambda))
      << ',' << fmt_double(s.residual) << ',' << s.iterations << ',' << (s.converged ? 1 : 0) << '\n';
  out.csv("spectral.csv", csv.str());
  m.summary.push_back("lambda = " + fmt_double(s.lambda) + (s.converged ? "" : " (NOT CONVERGED)"));
  m.summary.push_back("log lambda = " + fmt_double(std::log(s.lambda)));
}

void op_mme(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  MapSystem map = cfg.map();
  Grid grid = grid_from(cfg, map);
  DensityTable t = mme_density(map, grid, mode_from(cfg, map), cfg.get_double("run", "tol", 1e-12),
                               count_arg(cfg, "max_iter", 100000));
  out.csv("density.csv", density_csv(t));
  if (cfg.get_bool("output", "plots", true)) {
    if (!grid.two_d()) {
      Series s{"density", {}, t.density};
      for (std::size_t j = 0; j < t.density.size(); ++j) s.x.push_back(grid.lo + grid.width * (j + 0.5) / grid.m);
      out.svg("density.svg", svg_line_plot({s}, "MME density (Ulam)", "coordinate", "density", out.stamp()));
    } else {
      const int bt = std::max(1, grid.m / kHeatSide);
      const int bx = std::max(1, grid.m_x / kHeatSide);
      const int rows = grid.m_x / bx;
      const int cols = grid.m / bt;
      std::vector<double> heat(static_cast<std::size_t>(rows) * cols, 0.0);
      for (int it = 0; it < cols * bt; ++it) {
        for (int ix = 0; ix < rows * bx; ++ix) {
          heat[static_cast<std::size_t>(ix / bx) * cols + it / bt] +=
              t.density[static_cast<std::size_t>(it) * grid.m_x + ix] / (bt * bx);
        }
      }
      out.svg("density.svg", svg_heat_map(heat, rows, cols, "MME density (Ulam), theta across, x up", out.stamp()));
    }
  }
  m.summary.push_back("lambda = " + fmt_double(t.spectral.lambda) + ", total mass = " + fmt_double(t.total_mass()));
}

void op_acceptance(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m, std::ostream& log) {
  AcceptanceOptions opt;
  if (cfg.has("run", "seed")) opt.seed = cfg.seed();
  opt.on_result = [&](const CriterionResult& r) { log << format_result(r) << std::endl; };
  auto results = run_acceptance(out, opt);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  m.passed = failed == 0;
  m.summary.push_back("acceptance: " + std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) +
                      " criteria passed");
}

}  // namespace

OutputSet::OutputSet(std::string dir, std::string config_hash, bool reproducible)
    : dir_(std::move(dir)), hash_(std::move(config_hash)), reproducible_(reproducible) {
  fs::create_directories(dir_);
}

void OutputSet::csv(const std::string& name, const std::string& body) {
  write(name, "# config_hash=" + hash_ + "\n" + body);
}

void OutputSet::svg(const std::string& name, const std::string& body) { write(name, body); }

void OutputSet::text(const std::string& name, const std::string& body) { write(name, body); }

std::optional<std::string> OutputSet::stamp() const {
  if (reproducible_) return std::nullopt;
  return utc_now() + " config " + hash_;
}

void OutputSet::write(const std::string& name, const std::string& body) {
  fs::path p = fs::path(dir_) / name;
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ComputationError("cannot write " + p.string());
  f << body;
  if (!f) throw ComputationError("short write on " + p.string());
  files_.push_back({name, hex64(fnv1a(body)), body.size()});
}

void OutputSet::remove_all() {
  std::error_code ec;
  for (const auto& f : files_) fs::remove(fs::path(dir_) / f.name, ec);
  fs::remove(fs::path(dir_) / "manifest.txt", ec);
  files_.clear();
}

std::string manifest_text(const RunManifest& m) {
  std::ostringstream out;
  out << "config_hash = " << m.config_hash << '\n';
  out << "tool_version = " << m.tool_version << '\n';
  out << "operation = " << m.operation << '\n';
  out << "wall_clock_seconds = " << fmt_double(m.wall_clock_seconds) << '\n';
  out << "passed = " << (m.passed ? "true" : "false") << '\n';
  for (const auto& f : m.files) out << "file." << f.name << " = " << f.checksum << ' ' << f.bytes << '\n';
  return out.str();
}

RunManifest run(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const std::string op = config.operation();
  if (op.empty()) throw ConfigError("missing required key 'operation' in [run]");
  set_thread_count(static_cast<unsigned>(config.get_int("run", "threads", 0)));

  RunManifest m;
  m.config_hash = config.hash();
  m.operation = op;
  OutputSet out(config.output_dir(), m.config_hash, config.reproducible());
  const auto t0 = std::chrono::steady_clock::now();
  try {
    out.text("config.ini", config.serialize());
    if (op == "orbit") op_orbit(config, out, m);
    else if (op == "hyptimes") op_hyptimes(config, out, m);
    else if (op == "classify") op_classify(config, out, m);
    else if (op == "verify-potential") op_verify_potential(config, out, m);
    else if (op == "birkhoff") op_birkhoff(config, out, m);
    else if (op == "pressure-sep") op_pressure_sep(config, out, m);
    else if (op == "pressure-shift") op_pressure_shift(config, out, m);
    else if (op == "ulam") op_ulam(config, out, m);
    else if (op == "mme") op_mme(config, out, m);
    else op_acceptance(config, out, m, log);
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.files = out.files();
    std::ofstream(fs::path(out.dir()) / "manifest.txt", std::ios::binary) << manifest_text(m);
  } catch (...) {
    out.remove_all();
    throw;
  }
  for (const auto& line : m.summary) log << line << '\n';
  return m;
}

}  // namespace ergolab::cli
