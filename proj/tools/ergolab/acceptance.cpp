#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ergolab/format.hpp"
#include "ergolab/hyperbolic.hpp"
#include "ergolab/pressure.hpp"
#include "ergolab/random.hpp"
#include "ergolab/transfer.hpp"

namespace fs = std::filesystem;

namespace ergolab::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g(double v) { return fmt_double(v); }

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.precision(digits);
  s << std::scientific << v;
  return s.str();
}

// Random prefix table on the k-shift with entries in [lo, hi).
std::vector<double> random_table(Rng& rng, int k, int p, double lo, double hi) {
  std::size_t size = 1;
  for (int i = 0; i < p; ++i) size *= static_cast<std::size_t>(k);
  std::vector<double> v(size);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

double gamma_star(int k, const Potential& phi, const LambdaSpec& lambda, double tol) {
  return relative_pressure_shift(k, phi, lambda, 1, 24, tol).value;
}

constexpr double kGammaTol = 1e-7;

CriterionResult c1_shift_oracle(OutputSet& out) {
  CriterionResult r{1, "shift pressure oracle", true, "", 0};
  auto t0 = Clock::now();
  std::ostringstream csv;
  csv << "k,gamma_star,log_k,abs_err\n";
  double worst = 0.0;
  for (int k = 2; k <= 4; ++k) {
    double v = gamma_star(k, Potential::constant(0.0), LambdaSpec::whole(), kGammaTol);
    double err = std::abs(v - std::log(static_cast<double>(k)));
    worst = std::max(worst, err);
    csv << k << ',' << g(v) << ',' << g(std::log(static_cast<double>(k))) << ',' << g(err) << '\n';
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-6 && r.seconds < 60.0;
  r.detail = "max |gamma* - log k| = " + fixed(worst, 2) + " for k=2,3,4 (N=1, n_max=24)";
  out.csv("c01_shift_pressure.csv", csv.str());
  return r;
}

CriterionResult c2_sub_alphabet(OutputSet& out) {
  CriterionResult r{2, "sub-alphabet relative pressure", true, "", 0};
  auto t0 = Clock::now();
  double sub = gamma_star(3, Potential::constant(0.0), LambdaSpec::sub_alphabet({0, 1}), kGammaTol);
  double whole = gamma_star(3, Potential::constant(0.0), LambdaSpec::whole(), kGammaTol);
  auto dec = check_sup_decomposition(3, Potential::constant(0.0), {0, 1}, 1, 24, kGammaTol);
  double e_sub = std::abs(sub - std::log(2.0));
  double e_whole = std::abs(whole - std::log(3.0));
  double gap = whole - sub;
  r.passed = e_sub <= 1e-6 && e_whole <= 1e-6 && gap > 0.4 && dec.holds;
  r.seconds = seconds_since(t0);
  r.detail = "gamma*(Lambda={0,1}) = " + g(sub) + ", gamma*(M) = " + g(whole) + ", gap = " + g(gap);
  std::ostringstream csv;
  csv << "lambda,gamma_star,reference,abs_err\n";
  csv << "sub_alphabet_01," << g(sub) << ',' << g(std::log(2.0)) << ',' << g(e_sub) << '\n';
  csv << "whole_space," << g(whole) << ',' << g(std::log(3.0)) << ',' << g(e_whole) << '\n';
  csv << "gap," << g(gap) << ',' << g(std::log(1.5)) << ',' << g(std::abs(gap - std::log(1.5))) << '\n';
  out.csv("c02_sub_alphabet.csv", csv.str());
  return r;
}

CriterionResult c3_constant_shift(OutputSet& out, std::uint64_t seed) {
  CriterionResult r{3, "constant-shift lemma", true, "", 0};
  auto t0 = Clock::now();
  std::ostringstream csv;
  csv << "system,c,p_phi,p_phi_plus_c,difference_minus_c\n";
  Rng rng(mix_seed(seed, 3));
  Potential phi = Potential::prefix_table(2, 2, random_table(rng, 2, 2, -0.5, 0.5));
  const double base = gamma_star(2, phi, LambdaSpec::whole(), kGammaTol);
  double worst_shift = 0.0;
  for (double c : {-0.5, 0.3, 1.0}) {
    double v = gamma_star(2, phi.plus(c), LambdaSpec::whole(), kGammaTol);
    double dev = std::abs(v - base - c);
    worst_shift = std::max(worst_shift, dev);
    csv << "shift2," << g(c) << ',' << g(base) << ',' << g(v) << ',' << g(v - base - c) << '\n';
  }
  double worst_sep = 0.0;
  for (int d : {2, 3}) {
    MapSystem map = MapSystem::circle_times_d(d);
    Potential cosine = Potential::analytic(AnalyticFamily::CosTheta, 0.1);
    std::vector<std::vector<SeparatedSet>> sets(1);
    for (int n : {2, 3, 4}) sets[0].push_back(build_separated(map, n, 0.01, 4096));
    double p0 = pressure_on_sets(map, cosine, sets).value;
    for (double c : {-0.5, 0.3, 1.0}) {
      double pc = pressure_on_sets(map, cosine.plus(c), sets).value;
      double dev = std::abs(pc - p0 - c);
      worst_sep = std::max(worst_sep, dev);
      csv << "times" << d << "_separated," << g(c) << ',' << g(p0) << ',' << g(pc) << ',' << g(pc - p0 - c) << '\n';
    }
  }
  r.passed = worst_shift <= 2e-6 && worst_sep <= 1e-9;
  r.seconds = seconds_since(t0);
  r.detail = "shift max dev " + fixed(worst_shift, 2) + " (<= 2e-6), separated max dev " + fixed(worst_sep, 2) +
             " (<= 1e-9)";
  out.csv("c03_constant_shift.csv", csv.str());
  return r;
}

CriterionResult c4_monotonicity(OutputSet& out, std::uint64_t seed) {
  CriterionResult r{4, "monotonicity lemma", true, "", 0};
  auto t0 = Clock::now();
  Rng rng(mix_seed(seed, 4));
  std::ostringstream csv;
  csv << "pair,gamma_phi,gamma_psi,violation\n";
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    auto a = random_table(rng, 2, 3, -1.0, 1.0);
    auto b = a;
    for (double& x : b) {
      // some entries equal, the rest strictly larger
      if (rng.uniform() < 0.7) x += rng.uniform(0.0, 0.5);
    }
    double gp = gamma_star(2, Potential::prefix_table(2, 3, a), LambdaSpec::whole(), kGammaTol);
    double gq = gamma_star(2, Potential::prefix_table(2, 3, b), LambdaSpec::whole(), kGammaTol);
    bool bad = gp > gq + 2e-6;
    violations += bad ? 1 : 0;
    csv << i << ',' << g(gp) << ',' << g(gq) << ',' << (bad ? 1 : 0) << '\n';
  }
  r.passed = violations == 0;
  r.seconds = seconds_since(t0);
  r.detail = std::to_string(violations) + " violations in 100 pairs";
  out.csv("c04_monotonicity.csv", csv.str());
  return r;
}

CriterionResult c5_separated_entropy(OutputSet& out) {
  CriterionResult r{5, "separated-set entropy", true, "", 0};
  auto t0 = Clock::now();
  std::vector<int> n_list;
  for (int n = 0; n <= 14; ++n) n_list.push_back(n);
  std::ostringstream csv;
  csv << "d,n,eps,cardinality,log_Z,rate\n";
  std::ostringstream summary;
  double worst = 0.0;
  for (int d : {2, 3}) {
    MapSystem map = MapSystem::circle_times_d(d);
    PressureEstimate e = pressure_separated(map, Potential::constant(0.0), n_list, {1e-3}, 1u << 16);
    for (const auto& row : e.rows) {
      csv << d;
      for (double v : row) csv << ',' << g(v);
      csv << '\n';
    }
    double rel = std::abs(e.value / std::log(static_cast<double>(d)) - 1.0);
    worst = std::max(worst, rel);
    summary << "x" << d << ": " << g(e.value) << " (" << std::fixed;
    summary.precision(2);
    summary << 100.0 * rel << "%) ";
    summary.unsetf(std::ios::fixed);
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 0.03 && r.seconds < 300.0;
  r.detail = summary.str() + "vs log d; eps=1e-3, grid 2^16, n<=14";
  out.csv("c05_separated_entropy.csv", csv.str());
  return r;
}

CriterionResult c6_ulam(OutputSet& out) {
  CriterionResult r{6, "Ulam spectral", true, "", 0};
  auto t0 = Clock::now();
  std::ostringstream csv;
  csv << "d,m,lambda,abs_err,max_density_dev,total_mass\n";
  double worst_lambda = 0.0;
  double worst_density = 0.0;
  for (auto [d, m] : {std::pair{2, 4096}, std::pair{3, 6561}}) {
    MapSystem map = MapSystem::circle_times_d(d);
    DensityTable t = mme_density(map, Grid::for_map(map, m), UlamMode::exact(), 1e-12, 1000);
    double err = std::abs(t.spectral.lambda - d);
    double dev = 0.0;
    for (double x : t.density) dev = std::max(dev, std::abs(x - 1.0));
    worst_lambda = std::max(worst_lambda, err);
    worst_density = std::max(worst_density, dev);
    csv << d << ',' << m << ',' << g(t.spectral.lambda) << ',' << g(err) << ',' << g(dev) << ','
        << g(t.total_mass()) << '\n';
  }
  r.seconds = seconds_since(t0);
  r.passed = worst_lambda <= 1e-6 && worst_density <= 1e-8 && r.seconds < 60.0;
  r.detail = "max |lambda - d| = " + fixed(worst_lambda, 2) + ", max density deviation = " + fixed(worst_density, 2);
  out.csv("c06_ulam.csv", csv.str());
  return r;
}

CriterionResult c7_preball_identity(OutputSet& out, std::uint64_t seed) {
  CriterionResult r{7, "pre-ball identity", true, "", 0};
  auto t0 = Clock::now();
  std::ostringstream csv;
  csv << "d,x,n,preball_lo,preball_hi,ball_lo,ball_hi,max_endpoint_diff\n";
  int failures = 0;
  double worst = 0.0;
  for (int d : {2, 3}) {
    MapSystem map = MapSystem::circle_times_d(d);
    Rng rng(mix_seed(seed, 70 + static_cast<std::uint64_t>(d)));
    for (int i = 0; i < 50; ++i) {
      CircleAngle x(rng.uniform());
      int n = static_cast<int>(rng.below(11));
      PreBall pb = preball(map, x, n, 0.05);
      Interval ball = dynamical_ball_1d(map, x, n, 0.05);
      double diff = std::max(std::abs(pb.interval.lo - ball.lo), std::abs(pb.interval.hi - ball.hi));
      worst = std::max(worst, diff);
      if (!(diff <= 1e-10)) ++failures;
      csv << d << ',' << g(x.theta) << ',' << n << ',' << g(pb.interval.lo) << ',' << g(pb.interval.hi) << ','
          << g(ball.lo) << ',' << g(ball.hi) << ',' << g(diff) << '\n';
    }
  }
  r.passed = failures == 0;
  r.seconds = seconds_since(t0);
  r.detail = std::to_string(failures) + " failures in 100 cases, max endpoint diff " + fixed(worst, 2);
  out.csv("c07_preball_identity.csv", csv.str());
  return r;
}

CriterionResult c8_hyperbolic_times(OutputSet& out, std::uint64_t seed) {
  CriterionResult r{8, "hyperbolic-time cross-validation", true, "", 0};
  auto t0 = Clock::now();
  std::ostringstream csv;
  csv << "system,n,detected,worst_ratio,passed\n";
  bool ok = true;
  double times2_dev = 0.0;
  {
    MapSystem map = MapSystem::circle_times_d(2);
    PhasePoint x = sample_phase_points(map, 1, mix_seed(seed, 8)).front();
    HyperbolicTimeRecord rec = detect_pliss(orbit(map, x, 20), 0.5);
    for (std::size_t n = 1; n <= 20; ++n) {
      bool detected = std::find(rec.times.begin(), rec.times.end(), n) != rec.times.end();
      auto rep = verify_metric_contraction(map, x, static_cast<int>(n), 0.5, 0.1, 200, mix_seed(seed, 800 + n), 1e-12);
      double dev = std::abs(rep.worst_ratio - 1.0);
      times2_dev = std::max(times2_dev, dev);
      bool pass = detected && rep.passed && dev <= 1e-12;
      ok = ok && pass;
      csv << "times2," << n << ',' << (detected ? 1 : 0) << ',' << g(rep.worst_ratio) << ',' << (pass ? 1 : 0)
          << '\n';
    }
  }
  double quad_worst = 0.0;
  std::size_t quad_times = 0;
  {
    MapSystem map = MapSystem::quadratic(2.0);
    IntervalCoord x(2.0);
    HyperbolicTimeRecord rec = detect_pliss(orbit(map, x, 20), 0.5);
    quad_times = rec.times.size();
    ok = ok && !rec.times.empty();
    for (std::size_t n : rec.times) {
      auto rep = verify_metric_contraction(map, x, static_cast<int>(n), 0.5, 0.05, 200, mix_seed(seed, 900 + n), 1e-6);
      quad_worst = std::max(quad_worst, rep.worst_ratio);
      bool pass = rep.passed && rep.worst_ratio <= 1.0 + 1e-6;
      ok = ok && pass;
      csv << "quadratic2," << n << ",1," << g(rep.worst_ratio) << ',' << (pass ? 1 : 0) << '\n';
    }
  }
  r.passed = ok;
  r.seconds = seconds_since(t0);
  r.detail = "x2: max |worst_ratio - 1| = " + fixed(times2_dev, 2) + " over n<=20; quadratic a0=2 from x=2: " +
             std::to_string(quad_times) + " times, worst ratio " + g(quad_worst);
  out.csv("c08_hyperbolic_times.csv", csv.str());
  return r;
}

CriterionResult c9_bump_pair(OutputSet& out, std::uint64_t seed) {
  CriterionResult r{9, "bump-pair bounded Birkhoff sums", true, "", 0};
  auto t0 = Clock::now();
  std::ostringstream csv;
  csv << "system,seeds,horizon,excluded,global_max,bound,passed\n";
  std::ostringstream detail;
  bool ok = true;
  auto one = [&](const std::string& name, const MapSystem& map, const BumpRegion& region, std::uint64_t s) {
    Potential phi = make_bump_pair(map, region);
    BirkhoffReport rep = verify_bounded(phi, map, 1000, 100000, s);
    ok = ok && rep.passed;
    csv << name << ",1000,100000," << rep.excluded << ',' << g(rep.global_max) << ',' << g(rep.bound.value_or(0.0))
        << ',' << (rep.passed ? 1 : 0) << '\n';
    out.csv("c09_" + name + "_per_seed.csv", birkhoff_report_csv(rep));
    detail << name << " max " << g(rep.global_max) << " <= " << g(rep.bound.value_or(0.0)) << " ("
           << rep.excluded << " excluded); ";
  };
  one("times2", MapSystem::circle_times_d(2), BumpRegion::interval(0.3, 0.4), mix_seed(seed, 91));
  one("viana", MapSystem::viana(16, misiurewicz_a0(), 0.01), BumpRegion::band(0.0, 1.0, 0.1, 0.2),
      mix_seed(seed, 92));
  r.seconds = seconds_since(t0);
  r.passed = ok && r.seconds < 600.0;
  r.detail = detail.str() + "1e3 seeds, N=1e5";
  out.csv("c09_bump_pair.csv", csv.str());
  return r;
}

CriterionResult c10_viana_statistics(OutputSet& out, std::uint64_t seed) {
  CriterionResult r{10, "Viana expanding-set statistics", true, "", 0};
  auto t0 = Clock::now();
  MapSystem map = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  auto seeds = sample_phase_points(map, 500, mix_seed(seed, 10));
  HClassification c = classify(map, seeds, 0.9, 5000, 0.05);
  out.csv("c10_classification.csv", classification_csv(c));
  const double h_share = static_cast<double>(c.count(HLabel::H)) / 500.0;

  std::ostringstream csv;
  csv << "seed_index,slow_approx,critical_hit\n";
  double sum = 0.0;
  std::size_t used = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    SlowApproximation s{0.0, false};
    try {
      s = slow_approx_average(orbit(map, seeds[i], 10000), 1e-3);
    } catch (const DomainEscape&) {
      s.critical_hit = true;
      s.value = std::numeric_limits<double>::infinity();
    }
    csv << i << ',' << g(s.value) << ',' << (s.critical_hit ? 1 : 0) << '\n';
    if (s.critical_hit) {
      ++hits;
    } else {
      sum += s.value;
      ++used;
    }
  }
  out.csv("c10_slow_approximation.csv", csv.str());
  const double mean = used ? sum / static_cast<double>(used) : std::numeric_limits<double>::infinity();
  r.passed = h_share >= 0.9 && mean < 0.05;
  r.seconds = seconds_since(t0);
  r.detail = "H share " + g(h_share) + " of 500 (flagged " + std::to_string(c.flagged()) +
             "), slow-approximation mean " + g(mean) + " at delta=1e-3 over n=1e4 (" + std::to_string(hits) +
             " critical hits)";
  return r;
}

using Runner = std::function<CriterionResult(OutputSet&)>;

std::vector<Runner> criteria(std::uint64_t seed) {
  return {
      [](OutputSet& o) { return c1_shift_oracle(o); },
      [](OutputSet& o) { return c2_sub_alphabet(o); },
      [seed](OutputSet& o) { return c3_constant_shift(o, seed); },
      [seed](OutputSet& o) { return c4_monotonicity(o, seed); },
      [](OutputSet& o) { return c5_separated_entropy(o); },
      [](OutputSet& o) { return c6_ulam(o); },
      [seed](OutputSet& o) { return c7_preball_identity(o, seed); },
      [seed](OutputSet& o) { return c8_hyperbolic_times(o, seed); },
      [seed](OutputSet& o) { return c9_bump_pair(o, seed); },
      [seed](OutputSet& o) { return c10_viana_statistics(o, seed); },
  };
}

CriterionResult guarded(int id, const Runner& run, OutputSet& out) {
  try {
    return run(out);
  } catch (const std::exception& e) {
    return {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << "  " << (r.id < 10 ? " " : "") << r.id << "  " << r.name << ": " << r.detail;
  s.precision(3);
  s << std::fixed << "  [" << r.seconds << " s]";
  return s.str();
}

std::vector<CriterionResult> run_acceptance(OutputSet& out, const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  auto report = [&](CriterionResult r) {
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  };
  const auto suite = criteria(options.seed);
  for (std::size_t i = 0; i < suite.size(); ++i) report(guarded(static_cast<int>(i) + 1, suite[i], out));

  if (options.check_determinism) {
    CriterionResult r{11, "determinism", true, "", 0};
    auto t0 = Clock::now();
    const fs::path rerun_dir = fs::path(out.dir()) / "rerun";
    OutputSet again(rerun_dir.string(), out.config_hash(), out.reproducible());
    for (std::size_t i = 0; i < suite.size(); ++i) guarded(static_cast<int>(i) + 1, suite[i], again);
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& f : out.files()) {
      if (f.name.size() < 4 || f.name.compare(f.name.size() - 4, 4, ".csv") != 0) continue;
      ++compared;
      if (read_file(fs::path(out.dir()) / f.name) != read_file(rerun_dir / f.name)) differing.push_back(f.name);
    }
    again.remove_all();
    std::error_code ec;
    fs::remove(rerun_dir, ec);
    r.passed = differing.empty() && compared > 0;
    r.seconds = seconds_since(t0);
    r.detail = std::to_string(compared) + " CSV files rerun, " + std::to_string(differing.size()) + " differ";
    for (const auto& name : differing) r.detail += " " + name;
    report(r);
  }

  std::ostringstream csv;
  csv << "criterion,name,status,detail\n";
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    csv << r.id << ',' << r.name << ',' << (r.passed ? "PASS" : "FAIL") << ',' << detail << '\n';
  }
  out.csv("acceptance.csv", csv.str());
  std::ostringstream timing;
  for (const auto& r : results) timing << r.id << ' ' << fmt_double(r.seconds) << '\n';
  out.text("acceptance_timing.txt", timing.str());
  return results;
}

}  // namespace ergolab::cli
