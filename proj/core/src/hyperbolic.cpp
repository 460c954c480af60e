#include "ergolab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ergolab/format.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"

namespace ergolab {

namespace {

double coordinate(const PhasePoint& p) {
  if (auto* c = std::get_if<CircleAngle>(&p)) return c->theta;
  if (auto* q = std::get_if<IntervalCoord>(&p)) return q->x;
  throw ContractError("expected a one-dimensional phase point, got " + describe(p));
}

PhasePoint make_point(const MapSystem& map, double v) {
  if (map.kind() == MapKind::CircleTimesD) return CircleAngle(v);
  return IntervalCoord(v);
}

Interval ball_around(const MapSystem& map, double c, double delta) {
  if (map.kind() == MapKind::CircleTimesD) {
    if (delta >= 0.5) return Interval{0.0, 1.0, true};
    return Interval{c - delta, c + delta, false};
  }
  double beta = map.interval_radius();
  return Interval{std::max(c - delta, -beta), std::min(c + delta, beta), false};
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.full) return b;
  if (b.full) return a;
  return Interval{std::max(a.lo, b.lo), std::min(a.hi, b.hi), false};
}

// Component of f^{-1}(target) containing y, where f(y) = fy lies in target.
Interval pullback(const MapSystem& map, double y, double fy, const Interval& target, bool allow_fold, int& symbol) {
  if (map.kind() == MapKind::CircleTimesD) {
    const double d = map.circle().degree;
    const double k = std::round(d * y - fy);
    symbol = static_cast<int>(k);
    if (target.full) return Interval{0.0, 1.0, true};
    return Interval{(target.lo + k) / d, (target.hi + k) / d, false};
  }
  const double a = map.quadratic_params().a0;
  symbol = y > 0.0 ? 1 : (y < 0.0 ? -1 : 0);
  if (target.hi > a || y == 0.0) {
    if (!allow_fold) throw ComputationError("pre-ball not homeomorphic: pullback folds over the critical point");
    double r = std::sqrt(std::max(0.0, a - target.lo));
    return Interval{-r, r, false};
  }
  double inner = std::sqrt(a - target.hi);
  double outer = std::sqrt(std::max(0.0, a - target.lo));
  if (y > 0.0) return Interval{inner, outer, false};
  return Interval{-outer, -inner, false};
}

std::vector<double> orbit_coordinates(const MapSystem& map, const PhasePoint& x, int n) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n) + 1);
  PhasePoint p = x;
  xs.push_back(coordinate(p));
  for (int i = 0; i < n; ++i) {
    p = step(map, p);
    xs.push_back(coordinate(p));
  }
  return xs;
}

void require_one_dimensional(const MapSystem& map, const char* op) {
  if (!map.is_one_dimensional()) throw ContractError(std::string(op) + " needs a one-dimensional map");
}

}  // namespace

HyperbolicTimeRecord detect_pliss(const Orbit& orbit, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ContractError("sigma must lie in (0, 1)");
  if (orbit.inv_norms.size() != orbit.length) throw ContractError("orbit carries no derivative data");
  HyperbolicTimeRecord rec;
  rec.map_id = orbit.map_id;
  rec.sigma = sigma;
  rec.horizon = orbit.length;
  const double log_sigma = std::log(sigma);
  // With P_n = sum_{j<n} (log inv_norm[j] - log sigma), n qualifies iff
  // P_n <= min_{i<n} P_i.
  double prefix = 0.0;
  double running_min = 0.0;
  for (std::size_t n = 1; n <= orbit.length; ++n) {
    double v = orbit.inv_norms[n - 1];
    if (std::isinf(v)) {
      rec.truncated = true;
      rec.horizon = n - 1;
      break;
    }
    prefix += std::log(v) - log_sigma;
    if (prefix <= running_min) rec.times.push_back(n);
    running_min = std::min(running_min, prefix);
  }
  return rec;
}

double frequency(const HyperbolicTimeRecord& record, std::size_t n) {
  if (n == 0) throw ContractError("frequency needs n >= 1");
  if (n > record.horizon) throw ContractError("frequency requested beyond the record horizon");
  auto count = std::upper_bound(record.times.begin(), record.times.end(), n) - record.times.begin();
  return static_cast<double>(count) / static_cast<double>(n);
}

std::vector<double> frequency_table(const HyperbolicTimeRecord& record) {
  std::vector<double> table(record.horizon);
  std::size_t idx = 0;
  for (std::size_t n = 1; n <= record.horizon; ++n) {
    while (idx < record.times.size() && record.times[idx] <= n) ++idx;
    table[n - 1] = static_cast<double>(idx) / static_cast<double>(n);
  }
  return table;
}

HyperbolicTimeRecord truncate(const HyperbolicTimeRecord& record, std::size_t n) {
  if (n > record.horizon) throw ContractError("cannot truncate beyond the record horizon");
  HyperbolicTimeRecord out = record;
  out.horizon = n;
  out.times.erase(std::upper_bound(out.times.begin(), out.times.end(), n), out.times.end());
  return out;
}

PreBall preball(const MapSystem& map, const PhasePoint& x, int n, double delta) {
  require_one_dimensional(map, "preball");
  if (n < 0) throw ContractError("preball needs n >= 0");
  if (!(delta > 0.0)) throw ContractError("delta must be positive");
  auto xs = orbit_coordinates(map, x, n);
  PreBall pb;
  pb.center = x;
  pb.n = n;
  pb.delta = delta;
  pb.itinerary.resize(static_cast<std::size_t>(n));
  Interval j = ball_around(map, xs[static_cast<std::size_t>(n)], delta);
  for (int i = n - 1; i >= 0; --i) {
    auto ui = static_cast<std::size_t>(i);
    j = pullback(map, xs[ui], xs[ui + 1], j, false, pb.itinerary[ui]);
  }
  pb.interval = j;
  return pb;
}

Interval dynamical_ball_1d(const MapSystem& map, const PhasePoint& x, int n, double delta) {
  require_one_dimensional(map, "dynamical_ball_1d");
  if (n < 0) throw ContractError("dynamical_ball_1d needs n >= 0");
  if (!(delta > 0.0)) throw ContractError("delta must be positive");
  auto xs = orbit_coordinates(map, x, n);
  Interval j = ball_around(map, xs[static_cast<std::size_t>(n)], delta);
  for (int i = n - 1; i >= 0; --i) {
    auto ui = static_cast<std::size_t>(i);
    int symbol = 0;
    Interval back = pullback(map, xs[ui], xs[ui + 1], j, true, symbol);
    j = intersect(back, ball_around(map, xs[ui], delta));
  }
  return j;
}

ContractionReport verify_metric_contraction(const MapSystem& map, const PhasePoint& x, int n, double sigma,
                                            double delta, std::size_t samples, std::uint64_t seed,
                                            double tolerance) {
  if (n < 1) throw ContractError("verify_metric_contraction needs n >= 1");
  if (!(sigma > 0.0 && sigma < 1.0)) throw ContractError("sigma must lie in (0, 1)");
  if (map.kind() == MapKind::FullShift) throw ContractError("verify_metric_contraction needs a smooth map");

  std::function<PhasePoint(Rng&)> draw;
  if (map.is_one_dimensional()) {
    Interval box = preball(map, x, n, delta).interval;
    if (box.full) box = Interval{0.0, 1.0, false};
    draw = [box, &map](Rng& rng) { return make_point(map, rng.uniform(box.lo, box.hi)); };
  } else {
    const auto& c = std::get<CylinderPoint>(x);
    const double r = delta * std::pow(sigma, n);
    const double beta = map.interval_radius();
    const double xlo = std::max(c.x - r, -beta);
    const double xhi = std::min(c.x + r, beta);
    draw = [c, r, xlo, xhi](Rng& rng) {
      double t = rng.uniform(c.theta - r, c.theta + r);
      return PhasePoint(CylinderPoint(t, rng.uniform(xlo, xhi)));
    };
  }

  const Metric metric = map.metric();
  ContractionReport report;
  Rng rng(seed);
  std::vector<double> dist(static_cast<std::size_t>(n) + 1);
  for (std::size_t s = 0; s < samples; ++s) {
    PhasePoint y = draw(rng);
    PhasePoint z = draw(rng);
    for (int i = 0; i <= n; ++i) {
      dist[static_cast<std::size_t>(i)] = distance(metric, y, z);
      if (i < n) {
        y = step(map, y);
        z = step(map, z);
      }
    }
    const double dn = dist[static_cast<std::size_t>(n)];
    if (dn == 0.0) {
      ++report.degenerate_pairs;
      continue;
    }
    ++report.pairs_checked;
    for (int i = 0; i < n; ++i) {
      double ratio = dist[static_cast<std::size_t>(i)] / (std::pow(sigma, n - i) * dn);
      report.worst_ratio = std::max(report.worst_ratio, ratio);
    }
  }
  report.passed = report.pairs_checked > 0 && report.worst_ratio <= 1.0 + tolerance;
  return report;
}

std::size_t HClassification::count(HLabel label) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const HEntry& e) { return !e.flagged && e.label == label; }));
}

std::size_t HClassification::flagged() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const HEntry& e) { return e.flagged; }));
}

double HClassification::h_fraction() const {
  std::size_t valid = entries.size() - flagged();
  if (valid == 0) return 0.0;
  return static_cast<double>(count(HLabel::H)) / static_cast<double>(valid);
}

HClassification classify(const MapSystem& map, const std::vector<PhasePoint>& seeds, double sigma,
                         std::size_t horizon, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ContractError("threshold must lie in (0, 1)");
  if (horizon < 1) throw ContractError("horizon must be >= 1");
  HClassification out;
  out.sigma = sigma;
  out.horizon = horizon;
  out.threshold = threshold;
  out.entries.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    HEntry& e = out.entries[i];
    e.point = seeds[i];
    try {
      Orbit o = orbit(map, seeds[i], horizon);
      HyperbolicTimeRecord rec = detect_pliss(o, sigma);
      if (rec.truncated) {
        e.flagged = true;
        e.note = "critical hit at step " + std::to_string(rec.horizon);
        return;
      }
      e.frequency = frequency(rec, horizon);
      e.label = e.frequency >= threshold ? HLabel::H : HLabel::Hc;
    } catch (const DomainEscape& err) {
      e.flagged = true;
      e.note = err.what();
    }
  });
  return out;
}

SlowApproximation slow_approx_average(const Orbit& orbit, double delta) {
  if (!(delta > 0.0)) throw ContractError("delta must be positive");
  if (orbit.length == 0) throw ContractError("empty orbit");
  SlowApproximation out;
  double sum = 0.0;
  for (std::size_t i = 0; i < orbit.length; ++i) {
    double d = orbit.crit_dists[i];
    if (d == 0.0) {
      out.critical_hit = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    if (d < delta) sum -= std::log(d);
  }
  out.value = sum / static_cast<double>(orbit.length);
  return out;
}

std::string hyperbolic_times_csv(const HyperbolicTimeRecord& record) {
  std::ostringstream out;
  out << "n_hyperbolic\n";
  for (auto n : record.times) out << n << '\n';
  return out.str();
}

std::string hyperbolic_summary_csv(const HyperbolicTimeRecord& record) {
  std::ostringstream out;
  out << "sigma,horizon,frequency\n";
  out << fmt_double(record.sigma) << ',' << record.horizon << ','
      << (record.horizon > 0 ? fmt_double(frequency(record, record.horizon)) : std::string("nan")) << '\n';
  return out.str();
}

std::string classification_csv(const HClassification& c) {
  std::ostringstream out;
  out << "seed,freq,label\n";
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    const auto& e = c.entries[i];
    out << i << ',' << (e.flagged ? std::string("nan") : fmt_double(e.frequency)) << ','
        << (e.flagged ? "flagged" : (e.label == HLabel::H ? "H" : "Hc")) << '\n';
  }
  return out.str();
}

}  // namespace ergolab
