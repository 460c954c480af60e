#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "ergolab/format.hpp"
#include "ergolab/pressure.hpp"

namespace ergolab {

namespace {

// Flat storage of orbit coordinates: per point (n+1) steps of `dim` doubles.
struct OrbitStore {
  int n = 0;
  int dim = 1;
  std::vector<double> coords;

  const double* at(std::size_t idx) const { return coords.data() + idx * static_cast<std::size_t>((n + 1) * dim); }
};

int dimension(const MapSystem& map) { return map.kind() == MapKind::Viana ? 2 : 1; }

void write_coords(const PhasePoint& p, double* out) {
  if (auto* c = std::get_if<CircleAngle>(&p)) {
    out[0] = c->theta;
  } else if (auto* q = std::get_if<IntervalCoord>(&p)) {
    out[0] = q->x;
  } else {
    const auto& y = std::get<CylinderPoint>(p);
    out[0] = y.theta;
    out[1] = y.x;
  }
}

bool is_separated(const MapSystem& map, const double* a, const double* b, int n, double eps) {
  for (int i = 0; i <= n; ++i) {
    double d;
    switch (map.kind()) {
      case MapKind::CircleTimesD: d = circle_arc(a[i], b[i]); break;
      case MapKind::Quadratic: d = std::abs(a[i] - b[i]); break;
      default: d = std::max(circle_arc(a[2 * i], b[2 * i]), std::abs(a[2 * i + 1] - b[2 * i + 1])); break;
    }
    if (d >= eps) return true;
  }
  return false;
}

// One bucketed coordinate: buckets of side >= eps, so two points closer than
// eps in that coordinate always sit in neighbouring buckets.
struct KeySlot {
  int coord = 0;  // offset into the flat orbit coordinates
  bool periodic = true;
  long count = 1;
  double lo = 0.0;
  double w = 1.0;

  long index(double v) const { return std::clamp(static_cast<long>(std::floor((v - lo) / w)), 0L, count - 1); }
};

// d_n < eps forces eps-closeness at every time, so keying on the first
// coordinate at a few times as well as 0 keeps buckets small for large n.
std::vector<KeySlot> make_slots(const MapSystem& map, int n, double eps) {
  auto count = [&](double span) { return std::max(1L, static_cast<long>(std::floor(span / eps))); };
  const int dim = dimension(map);
  KeySlot first;
  KeySlot x;
  switch (map.kind()) {
    case MapKind::CircleTimesD:
      first.count = count(1.0);
      first.w = 1.0 / static_cast<double>(first.count);
      break;
    case MapKind::Quadratic: {
      double beta = map.interval_radius() * (1.0 + 1e-12);
      first = {0, false, count(2.0 * beta), -beta, 0.0};
      first.w = 2.0 * beta / static_cast<double>(first.count);
      break;
    }
    default: {
      double beta = map.interval_radius();
      first.count = count(1.0);
      first.w = 1.0 / static_cast<double>(first.count);
      x = {1, false, count(2.0 * beta), -beta, 0.0};
      x.w = 2.0 * beta / static_cast<double>(x.count);
      break;
    }
  }
  std::vector<int> times{0};
  if (n > 6) times.push_back(n / 2);
  if (n > 2) times.push_back(n);
  std::vector<KeySlot> slots;
  for (int t : times) {
    KeySlot s = first;
    s.coord = t * dim;
    slots.push_back(s);
  }
  if (dim == 2) slots.push_back(x);
  return slots;
}

std::uint64_t combine(std::uint64_t h, long idx) { return (h ^ static_cast<std::uint64_t>(idx)) * 0x100000001b3ULL; }

constexpr std::size_t kCandidatesPerPoint = 10;

}  // namespace

double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (std::isinf(peak)) return peak;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

std::vector<PhasePoint> uniform_grid(const MapSystem& map, std::size_t resolution, std::size_t x_resolution) {
  if (resolution == 0) throw ContractError("grid resolution must be >= 1");
  std::vector<PhasePoint> grid;
  const double r = static_cast<double>(resolution);
  switch (map.kind()) {
    case MapKind::CircleTimesD:
      grid.reserve(resolution);
      for (std::size_t j = 0; j < resolution; ++j) grid.emplace_back(CircleAngle(static_cast<double>(j) / r));
      break;
    case MapKind::Quadratic: {
      const double beta = map.interval_radius();
      grid.reserve(resolution);
      for (std::size_t j = 0; j < resolution; ++j) {
        grid.emplace_back(IntervalCoord(-beta + 2.0 * beta * (static_cast<double>(j) + 0.5) / r));
      }
      break;
    }
    case MapKind::Viana: {
      const std::size_t rx = x_resolution == 0 ? resolution : x_resolution;
      const double beta = map.interval_radius();
      grid.reserve(resolution * rx);
      for (std::size_t j = 0; j < resolution; ++j) {
        for (std::size_t l = 0; l < rx; ++l) {
          double x = -beta + 2.0 * beta * (static_cast<double>(l) + 0.5) / static_cast<double>(rx);
          grid.emplace_back(CylinderPoint(static_cast<double>(j) / r, x));
        }
      }
      break;
    }
    case MapKind::FullShift: throw ContractError("separated sets are computed for smooth maps only");
  }
  return grid;
}

SeparatedSet build_separated(const MapSystem& map, int n, double eps, std::size_t resolution, std::size_t x_resolution) {
  if (!(eps > 0.0)) throw ContractError("eps must be positive");
  if (static_cast<double>(resolution) * eps < 1.0) {
    throw ContractError("grid resolution too coarse: need resolution >= 1/eps");
  }
  std::ostringstream note;
  note << "uniform " << resolution;
  if (map.kind() == MapKind::Viana) note << "x" << (x_resolution == 0 ? resolution : x_resolution);
  return build_separated_from(map, n, eps, uniform_grid(map, resolution, x_resolution), note.str());
}

SeparatedSet build_separated_from(const MapSystem& map, int n, double eps, const std::vector<PhasePoint>& candidates,
                                  std::string grid_note) {
  if (n < 0) throw ContractError("n must be >= 0");
  if (!(eps > 0.0)) throw ContractError("eps must be positive");
  if (map.kind() == MapKind::FullShift) throw ContractError("separated sets are computed for smooth maps only");

  SeparatedSet out;
  out.map_id = map.id();
  out.n = n;
  out.eps = eps;
  out.candidates = candidates.size();
  out.grid = std::move(grid_note);

  const int dim = dimension(map);
  const auto stride = static_cast<std::size_t>((n + 1) * dim);
  OrbitStore chosen{n, dim, {}};
  const std::vector<KeySlot> slots = make_slots(map, n, eps);
  // fewer than three buckets around the circle: every bucket neighbours every other
  const bool brute = slots.front().periodic && slots.front().count < 3;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) combos *= 3;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> members;
  std::vector<double> trial(stride);
  std::vector<long> base(slots.size());

  for (const auto& cand : candidates) {
    PhasePoint p = cand;
    bool escaped = false;
    for (int i = 0; i <= n; ++i) {
      write_coords(p, trial.data() + static_cast<std::size_t>(i * dim));
      if (i < n) {
        p = step(map, p);
        if (!in_domain(map, p)) {
          escaped = true;
          break;
        }
      }
    }
    if (escaped) {
      ++out.skipped;
      continue;
    }
    std::uint64_t own = 0xcbf29ce484222325ULL;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      base[s] = slots[s].index(trial[static_cast<std::size_t>(slots[s].coord)]);
      own = combine(own, base[s]);
    }
    bool ok = true;
    if (brute) {
      for (std::size_t idx = 0; idx < out.points.size() && ok; ++idx) {
        ok = is_separated(map, trial.data(), chosen.at(idx), n, eps);
      }
    } else {
      for (std::size_t c = 0; c < combos && ok; ++c) {
        std::uint64_t key = 0xcbf29ce484222325ULL;
        std::size_t code = c;
        bool valid = true;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          long i = base[s] + static_cast<long>(code % 3) - 1;
          code /= 3;
          if (slots[s].periodic) {
            i = ((i % slots[s].count) + slots[s].count) % slots[s].count;
          } else if (i < 0 || i >= slots[s].count) {
            valid = false;
            break;
          }
          key = combine(key, i);
        }
        if (!valid) continue;
        auto it = members.find(key);
        if (it == members.end()) continue;
        for (std::size_t idx : it->second) {
          if (!is_separated(map, trial.data(), chosen.at(idx), n, eps)) {
            ok = false;
            break;
          }
        }
      }
    }
    if (!ok) continue;
    members[own].push_back(out.points.size());
    chosen.coords.insert(chosen.coords.end(), trial.begin(), trial.end());
    out.points.push_back(cand);
  }
  return out;
}

double log_partition(const MapSystem& map, const Potential& phi, const SeparatedSet& set) {
  std::vector<double> weights;
  weights.reserve(set.points.size());
  for (const auto& start : set.points) {
    PhasePoint p = start;
    double s = 0.0;
    for (int i = 0; i < set.n; ++i) {
      PhasePoint next = step(map, p);
      s += phi.evaluate_with_image(p, next);
      p = std::move(next);
    }
    weights.push_back(s);
  }
  return log_sum_exp(weights);
}

std::string to_string(PressureMethod method) {
  switch (method) {
    case PressureMethod::SeparatedSets: return "separated_sets";
    case PressureMethod::CylinderCaratheodory: return "cylinder_caratheodory";
    case PressureMethod::Ulam: return "ulam";
  }
  return "unknown";
}

std::string pressure_table_csv(const PressureEstimate& e) {
  std::ostringstream out;
  for (std::size_t i = 0; i < e.columns.size(); ++i) out << (i ? "," : "") << e.columns[i];
  out << '\n';
  for (const auto& row : e.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt_double(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string pressure_summary_line(const PressureEstimate& e) {
  return to_string(e.method) + "," + fmt_double(e.value) + "," + hex64(fnv1a(pressure_table_csv(e) + e.note));
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ContractError("least squares needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw ContractError("least squares needs distinct abscissae");
  return sxy / sxx;
}

PressureEstimate pressure_on_sets(const MapSystem& map, const Potential& phi,
                                  const std::vector<std::vector<SeparatedSet>>& sets) {
  if (sets.empty() || sets.front().empty()) throw ContractError("pressure needs at least one separated set");
  PressureEstimate est;
  est.method = PressureMethod::SeparatedSets;
  est.columns = {"n", "eps", "cardinality", "log_Z", "rate"};
  std::size_t finest = 0;
  for (std::size_t e = 0; e < sets.size(); ++e) {
    if (sets[e].front().eps < sets[finest].front().eps) finest = e;
  }
  std::vector<double> ns;
  std::vector<double> logz;
  std::vector<bool> resolved;
  for (std::size_t e = 0; e < sets.size(); ++e) {
    for (const auto& s : sets[e]) {
      double lz = log_partition(map, phi, s);
      est.rows.push_back({static_cast<double>(s.n), s.eps, static_cast<double>(s.points.size()), lz,
                          s.n > 0 ? lz / s.n : std::numeric_limits<double>::quiet_NaN()});
      if (e == finest) {
        ns.push_back(s.n);
        logz.push_back(lz);
        resolved.push_back(s.points.size() * kCandidatesPerPoint <= s.candidates);
      }
    }
  }
  // Once eps d^-n drops to a few grid cells the greedy count is set by the grid
  // spacing, not by the dynamics; such n are kept in the table but not fitted.
  std::vector<double> fit_n;
  std::vector<double> fit_z;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (resolved[i]) {
      fit_n.push_back(ns[i]);
      fit_z.push_back(logz[i]);
    }
  }
  std::ostringstream note;
  if (fit_n.size() < 2) {
    fit_n = ns;
    fit_z = logz;
    note << "warning: fewer than two grid-resolved n, fitting all; ";
  } else if (fit_n.size() < ns.size()) {
    note << ns.size() - fit_n.size() << " grid-saturated n excluded (fewer than " << kCandidatesPerPoint
         << " candidates per point); ";
  }
  const std::size_t use = std::min<std::size_t>(3, fit_n.size());
  const std::size_t first = fit_n.size() - use;
  if (use >= 2) {
    est.value = least_squares_slope(std::span(fit_n).subspan(first), std::span(fit_z).subspan(first));
    note << "least-squares slope of log Z_n over n in {";
    for (std::size_t i = first; i < fit_n.size(); ++i) note << (i > first ? "," : "") << fit_n[i];
    note << "} at eps=" << fmt_double(sets[finest].front().eps);
  } else {
    if (fit_n.front() == 0) throw ContractError("a single-n estimate needs n >= 1");
    est.value = fit_z.front() / fit_n.front();
    note << "(1/n) log Z_n at n=" << fit_n.front();
  }
  note << "; grid " << sets[finest].back().grid;
  est.note = note.str();
  return est;
}

PressureEstimate pressure_separated(const MapSystem& map, const Potential& phi, const std::vector<int>& n_list,
                                    const std::vector<double>& eps_list, std::size_t resolution,
                                    std::size_t x_resolution) {
  if (n_list.empty() || eps_list.empty()) throw ContractError("n_list and eps_list must be nonempty");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw ContractError("n_list must be strictly increasing");
  }
  std::vector<std::vector<SeparatedSet>> sets;
  for (double eps : eps_list) {
    std::vector<SeparatedSet> row;
    for (int n : n_list) row.push_back(build_separated(map, n, eps, resolution, x_resolution));
    sets.push_back(std::move(row));
  }
  return pressure_on_sets(map, phi, sets);
}

}  // namespace ergolab
