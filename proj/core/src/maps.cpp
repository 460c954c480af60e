#include "ergolab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ergolab/format.hpp"

namespace ergolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack accepted on the boundary of an interval phase space.
constexpr double kDomainSlack = 1e-12;

double quadratic_radius(double a) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * a)); }

// Largest singular value of [[a, b], [c, d]].
double max_singular_value(double a, double b, double c, double d) {
  double s = std::hypot(a + d, b - c);
  double t = std::hypot(a - d, b + c);
  return 0.5 * (s + t);
}

template <class T>
const T& expect_point(const PhasePoint& p, MapKind kind) {
  auto* v = std::get_if<T>(&p);
  if (!v) throw ContractError("phase point " + describe(p) + " does not belong to a " + to_string(kind) + " map");
  return *v;
}

}  // namespace

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::CircleTimesD: return "circle_times_d";
    case MapKind::Quadratic: return "quadratic";
    case MapKind::Viana: return "viana";
    case MapKind::FullShift: return "full_shift";
  }
  return "unknown";
}

ForcingFunction ForcingFunction::tabulated(std::vector<double> samples) {
  if (samples.size() < 3) throw ContractError("tabulated forcing needs at least 3 samples");
  ForcingFunction f;
  f.table_ = std::move(samples);
  return f;
}

double ForcingFunction::value(double theta) const {
  if (table_.empty()) return std::sin(kTwoPi * theta);
  const auto m = table_.size();
  double u = wrap_unit(theta) * static_cast<double>(m);
  auto i = static_cast<std::size_t>(u);
  if (i >= m) i = m - 1;
  double frac = u - static_cast<double>(i);
  return table_[i] + frac * (table_[(i + 1) % m] - table_[i]);
}

double ForcingFunction::derivative(double theta) const {
  if (table_.empty()) return kTwoPi * std::cos(kTwoPi * theta);
  const auto m = table_.size();
  double u = wrap_unit(theta) * static_cast<double>(m);
  auto i = static_cast<std::size_t>(u);
  if (i >= m) i = m - 1;
  return (table_[(i + 1) % m] - table_[i]) * static_cast<double>(m);
}

MapSystem MapSystem::circle_times_d(int degree) {
  if (degree < 2) throw ContractError("degree must be >= 2");
  return MapSystem(MapKind::CircleTimesD, CircleTimesDParams{degree}, 0.0);
}

MapSystem MapSystem::quadratic(double a0) {
  if (!(a0 > 1.0 && a0 <= 2.0)) throw ContractError("quadratic parameter a0 must lie in (1, 2]");
  return MapSystem(MapKind::Quadratic, QuadraticParams{a0}, quadratic_radius(a0));
}

MapSystem MapSystem::viana(int degree, double a0, double alpha, ForcingFunction forcing) {
  if (degree < 2) throw ContractError("degree must be >= 2");
  if (!(a0 > 1.0 && a0 < 2.0)) throw ContractError("Viana parameter a0 must lie in (1, 2)");
  if (!(alpha >= 0.0)) throw ContractError("Viana coupling alpha must be >= 0");
  double radius = viana_invariant_radius(a0, alpha, forcing);
  return MapSystem(MapKind::Viana, VianaParams{degree, a0, alpha, std::move(forcing)}, radius);
}

MapSystem MapSystem::full_shift(int alphabet) {
  if (alphabet < 2) throw ContractError("alphabet size must be >= 2");
  return MapSystem(MapKind::FullShift, FullShiftParams{alphabet}, 0.0);
}

Metric MapSystem::metric() const {
  switch (kind_) {
    case MapKind::CircleTimesD: return Metric::CircleArc;
    case MapKind::Quadratic: return Metric::Euclidean1D;
    case MapKind::Viana: return Metric::CylinderMax;
    case MapKind::FullShift: return Metric::WordMetric;
  }
  return Metric::CircleArc;
}

std::string MapSystem::id() const {
  std::ostringstream out;
  out << to_string(kind_);
  switch (kind_) {
    case MapKind::CircleTimesD: out << "(d=" << circle().degree << ")"; break;
    case MapKind::Quadratic: out << "(a0=" << fmt_double(quadratic_params().a0) << ")"; break;
    case MapKind::Viana: {
      const auto& v = viana_params();
      out << "(d=" << v.degree << ",a0=" << fmt_double(v.a0) << ",alpha=" << fmt_double(v.alpha)
          << ",b=" << (v.forcing.is_sine() ? std::string("sin") : "table" + std::to_string(v.forcing.table().size()))
          << ")";
      break;
    }
    case MapKind::FullShift: out << "(k=" << shift().alphabet << ")"; break;
  }
  return out.str();
}

double MapSystem::fibre_parameter(double theta) const {
  const auto& v = viana_params();
  return v.a0 + v.alpha * v.forcing.value(theta);
}

double viana_invariant_radius(double a0, double alpha, const ForcingFunction& forcing) {
  double a_min = kInf;
  double a_max = -kInf;
  for (int i = 0; i < kVianaCertificationGrid; ++i) {
    double theta = static_cast<double>(i) / kVianaCertificationGrid;
    double a = a0 + alpha * forcing.value(theta);
    a_min = std::min(a_min, a);
    a_max = std::max(a_max, a);
  }
  // q(theta, [-beta, beta]) = [a - beta^2, a]; strict containment in (-beta, beta)
  // needs a_max < beta and a_min - beta^2 > -beta.
  auto contained = [&](double beta) { return a_max < beta && a_min - beta * beta > -beta; };
  constexpr double kStep = 1e-6;
  constexpr long kSteps = 1'000'000;  // beta sweeps 2 down to 1
  long last_good = -1;
  for (long k = 0; k <= kSteps; ++k) {
    double beta = 2.0 - static_cast<double>(k) * kStep;
    if (contained(beta)) {
      last_good = k;
    } else if (last_good >= 0) {
      break;
    }
  }
  if (last_good < 0) throw ContractError("no invariant interval [-beta, beta] inside [-2, 2] for these Viana parameters");
  return 2.0 - static_cast<double>(last_good) * kStep;
}

double quadratic_positive_fixed_point(double a) { return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * a)); }

PhasePoint step(const MapSystem& map, const PhasePoint& p) {
  switch (map.kind()) {
    case MapKind::CircleTimesD: {
      const auto& c = expect_point<CircleAngle>(p, map.kind());
      return CircleAngle(map.circle().degree * c.theta);
    }
    case MapKind::Quadratic: {
      const auto& c = expect_point<IntervalCoord>(p, map.kind());
      return IntervalCoord(map.quadratic_params().a0 - c.x * c.x);
    }
    case MapKind::Viana: {
      const auto& c = expect_point<CylinderPoint>(p, map.kind());
      return CylinderPoint(map.viana_params().degree * c.theta, map.fibre_parameter(c.theta) - c.x * c.x);
    }
    case MapKind::FullShift: {
      const auto& w = expect_point<SymbolWord>(p, map.kind());
      if (w.alphabet != map.shift().alphabet) throw ContractError("word alphabet does not match the shift");
      if (w.symbols.size() < 2) throw ComputationError("orbit exhausted: shift word has length 1");
      SymbolWord next;
      next.alphabet = w.alphabet;
      next.symbols.assign(w.symbols.begin() + 1, w.symbols.end());
      return next;
    }
  }
  throw ContractError("unknown map kind");
}

double inv_deriv_norm(const MapSystem& map, const PhasePoint& p) {
  switch (map.kind()) {
    case MapKind::CircleTimesD:
      expect_point<CircleAngle>(p, map.kind());
      return 1.0 / map.circle().degree;
    case MapKind::Quadratic: {
      const auto& c = expect_point<IntervalCoord>(p, map.kind());
      if (c.x == 0.0) return kInf;
      return 1.0 / std::abs(2.0 * c.x);
    }
    case MapKind::Viana: {
      const auto& c = expect_point<CylinderPoint>(p, map.kind());
      if (c.x == 0.0) return kInf;
      const auto& v = map.viana_params();
      // Df = [[d, 0], [alpha b'(theta), -2x]], lower triangular.
      double d = v.degree;
      double shear = v.alpha * v.forcing.derivative(c.theta);
      double e = -2.0 * c.x;
      return max_singular_value(1.0 / d, 0.0, -shear / (d * e), 1.0 / e);
    }
    case MapKind::FullShift: throw ContractError("full shift is not differentiable");
  }
  throw ContractError("unknown map kind");
}

double jacobian(const MapSystem& map, const PhasePoint& p) {
  switch (map.kind()) {
    case MapKind::CircleTimesD: return map.circle().degree;
    case MapKind::Quadratic: return std::abs(2.0 * expect_point<IntervalCoord>(p, map.kind()).x);
    case MapKind::Viana:
      return map.viana_params().degree * std::abs(2.0 * expect_point<CylinderPoint>(p, map.kind()).x);
    case MapKind::FullShift: throw ContractError("full shift is not differentiable");
  }
  throw ContractError("unknown map kind");
}

double critical_distance(const MapSystem& map, const PhasePoint& p) {
  switch (map.kind()) {
    case MapKind::Quadratic: return std::abs(expect_point<IntervalCoord>(p, map.kind()).x);
    case MapKind::Viana: return std::abs(expect_point<CylinderPoint>(p, map.kind()).x);
    default: return kInf;
  }
}

double dist_delta(const MapSystem& map, const PhasePoint& p, double delta) {
  if (!(delta > 0.0)) throw ContractError("delta must be positive");
  double d = critical_distance(map, p);
  return d < delta ? d : 1.0;
}

bool in_domain(const MapSystem& map, const PhasePoint& p) {
  switch (map.kind()) {
    case MapKind::CircleTimesD: return std::holds_alternative<CircleAngle>(p);
    case MapKind::Quadratic: {
      auto* c = std::get_if<IntervalCoord>(&p);
      return c && std::abs(c->x) <= map.interval_radius() * (1.0 + kDomainSlack);
    }
    case MapKind::Viana: {
      auto* c = std::get_if<CylinderPoint>(&p);
      return c && std::abs(c->x) <= map.interval_radius();
    }
    case MapKind::FullShift: {
      auto* w = std::get_if<SymbolWord>(&p);
      return w && w->alphabet == map.shift().alphabet;
    }
  }
  return false;
}

std::vector<Preimage> inverse_branches(const MapSystem& map, const PhasePoint& p, int n) {
  if (n < 0) throw ContractError("inverse_branches needs n >= 0");
  if (!map.is_one_dimensional()) throw ContractError("inverse_branches is defined for one-dimensional maps only");
  std::vector<Preimage> level{{p, {}}};
  for (int s = 0; s < n; ++s) {
    std::vector<Preimage> next;
    for (const auto& target : level) {
      if (map.kind() == MapKind::CircleTimesD) {
        int d = map.circle().degree;
        double t = std::get<CircleAngle>(target.point).theta;
        for (int k = 0; k < d; ++k) {
          Preimage pre{CircleAngle((t + k) / d), {k}};
          pre.itinerary.insert(pre.itinerary.end(), target.itinerary.begin(), target.itinerary.end());
          next.push_back(std::move(pre));
        }
      } else {
        double a = map.quadratic_params().a0;
        double t = std::get<IntervalCoord>(target.point).x;
        double r2 = a - t;
        if (r2 < 0.0) continue;
        double r = std::sqrt(r2);
        if (r > map.interval_radius() * (1.0 + kDomainSlack)) continue;
        auto push = [&](double x, int symbol) {
          Preimage pre{IntervalCoord(x), {symbol}};
          pre.itinerary.insert(pre.itinerary.end(), target.itinerary.begin(), target.itinerary.end());
          next.push_back(std::move(pre));
        };
        if (r == 0.0) {
          push(0.0, 0);
        } else {
          push(-r, -1);
          push(r, 1);
        }
      }
    }
    level = std::move(next);
  }
  auto coord = [](const PhasePoint& q) {
    if (auto* c = std::get_if<CircleAngle>(&q)) return c->theta;
    return std::get<IntervalCoord>(q).x;
  };
  std::sort(level.begin(), level.end(),
            [&](const Preimage& a, const Preimage& b) { return coord(a.point) < coord(b.point); });
  return level;
}

Orbit orbit(const MapSystem& map, const PhasePoint& p, std::size_t n) {
  if (n < 1) throw ContractError("orbit length must be >= 1");
  if (auto* w = std::get_if<SymbolWord>(&p); w && w->symbols.size() <= n) {
    throw ContractError("shift word must be longer than the orbit length");
  }
  if (!in_domain(map, p)) throw DomainEscape(0, "initial point " + describe(p) + " outside the phase space");
  Orbit o;
  o.map_id = map.id();
  o.initial = p;
  o.length = n;
  o.points.reserve(n + 1);
  o.points.push_back(p);
  const bool differentiable = map.kind() != MapKind::FullShift;
  if (differentiable) {
    o.inv_norms.reserve(n);
  }
  o.crit_dists.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cur = o.points.back();
    if (differentiable) o.inv_norms.push_back(inv_deriv_norm(map, cur));
    o.crit_dists.push_back(critical_distance(map, cur));
    PhasePoint nxt = step(map, cur);
    if (!in_domain(map, nxt)) throw DomainEscape(i + 1, describe(nxt) + " left the invariant region");
    o.points.push_back(std::move(nxt));
  }
  return o;
}

std::string orbit_csv(const Orbit& o) {
  std::ostringstream out;
  out << "step,theta,x,inv_deriv_norm,crit_dist\n";
  for (std::size_t i = 0; i < o.points.size(); ++i) {
    std::string theta;
    std::string x;
    const auto& p = o.points[i];
    if (auto* c = std::get_if<CircleAngle>(&p)) {
      theta = fmt_double(c->theta);
    } else if (auto* q = std::get_if<IntervalCoord>(&p)) {
      x = fmt_double(q->x);
    } else if (auto* y = std::get_if<CylinderPoint>(&p)) {
      theta = fmt_double(y->theta);
      x = fmt_double(y->x);
    }
    out << i << ',' << theta << ',' << x << ',';
    if (i < o.length) {
      if (!o.inv_norms.empty()) out << fmt_double(o.inv_norms[i]);
      out << ',' << fmt_double(o.crit_dists[i]);
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ergolab
