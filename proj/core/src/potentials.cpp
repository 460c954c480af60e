#include "ergolab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ergolab/format.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"

namespace ergolab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryTolerance = 1e-9;
constexpr int kBoundarySamples = 1000;

double profile_1d(BumpShape shape, double u) {
  switch (shape) {
    case BumpShape::SineSquared: {
      double s = std::sin(kPi * u);
      return s * s;
    }
    case BumpShape::Tent: return 1.0 - std::abs(2.0 * u - 1.0);
  }
  return 0.0;
}

bool overlaps(double alo, double ahi, double blo, double bhi) { return std::max(alo, blo) < std::min(ahi, bhi); }

const std::uint8_t* word_data(const PhasePoint& p, std::size_t need) {
  const auto* w = std::get_if<SymbolWord>(&p);
  if (!w) throw ContractError("prefix potentials are defined on symbol words only");
  if (w->symbols.size() < need) throw ContractError("word shorter than the potential's prefix length");
  return w->symbols.data();
}

}  // namespace

double PrefixTable::at(const std::uint8_t* word) const {
  std::size_t idx = 0;
  for (int i = 0; i < prefix; ++i) idx = idx * static_cast<std::size_t>(alphabet) + word[i];
  return values[idx];
}

bool BumpRegion::contains(const PhasePoint& p) const {
  if (!cylinder) {
    double v;
    if (auto* c = std::get_if<CircleAngle>(&p)) {
      v = c->theta;
    } else if (auto* q = std::get_if<IntervalCoord>(&p)) {
      v = q->x;
    } else {
      throw ContractError("interval region evaluated at " + describe(p));
    }
    return lo < v && v < hi;
  }
  const auto* c = std::get_if<CylinderPoint>(&p);
  if (!c) throw ContractError("cylinder region evaluated at " + describe(p));
  if (!(lo < c->x && c->x < hi)) return false;
  return full_circle() || (theta_lo < c->theta && c->theta < theta_hi);
}

double BumpProfile::value(const BumpRegion& region, const PhasePoint& p) const {
  if (!region.cylinder) {
    double v = std::holds_alternative<CircleAngle>(p) ? std::get<CircleAngle>(p).theta : std::get<IntervalCoord>(p).x;
    return amplitude * profile_1d(shape, (v - region.lo) / (region.hi - region.lo));
  }
  const auto& c = std::get<CylinderPoint>(p);
  double val = amplitude * profile_1d(shape, (c.x - region.lo) / (region.hi - region.lo));
  if (!region.full_circle()) {
    val *= profile_1d(shape, (c.theta - region.theta_lo) / (region.theta_hi - region.theta_lo));
  }
  return val;
}

Potential Potential::prefix_table(int alphabet, int prefix, std::vector<double> values) {
  if (alphabet < 2) throw ContractError("alphabet size must be >= 2");
  if (prefix < 1) throw ContractError("prefix length must be >= 1");
  std::size_t expected = 1;
  for (int i = 0; i < prefix; ++i) expected *= static_cast<std::size_t>(alphabet);
  if (values.size() != expected) throw ContractError("prefix table needs k^p values");
  return Potential(PrefixTable{alphabet, prefix, std::move(values)});
}

Potential shift_coboundary(int k, int p, const std::vector<double>& g) {
  if (k < 2 || p < 1) throw ContractError("shift_coboundary needs k >= 2 and p >= 1");
  std::size_t kp = 1;
  for (int i = 0; i < p; ++i) kp *= static_cast<std::size_t>(k);
  if (g.size() != kp) throw ContractError("g needs k^p values");
  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> values(kp * kk);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    // idx encodes w_0..w_p; the first p symbols are idx / k, the last p are idx % k^p
    values[idx] = g[idx / kk] - g[idx % kp];
  }
  return Potential::prefix_table(k, p + 1, std::move(values));
}

Potential Potential::plus(double c) const {
  Potential out = *this;
  out.offset_ += c;
  return out;
}

double Potential::evaluate(const PhasePoint& p) const {
  if (is_bump_pair()) {
    const auto& bp = bump_pair();
    if (bp.region.contains(p)) return offset_ + bp.profile.value(bp.region, p);
    return evaluate_with_image(p, step(bp.map, p));
  }
  return evaluate_with_image(p, p);
}

double Potential::evaluate_with_image(const PhasePoint& p, const PhasePoint& image) const {
  return offset_ + std::visit(
                       [&](const auto& k) -> double {
                         using T = std::decay_t<decltype(k)>;
                         if constexpr (std::is_same_v<T, ConstantPotential>) {
                           return k.c;
                         } else if constexpr (std::is_same_v<T, AnalyticPotential>) {
                           if (k.family == AnalyticFamily::CosTheta) {
                             double theta;
                             if (auto* c = std::get_if<CircleAngle>(&p)) {
                               theta = c->theta;
                             } else if (auto* y = std::get_if<CylinderPoint>(&p)) {
                               theta = y->theta;
                             } else {
                               throw ContractError("t cos(2 pi theta) needs an angular coordinate");
                             }
                             return k.t * std::cos(2.0 * kPi * theta);
                           }
                           if (auto* q = std::get_if<IntervalCoord>(&p)) return k.t * q->x;
                           if (auto* y = std::get_if<CylinderPoint>(&p)) return k.t * y->x;
                           throw ContractError("t x needs an x coordinate");
                         } else if constexpr (std::is_same_v<T, PrefixTable>) {
                           return k.at(word_data(p, static_cast<std::size_t>(k.prefix)));
                         } else {
                           const BumpPairData& bp = *k;
                           if (bp.region.contains(p)) return bp.profile.value(bp.region, p);
                           if (bp.region.contains(image)) return -bp.profile.value(bp.region, image);
                           return 0.0;
                         }
                       },
                       kind_);
}

std::optional<double> Potential::sup_abs(const MapSystem& map) const {
  double base = std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ConstantPotential>) {
          return std::abs(k.c);
        } else if constexpr (std::is_same_v<T, AnalyticPotential>) {
          if (k.family == AnalyticFamily::CosTheta) return std::abs(k.t);
          return std::abs(k.t) * map.interval_radius();
        } else if constexpr (std::is_same_v<T, PrefixTable>) {
          double m = 0.0;
          for (double v : k.values) m = std::max(m, std::abs(v));
          return m;
        } else {
          return k->profile.sup();
        }
      },
      kind_);
  return base + std::abs(offset_);
}

std::string Potential::id() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ConstantPotential>) {
          out << "constant(c=" << fmt_double(k.c) << ")";
        } else if constexpr (std::is_same_v<T, AnalyticPotential>) {
          out << (k.family == AnalyticFamily::CosTheta ? "cos" : "linear_x") << "(t=" << fmt_double(k.t) << ")";
        } else if constexpr (std::is_same_v<T, PrefixTable>) {
          out << "grid_sampled(k=" << k.alphabet << ",p=" << k.prefix << ",h=" << hex64([&] {
            std::string raw;
            for (double v : k.values) raw += fmt_double(v) + ";";
            return fnv1a(raw);
          }()) << ")";
        } else {
          const auto& r = k->region;
          out << "bump_pair(" << k->map.id() << ",B=";
          if (r.cylinder) {
            out << "[" << fmt_double(r.theta_lo) << "," << fmt_double(r.theta_hi) << "]x";
          }
          out << "(" << fmt_double(r.lo) << "," << fmt_double(r.hi) << "),"
              << (k->profile.shape == BumpShape::SineSquared ? "sin2" : "tent") << "*"
              << fmt_double(k->profile.amplitude) << ")";
        }
      },
      kind_);
  if (offset_ != 0.0) out << "+" << fmt_double(offset_);
  return out.str();
}

Potential make_bump_pair(const MapSystem& map, const BumpRegion& region, const BumpProfile& profile) {
  if (map.kind() == MapKind::FullShift) throw ContractError("bump pairs need a smooth map");
  if (!(profile.amplitude > 0.0)) throw ContractError("bump amplitude must be positive (phi_b >= 0)");
  if (!(region.lo < region.hi)) throw ContractError("bump region must have positive volume");
  if (region.cylinder != (map.kind() == MapKind::Viana)) {
    throw ContractError("bump region shape does not match the phase space of " + map.id());
  }

  auto data = std::make_shared<BumpPairData>(BumpPairData{map, region, profile, {}, {}});

  // Boundary values of phi_b must vanish, interior values must be >= 0.
  auto sample_point = [&](double u, double side) -> PhasePoint {
    if (!region.cylinder) {
      double v = side < 0 ? region.lo : (side > 0 ? region.hi : region.lo + u * (region.hi - region.lo));
      if (map.kind() == MapKind::CircleTimesD) {
        CircleAngle c;
        c.theta = v;  // unreduced so that hi = 1 stays on the boundary
        return c;
      }
      return IntervalCoord(v);
    }
    double theta = region.theta_lo + u * (region.theta_hi - region.theta_lo);
    double x = side < 0 ? region.lo : (side > 0 ? region.hi : 0.5 * (region.lo + region.hi));
    CylinderPoint c;
    c.theta = theta;
    c.x = x;
    return c;
  };
  for (int i = 0; i < kBoundarySamples; ++i) {
    double u = (i + 0.5) / kBoundarySamples;
    for (double side : {-1.0, 1.0}) {
      if (std::abs(profile.value(region, sample_point(u, side))) > kBoundaryTolerance) {
        throw ContractError("bump function does not vanish on the boundary of B");
      }
    }
    if (profile.value(region, sample_point(u, 0.0)) < 0.0) throw ContractError("bump function must be >= 0");
  }

  switch (map.kind()) {
    case MapKind::CircleTimesD: {
      if (!(region.lo >= 0.0 && region.hi <= 1.0 && region.hi - region.lo < 1.0)) {
        throw ContractError("circle bump region must be a proper arc inside [0, 1]");
      }
      const int d = map.circle().degree;
      for (int k = 0; k < d; ++k) {
        Interval v{(region.lo + k) / d, (region.hi + k) / d, false};
        if (overlaps(v.lo, v.hi, region.lo, region.hi)) throw ContractError("regions collide: V = f^-1(B) meets B");
        data->v_intervals.push_back(v);
      }
      break;
    }
    case MapKind::Quadratic: {
      const double beta = map.interval_radius();
      if (!(region.lo > -beta && region.hi < beta)) throw ContractError("bump region must lie strictly inside the interval");
      const double a = map.quadratic_params().a0;
      if (a - region.hi <= 0.0) throw ContractError("preimage touches critical set: B reaches the critical value");
      if (a - region.lo > 0.0) {
        double inner = std::sqrt(a - region.hi);
        double outer = std::min(std::sqrt(a - region.lo), beta);
        for (Interval v : {Interval{-outer, -inner, false}, Interval{inner, outer, false}}) {
          if (overlaps(v.lo, v.hi, region.lo, region.hi)) throw ContractError("regions collide: V = f^-1(B) meets B");
          data->v_intervals.push_back(v);
        }
      }
      break;
    }
    case MapKind::Viana: {
      const double beta = map.interval_radius();
      if (!(region.lo > -beta && region.hi < beta)) throw ContractError("bump region must lie strictly inside S^1 x I");
      if (!(region.theta_lo >= 0.0 && region.theta_hi <= 1.0 && region.theta_lo < region.theta_hi)) {
        throw ContractError("angular range of B must lie in [0, 1]");
      }
      const int d = map.viana_params().degree;
      const int per_piece = std::max(64, kVianaCertificationGrid / d);
      for (int k = 0; k < d; ++k) {
        PreimagePiece piece{(region.theta_lo + k) / d, (region.theta_hi + k) / d,
                            std::numeric_limits<double>::infinity(), 0.0};
        for (int s = 0; s <= per_piece; ++s) {
          double theta = piece.theta_lo + (piece.theta_hi - piece.theta_lo) * s / per_piece;
          double a = map.fibre_parameter(theta);
          if (a - region.hi <= 0.0) throw ContractError("preimage touches critical set: x = 0 lies in V");
          double inner = std::sqrt(a - region.hi);
          double outer = std::min(std::sqrt(std::max(0.0, a - region.lo)), beta);
          piece.abs_x_min = std::min(piece.abs_x_min, inner);
          piece.abs_x_max = std::max(piece.abs_x_max, outer);
          bool theta_in_b = region.full_circle() || (region.theta_lo <= theta && theta <= region.theta_hi);
          if (theta_in_b && outer > inner &&
              (overlaps(inner, outer, region.lo, region.hi) || overlaps(-outer, -inner, region.lo, region.hi))) {
            throw ContractError("regions collide: V = f^-1(B) meets B");
          }
        }
        data->v_pieces.push_back(piece);
      }
      break;
    }
    case MapKind::FullShift: break;
  }
  return Potential(std::shared_ptr<const BumpPairData>(std::move(data)));
}

double birkhoff(const Potential& phi, const Orbit& orbit, std::size_t n) {
  if (n > orbit.length) throw ContractError("Birkhoff sum longer than the orbit");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += phi.evaluate_with_image(orbit.points[i], orbit.points[i + 1]);
  return s;
}

namespace {

double birkhoff_from(const Potential& phi, const MapSystem& map, PhasePoint p, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    PhasePoint next = step(map, p);
    s += phi.evaluate_with_image(p, next);
    p = std::move(next);
  }
  return s;
}

// Exact sup of S_n phi over the cylinder fixed by the first n+1 symbols of w.
double shift_ball_sup(const Potential& phi, const SymbolWord& w, int n) {
  int prefix = 1;
  if (const auto* t = std::get_if<PrefixTable>(&phi.kind())) {
    prefix = t->prefix;
  } else if (!std::holds_alternative<ConstantPotential>(phi.kind())) {
    throw ContractError("sup_over_ball on a shift needs a constant or prefix potential");
  }
  const std::size_t fixed = static_cast<std::size_t>(n) + 1;
  if (w.symbols.size() < fixed) throw ContractError("word shorter than the ball depth");
  const std::size_t total = static_cast<std::size_t>(n) + static_cast<std::size_t>(prefix) - 1;
  const std::size_t free = total > fixed ? total - fixed : 0;
  std::vector<std::uint8_t> y(std::max(total, fixed));
  std::copy(w.symbols.begin(), w.symbols.begin() + static_cast<std::ptrdiff_t>(fixed), y.begin());
  std::size_t combos = 1;
  for (std::size_t i = 0; i < free; ++i) combos *= static_cast<std::size_t>(w.alphabet);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t code = c;
    for (std::size_t i = 0; i < free; ++i) {
      y[fixed + i] = static_cast<std::uint8_t>(code % static_cast<std::size_t>(w.alphabet));
      code /= static_cast<std::size_t>(w.alphabet);
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      SymbolWord shifted;
      shifted.alphabet = w.alphabet;
      shifted.symbols.assign(y.begin() + i, y.end());
      s += phi.evaluate(shifted);
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

SupEstimate sup_over_ball(const Potential& phi, const MapSystem& map, const PhasePoint& x, int n, double delta,
                          const BallSampler& sampler) {
  if (n < 0) throw ContractError("sup_over_ball needs n >= 0");
  if (!(delta > 0.0)) throw ContractError("delta must be positive");
  SupEstimate est;
  if (n == 0) {
    est.exact = true;
    return est;
  }
  if (const auto* c = std::get_if<ConstantPotential>(&phi.kind())) {
    est.value = n * (c->c + phi.offset());
    est.exact = true;
    est.samples = 1;
    return est;
  }
  if (map.kind() == MapKind::FullShift) {
    est.value = shift_ball_sup(phi, std::get<SymbolWord>(x), n);
    est.exact = true;
    est.samples = 1;
    return est;
  }
  if (sampler.resolution < 1) throw ContractError("sampler resolution must be >= 1");
  est.value = birkhoff_from(phi, map, x, n);
  est.samples = 1;
  if (map.is_one_dimensional()) {
    Interval ball = dynamical_ball_1d(map, x, n, delta);
    if (ball.full) ball = Interval{0.0, 1.0, false};
    // interior points of a uniform grid; doubling the resolution keeps every node
    for (std::size_t j = 1; j < sampler.resolution; ++j) {
      double v = ball.lo + (ball.hi - ball.lo) * static_cast<double>(j) / static_cast<double>(sampler.resolution);
      PhasePoint y = map.kind() == MapKind::CircleTimesD ? PhasePoint(CircleAngle(v)) : PhasePoint(IntervalCoord(v));
      est.value = std::max(est.value, birkhoff_from(phi, map, y, n));
      ++est.samples;
    }
    return est;
  }
  // Viana: a prefix of one seeded stream in the box |d theta| < delta d^-n,
  // |dx| < delta, keeping only points that stay delta-close for n steps.
  const auto& c = std::get<CylinderPoint>(x);
  const double rt = delta * std::pow(static_cast<double>(map.viana_params().degree), -n);
  const double beta = map.interval_radius();
  std::vector<PhasePoint> ref;
  ref.reserve(static_cast<std::size_t>(n) + 1);
  ref.push_back(x);
  for (int i = 0; i < n; ++i) ref.push_back(step(map, ref.back()));
  Rng rng(sampler.seed);
  for (std::size_t j = 0; j < sampler.resolution; ++j) {
    double t = rng.uniform(c.theta - rt, c.theta + rt);
    double xv = rng.uniform(std::max(c.x - delta, -beta), std::min(c.x + delta, beta));
    PhasePoint y = CylinderPoint(t, xv);
    bool inside = true;
    double s = 0.0;
    for (int i = 0; i < n && inside; ++i) {
      if (distance(Metric::CylinderMax, y, ref[static_cast<std::size_t>(i)]) >= delta) inside = false;
      PhasePoint next = step(map, y);
      s += phi.evaluate_with_image(y, next);
      y = std::move(next);
    }
    if (inside && distance(Metric::CylinderMax, y, ref.back()) < delta) {
      est.value = std::max(est.value, s);
      ++est.samples;
    }
  }
  return est;
}

BirkhoffReport verify_bounded(const Potential& phi, const MapSystem& map, std::size_t seeds, std::size_t horizon,
                              std::uint64_t seed, double tolerance) {
  if (seeds == 0 || horizon == 0) throw ContractError("verify_bounded needs seeds >= 1 and N >= 1");
  BirkhoffReport report;
  report.potential_id = phi.id();
  report.map_id = map.id();
  report.horizon = horizon;
  report.tolerance = tolerance;
  report.seeds = sample_phase_points(map, seeds, seed);
  report.max_abs.assign(seeds, 0.0);
  std::vector<char> escaped(seeds, 0);
  parallel_for(seeds, [&](std::size_t i) {
    PhasePoint p = report.seeds[i];
    double s = 0.0;
    double worst = 0.0;
    for (std::size_t n = 0; n < horizon; ++n) {
      PhasePoint next = step(map, p);
      if (!in_domain(map, next)) {
        escaped[i] = 1;
        return;
      }
      s += phi.evaluate_with_image(p, next);
      worst = std::max(worst, std::abs(s));
      p = std::move(next);
    }
    report.max_abs[i] = worst;
  });
  for (std::size_t i = 0; i < seeds; ++i) {
    if (escaped[i]) {
      ++report.excluded;
      report.max_abs[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    report.global_max = std::max(report.global_max, report.max_abs[i]);
  }
  if (phi.is_bump_pair()) {
    report.bound = phi.bump_pair().profile.sup();
    report.passed = report.global_max <= *report.bound + tolerance && report.excluded < seeds;
  } else {
    report.passed = report.excluded < seeds;
  }
  return report;
}

std::string birkhoff_report_csv(const BirkhoffReport& report) {
  std::ostringstream out;
  out << "seed,max_abs_Sn\n";
  for (std::size_t i = 0; i < report.max_abs.size(); ++i) out << i << ',' << fmt_double(report.max_abs[i]) << '\n';
  return out.str();
}

}  // namespace ergolab
