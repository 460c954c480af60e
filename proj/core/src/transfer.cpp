#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ergolab/format.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"
#include "ergolab/transfer.hpp"

namespace ergolab {

namespace {

using Column = std::vector<std::pair<std::uint32_t, double>>;

// Adds |[a, b] cap c_i| / |c_i| to every row i, with a, b in cell units.
void spread(double a, double b, int m, double weight, std::map<std::uint32_t, double>& acc) {
  if (!(b > a)) return;
  a = std::max(a, 0.0);
  b = std::min(b, static_cast<double>(m));
  for (int i = static_cast<int>(std::floor(a)); i < m && i < b; ++i) {
    double overlap = std::min(b, i + 1.0) - std::max(a, static_cast<double>(i));
    if (overlap > 0.0) acc[static_cast<std::uint32_t>(i)] += weight * overlap;
  }
}

Column exact_column(const MapSystem& map, const Grid& grid, std::size_t j, double weight) {
  std::map<std::uint32_t, double> acc;
  if (map.kind() == MapKind::CircleTimesD) {
    // image of [j, j+1) in cell units is [d j, d j + d): whole cells, taken mod m
    const long d = map.circle().degree;
    for (long r = 0; r < d; ++r) {
      long i = (d * static_cast<long>(j) + r) % grid.m;
      acc[static_cast<std::uint32_t>(i)] += weight;
    }
  } else {
    const double a = map.quadratic_params().a0;
    const double w = grid.width / grid.m;
    double lo = grid.lo + w * static_cast<double>(j);
    double hi = lo + w;
    auto to_cells = [&](double x) { return (x - grid.lo) / w; };
    auto image = [&](double l, double h) {
      // monotone piece: f(l), f(h) are its endpoints
      double fl = a - l * l;
      double fh = a - h * h;
      spread(to_cells(std::min(fl, fh)), to_cells(std::max(fl, fh)), grid.m, weight, acc);
    };
    if (lo < 0.0 && hi > 0.0) {
      image(lo, 0.0);
      image(0.0, hi);
    } else {
      image(lo, hi);
    }
  }
  return {acc.begin(), acc.end()};
}

Column monte_carlo_column(const MapSystem& map, const Grid& grid, std::size_t j, double weight,
                          const UlamMode& mode) {
  std::map<std::uint32_t, double> acc;
  Rng rng(mix_seed(mode.seed, j));
  const std::size_t S = mode.samples_per_cell;
  const double per = weight / static_cast<double>(S);
  if (!grid.two_d()) {
    const double w = grid.width / grid.m;
    const double lo = grid.lo + w * static_cast<double>(j);
    for (std::size_t s = 0; s < S; ++s) {
      double u = lo + w * (static_cast<double>(s) + rng.uniform()) / static_cast<double>(S);
      PhasePoint y = map.kind() == MapKind::CircleTimesD ? PhasePoint(CircleAngle(u)) : PhasePoint(IntervalCoord(u));
      auto cell = grid.locate(step(map, y));
      if (cell) acc[static_cast<std::uint32_t>(*cell)] += per * jacobian(map, y);
    }
  } else {
    const std::size_t it = j / static_cast<std::size_t>(grid.m_x);
    const std::size_t ix = j % static_cast<std::size_t>(grid.m_x);
    const double wt = grid.width / grid.m;
    const double wx = grid.x_width / grid.m_x;
    const auto side = static_cast<std::size_t>(std::max(1.0, std::floor(std::sqrt(static_cast<double>(S)))));
    for (std::size_t s = 0; s < S; ++s) {
      // stratified on a side x side sub-grid, extra samples wrap around it
      const std::size_t cell = s % (side * side);
      double ut = (static_cast<double>(cell / side) + rng.uniform()) / static_cast<double>(side);
      double ux = (static_cast<double>(cell % side) + rng.uniform()) / static_cast<double>(side);
      CylinderPoint y(grid.lo + wt * (static_cast<double>(it) + ut), grid.x_lo + wx * (static_cast<double>(ix) + ux));
      auto target = grid.locate(step(map, y));
      if (target) acc[static_cast<std::uint32_t>(*target)] += per * jacobian(map, y);
    }
  }
  return {acc.begin(), acc.end()};
}

}  // namespace

Grid Grid::for_map(const MapSystem& map, int m, int m_x) {
  if (m < 1) throw ContractError("grid needs at least one cell");
  Grid g;
  g.kind = map.kind();
  g.m = m;
  switch (map.kind()) {
    case MapKind::CircleTimesD:
      if (m_x != 0) throw ContractError("circle grids are one-dimensional");
      break;
    case MapKind::Quadratic:
      if (m_x != 0) throw ContractError("interval grids are one-dimensional");
      g.lo = -map.interval_radius();
      g.width = 2.0 * map.interval_radius();
      break;
    case MapKind::Viana:
      g.m_x = m_x == 0 ? m : m_x;
      g.x_lo = -map.interval_radius();
      g.x_width = 2.0 * map.interval_radius();
      break;
    case MapKind::FullShift: throw ContractError("Ulam grids are defined for smooth maps only");
  }
  return g;
}

double Grid::cell_volume() const {
  double v = width / m;
  if (two_d()) v *= x_width / m_x;
  return v;
}

PhasePoint Grid::center(std::size_t j) const {
  if (!two_d()) {
    double c = lo + width * (static_cast<double>(j) + 0.5) / m;
    if (kind == MapKind::CircleTimesD) return CircleAngle(c);
    return IntervalCoord(c);
  }
  const std::size_t it = j / static_cast<std::size_t>(m_x);
  const std::size_t ix = j % static_cast<std::size_t>(m_x);
  return CylinderPoint(lo + width * (static_cast<double>(it) + 0.5) / m,
                       x_lo + x_width * (static_cast<double>(ix) + 0.5) / m_x);
}

std::optional<std::size_t> Grid::locate(const PhasePoint& p) const {
  auto index = [](double v, double l, double w, int n) -> std::optional<long> {
    double u = (v - l) / w * n;
    if (u < 0.0 || u > n) return std::nullopt;
    return std::min(static_cast<long>(std::floor(u)), static_cast<long>(n - 1));
  };
  if (auto* c = std::get_if<CircleAngle>(&p)) {
    auto i = index(c->theta, lo, width, m);
    return i ? std::optional<std::size_t>(static_cast<std::size_t>(*i)) : std::nullopt;
  }
  if (auto* q = std::get_if<IntervalCoord>(&p)) {
    auto i = index(q->x, lo, width, m);
    return i ? std::optional<std::size_t>(static_cast<std::size_t>(*i)) : std::nullopt;
  }
  if (auto* y = std::get_if<CylinderPoint>(&p)) {
    auto it = index(y->theta, lo, width, m);
    auto ix = index(y->x, x_lo, x_width, m_x);
    if (!it || !ix) return std::nullopt;
    return static_cast<std::size_t>(*it) * static_cast<std::size_t>(m_x) + static_cast<std::size_t>(*ix);
  }
  return std::nullopt;
}

std::string Grid::describe() const {
  std::ostringstream out;
  out << m;
  if (two_d()) out << "x" << m_x;
  return out.str();
}

std::string UlamMode::describe() const {
  if (kind == Kind::ExactBranch) return "exact_branch";
  return "monte_carlo(samples=" + std::to_string(samples_per_cell) + ")";
}

double UlamOperator::at(std::size_t i, std::size_t j) const {
  for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
    if (col[e] == j) return val[e];
  }
  return 0.0;
}

std::vector<double> UlamOperator::column_sums() const {
  std::vector<double> sums(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) sums[col[e]] += val[e];
  }
  return sums;
}

void UlamOperator::apply(const std::vector<double>& v, std::vector<double>& out) const {
  out.assign(size(), 0.0);
  parallel_for(size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) s += val[e] * v[col[e]];
    out[i] = s;
  });
}

UlamOperator build_ulam(const MapSystem& map, const Grid& grid, const Potential& phi, const UlamMode& mode) {
  if (grid.kind != map.kind()) throw ContractError("grid was built for a different map");
  if (mode.kind == UlamMode::Kind::ExactBranch && !map.is_one_dimensional()) {
    throw ContractError("branch structure not resolvable on this map; use MonteCarlo mode");
  }
  if (mode.kind == UlamMode::Kind::MonteCarlo && mode.samples_per_cell == 0) {
    throw ContractError("MonteCarlo mode needs samples_per_cell >= 1");
  }
  const std::size_t n = grid.cells();
  if (n > 0xffffffffULL) throw ContractError("grid too large");
  std::vector<Column> columns(n);
  parallel_for(n, [&](std::size_t j) {
    PhasePoint c = grid.center(j);
    double weight = std::exp(phi.evaluate(c));
    columns[j] = mode.kind == UlamMode::Kind::ExactBranch ? exact_column(map, grid, j, weight)
                                                          : monte_carlo_column(map, grid, j, weight, mode);
  });

  UlamOperator op;
  op.grid = grid;
  op.map_id = map.id();
  op.potential_id = phi.id();
  op.mode = mode;
  op.row_ptr.assign(n + 1, 0);
  for (const auto& c : columns) {
    for (const auto& [i, v] : c) ++op.row_ptr[i + 1];
  }
  for (std::size_t i = 0; i < n; ++i) op.row_ptr[i + 1] += op.row_ptr[i];
  op.col.resize(op.row_ptr[n]);
  op.val.resize(op.row_ptr[n]);
  std::vector<std::size_t> fill(op.row_ptr.begin(), op.row_ptr.end() - 1);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [i, v] : columns[j]) {
      op.col[fill[i]] = static_cast<std::uint32_t>(j);
      op.val[fill[i]] = v;
      ++fill[i];
    }
  }
  return op;
}

SpectralResult power_iterate(const UlamOperator& op, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw ContractError("tol must be positive");
  const std::size_t n = op.size();
  for (double s : op.column_sums()) {
    if (!(s > 0.0)) throw ComputationError("operator has a zero column");
  }
  SpectralResult r;
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> w;
  double prev = 0.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    op.apply(v, w);
    double norm = 0.0;
    for (double x : w) norm += x;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    r.lambda = norm;
    r.iterations = k;
    if (k > 1 && std::abs(norm - prev) < tol) {
      r.converged = true;
      break;
    }
    prev = norm;
  }
  op.apply(v, w);
  for (std::size_t i = 0; i < n; ++i) r.residual += std::abs(w[i] - r.lambda * v[i]);
  r.vector = std::move(v);
  return r;
}

PressureEstimate pressure_ulam(const MapSystem& map, const Potential& phi, const Grid& grid, const UlamMode& mode,
                               double tol, std::size_t max_iter) {
  UlamOperator op = build_ulam(map, grid, phi, mode);
  SpectralResult s = power_iterate(op, tol, max_iter);
  PressureEstimate est;
  est.method = PressureMethod::Ulam;
  est.value = std::log(s.lambda);
  est.columns = {"cells", "lambda", "residual", "iterations", "converged"};
  est.rows.push_back({static_cast<double>(grid.cells()), s.lambda, s.residual, static_cast<double>(s.iterations),
                      s.converged ? 1.0 : 0.0});
  std::ostringstream note;
  note << "log of the leading eigenvalue; grid " << grid.describe() << ", " << mode.describe();
  if (mode.kind == UlamMode::Kind::MonteCarlo) note << ", seed " << mode.seed;
  note << ", weights at cell centres";
  if (!s.converged) note << "; NOT CONVERGED after " << s.iterations << " iterations";
  est.note = note.str();
  return est;
}

double DensityTable::total_mass() const {
  double s = 0.0;
  for (double d : density) s += d;
  return s * grid.cell_volume();
}

DensityTable mme_density(const MapSystem& map, const Grid& grid, const UlamMode& mode, double tol,
                         std::size_t max_iter) {
  DensityTable t;
  t.grid = grid;
  t.spectral = power_iterate(build_ulam(map, grid, Potential::constant(0.0), mode), tol, max_iter);
  double sum = 0.0;
  for (double v : t.spectral.vector) sum += v;
  const double vol = grid.cell_volume();
  t.density.resize(t.spectral.vector.size());
  for (std::size_t i = 0; i < t.density.size(); ++i) t.density[i] = t.spectral.vector[i] / (sum * vol);
  return t;
}

std::string ulam_triplets(const UlamOperator& op) {
  std::ostringstream out;
  out << "# map=" << op.map_id << " potential=" << op.potential_id << " grid=" << op.grid.describe()
      << " mode=" << op.mode.describe() << " seed=" << op.mode.seed << " nnz=" << op.val.size() << '\n';
  out << "row col value\n";
  for (std::size_t i = 0; i < op.size(); ++i) {
    for (std::size_t e = op.row_ptr[i]; e < op.row_ptr[i + 1]; ++e) {
      out << i << ' ' << op.col[e] << ' ' << fmt_double(op.val[e]) << '\n';
    }
  }
  return out.str();
}

std::string density_csv(const DensityTable& t) {
  std::ostringstream out;
  if (t.grid.two_d()) {
    out << "cell_index,theta,x,density\n";
  } else {
    out << "cell_index," << (t.grid.kind == MapKind::CircleTimesD ? "theta" : "x") << ",density\n";
  }
  for (std::size_t j = 0; j < t.density.size(); ++j) {
    PhasePoint c = t.grid.center(j);
    out << j << ',';
    if (auto* a = std::get_if<CircleAngle>(&c)) out << fmt_double(a->theta);
    if (auto* q = std::get_if<IntervalCoord>(&c)) out << fmt_double(q->x);
    if (auto* y = std::get_if<CylinderPoint>(&c)) out << fmt_double(y->theta) << ',' << fmt_double(y->x);
    out << ',' << fmt_double(t.density[j]) << '\n';
  }
  return out.str();
}

}  // namespace ergolab
