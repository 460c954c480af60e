#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ergolab/format.hpp"
#include "ergolab/pressure.hpp"

namespace ergolab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// phi as a table over its first p symbols, offset folded in.
struct PrefixView {
  int k = 2;
  int p = 1;
  std::vector<double> values;
};

PrefixView prefix_view(int k, const Potential& phi) {
  PrefixView v;
  v.k = k;
  if (const auto* c = std::get_if<ConstantPotential>(&phi.kind())) {
    v.values.assign(static_cast<std::size_t>(k), c->c + phi.offset());
    return v;
  }
  if (const auto* t = std::get_if<PrefixTable>(&phi.kind())) {
    if (t->alphabet != k) throw ContractError("prefix potential alphabet does not match k");
    v.p = t->prefix;
    v.values = t->values;
    for (double& x : v.values) x += phi.offset();
    return v;
  }
  throw ContractError("the shift solver needs a constant or prefix potential");
}

std::size_t ipow(int k, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(k);
  return r;
}

// sup over continuations (all k symbols) of the terms of S_n phi that reach
// past the known word; `known` holds the last L symbols, L = min(n, p-1).
std::vector<double> tail_sup(const PrefixView& v, int L) {
  const int p = v.p;
  const std::size_t keys = ipow(v.k, L);
  const std::size_t conts = ipow(v.k, p - 1);
  std::vector<double> out(keys, 0.0);
  if (L == 0) return out;
  std::vector<int> y(static_cast<std::size_t>(L + p - 1));
  for (std::size_t key = 0; key < keys; ++key) {
    std::size_t code = key;
    for (int i = L - 1; i >= 0; --i) {
      y[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::size_t>(v.k));
      code /= static_cast<std::size_t>(v.k);
    }
    double best = kNegInf;
    for (std::size_t c = 0; c < conts; ++c) {
      std::size_t cc = c;
      for (int i = p - 2; i >= 0; --i) {
        y[static_cast<std::size_t>(L + i)] = static_cast<int>(cc % static_cast<std::size_t>(v.k));
        cc /= static_cast<std::size_t>(v.k);
      }
      double s = 0.0;
      for (int j = 0; j < L; ++j) {
        std::size_t idx = 0;
        for (int q = 0; q < p; ++q) idx = idx * static_cast<std::size_t>(v.k) + static_cast<std::size_t>(y[static_cast<std::size_t>(j + q)]);
        s += v.values[idx];
      }
      best = std::max(best, s);
    }
    out[key] = best;
  }
  return out;
}

std::vector<int> lambda_symbols(int k, const LambdaSpec& lambda) {
  switch (lambda.kind) {
    case LambdaSpec::Kind::WholeSpace: {
      std::vector<int> all(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) all[static_cast<std::size_t>(i)] = i;
      return all;
    }
    case LambdaSpec::Kind::SubAlphabet:
      for (int s : lambda.symbols) {
        if (s < 0 || s >= k) throw ContractError("sub-alphabet symbol out of range");
      }
      return lambda.symbols;
    default: throw ContractError("empirical Lambda is only available for smooth maps");
  }
}

double lse2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

LambdaSpec LambdaSpec::sub_alphabet(std::vector<int> s) {
  if (s.empty()) throw ContractError("sub-alphabet must be nonempty");
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  LambdaSpec out;
  out.kind = Kind::SubAlphabet;
  out.symbols = std::move(s);
  return out;
}

LambdaSpec LambdaSpec::empirical(std::shared_ptr<const HClassification> c, HLabel label) {
  if (!c) throw ContractError("empirical Lambda needs a classification");
  LambdaSpec out;
  out.kind = label == HLabel::H ? Kind::EmpiricalH : Kind::EmpiricalHc;
  out.classification = std::move(c);
  return out;
}

// A node at depth n is the cylinder of its n symbols and costs
// exp(-gamma n + sup of S_n phi over it). Writing the cost of a subtree as
// exp(known part of S_n phi) * g(n, last p-1 symbols) gives
//   log g(n, key) = min(-gamma n + T(key) [n >= N], lse_s(phi(key s) + log g(n+1, key')))
double caratheodory_log_m(int k, const Potential& phi, const LambdaSpec& lambda, int N, double gamma, int n_max) {
  if (k < 2) throw ContractError("alphabet size must be >= 2");
  if (N < 0 || n_max < 0) throw ContractError("depths must be >= 0");
  if (N > n_max) throw ContractError("n_max too small to admit any cover (N > n_max)");
  const PrefixView v = prefix_view(k, phi);
  const std::vector<int> symbols = lambda_symbols(k, lambda);
  const int p = v.p;
  const std::size_t full = ipow(k, p - 1);

  std::vector<std::vector<double>> tails(static_cast<std::size_t>(p));
  for (int L = 0; L < p; ++L) tails[static_cast<std::size_t>(L)] = tail_sup(v, L);

  auto width = [&](int n) { return std::min(n, p - 1); };
  std::vector<double> next(ipow(k, width(n_max)));
  for (std::size_t key = 0; key < next.size(); ++key) {
    next[key] = -gamma * n_max + tails[static_cast<std::size_t>(width(n_max))][key];
  }
  for (int n = n_max - 1; n >= 0; --n) {
    const int L = width(n);
    const bool grows = width(n + 1) > L;
    std::vector<double> cur(ipow(k, L));
    for (std::size_t key = 0; key < cur.size(); ++key) {
      double children = kNegInf;
      for (int s : symbols) {
        const std::size_t ext = key * static_cast<std::size_t>(k) + static_cast<std::size_t>(s);
        const double inc = n + 1 >= p ? v.values[ext] : 0.0;
        const std::size_t child = grows ? ext : ext % full;
        children = lse2(children, inc + next[child]);
      }
      double here = children;
      if (n >= N) here = std::min(here, -gamma * n + tails[static_cast<std::size_t>(L)][key]);
      cur[key] = here;
    }
    next = std::move(cur);
  }
  return next[0];
}

double caratheodory_m(int k, const Potential& phi, const LambdaSpec& lambda, int N, double gamma, int n_max) {
  return std::exp(caratheodory_log_m(k, phi, lambda, N, gamma, n_max));
}

PressureEstimate relative_pressure_shift(int k, const Potential& phi, const LambdaSpec& lambda, int N, int n_max,
                                         double gamma_tol) {
  if (!(gamma_tol > 0.0)) throw ContractError("gamma_tol must be positive");
  PressureEstimate est;
  est.method = PressureMethod::CylinderCaratheodory;
  est.columns = {"N", "n_max", "gamma", "log_m"};
  auto log_m = [&](double g) {
    double lm = caratheodory_log_m(k, phi, lambda, N, g, n_max);
    est.rows.push_back({static_cast<double>(N), static_cast<double>(n_max), g, lm});
    return lm;
  };
  // m at fixed depth is nonincreasing in gamma; the estimate is where it drops below 1
  auto below = [&](double g) { return log_m(g) < 0.0; };

  const double sup = phi.sup_abs(MapSystem::full_shift(k)).value_or(0.0);
  double lo = 0.0;
  double hi = std::log(static_cast<double>(k));
  std::ostringstream note;
  if (!below(hi)) {
    hi = std::log(static_cast<double>(k)) + sup + 1.0;
    note << "bracket widened up; ";
    if (!below(hi)) throw ComputationError("m does not drop below 1 for gamma up to log k + sup|phi| + 1");
  }
  if (below(lo)) {
    lo = -(sup + 1.0);
    note << "bracket widened down; ";
    if (below(lo)) throw ComputationError("m is below 1 already at gamma = -(sup|phi| + 1)");
  }
  while (hi - lo > gamma_tol) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  est.value = 0.5 * (lo + hi);
  note << "gamma* = midpoint of the final bisection bracket [" << fmt_double(lo) << ", " << fmt_double(hi)
       << "] on the predicate m < 1 at depth " << n_max << ", N=" << N;
  est.note = note.str();
  return est;
}

SupDecompositionReport check_sup_decomposition(int k, const Potential& phi, const std::vector<int>& sub_alphabet,
                                               int N, int n_max, double gamma_tol) {
  if (sub_alphabet.empty() || static_cast<int>(sub_alphabet.size()) >= k) {
    throw ContractError("a proper nonempty sub-alphabet is required");
  }
  SupDecompositionReport r;
  r.p_whole = relative_pressure_shift(k, phi, LambdaSpec::whole(), N, n_max, gamma_tol).value;
  r.p_lambda = relative_pressure_shift(k, phi, LambdaSpec::sub_alphabet(sub_alphabet), N, n_max, gamma_tol).value;
  r.gap = r.p_whole - r.p_lambda;
  r.holds = r.gap >= -gamma_tol;
  return r;
}

HyperbolicityReport hyperbolicity_report(const MapSystem& map, const Potential& phi,
                                         const HClassification& classification, const SeparatedParams& params) {
  if (params.n_list.empty() || params.eps_list.empty()) throw ContractError("n_list and eps_list must be nonempty");
  HyperbolicityReport rep;
  std::vector<PhasePoint> h;
  std::vector<PhasePoint> hc;
  for (const auto& e : classification.entries) {
    if (e.flagged) continue;
    (e.label == HLabel::H ? h : hc).push_back(e.point);
  }
  rep.h_count = h.size();
  rep.hc_count = hc.size();
  auto side = [&](const std::vector<PhasePoint>& pts, const char* tag) -> std::optional<PressureEstimate> {
    if (pts.empty()) return std::nullopt;
    std::vector<std::vector<SeparatedSet>> sets;
    for (double eps : params.eps_list) {
      std::vector<SeparatedSet> row;
      for (int n : params.n_list) row.push_back(build_separated_from(map, n, eps, pts, tag));
      sets.push_back(std::move(row));
    }
    auto est = pressure_on_sets(map, phi, sets);
    est.note = "HEURISTIC; " + est.note;
    return est;
  };
  rep.h_side = side(h, "empirical H points");
  rep.hc_side = side(hc, "empirical Hc points");
  if (rep.h_side && rep.hc_side) rep.gap = rep.h_side->value - rep.hc_side->value;
  return rep;
}

}  // namespace ergolab
