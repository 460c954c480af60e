#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ergolab/format.hpp"

namespace ergolab::cli {

namespace {

enum class Type { Int, U64, Real, RealOrMisiurewicz, Bool, Text, IntList, RealList, Symbols, Choice };

struct KeySpec {
  Type type;
  std::vector<std::string> choices;
};

const std::vector<std::string> kSections = {"map", "potential", "run", "output"};

const std::map<std::string, std::map<std::string, KeySpec>>& schema() {
  static const std::map<std::string, std::map<std::string, KeySpec>> s = {
      {"map",
       {{"kind", {Type::Choice, {"circle_times_d", "quadratic", "viana", "full_shift"}}},
        {"d", {Type::Int, {}}},
        {"a0", {Type::RealOrMisiurewicz, {}}},
        {"alpha", {Type::Real, {}}},
        {"k", {Type::Int, {}}}}},
      {"potential",
       {{"kind", {Type::Choice, {"zero", "constant", "cos", "linear_x", "bump_pair", "prefix", "shift_bump"}}},
        {"c", {Type::Real, {}}},
        {"t", {Type::Real, {}}},
        {"offset", {Type::Real, {}}},
        {"lo", {Type::Real, {}}},
        {"hi", {Type::Real, {}}},
        {"theta_lo", {Type::Real, {}}},
        {"theta_hi", {Type::Real, {}}},
        {"shape", {Type::Choice, {"sin2", "tent"}}},
        {"amplitude", {Type::Real, {}}},
        {"p", {Type::Int, {}}},
        {"values", {Type::RealList, {}}}}},
      {"run",
       {{"operation", {Type::Choice, operations()}},
        {"seed", {Type::U64, {}}},
        {"threads", {Type::Int, {}}},
        {"n", {Type::Int, {}}},
        {"theta0", {Type::Real, {}}},
        {"x0", {Type::Real, {}}},
        {"word", {Type::Symbols, {}}},
        {"sigma", {Type::Real, {}}},
        {"horizon", {Type::Int, {}}},
        {"threshold", {Type::Real, {}}},
        {"seeds", {Type::Int, {}}},
        {"delta", {Type::Real, {}}},
        {"samples", {Type::Int, {}}},
        {"tolerance", {Type::Real, {}}},
        {"eps", {Type::RealList, {}}},
        {"n_list", {Type::IntList, {}}},
        {"resolution", {Type::Int, {}}},
        {"x_resolution", {Type::Int, {}}},
        {"N", {Type::Int, {}}},
        {"n_max", {Type::Int, {}}},
        {"gamma_tol", {Type::Real, {}}},
        {"sub_alphabet", {Type::Symbols, {}}},
        {"m", {Type::Int, {}}},
        {"m_x", {Type::Int, {}}},
        {"mode", {Type::Choice, {"exact", "monte_carlo"}}},
        {"samples_per_cell", {Type::Int, {}}},
        {"tol", {Type::Real, {}}},
        {"max_iter", {Type::Int, {}}}}},
      {"output",
       {{"dir", {Type::Text, {}}}, {"reproducible", {Type::Bool, {}}}, {"plots", {Type::Bool, {}}}}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

[[noreturn]] void mismatch(const std::string& where, const char* expected, const std::string& value) {
  throw ConfigError(where + ": expected " + expected + ", got '" + value + "'");
}

// Canonical text for a value of the given type.
std::string canonical(const std::string& where, const KeySpec& spec, const std::string& raw) {
  const std::string v = trim(raw);
  switch (spec.type) {
    case Type::Int: {
      long x;
      if (!parse_number(v, x)) mismatch(where, "an integer", v);
      return std::to_string(x);
    }
    case Type::U64: {
      std::uint64_t x;
      if (!parse_number(v, x)) mismatch(where, "a nonnegative integer", v);
      return std::to_string(x);
    }
    case Type::Real: {
      double x;
      if (!parse_real(v, x)) mismatch(where, "a real number", v);
      return fmt_double(x);
    }
    case Type::RealOrMisiurewicz: {
      if (v == "misiurewicz") return v;
      double x;
      if (!parse_real(v, x)) mismatch(where, "a real number or 'misiurewicz'", v);
      return fmt_double(x);
    }
    case Type::Bool:
      if (v == "true" || v == "1" || v == "yes") return "true";
      if (v == "false" || v == "0" || v == "no") return "false";
      mismatch(where, "true or false", v);
    case Type::Text:
      if (v.empty()) mismatch(where, "a nonempty value", v);
      return v;
    case Type::IntList: {
      std::string out;
      auto items = split_list(v);
      if (items.empty()) mismatch(where, "a comma-separated list of integers", v);
      for (const auto& item : items) {
        long x;
        if (!parse_number(item, x)) mismatch(where, "a comma-separated list of integers", v);
        out += (out.empty() ? "" : ",") + std::to_string(x);
      }
      return out;
    }
    case Type::RealList: {
      std::string out;
      auto items = split_list(v);
      if (items.empty()) mismatch(where, "a comma-separated list of reals", v);
      for (const auto& item : items) {
        double x;
        if (!parse_real(item, x)) mismatch(where, "a comma-separated list of reals", v);
        out += (out.empty() ? "" : ",") + fmt_double(x);
      }
      return out;
    }
    case Type::Symbols:
      if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        mismatch(where, "a string of digits", v);
      }
      return v;
    case Type::Choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
        std::string all;
        for (const auto& c : spec.choices) all += (all.empty() ? "" : "|") + c;
        mismatch(where, all.c_str(), v);
      }
      return v;
  }
  return v;
}

}  // namespace

const std::vector<std::string>& operations() {
  static const std::vector<std::string> ops = {"orbit",         "hyptimes",       "classify", "verify-potential",
                                               "birkhoff",      "pressure-sep",   "pressure-shift",
                                               "ulam",          "mme",            "acceptance"};
  return ops;
}

void ExperimentConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  auto sec = schema().find(section);
  if (sec == schema().end()) throw ConfigError("unknown section [" + section + "]");
  auto spec = sec->second.find(key);
  if (spec == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  values_[section][key] = canonical(section + "." + key, spec->second, value);
}

void ExperimentConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("expected section.key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)), assignment.substr(eq + 1));
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

void ExperimentConfig::erase(const std::string& section, const std::string& key) {
  auto s = values_.find(section);
  if (s != values_.end()) s->second.erase(key);
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key,
                                         const std::string& fallback) const {
  if (!has(section, key)) return fallback;
  return values_.at(section).at(key);
}

long ExperimentConfig::get_int(const std::string& section, const std::string& key, long fallback) const {
  if (!has(section, key)) return fallback;
  return std::stol(values_.at(section).at(key));
}

std::uint64_t ExperimentConfig::get_u64(const std::string& section, const std::string& key,
                                        std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  return std::stoull(values_.at(section).at(key));
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& v = values_.at(section).at(key);
  if (v == "misiurewicz") return misiurewicz_a0();
  return std::strtod(v.c_str(), nullptr);
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  return values_.at(section).at(key) == "true";
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& section, const std::string& key,
                                                const std::vector<int>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(values_.at(section).at(key))) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& section, const std::string& key,
                                                      const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(values_.at(section).at(key))) out.push_back(std::strtod(item.c_str(), nullptr));
  return out;
}

MapSystem ExperimentConfig::map() const {
  if (!has("map", "kind")) throw ConfigError("missing required key 'kind' in [map]");
  auto need = [&](const char* key) {
    if (!has("map", key)) throw ConfigError(std::string("missing required key '") + key + "' in [map]");
  };
  const std::string kind = get_string("map", "kind");
  try {
    if (kind == "circle_times_d") {
      need("d");
      return MapSystem::circle_times_d(static_cast<int>(get_int("map", "d", 2)));
    }
    if (kind == "quadratic") {
      need("a0");
      return MapSystem::quadratic(get_double("map", "a0", 2.0));
    }
    if (kind == "viana") {
      need("d");
      need("a0");
      need("alpha");
      return MapSystem::viana(static_cast<int>(get_int("map", "d", 16)), get_double("map", "a0", 0.0),
                              get_double("map", "alpha", 0.0));
    }
    need("k");
    return MapSystem::full_shift(static_cast<int>(get_int("map", "k", 2)));
  } catch (const ContractError& e) {
    throw ConfigError(std::string("[map] ") + e.what());
  } catch (const ComputationError& e) {
    throw ConfigError(std::string("[map] ") + e.what());
  }
}

Potential ExperimentConfig::potential(const MapSystem& map) const {
  const std::string kind = get_string("potential", "kind", "zero");
  auto need = [&](const char* key) {
    if (!has("potential", key)) {
      throw ConfigError(std::string("missing required key '") + key + "' in [potential] for kind " + kind);
    }
  };
  try {
    Potential phi;
    if (kind == "zero") {
      phi = Potential::constant(0.0);
    } else if (kind == "constant") {
      need("c");
      phi = Potential::constant(get_double("potential", "c", 0.0));
    } else if (kind == "cos" || kind == "linear_x") {
      need("t");
      phi = Potential::analytic(kind == "cos" ? AnalyticFamily::CosTheta : AnalyticFamily::LinearX,
                                get_double("potential", "t", 0.0));
    } else if (kind == "bump_pair") {
      need("lo");
      need("hi");
      BumpProfile profile;
      profile.shape = get_string("potential", "shape", "sin2") == "tent" ? BumpShape::Tent : BumpShape::SineSquared;
      profile.amplitude = get_double("potential", "amplitude", 1.0);
      const double lo = get_double("potential", "lo", 0.0);
      const double hi = get_double("potential", "hi", 0.0);
      BumpRegion region = map.kind() == MapKind::Viana
                              ? BumpRegion::band(get_double("potential", "theta_lo", 0.0),
                                                 get_double("potential", "theta_hi", 1.0), lo, hi)
                              : BumpRegion::interval(lo, hi);
      phi = make_bump_pair(map, region, profile);
    } else {
      need("p");
      need("values");
      if (map.kind() != MapKind::FullShift) throw ConfigError("prefix potentials need a full_shift map");
      const int k = map.shift().alphabet;
      const int p = static_cast<int>(get_int("potential", "p", 1));
      auto values = get_double_list("potential", "values", {});
      phi = kind == "prefix" ? Potential::prefix_table(k, p, std::move(values)) : shift_coboundary(k, p, values);
    }
    return phi.plus(get_double("potential", "offset", 0.0));
  } catch (const ContractError& e) {
    throw ConfigError(std::string("[potential] ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (operation() != "acceptance" || has_map()) {
    MapSystem m = map();
    (void)potential(m);
  }
  if (get_int("run", "threads", 0) < 0) throw ConfigError("run.threads must be >= 0");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  for (const auto& section : kSections) {
    auto it = values_.find(section);
    if (it == values_.end() || it->second.empty()) continue;
    out << '[' << section << "]\n";
    for (const auto& [k, v] : it->second) out << k << " = " << v << '\n';
  }
  return out.str();
}

std::string ExperimentConfig::hash() const {
  ExperimentConfig copy = *this;
  copy.values_.erase("output");
  return hex64(fnv1a(copy.serialize()));
}

ExperimentConfig parse_config(const std::string& text, bool validate) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    try {
      cfg.set(section, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (validate) cfg.validate();
  return cfg;
}

}  // namespace ergolab::cli
