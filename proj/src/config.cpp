#include "crdisc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crdisc/errors.hpp"

namespace crd {

namespace {

const std::vector<std::string> kManifolds{"zero", "quadratic", "trig", "poly"};

const ConfigKey& find_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (k.name == name) return k;
  fail(ErrorKind::Config, "config", "unknown config key '" + name + "'");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string canonical(const ConfigKey& k, const std::string& v) {
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::Config, "config", "key '" + k.name + "': " + why + " (got '" + v + "')");
  };
  auto range = [&](double x) {
    if (!(x >= k.lo && x <= k.hi)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "value outside [%g, %g]", k.lo, k.hi);
      bad(buf);
    }
  };
  switch (k.type) {
    case KeyType::Int:
    case KeyType::UInt: {
      std::size_t used = 0;
      long long x = 0;
      try {
        x = std::stoll(v, &used);
      } catch (const std::exception&) {
        bad("expected an integer");
      }
      if (used != v.size()) bad("expected an integer");
      range(static_cast<double>(x));
      return std::to_string(x);
    }
    case KeyType::Double: {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(v, &used);
      } catch (const std::exception&) {
        bad("expected a number");
      }
      if (used != v.size() || !std::isfinite(x)) bad("expected a finite number");
      range(x);
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return buf;
    }
    case KeyType::Bool:
      if (v == "true" || v == "1" || v == "yes") return "true";
      if (v == "false" || v == "0" || v == "no") return "false";
      bad("expected true or false");
      return v;
    case KeyType::String:
      if (v.empty()) bad("empty value");
      if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end())
        bad("not one of the allowed values");
      return v;
  }
  return v;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  using K = KeyType;
  static const std::vector<ConfigKey> keys{
      {"seed", K::UInt, "1", 0, 9.0e15, {}, "base seed of every randomized family"},
      {"manifold", K::String, "quadratic", 0, 0, kManifolds, "graph h of K' = {x + i h(x)}"},
      {"d", K::Int, "1", 1, 2, {}, "dimension for bishop and family commands"},
      {"spectral.modes", K::Int, "256", 16, 4096, {}, "modes N of the spectral exactness check"},
      {"seed.modes", K::Int, "256", 32, 2048, {}, "modes of u0"},
      {"seed.grid", K::Int, "64", 16, 512, {}, "certification grid of u0"},
      {"seed.theta0", K::Double, "0.6", 0.1, 1.5, {}, "half width of the arc where u0 vanishes"},
      {"bishop.modes", K::Int, "256", 32, 2048, {}, "modes of the Bishop solver"},
      {"bishop.tol", K::Double, "1e-12", 1e-15, 1e-6, {}, "Picard stopping tolerance"},
      {"bishop.max_iter", K::Int, "500", 1, 100000, {}, "Picard iteration cap"},
      {"bishop.t", K::Double, "0", 0, 0.999, {}, "disc size t; 0 selects t_max / 2"},
      {"bishop.sweep_count", K::Int, "6", 3, 12, {}, "dyadic t values below t_max / 2"},
      {"family.tau_nodes", K::Int, "3", 1, 9, {}, "tau nodes per axis"},
      {"family.tau_extent", K::Double, "0.75", 0.05, 1.0, {}, "tau box half width"},
      {"family.r0", K::Double, "0.3", 0.05, 0.9, {}, "radius of B(1, r0) for the Jacobian and distance ratios"},
      {"family.fd_step", K::Double, "1e-3", 1e-6, 1e-1, {}, "tau finite-difference step"},
      {"interp.t0", K::Double, "0.25", 0.0, 3.0, {}, "lower order of the interpolation inequality"},
      {"interp.t1", K::Double, "0.75", 0.0, 3.0, {}, "middle order"},
      {"interp.t2", K::Double, "1.5", 0.0, 3.0, {}, "upper order"},
      {"interp.dictionary", K::String, "bump-L4", 0, 0, {}, "test-form dictionary"},
      {"interp.enriched", K::String, "bump-L5", 0, 0, {}, "enriched dictionary for the stability check"},
      {"interp.current_grid", K::Int, "128", 32, 512, {}, "grid of the built-in currents"},
      {"psh.res", K::Int, "16", 8, 64, {}, "quadrature resolution for the psh lemmas"},
      {"psh.eps_max", K::Double, "0.25", 0.01, 0.5, {}, "largest eps of the dyadic sweeps"},
      {"psh.eps_count", K::Int, "6", 3, 12, {}, "number of dyadic eps"},
      {"psh.lambda", K::Double, "2", 1.0, 8.0, {}, "sublevel enlargement lambda"},
      {"psh.delta", K::Double, "0.5", 0.05, 0.95, {}, "weight exponent delta of the weighted pullback"},
      {"psh.surrogate_k", K::Int, "16", 2, 256, {}, "smoothing index k of g_k"},
      {"trace.res", K::Int, "16", 8, 64, {}, "disc rule resolution"},
      {"trace.beta", K::Double, "1.5", 0.01, 1.99, {}, "negative order beta"},
      {"trace.beta0", K::Double, "0.5", 0.0, 1.0, {}, "negative order beta0 < beta"},
      {"trace.eps_count", K::Int, "6", 2, 12, {}, "eps = 2^-k, k <= eps_count"},
      {"trace.dictionary", K::String, "bump-L4", 0, 0, {}, "dictionary of the boundary-L1 bound"},
      {"trace.current_grid", K::Int, "128", 32, 512, {}, "grid of the dd^c currents"},
      {"exponent.families", K::String, "trunc-log,trunc-log-off,trunc-log-sum,smooth-log", 0, 0, {},
       "comma list of pair families"},
      {"exponent.dims", K::String, "1,2", 0, 0, {}, "comma list of dimensions d"},
      {"exponent.sweep", K::String, "2:8:0.5", 0, 0, {}, "truncation levels M as a:b:step or a list"},
      {"exponent.gap", K::Double, "2", 0.1, 8.0, {}, "phi_2 is truncated at M + gap"},
      {"exponent.res", K::Int, "16", 8, 64, {}, "quadrature resolution"},
      {"exponent.chain", K::Bool, "true", 0, 0, {}, "log the disc-family chain at each point"},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.name] = canonical(k, k.value);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const ConfigKey& k = find_key(key);
  values_[key] = canonical(k, trim(value));
  if (key == "interp.dictionary" || key == "interp.enriched" || key == "trace.dictionary") {
    try {
      dictionary_level(values_[key]);
    } catch (const Error& e) {
      fail(ErrorKind::Config, "config", "key '" + key + "': " + e.what());
    }
  }
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& RunConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::Config, "config", "unknown config key '" + key + "'");
  return it->second;
}

int RunConfig::get_int(const std::string& key) const { return std::stoi(raw(key)); }
std::uint64_t RunConfig::get_uint(const std::string& key) const { return std::stoull(raw(key)); }
double RunConfig::get_double(const std::string& key) const { return std::stod(raw(key)); }
bool RunConfig::get_bool(const std::string& key) const { return raw(key) == "true"; }
const std::string& RunConfig::get_string(const std::string& key) const { return raw(key); }

std::string RunConfig::serialize() const {
  std::ostringstream o;
  for (const auto& k : config_keys()) o << k.name << " = " << values_.at(k.name) << "\n";
  return o.str();
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Config, "config", "line " + std::to_string(lineno) + ": expected key = value");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Config, "config", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

int dictionary_level(const std::string& id) {
  const std::string prefix = "bump-L";
  if (id.rfind(prefix, 0) != 0) fail(ErrorKind::Input, "config", "unknown dictionary id '" + id + "'");
  std::size_t used = 0;
  int level = 0;
  try {
    level = std::stoi(id.substr(prefix.size()), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != id.size() - prefix.size() || level < 2 || level > 6)
    fail(ErrorKind::Input, "config", "dictionary level must be bump-L2 .. bump-L6, got '" + id + "'");
  return level;
}

}  // namespace crd
