// Copyright 2026 The puretherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "puretherm/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "puretherm/errors.hpp"
#include "puretherm/hilbert.hpp"

namespace puretherm::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

template <typename Int>
Int to_int(const std::string& text) {
  const std::string s = trim(text);
  Int v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::vector<double> to_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;  // nullopt: omit
};

#define PT_DOUBLE(sec, name, member)                                                   \
  Field{sec, name, [](RunConfig& c, const std::string& v) { c.member = to_double(v); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.member); }}
#define PT_INT(sec, name, member, type)                                                   \
  Field{sec, name, [](RunConfig& c, const std::string& v) { c.member = to_int<type>(v); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.member); }}
#define PT_LIST(sec, name, member)                                                   \
  Field{sec, name, [](RunConfig& c, const std::string& v) { c.member = to_list(v); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.member); }}
#define PT_BOOL(sec, name, member)                                                   \
  Field{sec, name, [](RunConfig& c, const std::string& v) { c.member = to_bool(v); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return c.member ? "true" : "false"; }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      PT_INT("chain", "sites", chain.sites, int),
      PT_DOUBLE("chain", "J", chain.J),
      PT_DOUBLE("chain", "Delta", chain.Delta),
      PT_DOUBLE("chain", "h", chain.h),
      PT_DOUBLE("chain", "delta_h", chain.delta_h),
      PT_BOOL("chain", "periodic", chain.periodic),
      PT_DOUBLE("drive", "amplitude", drive.amplitude),
      PT_DOUBLE("drive", "omega", drive.omega),
      PT_INT("drive", "site", drive.site, int),
      PT_INT("probe", "center", probe_center, int),
      PT_DOUBLE("evolution", "dt", dt),
      PT_LIST("evolution", "t_prep", t_prep),
      PT_LIST("evolution", "beta_targets", beta_targets),
      PT_DOUBLE("evolution", "max_prep_time", max_prep_time),
      PT_DOUBLE("evolution", "t_relax", t_relax),
      PT_DOUBLE("evolution", "average_window", average_window),
      PT_INT("evolution", "record_stride", record_stride, int),
      PT_DOUBLE("spectra", "tau_star", tau_star),
      PT_DOUBLE("spectra", "omega_max", omega_max),
      PT_DOUBLE("spectra", "d_omega", d_omega),
      PT_DOUBLE("spectra", "fit_omega_max", fit_omega_max),
      PT_INT("kpm", "moments", kpm_moments, int),
      PT_INT("kpm", "random_vectors", kpm_vectors, int),
      PT_INT("kpm", "ldos_moments", ldos_moments, int),
      PT_BOOL("eth", "enabled", eth_enabled),
      PT_DOUBLE("eth", "delta_eps", eth_delta_eps),
      PT_DOUBLE("eth", "d_omega", eth_d_omega),
      PT_DOUBLE("eth", "central_fraction", eth_central_fraction),
      PT_LIST("decoherence", "couplings", couplings),
      PT_DOUBLE("decoherence", "t_max", decohere_t_max),
      PT_DOUBLE("metrology", "delta_T", delta_T),
      PT_DOUBLE("metrology", "repetitions", repetitions),
      PT_INT("hydro", "d", hydro.d, int),
      PT_DOUBLE("hydro", "D", hydro.D),
      PT_DOUBLE("hydro", "chi0", hydro.chi0),
      PT_DOUBLE("hydro", "ell", hydro.ell),
      PT_DOUBLE("hydro", "L", hydro.L),
      PT_DOUBLE("hydro", "g", hydro.g),
      PT_DOUBLE("hydro", "T", hydro.T),
      PT_LIST("hydro", "sweep_L", hydro_sweep_L),
      Field{"run", "seed", [](RunConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
            [](const RunConfig& c) -> std::optional<std::string> {
              if (!c.seed) return std::nullopt;
              return std::to_string(*c.seed);
            }},
      PT_INT("run", "threads", threads, unsigned),
      Field{"run", "out", [](RunConfig& c, const std::string& v) { c.out = trim(v); },
            [](const RunConfig& c) -> std::optional<std::string> { return c.out.empty() ? std::nullopt : std::optional<std::string>(c.out); }},
  };
  return f;
}

#undef PT_DOUBLE
#undef PT_INT
#undef PT_LIST
#undef PT_BOOL

}  // namespace

int RunConfig::probe_site() const { return probe_center > 0 ? probe_center : default_probe_site(chain.sites); }
int RunConfig::drive_site() const { return drive.site > 0 ? drive.site : probe_site(); }

RunConfig parse_config(std::istream& in) {
  // '#' comments are accepted in addition to the ini parser's ';'.
  std::stringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (!t.empty() && t[0] == '#') continue;
    cleaned << line << '\n';
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(cleaned, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[std::string(f.section) + "." + f.key] = &f;

  RunConfig cfg;
  std::vector<std::string> errors;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      errors.push_back("key '" + section + "' outside any section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const auto it = index.find(section + "." + key);
      if (it == index.end()) {
        errors.push_back("unknown key [" + section + "] " + key);
        continue;
      }
      try {
        it->second->set(cfg, value.data());
      } catch (const std::exception& e) {
        errors.push_back("[" + section + "] " + key + ": " + e.what());
      }
    }
  }
  if (!errors.empty()) {
    std::string msg = "config: " + std::to_string(errors.size()) + " error(s)";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  return parse_config(in);
}

std::vector<std::string> config_violations(const RunConfig& c, ConfigScope scope) {
  std::vector<std::string> v;
  if (scope == ConfigScope::hydro) {
    try {
      c.hydro.validate();
    } catch (const std::exception& e) {
      v.push_back(e.what());
    }
    for (double l : c.hydro_sweep_L)
      if (!(l > 0.0)) v.push_back("hydro.sweep_L entries must be positive");
    if (c.out.empty()) v.push_back("run.out must be non-empty");
    return v;
  }
  const int L = c.chain.sites;
  if (L < 2 || L % 2) v.push_back("chain.sites must be even and >= 2");
  if (L > BasisSector::kMaxSites) v.push_back("chain.sites exceeds " + std::to_string(BasisSector::kMaxSites));
  if (L >= 2 && L % 2 == 0) {
    if (c.probe_center < 0 || c.probe_center > L) v.push_back("probe.center must be 0 (auto) or a site in 1..L");
    if (c.drive.site < 0 || c.drive.site > L) v.push_back("drive.site must be 0 (auto) or a site in 1..L");
  }
  if (!(c.dt > 0.0 && c.dt <= 0.05)) v.push_back("evolution.dt must lie in (0, 0.05]");
  if (c.t_prep.empty() && c.beta_targets.empty())
    v.push_back("evolution: give t_prep or beta_targets (at least one temperature)");
  for (double t : c.t_prep)
    if (!(t >= 0.0)) v.push_back("evolution.t_prep entries must be non-negative");
  for (double b : c.beta_targets)
    if (!(b > 0.0)) v.push_back("evolution.beta_targets entries must be positive");
  if (!(c.max_prep_time > 0.0)) v.push_back("evolution.max_prep_time must be positive");
  if (!(c.t_relax >= 0.0)) v.push_back("evolution.t_relax must be non-negative");
  if (!(c.average_window > 0.0)) v.push_back("evolution.average_window must be positive");
  if (c.record_stride < 1) v.push_back("evolution.record_stride must be >= 1");
  if (!(c.tau_star > 0.0)) v.push_back("spectra.tau_star must be positive");
  if (!(c.omega_max > c.fit_omega_max)) v.push_back("spectra.omega_max must exceed fit_omega_max");
  if (!(c.d_omega > 0.0 && c.d_omega <= 0.1)) v.push_back("spectra.d_omega must lie in (0, 0.1]");
  if (!(c.fit_omega_max > 0.0)) v.push_back("spectra.fit_omega_max must be positive");
  if (c.kpm_moments < 2) v.push_back("kpm.moments must be >= 2");
  if (c.kpm_vectors < 1) v.push_back("kpm.random_vectors must be >= 1");
  if (c.ldos_moments < 2) v.push_back("kpm.ldos_moments must be >= 2");
  if (!(c.eth_delta_eps > 0.0 && c.eth_delta_eps < 1.0)) v.push_back("eth.delta_eps must lie in (0, 1)");
  if (!(c.eth_d_omega > 0.0)) v.push_back("eth.d_omega must be positive");
  if (!(c.eth_central_fraction > 0.0 && c.eth_central_fraction <= 1.0))
    v.push_back("eth.central_fraction must lie in (0, 1]");
  for (double g : c.couplings)
    if (!(g >= 0.0)) v.push_back("decoherence.couplings entries must be non-negative");
  if (!(c.decohere_t_max > 0.0)) v.push_back("decoherence.t_max must be positive");
  if (!(c.delta_T > 0.0)) v.push_back("metrology.delta_T must be positive");
  if (!(c.repetitions >= 1.0)) v.push_back("metrology.repetitions must be >= 1");
  try {
    c.hydro.validate();
  } catch (const std::exception& e) {
    v.push_back(e.what());
  }
  for (double l : c.hydro_sweep_L)
    if (!(l > 0.0)) v.push_back("hydro.sweep_L entries must be positive");
  if (!c.seed) v.push_back("run.seed is required (pass --seed or set [run] seed)");
  if (c.threads < 1) v.push_back("run.threads must be >= 1");
  if (c.out.empty()) v.push_back("run.out must be non-empty");
  return v;
}

void validate_config(const RunConfig& cfg, ConfigScope scope) {
  const auto v = config_violations(cfg, scope);
  if (v.empty()) return;
  std::string msg = "config: " + std::to_string(v.size()) + " violation(s)";
  for (const auto& e : v) msg += "\n  - " + e;
  throw ValidationError(msg);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& f : fields()) {
    const auto value = f.get(cfg);
    if (!value) continue;
    if (current != f.section) {
      if (!current.empty()) os << '\n';
      os << '[' << f.section << "]\n";
      current = f.section;
    }
    os << f.key << " = " << *value << '\n';
  }
  return os.str();
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& label) {
  // FNV-1a over the label, then a splitmix64 finaliser.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace puretherm::app
