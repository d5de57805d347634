#include "ikzm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ikzm/errors.hpp"

namespace ikzm {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  // # and ; start a comment; no quoting in this format
  auto pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': '" + value + "'");
  }
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* backend_name(RunConfig::Backend b) {
  switch (b) {
    case RunConfig::Backend::fermion: return "fermion";
    case RunConfig::Backend::mps: return "mps";
    case RunConfig::Backend::both: return "both";
  }
  return "?";
}

RunConfig::Backend backend_from_name(const std::string& name) {
  if (name == "fermion") return RunConfig::Backend::fermion;
  if (name == "mps") return RunConfig::Backend::mps;
  if (name == "both") return RunConfig::Backend::both;
  throw ConfigError("unknown backend '" + name + "' (expected fermion, mps or both)");
}

void RunConfig::validate() const {
  if (alpha && end_ratio)
    throw ConfigError("[chain] alpha and end_ratio are mutually exclusive");
  chain().validate();  // ChainSpec enforces L, q, alpha, J0 ranges
  if (!(tau_min > 0.0) || !(tau_max > 0.0))
    throw ConfigError("[quench] tau_min and tau_max must be positive");
  if (tau_max < tau_min)
    throw ConfigError("[quench] tau_max must be >= tau_min");
  if (tau_count < 1) throw ConfigError("[quench] tau_count must be >= 1");
  if (tau_count == 1 && tau_max != tau_min)
    throw ConfigError("[quench] tau_count = 1 requires tau_min == tau_max");
  if (dt && !(*dt > 0.0)) throw ConfigError("[quench] dt must be positive");
  if (samples < 2) throw ConfigError("[quench] samples must be >= 2");
  if (chi < 1) throw ConfigError("[backend] chi must be >= 1");
  if (!(trunc_budget > 0.0)) throw ConfigError("[backend] trunc_budget must be positive");
  if (trotter_order != 2 && trotter_order != 4)
    throw ConfigError("[backend] trotter_order must be 2 or 4");
  if (workers < 1) throw ConfigError("[output] workers must be >= 1");
  if (out_dir.empty()) throw ConfigError("[output] out_dir must not be empty");
}

ChainSpec RunConfig::chain() const {
  if (end_ratio) return chain_with_end_ratio(L, q, *end_ratio, J0);
  ChainSpec spec;
  spec.L = L;
  spec.q = q;
  spec.alpha = alpha.value_or(0.0);
  spec.J0 = J0;
  return spec;
}

std::vector<double> RunConfig::tau_grid() const {
  std::vector<double> grid;
  grid.reserve(tau_count);
  if (tau_count == 1) {
    grid.push_back(tau_min);
    return grid;
  }
  double la = std::log(tau_min), lb = std::log(tau_max);
  for (int i = 0; i < tau_count; ++i)
    grid.push_back(std::exp(la + (lb - la) * i / double(tau_count - 1)));
  grid.front() = tau_min;  // keep endpoints exact
  grid.back() = tau_max;
  return grid;
}

QuenchProtocol RunConfig::protocol(double tau_Q) const {
  return QuenchProtocol::make(tau_Q, dt);
}

std::string RunConfig::canonical_snapshot(double tau_Q, Backend which) const {
  if (which == Backend::both)
    throw ConfigError("snapshot is per concrete backend, not 'both'");
  ChainSpec spec = chain();
  QuenchProtocol ramp = protocol(tau_Q);
  std::string s;
  s += "L=" + std::to_string(spec.L);
  s += ";q=" + fmt_g17(spec.q);
  s += ";alpha=" + fmt_g17(spec.alpha);
  s += ";J0=" + fmt_g17(spec.J0);
  s += ";tau_Q=" + fmt_g17(tau_Q);
  s += ";dt=" + fmt_g17(ramp.dt);
  s += ";samples=" + std::to_string(samples);
  s += ";backend=";
  s += backend_name(which);
  if (which == Backend::mps) {
    s += ";chi=" + std::to_string(chi);
    s += ";trunc_budget=" + fmt_g17(trunc_budget);
    s += ";seed=" + std::to_string(seed);
    s += ";trotter_order=" + std::to_string(trotter_order);
  }
  return s;
}

namespace {

struct KeyHandler {
  const char* section;
  const char* key;
  void (*apply)(RunConfig&, const std::string& key, const std::string& value);
};

const KeyHandler kHandlers[] = {
    {"chain", "L", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.L = static_cast<int>(parse_int(k, v));
     }},
    {"chain", "q", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.q = parse_double(k, v);
     }},
    {"chain", "J0", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.J0 = parse_double(k, v);
     }},
    {"chain", "alpha", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.alpha = parse_double(k, v);
     }},
    {"chain", "end_ratio", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.end_ratio = parse_double(k, v);
     }},
    {"quench", "tau_min", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.tau_min = parse_double(k, v);
     }},
    {"quench", "tau_max", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.tau_max = parse_double(k, v);
     }},
    {"quench", "tau_count", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.tau_count = static_cast<int>(parse_int(k, v));
     }},
    {"quench", "dt", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.dt = parse_double(k, v);
     }},
    {"quench", "samples", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.samples = static_cast<int>(parse_int(k, v));
     }},
    {"backend", "backend", [](RunConfig& c, const std::string&, const std::string& v) {
       c.backend = backend_from_name(v);
     }},
    {"backend", "chi", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.chi = static_cast<int>(parse_int(k, v));
     }},
    {"backend", "trunc_budget", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.trunc_budget = parse_double(k, v);
     }},
    {"backend", "seed", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.seed = static_cast<std::uint64_t>(parse_int(k, v));
     }},
    {"backend", "trotter_order", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.trotter_order = static_cast<int>(parse_int(k, v));
     }},
    {"output", "out_dir", [](RunConfig& c, const std::string&, const std::string& v) {
       c.out_dir = v;
     }},
    {"output", "workers", [](RunConfig& c, const std::string& k, const std::string& v) {
       c.workers = static_cast<int>(parse_int(k, v));
     }},
};

bool known_section(const std::string& s) {
  return s == "chain" || s == "quench" || s == "backend" || s == "output";
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    const KeyHandler* handler = nullptr;
    for (const auto& h : kHandlers)
      if (section == h.section && key == h.key) { handler = &h; break; }
    if (!handler)
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                        "' in section [" + section + "]");
    std::string qualified = section + "." + key;
    if (!seen.insert(qualified).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + qualified + "'");
    handler->apply(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace ikzm
