#include "detmodes/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "detmodes/csv.hpp"

namespace detmodes {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw ConfigError("config key '" + key + "': " + message);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    if (text == "inf" || text == "nan" || text == "-inf") fail(key, "value must be finite, got '" + text + "'");
    fail(key, "expected a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(key, "expected an integer, got '" + text + "'");
  return v;
}

struct KeyHandler {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

using Handlers = std::vector<std::pair<std::string, KeyHandler>>;

KeyHandler real_key(const std::string& name, double ExperimentConfig::*field) {
  return {[name, field](ExperimentConfig& c, const std::string& v) { c.*field = to_double(name, v); },
          [field](const ExperimentConfig& c) { return std::optional<std::string>(format_number(c.*field)); }};
}

KeyHandler optional_real_key(const std::string& name, std::optional<double> ExperimentConfig::*field) {
  return {[name, field](ExperimentConfig& c, const std::string& v) { c.*field = to_double(name, v); },
          [field](const ExperimentConfig& c) -> std::optional<std::string> {
            if (!(c.*field)) return std::nullopt;
            return format_number(*(c.*field));
          }};
}

KeyHandler seed_key(const std::string& name, std::uint64_t ExperimentConfig::*field) {
  return {[name, field](ExperimentConfig& c, const std::string& v) { c.*field = to_integer<std::uint64_t>(name, v); },
          [field](const ExperimentConfig& c) { return std::optional<std::string>(std::to_string(c.*field)); }};
}

const Handlers& handlers() {
  static const Handlers table = [] {
    Handlers h;
    h.emplace_back("nu", real_key("nu", &ExperimentConfig::nu));
    h.emplace_back("L", real_key("L", &ExperimentConfig::L));
    h.emplace_back("N", KeyHandler{[](ExperimentConfig& c, const std::string& v) { c.N = to_integer<int>("N", v); },
                                   [](const ExperimentConfig& c) { return std::optional(std::to_string(c.N)); }});
    h.emplace_back("dt", real_key("dt", &ExperimentConfig::dt));
    h.emplace_back("T_total", real_key("T_total", &ExperimentConfig::T_total));
    h.emplace_back("snapshot_interval", real_key("snapshot_interval", &ExperimentConfig::snapshot_interval));
    h.emplace_back("sample_interval", real_key("sample_interval", &ExperimentConfig::sample_interval));
    h.emplace_back("r", real_key("r", &ExperimentConfig::r));
    h.emplace_back("c_r", real_key("c_r", &ExperimentConfig::c_r));
    h.emplace_back("c0", real_key("c0", &ExperimentConfig::c0));
    h.emplace_back("forcing", KeyHandler{[](ExperimentConfig& c, const std::string& v) {
                                           try {
                                             c.forcing = parse_forcing_kind(v);
                                           } catch (const std::invalid_argument& e) {
                                             fail("forcing", e.what());
                                           }
                                         },
                                         [](const ExperimentConfig& c) { return std::optional(to_string(c.forcing)); }});
    h.emplace_back("forcing_amplitude", real_key("forcing_amplitude", &ExperimentConfig::forcing_amplitude));
    h.emplace_back("forcing_modes",
                   KeyHandler{[](ExperimentConfig& c, const std::string& v) { c.forcing_modes = parse_forcing_modes(v); },
                              [](const ExperimentConfig& c) -> std::optional<std::string> {
                                if (c.forcing_modes.empty()) return std::nullopt;
                                return format_forcing_modes(c.forcing_modes);
                              }});
    h.emplace_back("seed_u", seed_key("seed_u", &ExperimentConfig::seed_u));
    h.emplace_back("seed_v", seed_key("seed_v", &ExperimentConfig::seed_v));
    h.emplace_back("init_urms", real_key("init_urms", &ExperimentConfig::init_urms));
    h.emplace_back("init_k0", real_key("init_k0", &ExperimentConfig::init_k0));
    h.emplace_back("output_dir",
                   KeyHandler{[](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
                              [](const ExperimentConfig& c) { return std::optional(c.output_dir); }});
    h.emplace_back("T_avg", optional_real_key("T_avg", &ExperimentConfig::T_avg));
    h.emplace_back("d_override", optional_real_key("d_override", &ExperimentConfig::d_override));
    h.emplace_back("sync_mode",
                   KeyHandler{[](ExperimentConfig& c, const std::string& v) { c.sync_mode = parse_sync_mode(v); },
                              [](const ExperimentConfig& c) { return std::optional(to_string(c.sync_mode)); }});
    h.emplace_back("perturbation_urms", real_key("perturbation_urms", &ExperimentConfig::perturbation_urms));
    h.emplace_back("steady_tol", real_key("steady_tol", &ExperimentConfig::steady_tol));
    return h;
  }();
  return table;
}

const KeyHandler* find_handler(const std::string& key) {
  for (const auto& [name, handler] : handlers()) {
    if (name == key) return &handler;
  }
  return nullptr;
}

void require(bool ok, const std::string& key, const std::string& range) {
  if (!ok) fail(key, "value out of range; accepted range: " + range);
}

}  // namespace

std::string to_string(SyncMode mode) { return mode == SyncMode::twin ? "twin" : "steady"; }

SyncMode parse_sync_mode(const std::string& name) {
  if (name == "twin") return SyncMode::twin;
  if (name == "steady") return SyncMode::steady;
  throw ConfigError("config key 'sync_mode': expected twin or steady, got '" + name + "'");
}

ForcingSpec ExperimentConfig::forcing_spec() const {
  ForcingSpec spec;
  spec.kind = forcing;
  spec.amplitude = forcing_amplitude;
  spec.modes = forcing_modes;
  return spec;
}

RandomFieldSpec ExperimentConfig::initial_spec() const { return {init_k0, init_urms}; }

DiagnosticParams ExperimentConfig::diagnostic_params() const { return {nu, r, c_r, c0}; }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : handlers()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const KeyHandler* h = find_handler(key);
  if (!h) throw ConfigError("unknown config key '" + key + "'");
  h->set(config, trim(value));
}

void validate(const ExperimentConfig& c) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto nonnegative = [](double v) { return std::isfinite(v) && v >= 0.0; };
  require(positive(c.nu), "nu", "(0, inf)");
  require(positive(c.L), "L", "(0, inf)");
  require(c.N >= 8 && c.N % 2 == 0, "N", "even integers >= 8");
  require(positive(c.dt), "dt", "(0, inf)");
  require(positive(c.T_total), "T_total", "(0, inf)");
  require(nonnegative(c.snapshot_interval), "snapshot_interval", "[0, inf)");
  require(nonnegative(c.sample_interval), "sample_interval", "[0, inf)");
  if (!(c.r > 2.0 && c.r < 3.0)) fail("r", "r must lie in the open interval (2,3)");
  require(positive(c.c_r), "c_r", "(0, inf)");
  require(positive(c.c0), "c0", "(0, inf)");
  require(std::isfinite(c.forcing_amplitude), "forcing_amplitude", "finite reals");
  if (c.forcing == ForcingSpec::Kind::custom && c.forcing_modes.empty()) {
    fail("forcing_modes", "custom forcing needs at least one mode");
  }
  const int kmax = c.N / 3;
  for (const auto& m : c.forcing_modes) {
    require(m.k.norm2() != 0 && std::abs(m.k.x) <= kmax && std::abs(m.k.y) <= kmax && std::abs(m.k.z) <= kmax,
            "forcing_modes", "nonzero wavevectors with components in [-N/3, N/3]");
  }
  require(nonnegative(c.init_urms), "init_urms", "[0, inf)");
  require(positive(c.init_k0), "init_k0", "(0, inf)");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
  if (c.T_avg) require(positive(*c.T_avg) && *c.T_avg <= c.T_total, "T_avg", "(0, T_total]");
  if (c.d_override) require(*c.d_override >= 0.0 && *c.d_override <= 3.0, "d_override", "[0, 3]");
  require(positive(c.perturbation_urms), "perturbation_urms", "(0, inf)");
  require(positive(c.steady_tol), "steady_tol", "(0, inf)");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!find_handler(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown config key '" + key + "'");
    }
    if (seen.count(key)) throw ConfigError("config key '" + key + "' given twice");
    seen[key] = line_no;
    apply_setting(config, key, value);
  }
  std::string missing;
  for (const char* key : {"nu", "L", "N", "dt", "T_total"}) {
    if (!seen.count(key)) missing += missing.empty() ? key : std::string(", ") + key;
  }
  if (!missing.empty()) throw ConfigError("missing required config keys: " + missing);
  validate(config);
  return config;
}

std::string dump_config(const ExperimentConfig& config) {
  std::ostringstream out;
  for (const auto& [name, handler] : handlers()) {
    if (auto v = handler.get(config)) out << name << " = " << *v << '\n';
  }
  return out.str();
}

std::vector<ForcingSpec::Mode> parse_forcing_modes(const std::string& text) {
  std::vector<ForcingSpec::Mode> modes;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    group = trim(group);
    if (group.empty()) continue;
    std::istringstream fields(group);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.size() != 9) {
      fail("forcing_modes", "each mode needs 9 entries 'kx ky kz re_x im_x re_y im_y re_z im_z', got '" + group + "'");
    }
    ForcingSpec::Mode m;
    m.k = {to_integer<int>("forcing_modes", tokens[0]), to_integer<int>("forcing_modes", tokens[1]),
           to_integer<int>("forcing_modes", tokens[2])};
    for (int c = 0; c < 3; ++c) {
      m.amplitude[static_cast<std::size_t>(c)] =
          Complex(to_double("forcing_modes", tokens[3 + 2 * c]), to_double("forcing_modes", tokens[4 + 2 * c]));
    }
    modes.push_back(m);
  }
  return modes;
}

std::string format_forcing_modes(const std::vector<ForcingSpec::Mode>& modes) {
  std::string out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    if (i) out += "; ";
    out += std::to_string(m.k.x) + ' ' + std::to_string(m.k.y) + ' ' + std::to_string(m.k.z);
    for (const Complex& a : m.amplitude) out += ' ' + format_number(a.real()) + ' ' + format_number(a.imag());
  }
  return out;
}

}  // namespace detmodes
