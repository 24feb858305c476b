#include "chns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace chns {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad number for '" + std::string(key) + "': '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(value))
    throw ConfigError("bad number for '" + std::string(key) + "': '" + s + "'");
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("bad integer for '" + std::string(key) + "': '" + std::string(s) + "'");
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

const char* to_string(Scheme s) { return s == Scheme::Msav1 ? "msav1" : "msav2"; }

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const auto value = trim(value_in);
  auto& p = c.params;
  if (key == "nx") c.grid.nx = parse_int(key, value);
  else if (key == "ny") c.grid.ny = parse_int(key, value);
  else if (key == "scheme") {
    if (value == "msav1") c.scheme = Scheme::Msav1;
    else if (value == "msav2") c.scheme = Scheme::Msav2;
    else throw ConfigError("scheme must be msav1 or msav2, got '" + std::string(value) + "'");
  } else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "t_final") c.t_final = parse_double(key, value);
  else if (key == "epsilon") p.epsilon = parse_double(key, value);
  else if (key == "mobility") p.mobility = parse_double(key, value);
  else if (key == "viscosity") p.viscosity = parse_double(key, value);
  else if (key == "gamma") p.gamma = parse_double(key, value);
  else if (key == "beta") p.beta = parse_double(key, value);
  else if (key == "delta") p.delta = parse_double(key, value);
  else if (key == "horizon_T") p.horizon = parse_double(key, value);
  else if (key == "tol_poisson") c.tol.poisson = parse_double(key, value);
  else if (key == "tol_helmholtz") c.tol.helmholtz = parse_double(key, value);
  else if (key == "snapshot_every") c.snapshot_every = parse_int(key, value);
  else if (key == "outdir") c.outdir = std::string(value);
  else if (key == "ladder") c.ladder = parse_list(key, value);
  else if (key == "audit_dt") c.audit_dts = parse_list(key, value);
  else if (key == "initial") c.initial = std::string(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    try {
      apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

int whole_steps(double t_final, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be > 0");
  const double ratio = t_final / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 4.0 * std::numeric_limits<double>::epsilon() * n)
    throw ConfigError("t_final = " + std::to_string(t_final) + " is not a whole number of steps of dt = " +
                      std::to_string(dt));
  if (n > std::numeric_limits<int>::max()) throw ConfigError("too many steps");
  return static_cast<int>(n);
}

void validate_ladder(const std::vector<double>& ladder, double t_final) {
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    whole_steps(t_final, ladder[k]);
    if (k > 0 && std::abs(ladder[k - 1] / ladder[k] - 2.0) > 1e-12)
      throw ConfigError("ladder must decrease by exact factors of 2");
  }
}

void validate(const RunConfig& c) {
  try {
    c.params.validate();
    c.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(c.tol.poisson > 0.0) || !(c.tol.helmholtz > 0.0)) throw ConfigError("tolerances must be > 0");
  if (c.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  whole_steps(c.t_final, c.dt);
  validate_ladder(c.ladder, c.t_final);
  if (c.initial != "swirl" && c.initial != "rest" && c.initial.rfind("snapshot:", 0) != 0)
    throw ConfigError("initial must be swirl, rest or snapshot:<prefix>");
}

}  // namespace chns
