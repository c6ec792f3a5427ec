#include "projflow/config.hpp"

#include "projflow/error.hpp"
#include "projflow/mms.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace projflow {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, std::size_t line, const std::string& key) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ParseError(line, key + ": expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v, std::size_t line, const std::string& key) {
  int out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ParseError(line, key + ": expected an integer, got '" + v + "'");
  return out;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig rc;
  SchemeConfig& s = rc.scheme;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line = 0;
  bool have_dt = false, have_T = false, have_mu = false, have_n = false;

  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string val = trim(text.substr(eq + 1));
    if (key.empty() || val.empty()) throw ParseError(line, "expected 'key = value'");
    if (auto it = seen.find(key); it != seen.end())
      throw ParseError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    seen[key] = line;

    if (key == "mesh_n") {
      s.mesh_n = to_int(val, line, key);
      if (s.mesh_n < 1) throw ParseError(line, "mesh_n must be at least 1");
      have_n = true;
    } else if (key == "degree_u" || key == "degree_p") {
      const int k = to_int(val, line, key);
      if (k != 1 && k != 2) throw ParseError(line, key + " must be 1 or 2");
      (key == "degree_u" ? s.degree_u : s.degree_p) = k;
    } else if (key == "dt" || key == "T" || key == "mu") {
      const double v = to_double(val, line, key);
      if (!(v > 0.0)) throw ParseError(line, key + " must be positive");
      if (key == "dt") s.dt = v, have_dt = true;
      else if (key == "T") s.T = v, have_T = true;
      else s.mu = v, have_mu = true;
    } else if (key == "tol_poisson" || key == "tol_momentum") {
      const double v = to_double(val, line, key);
      if (!(v > 0.0) || v >= 1.0) throw ParseError(line, key + " must lie in (0, 1)");
      (key == "tol_poisson" ? s.tol_poisson : s.tol_momentum) = v;
    } else if (key == "store_every") {
      s.store_every = to_int(val, line, key);
      if (s.store_every < 1) throw ParseError(line, "store_every must be at least 1");
    } else if (key == "case") {
      rc.case_name = val;
    } else if (key == "out_dir") {
      rc.out_dir = val;
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  if (!have_n) throw ConfigError("missing key 'mesh_n'");
  if (!have_dt) throw ConfigError("missing key 'dt'");
  if (!have_T) throw ConfigError("missing key 'T'");
  if (!have_mu) throw ConfigError("missing key 'mu'");
  if (s.T < s.dt) throw ParseError(seen["T"], "T must be at least dt");

  try {
    apply_case(s, case_by_name(rc.case_name, s.mu));
  } catch (const ConfigError& e) {
    throw ParseError(seen["case"], e.what());
  }

  rc.requested_dt = s.dt;
  const TimeGrid g = resolve_time_grid(s.T, s.dt);
  s.dt = g.dt;
  if (g.adjusted) {
    std::ostringstream os;
    os << "dt adjusted from " << rc.requested_dt << " to " << g.dt << " (T / " << g.steps << ")";
    rc.warnings.push_back(os.str());
  }
  validate(s);
  return rc;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace projflow
