#pragma once

#include "projflow/scheme.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace projflow {

/// Contents of a "key = value" run file.
///
/// Keys: mesh_n, degree_u, degree_p, dt, T, mu, case, store_every,
/// tol_poisson, tol_momentum, out_dir. Defaults: degree_u = 2,
/// degree_p = 1, tolerances 1e-12, store_every = 1, case = stream_vortex,
/// out_dir = "out". '#' starts a comment.
struct RunConfig {
  SchemeConfig scheme;  // u0/f filled from the case
  std::string case_name = "stream_vortex";
  std::string out_dir = "out";
  double requested_dt = 0.0;
  std::vector<std::string> warnings;
};

/// Throws ParseError (with the 1-based line) for syntax errors, unknown or
/// repeated keys and invalid values, ConfigError for missing keys.
RunConfig parse_config(std::istream& in);
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace projflow
