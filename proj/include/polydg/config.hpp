#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a CLI run needs. Keys in the config file match the field names.
struct RunConfig {
  std::string problem = "advdiff3d";
  std::string mesh;           // simplicial mesh file; empty means generated
  std::string agglomeration;  // agglomeration map file (with `mesh`)
  std::string mesh_gen = "cube";  // square | cube
  int mesh_n = 4;                 // cells per side of the generated mesh
  std::string agglomerate = "none";  // none | block:R (R x R fine cells per element) | seeded:K
  double jitter = 0.0;
  int degree = 1;
  std::string family = "P";  // P | PQ
  int approach = 2;
  std::string accumulation = "deterministic";  // deterministic | atomic
  int workers = 1;
  int parts = 1;
  int quadrature_increment = 2;
  double c_sigma = 10.0;
  bool coverable = false;
  double t_end = 1.0;
  int time_steps = 4;         // slabs at the first study level
  std::vector<int> levels;    // study: mesh_n per level
  std::vector<int> bench_workers{1, 4};
  int repeat = 1;
  double tol = 1e-10;
  int max_iter = 5000;
  int restart = 60;
  std::uint64_t seed = 1;
  std::string output = "polydg_out";
};

/// Names of every accepted key, in declaration order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value; throws ConfigError for an unknown
/// key or an unparsable value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// `key=value` lines; `#` starts a comment, blank lines are skipped.
/// Errors name `source:line`.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Applies one `key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Range and consistency checks; throws ConfigError.
void validate(const RunConfig& cfg);

/// Writes the config back as `key=value` lines.
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace polydg
