#pragma once

#include <stdexcept>
#include <string>

#include "nlsh/engine.hpp"

namespace nlsh {

// S_I(u) = int_I ||u(t)||_q^q dt with the spacetime exponent q(d), trapezoid
// in time over a uniform lattice.
double strichartz_norm(const std::vector<Field>& states, const std::vector<double>& times);

struct SmoothingReport {
  double functional = 0.0;  // int_I int |grad u|^2 <R^{-1}(x-z)>^{-3} dx dt
  double ratio = 0.0;       // functional / (R (1+|I|) ||u||_{L^inf L^2} ||H^{1/2}u||_{L^inf L^2})
};

// Local-smoothing diagnostic for a linear trajectory; 0/0 on the zero
// trajectory is reported as ratio 0.
SmoothingReport local_smoothing_functional(const std::vector<Field>& states,
                                           const std::vector<double>& times,
                                           const std::array<double, 3>& z, double R);

// Configuration error carrying the JSON pointer of the offending key.
struct ConfigError : std::runtime_error {
  std::string path;
  ConfigError(std::string path_, const std::string& what_)
      : std::runtime_error("config error at " + path_ + ": " + what_), path(std::move(path_)) {}
};

struct InitialSpec {
  std::string kind = "h0";  // h0 | gauss | zero | file
  double amp = 1.0;
  double width = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::string path;
};

struct PotentialSpec {
  std::string kind = "zero";  // zero | capped_sin | file
  double amp = 1.0;
  double cap = 1.0;
  std::string path;
};

struct RunConfig {
  int d = 1;
  double L = 16.0;
  int n = 256;
  SolverConfig solver;
  PotentialSpec bounded_v;
  InitialSpec initial;
  std::string out_dir = "out";
  double checkpoint_every = 0.0;  // simulated-time cadence of field dumps; 0 = final only
  bool diag_virial = true;
  bool diag_strichartz = true;
  std::string suite = "core";

  Grid grid() const { return Grid(d, L, n); }
};

// Schema-validated parse: types checked, unknown keys rejected; throws
// ConfigError with the JSON pointer of the violation.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Materialize the configured initial data / bounded potential on the grid.
Field build_initial(const RunConfig& cfg);
Field build_bounded_potential(const RunConfig& cfg);

// CSV with the exact header t,mass,energy,e_delta,sigma_norm,sup_norm,virial_f,strichartz_cum.
void write_series_csv(const std::string& path, const DiagnosticsSeries& s);

// FNV-1a hash of the canonical config serialization, for the manifest.
std::string config_hash(const std::string& canonical);

int run_cli(int argc, const char* const* argv);

}  // namespace nlsh
