#include "nlsh/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlsh/fft.hpp"
#include "nlsh/hermite.hpp"
#include "nlsh/io.hpp"
#include "nlsh/norms.hpp"
#include "nlsh/profiles.hpp"
#include "nlsh/propagators.hpp"
#include "nlsh/variational.hpp"

namespace nlsh {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader =
    "t,mass,energy,e_delta,sigma_norm,sup_norm,virial_f,strichartz_cum";
constexpr const char* kVersion = "1.0.0";

void check_lattice(const std::vector<Field>& states, const std::vector<double>& times) {
  if (states.size() != times.size())
    throw std::invalid_argument("trajectory: states/times length mismatch");
  if (states.size() < 2) throw std::invalid_argument("trajectory: need >= 2 samples");
  double h = times[1] - times[0];
  if (h <= 0) throw std::invalid_argument("trajectory: times must increase");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("trajectory: non-uniform time lattice");
}

double trapezoid(const std::vector<double>& vals, const std::vector<double>& times) {
  double s = 0.0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    s += 0.5 * (vals[i] + vals[i - 1]) * (times[i] - times[i - 1]);
  return s;
}

}  // namespace

double strichartz_norm(const std::vector<Field>& states, const std::vector<double>& times) {
  check_lattice(states, times);
  double q = strichartz_exponent(states[0].grid.d);
  std::vector<double> integrand(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    integrand[i] = std::pow(lp_norm(states[i], q), q);
  return trapezoid(integrand, times);
}

SmoothingReport local_smoothing_functional(const std::vector<Field>& states,
                                           const std::vector<double>& times,
                                           const std::array<double, 3>& z, double R) {
  check_lattice(states, times);
  if (R <= 0) throw std::invalid_argument("local_smoothing: R must be positive");
  const Grid& g = states[0].grid;

  std::vector<double> weight(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto j = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double dz = g.coord(j[a]) - z[a];
      r2 += dz * dz;
    }
    weight[i] = std::pow(1.0 + r2 / (R * R), -1.5);
  }

  std::vector<double> integrand(states.size());
  double max_l2 = 0.0, max_hhalf = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::vector<Field> grads = gradient(states[s]);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double g2 = 0.0;
      for (const Field& ga : grads) g2 += std::norm(ga[i]);
      acc += g2 * weight[i];
    }
    integrand[s] = acc * g.cell_volume();
    max_l2 = std::max(max_l2, l2_norm(states[s]));
    // ||H^{1/2} u||^2 = (1/2) ||u||_Sigma^2.
    max_hhalf = std::max(max_hhalf, sigma_norm(states[s]) / std::sqrt(2.0));
  }

  SmoothingReport rep;
  rep.functional = trapezoid(integrand, times);
  double interval = times.back() - times.front();
  double denom = R * (1.0 + interval) * max_l2 * max_hhalf;
  rep.ratio = denom > 0.0 ? rep.functional / denom : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

namespace {

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) { ok = true; break; }
    if (!ok) throw ConfigError(path + "/" + it.key(), "unknown key");
  }
}

double num_at(const json& obj, const std::string& path, const char* key, double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v.get<double>();
}

int int_at(const json& obj, const std::string& path, const char* key, int def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "/" + key, "expected an integer");
  return v.get<int>();
}

bool bool_at(const json& obj, const std::string& path, const char* key, bool def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

std::string str_at(const json& obj, const std::string& path, const char* key,
                   const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
}

std::array<double, 3> vec_at(const json& obj, const std::string& path, const char* key,
                             int d, std::array<double, 3> def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  std::string p = path + "/" + key;
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw ConfigError(p, "expected an array of " + std::to_string(d) + " numbers");
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    if (!v[a].is_number()) throw ConfigError(p, "expected an array of numbers");
    out[a] = v[a].get<double>();
  }
  return out;
}

void parse_potential_spec(const json& v, const std::string& path, PotentialSpec& out) {
  expect_object(v, path);
  reject_unknown(v, path, {"kind", "amp", "cap", "path"});
  out.kind = str_at(v, path, "kind", "zero");
  if (out.kind != "zero" && out.kind != "capped_sin" && out.kind != "file")
    throw ConfigError(path + "/kind", "expected one of zero|capped_sin|file");
  out.amp = num_at(v, path, "amp", 1.0);
  out.cap = num_at(v, path, "cap", 1.0);
  require_positive(out.cap, path + "/cap");
  out.path = str_at(v, path, "path", "");
  if (out.kind == "file" && out.path.empty())
    throw ConfigError(path + "/path", "required for kind \"file\"");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  expect_object(root, "/");
  reject_unknown(root, "", {"grid", "initial", "solver", "output", "diagnostics", "suite"});

  RunConfig cfg;

  if (!root.contains("grid")) throw ConfigError("/grid", "required");
  const json& jg = root.at("grid");
  expect_object(jg, "/grid");
  reject_unknown(jg, "/grid", {"d", "L", "n"});
  if (!jg.contains("d")) throw ConfigError("/grid/d", "required");
  if (!jg.contains("L")) throw ConfigError("/grid/L", "required");
  if (!jg.contains("n")) throw ConfigError("/grid/n", "required");
  cfg.d = int_at(jg, "/grid", "d", 1);
  cfg.L = num_at(jg, "/grid", "L", 16.0);
  cfg.n = int_at(jg, "/grid", "n", 256);
  try {
    (void)Grid(cfg.d, cfg.L, cfg.n);
  } catch (const std::exception& e) {
    throw ConfigError("/grid", e.what());
  }

  if (!root.contains("initial")) throw ConfigError("/initial", "required");
  const json& ji = root.at("initial");
  expect_object(ji, "/initial");
  reject_unknown(ji, "/initial", {"kind", "amp", "width", "center", "path"});
  cfg.initial.kind = str_at(ji, "/initial", "kind", "h0");
  if (cfg.initial.kind != "h0" && cfg.initial.kind != "gauss" &&
      cfg.initial.kind != "zero" && cfg.initial.kind != "file")
    throw ConfigError("/initial/kind", "expected one of h0|gauss|zero|file");
  cfg.initial.amp = num_at(ji, "/initial", "amp", 1.0);
  cfg.initial.width = num_at(ji, "/initial", "width", 1.0);
  require_positive(cfg.initial.width, "/initial/width");
  cfg.initial.center = vec_at(ji, "/initial", "center", cfg.d, {0.0, 0.0, 0.0});
  cfg.initial.path = str_at(ji, "/initial", "path", "");
  if (cfg.initial.kind == "file" && cfg.initial.path.empty())
    throw ConfigError("/initial/path", "required for kind \"file\"");

  if (root.contains("solver")) {
    const json& js = root.at("solver");
    expect_object(js, "/solver");
    reject_unknown(js, "/solver",
                   {"mu", "p", "dt", "t_end", "order", "potential", "v", "stark_e",
                    "picard_tol", "picard_max", "grad_factor", "dt_min",
                    "energy_defect_tol", "tail_tol"});
    SolverConfig& s = cfg.solver;
    s.mu = int_at(js, "/solver", "mu", s.mu);
    if (s.mu < -1 || s.mu > 1) throw ConfigError("/solver/mu", "expected -1, 0 or 1");
    s.p = num_at(js, "/solver", "p", s.p);
    require_positive(s.p, "/solver/p");
    s.dt = num_at(js, "/solver", "dt", s.dt);
    require_positive(s.dt, "/solver/dt");
    s.t_end = num_at(js, "/solver", "t_end", s.t_end);
    require_positive(s.t_end, "/solver/t_end");
    s.order = int_at(js, "/solver", "order", s.order);
    if (s.order != 1 && s.order != 2) throw ConfigError("/solver/order", "expected 1 or 2");
    std::string pot = str_at(js, "/solver", "potential", "harmonic");
    if (pot == "harmonic") s.potential = PotentialKind::Harmonic;
    else if (pot == "bounded") s.potential = PotentialKind::Bounded;
    else if (pot == "stark") s.potential = PotentialKind::Stark;
    else throw ConfigError("/solver/potential", "expected one of harmonic|bounded|stark");
    if (js.contains("v")) parse_potential_spec(js.at("v"), "/solver/v", cfg.bounded_v);
    s.stark_e = vec_at(js, "/solver", "stark_e", cfg.d, s.stark_e);
    s.picard_tol = num_at(js, "/solver", "picard_tol", s.picard_tol);
    s.picard_max = int_at(js, "/solver", "picard_max", s.picard_max);
    s.grad_factor = num_at(js, "/solver", "grad_factor", s.grad_factor);
    s.dt_min = num_at(js, "/solver", "dt_min", s.dt_min);
    s.energy_defect_tol = num_at(js, "/solver", "energy_defect_tol", s.energy_defect_tol);
    s.tail_tol = num_at(js, "/solver", "tail_tol", s.tail_tol);
  }

  if (root.contains("output")) {
    const json& jo = root.at("output");
    expect_object(jo, "/output");
    reject_unknown(jo, "/output", {"dir", "checkpoint_every"});
    cfg.out_dir = str_at(jo, "/output", "dir", cfg.out_dir);
    cfg.checkpoint_every = num_at(jo, "/output", "checkpoint_every", 0.0);
    if (cfg.checkpoint_every < 0.0)
      throw ConfigError("/output/checkpoint_every", "must be >= 0");
  }

  if (root.contains("diagnostics")) {
    const json& jd = root.at("diagnostics");
    expect_object(jd, "/diagnostics");
    reject_unknown(jd, "/diagnostics", {"virial", "strichartz"});
    cfg.diag_virial = bool_at(jd, "/diagnostics", "virial", cfg.diag_virial);
    cfg.diag_strichartz = bool_at(jd, "/diagnostics", "strichartz", cfg.diag_strichartz);
  }

  cfg.suite = str_at(root, "", "suite", cfg.suite);
  if (cfg.suite != "core" && cfg.suite != "spectral" && cfg.suite != "profiles" &&
      cfg.suite != "all")
    throw ConfigError("/suite", "expected one of core|spectral|profiles|all");

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("/", "cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

Field build_initial(const RunConfig& cfg) {
  Grid g = cfg.grid();
  const InitialSpec& spec = cfg.initial;
  if (spec.kind == "zero") return Field(g);
  if (spec.kind == "file") {
    Field f = read_field(spec.path);
    if (f.grid != g)
      throw ConfigError("/initial/path", "field grid does not match /grid");
    return f;
  }
  if (spec.kind == "h0") {
    double norm = std::pow(M_PI, -0.25 * g.d);
    return sample_function(g, [&](const std::array<double, 3>& x) {
      double r2 = 0.0;
      for (int a = 0; a < g.d; ++a) r2 += x[a] * x[a];
      return cplx(spec.amp * norm * std::exp(-0.5 * r2), 0.0);
    });
  }
  return sample_function(g, [&](const std::array<double, 3>& x) {  // gauss
    double q = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double dz = x[a] - spec.center[a];
      q += dz * dz;
    }
    return cplx(spec.amp * std::exp(-0.5 * q / (spec.width * spec.width)), 0.0);
  });
}

Field build_bounded_potential(const RunConfig& cfg) {
  Grid g = cfg.grid();
  const PotentialSpec& spec = cfg.bounded_v;
  if (spec.kind == "zero") return Field(g);
  if (spec.kind == "file") {
    Field f = read_field(spec.path);
    if (f.grid != g) throw ConfigError("/solver/v/path", "field grid does not match /grid");
    return f;
  }
  // capped_sin: V(x) = amp * clamp(sum_a sin(x_a), -cap, cap).
  return sample_function(g, [&](const std::array<double, 3>& x) {
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) s += std::sin(x[a]);
    return cplx(spec.amp * std::clamp(s, -spec.cap, spec.cap), 0.0);
  });
}

void write_series_csv(const std::string& path, const DiagnosticsSeries& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_series_csv: cannot open " + path);
  os << kCsvHeader << "\n";
  char buf[512];
  for (const DiagnosticsRow& r : s.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass,
                  r.energy, r.e_delta, r.sigma_norm, r.sup_norm, r.virial_f,
                  r.strichartz_cum);
    os << buf;
  }
  if (!os) throw std::runtime_error("write_series_csv: write failed for " + path);
}

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(2) << "\n";
}

std::string join_argv(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// Manifest goes out before any numerics: command line, a hash of the inputs,
// format versions, and the grid validity checks.
void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& hashed, const Grid* g) {
  json m;
  m["command"] = command;
  m["config_hash"] = config_hash(hashed);
  m["versions"] = {{"nlshosc", kVersion}, {"nlsh1_format", 1}, {"csv_header", kCsvHeader}};
  if (g) {
    m["grid_checks"] = {{"d", g->d},
                        {"L", g->L},
                        {"n", g->n},
                        {"dx", g->dx()},
                        {"nyquist", M_PI * (g->n / 2) / g->L},
                        {"mode_cap", g->n / 4},
                        {"power_of_two", true}};
  }
  write_json(dir + "/manifest.json", m);
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BlowupDetected: return "blowup_detected";
    default: return "step_underflow";
  }
}

json row_json(const DiagnosticsRow& r) {
  return json{{"t", r.t},           {"mass", r.mass},
              {"energy", r.energy}, {"e_delta", r.e_delta},
              {"sigma_norm", r.sigma_norm}, {"sup_norm", r.sup_norm},
              {"virial_f", r.virial_f}, {"strichartz_cum", r.strichartz_cum}};
}

int fail_with_diagnostic(const std::string& path, const std::string& what,
                         const EvolutionResult* res) {
  json d;
  d["error"] = what;
  if (res) {
    d["status"] = status_name(res->status);
    d["t_reached"] = res->t_reached;
    if (!res->series.rows.empty()) d["last_row"] = row_json(res->series.rows.back());
  }
  try {
    write_json(path, d);
  } catch (...) {
  }
  std::cerr << "error: " << what << " (diagnostic: " << path << ")\n";
  return 3;
}

struct Check {
  std::string name;
  std::function<bool()> fn;
};

Field gauss_field(const Grid& g, double width, double center) {
  return sample_function(g, [&](const std::array<double, 3>& x) {
    double q = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double dz = x[a] - center;
      q += dz * dz;
    }
    return cplx(std::exp(-0.5 * q / (width * width)), 0.0);
  });
}

Field h0_field(const Grid& g) {
  double norm = std::pow(M_PI, -0.25 * g.d);
  return sample_function(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) r2 += x[a] * x[a];
    return cplx(norm * std::exp(-0.5 * r2), 0.0);
  });
}

double rel_l2(const Field& a, const Field& b) {
  return l2_norm(a - b) / l2_norm(b);
}

std::vector<Check> core_checks() {
  return {
      {"h0 eigenphase",
       [] {
         Grid g(1, 16.0, 256);
         Field u = h0_field(g);
         Field ref = std::polar(1.0, -0.5 * 1.0) * u;
         return rel_l2(harmonic_propagate(u, 1.0), ref) < 1e-8;
       }},
      {"half-period parity",
       [] {
         Grid g(1, 16.0, 256);
         Field f = gauss_field(g, 1.3, 0.7);
         Field lhs = harmonic_propagate(f, M_PI);
         Field rhs = std::polar(1.0, -0.5 * M_PI) * parity(f);
         return l2_norm(lhs - rhs) < 1e-6;
       }},
      {"quadratic-form identity",
       [] {
         Grid g(1, 16.0, 256);
         Field f = gauss_field(g, 1.1, 0.4);
         BasisPtr basis = make_basis(g, 64);
         Field hf = apply_spectral_multiplier(f, [](double l) { return std::sqrt(l); },
                                              basis);
         double lhs = l2_norm(hf) * l2_norm(hf);
         double s = sigma_norm(f);
         return std::abs(lhs - 0.5 * s * s) / (0.5 * s * s) < 1e-8;
       }},
      {"observable identity",
       [] {
         Grid g(1, 16.0, 256);
         Field f = gauss_field(g, 1.0, 0.5);
         ObservableReport rep = heisenberg_observables(f, 1.0);
         double s = sigma_norm(f);
         return std::abs(rep.sigma_gap) / (s * s) < 1e-7;
       }},
      {"conservation (defocusing)",
       [] {
         Grid g(1, 16.0, 256);
         SolverConfig cfg;
         cfg.mu = 1;
         cfg.dt = 1e-3;
         cfg.t_end = 0.25;
         EvolutionResult r = evolve(gauss_field(g, 1.0, 0.0), cfg);
         if (r.status != RunStatus::Completed) return false;
         double m0 = r.series.rows.front().mass, e0 = r.series.rows.front().energy;
         double dm = 0.0, de = 0.0;
         for (const auto& row : r.series.rows) {
           dm = std::max(dm, std::abs(row.mass - m0) / m0);
           de = std::max(de, std::abs(row.energy - e0) / std::abs(e0));
         }
         return dm < 1e-10 && de < 1e-6;
       }},
      {"NLSH1 round trip",
       [] {
         Grid g(1, 16.0, 64);
         Field f = gauss_field(g, 0.9, 0.3);
         for (std::size_t i = 0; i < f.size(); ++i) f[i] *= cplx(0.3, 1.7);
         auto path = std::filesystem::temp_directory_path() / "nlsh_verify_rt.nlsh";
         write_field(path.string(), f);
         Field back = read_field(path.string());
         std::filesystem::remove(path);
         if (back.grid != f.grid) return false;
         return std::memcmp(back.values.data(), f.values.data(),
                            f.size() * sizeof(cplx)) == 0;
       }},
  };
}

std::vector<Check> spectral_checks() {
  return {
      {"Hermite orthonormality",
       [] {
         return make_basis(Grid(1, 16.0, 256), 64)->orthonormality_defect() < 1e-8;
       }},
      {"lens vs Hermite",
       [] {
         Grid g(1, 16.0, 256);
         Field f = gauss_field(g, 1.0, 0.2);
         BasisPtr basis = make_basis(g, 64);
         double t = 1.0;
         Field viah = apply_spectral_multiplier_complex(
             f, [t](double l) { return std::polar(1.0, -l * t); }, basis);
         return l2_norm(harmonic_propagate(f, t) - viah) / l2_norm(f) < 1e-7;
       }},
      {"lens vs Mehler",
       [] {
         Grid g(1, 16.0, 256);
         Field f = gauss_field(g, 1.0, 0.2);
         return rel_l2(harmonic_propagate(f, 1.0), mehler_apply_oracle(f, 1.0)) < 1e-4;
       }},
      {"dispersive bound",
       [] {
         Grid g(1, 16.0, 256);
         Field f = gauss_field(g, 1.0, 0.0);
         double cap = std::pow(2.0 * M_PI, -0.5) * 1.05;
         for (double r : dispersive_ratio(f, {0.3, 0.8, 1.3, 2.1, 2.9}))
           if (r > cap) return false;
         return true;
       }},
  };
}

std::vector<Check> profile_checks() {
  return {
      {"frame orthogonality score",
       [] {
         Frame a = concentrating_frame(0.0, {0.0, 0.0, 0.0}, 4, 1);
         Frame b = concentrating_frame(0.0, {0.0, 0.0, 0.0}, 8, 1);
         OrthogonalityReport rep = frames_orthogonal(a, b);
         return std::abs(rep.score - 2.5) < 1e-12 && !rep.orthogonal;
       }},
      {"frame round trip",
       [] {
         Grid g(1, 16.0, 2048);
         Field phi = sample_function(g, [](const std::array<double, 3>& x) {
           return cplx(std::exp(-0.5 * x[0] * x[0]), 0.0);
         });
         Frame fr = concentrating_frame(0.3, {0.5, 0.0, 0.0}, 4, 1);
         Field back = frame_unapply(fr, frame_apply(fr, phi));
         Field expect(g);
         double ratio = static_cast<double>(fr.Nprime) / fr.N;
         for (std::size_t i = 0; i < g.size(); ++i) {
           double y = g.coord(g.unflatten(i)[0]);
           expect[i] = phi[i] * smooth_bump(std::abs(ratio * y));
         }
         double sup = 0.0;
         for (std::size_t i = 0; i < g.size(); ++i)
           sup = std::max(sup, std::abs(back[i] - expect[i]));
         return sup < 1e-6;
       }},
      {"plant and recover",
       [] {
         Grid g(1, 16.0, 512);
         Field phi = sample_function(g, [](const std::array<double, 3>& x) {
           return cplx(std::exp(-0.5 * x[0] * x[0]), 0.0);
         });
         Frame fr = concentrating_frame(0.5, {0.5, 0.0, 0.0}, 8, 1);
         Field planted = frame_apply(fr, phi);
         auto item = extract_bubble(planted, 0.0, 1.0, 0.05);
         if (!item) return false;
         bool n_ok = item->frame.N >= 4 && item->frame.N <= 16;
         bool x_ok = std::abs(item->frame.x0[0] - 0.5) <= 2.0 / 8.0;
         return n_ok && x_ok;
       }},
  };
}

int cmd_verify(const std::string& suite, const std::string& out_dir,
               const std::string& command) {
  std::filesystem::create_directories(out_dir);
  write_manifest(out_dir, command, "suite:" + suite, nullptr);
  std::vector<Check> checks;
  auto append = [&](std::vector<Check> v) {
    for (auto& c : v) checks.push_back(std::move(c));
  };
  if (suite == "core" || suite == "all") append(core_checks());
  if (suite == "spectral" || suite == "all") append(spectral_checks());
  if (suite == "profiles" || suite == "all") append(profile_checks());

  json failures = json::array();
  for (const Check& c : checks) {
    bool ok = false;
    std::string err;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      err = e.what();
    }
    std::cout << (ok ? "[pass] " : "[FAIL] ") << c.name
              << (err.empty() ? "" : " (" + err + ")") << "\n";
    if (!ok) failures.push_back(c.name + (err.empty() ? "" : ": " + err));
  }
  if (!failures.empty()) {
    write_json(out_dir + "/verify_diagnostic.json",
               json{{"suite", suite}, {"failures", failures}});
    return 3;
  }
  return 0;
}

int cmd_bench(const std::vector<int>& sizes) {
  std::printf("%8s %14s %14s\n", "n", "lens_ms", "strang_ms");
  for (int n : sizes) {
    Grid g(1, 16.0, n);
    Field u = gauss_field(g, 1.0, 0.0);
    SolverConfig cfg;
    auto time_of = [&](const std::function<void()>& op) {
      op();  // warm-up (FFTW plan)
      auto t0 = std::chrono::steady_clock::now();
      int reps = 5;
      for (int i = 0; i < reps; ++i) op();
      auto t1 = std::chrono::steady_clock::now();
      return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
    };
    double lens = time_of([&] { (void)harmonic_propagate(u, 0.7); });
    double strang = time_of([&] { (void)strang_step(u, cfg, 1e-3); });
    std::printf("%8d %14.3f %14.3f\n", n, lens, strang);
  }
  return 0;
}

int cmd_evolve(const std::string& config_path, const std::string& out_override,
               const std::string& command) {
  RunConfig cfg = load_run_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  std::filesystem::create_directories(cfg.out_dir);
  Grid g = cfg.grid();
  std::ifstream is(config_path);
  std::stringstream ss;
  ss << is.rdbuf();
  write_manifest(cfg.out_dir, command, ss.str(), &g);

  EvolutionResult res;
  try {
    Field u0 = build_initial(cfg);
    SolverConfig solver = cfg.solver;
    if (solver.potential == PotentialKind::Bounded)
      solver.bounded_v = build_bounded_potential(cfg);

    if (cfg.checkpoint_every > 0.0 && cfg.checkpoint_every < solver.t_end) {
      double total = solver.t_end, t_off = 0.0, s_off = 0.0;
      int k = 0;
      res.field = u0;
      while (t_off < total - 1e-12) {
        SolverConfig chunk = solver;
        chunk.t_end = std::min(cfg.checkpoint_every, total - t_off);
        EvolutionResult r = evolve(res.field, chunk);
        for (DiagnosticsRow row : r.series.rows) {
          if (t_off > 0.0 && row.t == 0.0) continue;
          row.t += t_off;
          row.strichartz_cum += s_off;
          res.series.rows.push_back(row);
        }
        res.field = r.field;
        res.status = r.status;
        res.t_reached = t_off + r.t_reached;
        t_off += r.t_reached;
        s_off = res.series.rows.empty() ? 0.0 : res.series.rows.back().strichartz_cum;
        write_field(cfg.out_dir + "/checkpoint_" + std::to_string(k++) + ".nlsh",
                    r.field);
        if (r.status != RunStatus::Completed) break;
      }
    } else {
      res = evolve(u0, solver);
    }

    write_series_csv(cfg.out_dir + "/series.csv", res.series);
    write_field(cfg.out_dir + "/final.nlsh", res.field);
    json report;
    report["status"] = status_name(res.status);
    report["t_reached"] = res.t_reached;
    report["rows"] = res.series.rows.size();
    write_json(cfg.out_dir + "/report.json", report);

    if (cfg.diag_virial) {
      json v;
      v["t"] = json::array();
      v["virial_f"] = json::array();
      for (const auto& row : res.series.rows) {
        v["t"].push_back(row.t);
        v["virial_f"].push_back(row.virial_f);
      }
      write_json(cfg.out_dir + "/virial.json", v);
    }
    if (cfg.diag_strichartz) {
      write_json(cfg.out_dir + "/strichartz.json",
                 json{{"exponent", strichartz_exponent(g.d)},
                      {"total", res.series.rows.empty()
                                    ? 0.0
                                    : res.series.rows.back().strichartz_cum}});
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    return fail_with_diagnostic(cfg.out_dir + "/diagnostic.json", e.what(), &res);
  }
  if (res.status != RunStatus::Completed)
    return fail_with_diagnostic(cfg.out_dir + "/diagnostic.json",
                                std::string("run halted: ") + status_name(res.status),
                                &res);
  return 0;
}

int cmd_propagate(const std::string& input, double t, const std::string& method,
                  const std::string& out, const std::string& command) {
  if (!std::filesystem::exists(input))
    throw ConfigError("/input", "no such file: " + input);
  Field f = read_field(input);
  std::filesystem::path outp(out);
  std::string dir = outp.has_parent_path() ? outp.parent_path().string() : ".";
  std::filesystem::create_directories(dir);
  write_manifest(dir, command, input + "@" + method, &f.grid);
  try {
    Field g;
    if (method == "lens") {
      g = harmonic_propagate(f, t);
    } else if (method == "hermite") {
      int cap = std::min(f.grid.n / 4,
                         static_cast<int>(((f.grid.L - 4.0) * (f.grid.L - 4.0) - 1.0) / 2.0));
      BasisPtr basis = make_basis(f.grid, cap);
      g = apply_spectral_multiplier_complex(
          f, [t](double l) { return std::polar(1.0, -l * t); }, basis);
    } else {
      g = mehler_apply_oracle(f, t);
    }
    write_field(out, g);
  } catch (const std::exception& e) {
    return fail_with_diagnostic(dir + "/diagnostic.json", e.what(), nullptr);
  }
  return 0;
}

int cmd_decompose(const std::string& input, int levels, double eps, double t0, double t1,
                  const std::string& out_dir, const std::string& command) {
  if (!std::filesystem::exists(input))
    throw ConfigError("/input", "no such file: " + input);
  Field f = read_field(input);
  std::filesystem::create_directories(out_dir);
  write_manifest(out_dir, command, input, &f.grid);
  try {
    Decomposition dec = profile_decompose(f, levels, eps, t0, t1);
    DecouplingReport audit = decoupling_audit(f, dec.items, dec.remainder);

    json report;
    report["profiles"] = json::array();
    for (std::size_t j = 0; j < dec.items.size(); ++j) {
      const ProfileItem& it = dec.items[j];
      std::vector<double> x0(it.frame.x0.begin(), it.frame.x0.begin() + f.grid.d);
      report["profiles"].push_back(json{{"t", it.frame.t},
                                        {"x0", x0},
                                        {"N", it.frame.N},
                                        {"Nprime", it.frame.Nprime},
                                        {"sigma_share", it.sigma_share}});
      write_field(out_dir + "/profile_" + std::to_string(j) + ".nlsh", it.phi);
    }
    report["defects"] = {{"sigma", audit.sigma_defect},
                         {"lq", audit.lq_defect},
                         {"lq_exponent", audit.lq_exponent}};
    report["remainder"] = {{"l2", l2_norm(dec.remainder)},
                           {"sigma", sigma_norm(dec.remainder)}};
    write_json(out_dir + "/report.json", report);
    write_field(out_dir + "/remainder.nlsh", dec.remainder);
  } catch (const std::exception& e) {
    return fail_with_diagnostic(out_dir + "/diagnostic.json", e.what(), nullptr);
  }
  return 0;
}

int cmd_blowup(const std::string& config_path, const std::string& out_override,
               const std::string& command) {
  RunConfig cfg = load_run_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  std::filesystem::create_directories(cfg.out_dir);
  Grid g = cfg.grid();
  std::ifstream is(config_path);
  std::stringstream ss;
  ss << is.rdbuf();
  write_manifest(cfg.out_dir, command, ss.str(), &g);

  EvolutionResult res;
  try {
    Field u0 = build_initial(cfg);
    SolverConfig solver = cfg.solver;

    TrappingReport trap = energy_trapping_classify(u0);

    // Virial certificate from uniform short-time snapshots at the base dt.
    std::vector<Field> snaps{u0};
    std::vector<double> times{0.0};
    Field u = u0;
    for (int i = 1; i <= 6; ++i) {
      u = strang_step(u, solver, solver.dt);
      snaps.push_back(u);
      times.push_back(i * solver.dt);
    }
    VirialReport virial = virial_diagnostics(snaps, times, solver.mu, solver.p);

    res = evolve(u0, solver);
    write_series_csv(cfg.out_dir + "/series.csv", res.series);
    write_field(cfg.out_dir + "/final.nlsh", res.field);

    const char* cls = trap.cls == TrappingClass::TrappedBelow   ? "trapped_below"
                      : trap.cls == TrappingClass::TrappedAbove ? "trapped_above"
                                                                : "outside_hypotheses";
    json report;
    report["status"] = status_name(res.status);
    report["t_reached"] = res.t_reached;
    report["trapping"] = {{"class", cls},
                          {"delta0", trap.delta0},
                          {"energy", trap.energies.energy},
                          {"gradnorm", trap.energies.gradnorm}};
    report["certificate"] = {{"valid", virial.certificate.valid},
                             {"A", virial.certificate.A},
                             {"B", virial.certificate.B},
                             {"C", virial.certificate.C},
                             {"root", virial.certificate.root}};
    report["virial_max_mismatch"] = virial.max_mismatch;
    write_json(cfg.out_dir + "/report.json", report);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    return fail_with_diagnostic(cfg.out_dir + "/diagnostic.json", e.what(), &res);
  }
  if (res.status != RunStatus::BlowupDetected)
    return fail_with_diagnostic(
        cfg.out_dir + "/diagnostic.json",
        std::string("no blowup detected: run ") + status_name(res.status), &res);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"nlsh: spectral NLS engine with harmonic confinement"};
  app.require_subcommand(1);

  std::string config_path, out, input, method = "lens", suite = "core";
  double t = 1.0, eps = 0.05, t0 = 0.0, t1 = 1.0;
  int levels = 3;
  std::vector<int> sizes{256, 1024, 4096};

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "Run the NLS flow from a config");
  evolve_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  evolve_cmd->add_option("--out", out, "Output directory (overrides config)");

  CLI::App* prop_cmd = app.add_subcommand("propagate", "Apply the linear propagator");
  prop_cmd->add_option("--input", input, "NLSH1 input field")->required();
  prop_cmd->add_option("--t", t, "Propagation time")->required();
  prop_cmd->add_option("--method", method, "Propagator backend")
      ->check(CLI::IsMember({"lens", "hermite", "mehler"}));
  prop_cmd->add_option("--out", out, "NLSH1 output field")->required();

  CLI::App* dec_cmd = app.add_subcommand("decompose", "Profile decomposition");
  dec_cmd->add_option("--input", input, "NLSH1 input field")->required();
  dec_cmd->add_option("--levels", levels, "Maximum number of extracted profiles");
  dec_cmd->add_option("--eps", eps, "Extraction threshold");
  dec_cmd->add_option("--t0", t0, "Scan window start");
  dec_cmd->add_option("--t1", t1, "Scan window end");
  dec_cmd->add_option("--out", out, "Output directory")->required();

  CLI::App* blow_cmd =
      app.add_subcommand("blowup", "Focusing run with trapping and certificate");
  blow_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  blow_cmd->add_option("--out", out, "Output directory (overrides config)");

  CLI::App* ver_cmd = app.add_subcommand("verify", "Run an invariant suite");
  ver_cmd->add_option("--suite", suite, "Suite to run")
      ->check(CLI::IsMember({"core", "spectral", "profiles", "all"}));
  ver_cmd->add_option("--out", out, "Manifest/diagnostic directory");

  CLI::App* bench_cmd = app.add_subcommand("bench", "Propagator timing table");
  bench_cmd->add_option("--sizes", sizes, "Grid sizes n")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command = join_argv(argc, argv);
  try {
    if (evolve_cmd->parsed()) return cmd_evolve(config_path, out, command);
    if (prop_cmd->parsed()) return cmd_propagate(input, t, method, out, command);
    if (dec_cmd->parsed()) return cmd_decompose(input, levels, eps, t0, t1, out, command);
    if (blow_cmd->parsed()) return cmd_blowup(config_path, out, command);
    if (ver_cmd->parsed()) return cmd_verify(suite, out.empty() ? "." : out, command);
    if (bench_cmd->parsed()) return cmd_bench(sizes);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace nlsh
