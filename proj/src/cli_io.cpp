#include "fbns/cli_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fbns/error.hpp"
#include "fbns/kinematics.hpp"
#include "fbns/verification.hpp"

namespace fbns {
namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& v, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(x))
    throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not a finite number");
  return x;
}

int to_int(const std::string& v, int line) {
  const double x = to_real(v, line);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("line " + std::to_string(line) + ": '" + v + "' is not a boolean");
}

Scheme to_scheme(const std::string& v, int line) {
  if (v == "cn" || v == "crank_nicolson") return Scheme::crank_nicolson;
  if (v == "be" || v == "backward_euler") return Scheme::backward_euler;
  throw ParseError("line " + std::to_string(line) + ": unknown scheme '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = [] {
    std::map<std::string, Setter> m;
    auto real = [&](const char* key, double RunConfig::*f) {
      m[key] = [f](RunConfig& c, const std::string& v, int l) { c.*f = to_real(v, l); };
    };
    auto integer = [&](const char* key, int RunConfig::*f) {
      m[key] = [f](RunConfig& c, const std::string& v, int l) { c.*f = to_int(v, l); };
    };
    auto text = [&](const char* key, std::string RunConfig::*f) {
      m[key] = [f](RunConfig& c, const std::string& v, int) { c.*f = v; };
    };
    auto phys = [&](const char* key, double PhysParams::*f) {
      m[key] = [f](RunConfig& c, const std::string& v, int l) { c.physics.*f = to_real(v, l); };
    };
    integer("grid.n1", &RunConfig::n1);
    integer("grid.n2", &RunConfig::n2);
    integer("grid.n3", &RunConfig::n3);
    integer("basis.m", &RunConfig::m);
    phys("physics.mu", &PhysParams::mu);
    phys("physics.lambda", &PhysParams::lambda);
    phys("physics.kappa", &PhysParams::kappa);
    phys("physics.R", &PhysParams::R);
    phys("physics.c_v", &PhysParams::c_v);
    phys("physics.gamma", &PhysParams::gamma);
    phys("physics.A_bar", &PhysParams::A_bar);
    text("density.profile", &RunConfig::density);
    real("density.alpha", &RunConfig::alpha);
    real("density.amplitude", &RunConfig::density_amplitude);
    real("density.value", &RunConfig::density_value);
    text("temperature.profile", &RunConfig::temperature);
    real("temperature.scale", &RunConfig::temperature_scale);
    text("velocity.profile", &RunConfig::velocity);
    real("velocity.amplitude", &RunConfig::velocity_amplitude);
    m["data.bypass"] = [](RunConfig& c, const std::string& v, int l) { c.bypass = to_bool(v, l); };
    m["time.T"] = [](RunConfig& c, const std::string& v, int l) { c.time.T = to_real(v, l); };
    m["time.n_steps"] = [](RunConfig& c, const std::string& v, int l) { c.time.n_steps = to_int(v, l); };
    m["time.scheme"] = [](RunConfig& c, const std::string& v, int l) { c.time.scheme = to_scheme(v, l); };
    real("picard.tol", &RunConfig::tol);
    integer("picard.max_iter", &RunConfig::max_iter);
    text("output.directory", &RunConfig::output_dir);
    integer("output.snapshot_stride", &RunConfig::snapshot_stride);
    m["study.n_steps"] = [](RunConfig& c, const std::string& v, int l) { c.study.n_steps = to_int(v, l); };
    m["study.amplitude"] = [](RunConfig& c, const std::string& v, int l) { c.study.amplitude = to_real(v, l); };
    m["study.decay"] = [](RunConfig& c, const std::string& v, int l) { c.study.decay = to_real(v, l); };
    m["study.pairs"] = [](RunConfig& c, const std::string& v, int l) { c.study.pairs = to_int(v, l); };
    m["study.seed"] = [](RunConfig& c, const std::string& v, int l) {
      const int s = to_int(v, l);
      if (s < 0) throw ParseError("line " + std::to_string(l) + ": seed must be non-negative");
      c.study.seed = static_cast<unsigned>(s);
    };
    m["study.horizons"] = [](RunConfig& c, const std::string& v, int l) {
      try {
        c.horizons = parse_list(v);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(l) + ": " + e.message());
      }
    };
    return m;
  }();
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw FormatError("write to '" + path + "' failed");
}

std::string join(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// JSON numbers must be finite; NaN and infinities become null.
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    const char* begin = t.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (t.empty() || *end != '\0' || !std::isfinite(x)) throw ParseError("'" + t + "' is not a number in list '" + text + "'");
    out.push_back(x);
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("line " + std::to_string(line) + ": empty key or value");
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    it->second(c, value, line);
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
  try {
    c.physics.validate();
    c.time.validate();
  } catch (const InvalidParameter& e) {
    throw ValidationError(e.message());
  }
  try {
    build_basis(c.grid(), c.m);
  } catch (const InvalidResolution& e) {
    throw ValidationError(e.message());
  }
  require(c.density == "power" || c.density == "uniform", "density.profile must be power or uniform");
  require(c.temperature == "distance" || c.temperature == "sine" || c.temperature == "zero",
          "temperature.profile must be distance, sine or zero");
  require(c.velocity == "zero" || c.velocity == "shear" || c.velocity == "linear",
          "velocity.profile must be zero, shear or linear");
  require(c.alpha > 0.0, "density.alpha must be positive");
  require(std::abs(c.density_amplitude) < 1.0, "density.amplitude must lie in (-1, 1)");
  require(c.density_value > 0.0, "density.value must be positive");
  require(c.tol > 0.0, "picard.tol must be positive");
  require(c.max_iter >= 1, "picard.max_iter must be at least 1");
  require(c.snapshot_stride >= 0, "output.snapshot_stride must be non-negative");
  require(!c.output_dir.empty(), "output.directory must not be empty");
  require(c.study.n_steps >= 1, "study.n_steps must be at least 1");
  require(c.study.pairs >= 1, "study.pairs must be at least 1");
  require(c.study.amplitude >= 0.0, "study.amplitude must be non-negative");
  for (double h : c.horizons) require(h > 0.0, "study.horizons must be positive");
}

InitialData build_initial_data(const RunConfig& c) {
  const GridSpec g = c.grid();
  InitialData d{Field(g, 1), Field(g, 3), Field(g, 1), c.alpha};
  if (c.density == "power") {
    const double a = c.density_amplitude;
    d.rho0 = build_density(g, c.alpha, [a](double x1, double x2, double) {
               return 1.0 + a * std::cos(2 * pi * x1) * std::cos(2 * pi * x2);
             }).rho0;
  } else {
    d.rho0 = Field::constant(g, 1, c.density_value);
  }
  const double s = c.temperature_scale;
  if (c.temperature == "distance") {
    d.theta0 = build_temperature(g, [s](double, double, double x3) { return s * x3 * (1 - x3); }).theta0;
  } else if (c.temperature == "sine") {
    d.theta0 = build_temperature(g, [s](double, double, double x3) { return s * std::sin(pi * x3); }).theta0;
  }
  const double u = c.velocity_amplitude;
  if (c.velocity == "shear") {
    d.u0 = Field::sample(g, 3, [u](int k, double x1, double, double x3) {
      return k == 0 ? u * std::sin(2 * pi * x1) * x3 * x3 * (1 - x3) * (1 - x3) : 0.0;
    });
  } else if (c.velocity == "linear") {
    d.u0 = Field::sample(g, 3, [u](int k, double, double, double x3) { return k == 0 ? u * x3 : 0.0; });
  }
  if (!c.bypass) validate_initial_data(d);
  return d;
}

void write_snapshot(const std::string& path, const Field& f, const std::string& name, double time) {
  if (name.empty() || name.find_first_of(" \t\r\n=") != std::string::npos)
    throw FormatError("snapshot name '" + name + "' must be non-empty without spaces or '='");
  const GridSpec& g = f.grid();
  const std::size_t bytes = 8 * f.values().size();
  std::string out = "fbns-snapshot version=1 name=" + name + " n1=" + std::to_string(g.n1()) + " n2=" +
                    std::to_string(g.n2()) + " n3=" + std::to_string(g.n3()) +
                    " components=" + std::to_string(f.components()) + " time=" + format_real(time) +
                    " bytes=" + std::to_string(bytes) + "\n";
  const std::size_t head = out.size();
  out.resize(head + bytes);
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    std::uint64_t w = std::bit_cast<std::uint64_t>(f.values()[i]);
    for (int b = 0; b < 8; ++b) out[head + 8 * i + b] = static_cast<char>((w >> (8 * b)) & 0xff);
  }
  write_text(path, out);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open snapshot '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing snapshot header");
  std::stringstream ss(line);
  std::string magic;
  ss >> magic;
  if (magic != "fbns-snapshot") throw FormatError("not a snapshot header");
  std::map<std::string, std::string> kv;
  for (std::string tok; ss >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  SnapshotHeader h;
  auto get = [&](const char* k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw FormatError(std::string("header lacks '") + k + "'");
    return it->second;
  };
  try {
    h.version = std::stoi(get("version"));
    h.name = get("name");
    h.n1 = std::stoi(get("n1"));
    h.n2 = std::stoi(get("n2"));
    h.n3 = std::stoi(get("n3"));
    h.components = std::stoi(get("components"));
    h.time = std::stod(get("time"));
    h.payload_bytes = std::stoull(get("bytes"));
  } catch (const std::logic_error&) {
    throw FormatError("malformed snapshot header '" + line + "'");
  }
  if (h.version != 1) throw FormatError("unsupported snapshot version " + std::to_string(h.version));
  if (h.components < 1 || h.n1 < 1 || h.n2 < 1 || h.n3 < 1) throw FormatError("header dimensions must be positive");
  const std::size_t values = static_cast<std::size_t>(h.components) * h.n1 * h.n2 * h.n3;
  if (h.payload_bytes != 8 * values)
    throw FormatError("header length " + std::to_string(h.payload_bytes) + " does not match " + std::to_string(8 * values) +
                      " bytes of the stated dimensions");
  std::string payload(h.payload_bytes, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size())
    throw FormatError("truncated payload: " + std::to_string(in.gcount()) + " of " + std::to_string(payload.size()) + " bytes");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("payload longer than the header states");
  Snapshot s{h, Field(make_grid(h.n1, h.n2, h.n3), h.components)};
  auto v = s.field.values();
  for (std::size_t i = 0; i < values; ++i) {
    std::uint64_t w = 0;
    for (int b = 0; b < 8; ++b) w |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[8 * i + b])) << (8 * b);
    v[i] = std::bit_cast<double>(w);
  }
  return s;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<StepMonitor> monitor_trajectory(const Trajectory& t, const InitialData& data, const PhysParams& p,
                                            const DerivedInitials* di) {
  const std::vector<EnergyReport> energy = energy_series(t, data.rho0, di);
  std::vector<StepMonitor> rows;
  for (int n = 0; n <= t.steps(); ++n) {
    StepMonitor r;
    r.step = n;
    r.time = t.tg.time(n);
    r.E = energy[n].E;
    r.F_terms = energy[n].integrals;
    r.F = energy[n].F;
    r.M0 = energy[n].M0;
    const auto J = t.defm[n].J.values();
    r.j_min = *std::min_element(J.begin(), J.end());
    r.j_max = *std::max_element(J.begin(), J.end());
    r.piola_max = piola_residual(t.defm[n]).max_abs();
    try {
      const EntropyField s = entropy_field(t.Theta[n], eulerian_density(data.rho0, t.defm[n]), p);
      r.entropy_band_min = s.band_min;
      r.entropy_band_max = s.band_max;
    } catch (const NonPositiveState&) {
      r.entropy_band_min = r.entropy_band_max = nan();
    }
    const VacuumMonitor vm = vacuum_boundary_monitor(t.Theta[n]);
    r.grad_n_theta_min = vm.min;
    r.grad_n_theta_max = vm.max;
    rows.push_back(r);
  }
  return rows;
}

void write_energy_csv(const std::string& path, const std::vector<StepMonitor>& rows) {
  std::string out =
      "step,time,E_total,E_v_tt,E_v_t,E_v,E_theta_tt,E_theta_t,E_theta,"
      "F_total,F_v_tt,F_v_t,F_dbar_v,F_theta_tt,F_theta_t,F_dbar_theta,M0,j_min,j_max,piola_max,"
      "entropy_band_min,entropy_band_max,grad_n_theta_min,grad_n_theta_max\n";
  for (const StepMonitor& r : rows) {
    out += std::to_string(r.step);
    for (double x : {r.time, r.E.total(), r.E.v_tt, r.E.v_t, r.E.v, r.E.theta_tt, r.E.theta_t, r.E.theta, r.F,
                     r.F_terms.v_tt, r.F_terms.v_t, r.F_terms.dbar_v, r.F_terms.theta_tt, r.F_terms.theta_t,
                     r.F_terms.dbar_theta, r.M0, r.j_min, r.j_max, r.piola_max, r.entropy_band_min, r.entropy_band_max,
                     r.grad_n_theta_min, r.grad_n_theta_max})
      out += "," + format_real(x);
    out += "\n";
  }
  write_text(path, out);
}

void write_iteration_csv(const std::string& path, const IterationReport& r) {
  std::string out = "iter,vt_distance,ratio\n";
  for (std::size_t k = 0; k < r.distances.size(); ++k) {
    out += std::to_string(k + 1) + "," + format_real(r.distances[k]) + ",";
    if (k >= 1) out += format_real(r.ratios[k - 1]);
    out += "\n";
  }
  write_text(path, out);
}

void write_contraction_csv(const std::string& path, const std::vector<ContractionRow>& rows) {
  std::string out = "T,ratio\n";
  for (const ContractionRow& r : rows) out += format_real(r.T) + "," + (r.ratio ? format_real(*r.ratio) : "") + "\n";
  write_text(path, out);
}

int exit_code_for(const Error& e) {
  static const char* config[] = {"ParseError",    "ValidationError",       "InvalidParameter",   "InvalidResolution",
                                 "DecayViolation", "VacuumConditionViolation", "PositivityViolation", "UnboundedDerivative"};
  for (const char* k : config)
    if (e.kind() == k) return kExitConfig;
  if (e.kind() == "NonContraction") return kExitNonContraction;
  return kExitNumerical;
}

namespace {

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

struct CheckList {
  std::vector<Check> items;
  std::ostream& log;
  // pass when value <= tol (or >= tol with at_least)
  void add(const std::string& name, double value, double tol, bool at_least = false) {
    const bool ok = std::isfinite(value) && (at_least ? value >= tol : value <= tol);
    items.push_back({name, value, tol, ok});
    log << (ok ? "PASS " : "FAIL ") << name << " = " << format_real(value) << (at_least ? " (>= " : " (<= ")
        << tol << ")\n";
  }
  void band(const std::string& name, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    items.push_back({name, value, hi, ok});
    log << (ok ? "PASS " : "FAIL ") << name << " = " << format_real(value) << " (in [" << lo << ", "
        << hi << "])\n";
  }
};

template <class Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    log << "error: " << e.what() << "\n";
    if (code == kExitNonContraction) log << "advice: the fixed-point map contracts only on short horizons; reduce time.T\n";
    return code;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int cmd_verify(const RunConfig& c, const std::string& out, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(c);
    ensure_directory(out);
    const GridSpec g = c.grid();
    const InitialData data = build_initial_data(c);
    const DerivedInitials di = initial_time_derivatives(data, c.physics, g);
    const CompatibilityReport compat = check_compatibility(data, di, c.physics);
    for (const std::string& w : compat.warnings) log << "warning: " << w << "\n";

    CheckList checks{{}, log};
    const PiolaStudy piola = piola_study(g, 5, 0.05, c.study.seed);
    checks.add("piola_max", piola.piola_max, 1e-8);
    checks.add("cofactor_max", piola.cofactor_max, 1e-8);
    checks.add("kinematic_rate", kinematic_study(g, 0.1, 10, c.study.seed), 1e-6);

    const auto s = hardy_nodes(12);
    checks.add("hardy_g1_k2", std::abs(hardy_check(std::vector<double>(12, 1.0), 2.0).ratio - 3.0), 1e-8);
    checks.add("hardy_gs_k0", std::abs(hardy_check(s, 0.0).ratio - 1.0), 1e-8);
    const GridSpec kg = make_grid(8, 8, 13);
    const Field v = Field::sample(kg, 3, [](int k, double, double, double x3) { return k == 0 ? x3 : 0.0; });
    checks.add("korn_x3", std::abs(korn_check(v, false).ratio - 4.0 / 7.0), 1e-8);

    PhysParams hp = c.physics;
    checks.add("heat_mode", heat_mode_error(make_grid(4, 4, 33), BasisOrders{1, 1, 12}, hp, 0.1, 1000), 1e-6);
    const ConvergenceSetup cs;
    const ConvergenceStudy mv = manufactured_velocity(cs, c.physics);
    checks.band("velocity_temporal_order", mv.temporal_order, 1.8, 2.2);
    checks.add("velocity_spatial_drop", mv.spatial_drop(), 10.0, true);
    const ConvergenceStudy mt = manufactured_temperature(cs, c.physics);
    checks.band("temperature_temporal_order", mt.temporal_order, 1.8, 2.2);
    checks.add("temperature_spatial_drop", mt.spatial_drop(), 10.0, true);

    nlohmann::json report;
    bool pass = true;
    for (const Check& k : checks.items) {
      report["checks"].push_back({{"name", k.name}, {"value", num(k.value)}, {"tolerance", k.tolerance}, {"pass", k.pass}});
      pass = pass && k.pass;
    }
    report["warnings"] = compat.warnings;
    report["compatibility"] = {{"theta0_trace", num(compat.theta0_trace)},
                               {"dbar_theta0_trace", num(compat.dbar_theta0_trace)},
                               {"dbar2_theta0_trace", num(compat.dbar2_theta0_trace)},
                               {"theta0t_trace", num(compat.theta0t_trace)},
                               {"stress_trace", num(compat.stress_trace)},
                               {"dbar_stress_trace", num(compat.dbar_stress_trace)},
                               {"pass", compat.pass}};
    report["M0"] = num(di.M0);
    report["pass"] = pass;
    write_text(join(out, "verify.json"), report.dump(2) + "\n");
    log << (pass ? "verify: all checks passed\n" : "verify: some checks failed\n");
    return pass ? kExitOk : kExitNumerical;
  });
}

int cmd_run(const RunConfig& c, const std::string& out, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(c);
    ensure_directory(out);
    const GridSpec g = c.grid();
    const InitialData data = build_initial_data(c);
    const DerivedInitials di = initial_time_derivatives(data, c.physics, g);
    const CompatibilityReport compat = check_compatibility(data, di, c.physics);
    for (const std::string& w : compat.warnings) log << "warning: " << w << "\n";
    const BasisSet b = build_basis(g, c.m);
    const FixedPointResult r = iterate_to_fixed_point(data, c.physics, b, c.time, c.tol, c.max_iter);
    const Trajectory& t = r.solution;
    const std::vector<StepMonitor> rows = monitor_trajectory(t, data, c.physics, &di);
    write_energy_csv(join(out, "energy.csv"), rows);
    write_iteration_csv(join(out, "iteration.csv"), r.report);

    if (c.snapshot_stride > 0) {
      const std::string dir = join(out, "snapshots");
      ensure_directory(dir);
      for (int n = 0; n <= t.steps(); ++n) {
        if (n % c.snapshot_stride != 0 && n != t.steps()) continue;
        char tag[16];
        std::snprintf(tag, sizeof tag, "%05d", n);
        const double time = t.tg.time(n);
        write_snapshot(join(dir, std::string("v_") + tag + ".snap"), t.v[n], "v", time);
        write_snapshot(join(dir, std::string("theta_") + tag + ".snap"), t.Theta[n], "theta", time);
        write_snapshot(join(dir, std::string("xi_") + tag + ".snap"), t.xi[n], "xi", time);
      }
    }

    const IterationReport& rep = r.report;
    double j_min = rows[0].j_min, j_max = rows[0].j_max, deta = 0.0;
    for (const AprioriRecord& a : rep.apriori) {
      j_min = std::min(j_min, a.check.j_min);
      j_max = std::max(j_max, a.check.j_max);
      deta = std::max(deta, a.check.deta_max);
    }
    nlohmann::json s;
    s["iterations"] = rep.iterations;
    s["converged"] = rep.converged;
    for (double d : rep.distances) s["distances"].push_back(num(d));
    for (double q : rep.ratios) s["ratios"].push_back(num(q));
    s["residuals"] = {{"momentum", num(rep.momentum_residual)},
                      {"temperature", num(rep.temperature_residual)},
                      {"weak_momentum", num(rep.weak_momentum_residual)},
                      {"weak_temperature", num(rep.weak_temperature_residual)},
                      {"kinematic", num(rep.kinematic_residual)}};
    s["apriori"] = {{"j_min", num(j_min)}, {"j_max", num(j_max)}, {"deta_max", num(deta)}};
    s["M0"] = num(di.M0);
    s["warnings"] = compat.warnings;
    write_text(join(out, "summary.json"), s.dump(2) + "\n");
    log << "run: converged in " << rep.iterations << " iterations, final V_T distance "
        << format_real(rep.distances.back()) << "\n";
    return kExitOk;
  });
}

int cmd_contraction_study(const RunConfig& c, const std::vector<double>& horizons, const std::string& out,
                          std::ostream& log) {
  return guarded(log, [&] {
    validate_config(c);
    require(!horizons.empty(), "the horizon list must not be empty");
    for (double h : horizons) require(h > 0.0, "horizons must be positive");
    std::vector<double> sorted = horizons;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "horizons must be distinct");
    ensure_directory(out);
    const GridSpec g = c.grid();
    const InitialData data = build_initial_data(c);
    const BasisSet b = build_basis(g, c.m);
    ContractionOptions opt = c.study;
    opt.scheme = c.time.scheme;
    const std::vector<ContractionRow> rows = contraction_study(data, c.physics, b, sorted, opt);
    // Rows in the order the horizons were given.
    std::vector<ContractionRow> ordered;
    for (double h : horizons)
      ordered.push_back(*std::find_if(rows.begin(), rows.end(), [h](const ContractionRow& r) { return r.T == h; }));
    write_contraction_csv(join(out, "contraction.csv"), ordered);
    for (const ContractionRow& r : ordered)
      log << "T = " << format_real(r.T) << "  ratio = " << (r.ratio ? format_real(*r.ratio) : "n/a") << "\n";
    return kExitOk;
  });
}

}  // namespace fbns
