// eit: command-line front end for the Cs D2 EIT simulator.
//
// Subcommands
//   spectrum         Doppler-averaged susceptibility / transmittance sweep
//   resonances       Autler-Townes resonance positions vs Doppler shift
//   pump             optically pumped velocity distribution (+ contrast report)
//   validate-config  parse and validate a config file, print derived values
//
// Configs are flat "key = value" files with [section] headers; any key can be
// overridden on the command line with --set section.key=value.  Output is CSV
// with a '#' metadata header (version, config hash, units note); data rows are
// byte-identical across reruns of the same config and binary version.
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eit/atomdata.hpp"
#include "eit/doppler.hpp"
#include "eit/parallel.hpp"
#include "eit/pumping.hpp"
#include "eit/resonance.hpp"
#include "eit/susceptibility.hpp"

namespace {

constexpr const char* kVersion = "eit 1.0.0";

using eit::susceptibility::LevelScheme;
using eit::susceptibility::Model;
using eit::atomdata::mhz_to_rad;
using eit::atomdata::rad_to_mhz;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config file: [section] + key = value, '#'/';' comments.
// ---------------------------------------------------------------------------

class Config {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = strip(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw ConfigError(path + ":" + std::to_string(lineno) +
                            ": malformed section header: " + s);
        section = strip(s.substr(1, s.size() - 2));
        if (section.empty())
          throw ConfigError(path + ":" + std::to_string(lineno) +
                            ": empty section name");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": expected key = value, got: " + s);
      const std::string key = strip(s.substr(0, eq));
      const std::string val = strip(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
      set(section.empty() ? key : section + "." + key, val);
    }
  }

  void set(const std::string& dotted_key, const std::string& value) {
    kv_[dotted_key] = value;
  }

  void apply_override(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects section.key=value, got: " + spec);
    set(strip(spec.substr(0, eq)), strip(spec.substr(eq + 1)));
  }

  [[nodiscard]] bool has(const std::string& key) const {
    return kv_.count(key) != 0;
  }
  [[nodiscard]] bool has_section(const std::string& section) const {
    const std::string prefix = section + ".";
    auto it = kv_.lower_bound(prefix);
    return it != kv_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
  }

  [[nodiscard]] std::string get_str(const std::string& key,
                                    const std::string& dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }
  [[nodiscard]] std::string require_str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required key: " + key);
    return it->second;
  }

  [[nodiscard]] double get_num(const std::string& key, double dflt) const {
    return has(key) ? parse_num(key, kv_.at(key)) : dflt;
  }
  [[nodiscard]] double require_num(const std::string& key) const {
    return parse_num(key, require_str(key));
  }
  [[nodiscard]] int get_int(const std::string& key, int dflt) const {
    const double v = get_num(key, dflt);
    if (v != static_cast<int>(v))
      throw ConfigError("key " + key + " must be an integer");
    return static_cast<int>(v);
  }
  [[nodiscard]] bool get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string v = kv_.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key " + key + " must be a boolean, got: " + v);
  }
  [[nodiscard]] std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(require_str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = strip(item);
      if (!item.empty()) out.push_back(parse_num(key, item));
    }
    if (out.empty()) throw ConfigError("key " + key + " lists no values");
    return out;
  }

  // Reject keys outside the schema so typos fail loudly instead of silently
  // using a default.
  void check_known(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : kv_)
      if (std::find(known.begin(), known.end(), k) == known.end())
        throw ConfigError("unknown config key: " + k);
  }

  // Canonical serialization (sorted keys) used for the config hash, so the
  // hash covers file content plus command-line overrides.  Output location
  // is excluded: it does not affect the computed data.
  [[nodiscard]] std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : kv_)
      if (k.compare(0, 7, "output.") != 0) out += k + "=" + v + "\n";
    return out;
  }

 private:
  static std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static double parse_num(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw ConfigError("key " + key + ": not a number: " + v);
    }
    if (pos != v.size())
      throw ConfigError("key " + key + ": trailing junk in number: " + v);
    return x;
  }

  std::map<std::string, std::string> kv_;
};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Schema and derived run parameters.
// ---------------------------------------------------------------------------

const std::vector<std::string> kKnownKeys = {
    "run.model",          "run.species",
    "run.omega_control_MHz", "run.delta_c_MHz",
    "run.gamma_D_MHz",    "run.temperature_K",
    "run.gamma_sg_over_gamma", "run.probe_rabi_over_gamma",
    "run.od_scale",       "run.velocity_nodes",
    "sweep.probe_lo_MHz", "sweep.probe_hi_MHz", "sweep.probe_steps",
    "pumping.omega_repump_MHz", "pumping.delta_repump_MHz",
    "pumping.omega_pump_over_gamma", "pumping.delta_pump_MHz",
    "pumping.tau_d_us",   "pumping.grid_nodes",
    "pumping.grid_half_width_MHz", "pumping.counter_propagating_repump",
    "pumping.contrast_report",
    "resonances.delta_D_list_MHz", "resonances.delta_D_lo_MHz",
    "resonances.delta_D_hi_MHz",   "resonances.delta_D_steps",
    "output.path",
};

struct Run {
  Model model = Model::six;
  eit::atomdata::Species species;
  double omega_c = 0.0;   // rad/s
  double delta_c = 0.0;   // rad/s
  double gamma_D = 0.0;   // rad/s
  double gamma_sg_frac = 1e-4;
  double probe_frac = 0.01;
  double od_scale = 60.0;
  int velocity_nodes = 2048;
  std::string output_path = "-";
};

Run parse_run(const Config& cfg) {
  cfg.check_known(kKnownKeys);
  Run r;
  const std::string model = cfg.get_str("run.model", "six");
  if (model == "six") r.model = Model::six;
  else if (model == "three") r.model = Model::three;
  else throw ConfigError("run.model must be 'three' or 'six', got: " + model);

  const std::string species = cfg.get_str("run.species", "cesium");
  if (species != "cesium")
    throw ConfigError("run.species: only 'cesium' is supported, got: " +
                      species);
  r.species = eit::atomdata::cesium();

  r.omega_c = mhz_to_rad(cfg.get_num("run.omega_control_MHz", 12.0));
  if (r.omega_c < 0.0) throw ConfigError("run.omega_control_MHz must be >= 0");
  r.delta_c = mhz_to_rad(cfg.get_num("run.delta_c_MHz", 0.0));

  if (cfg.has("run.gamma_D_MHz") && cfg.has("run.temperature_K"))
    throw ConfigError("give run.gamma_D_MHz or run.temperature_K, not both");
  if (cfg.has("run.temperature_K"))
    r.gamma_D = eit::atomdata::doppler_width(
        r.species, cfg.require_num("run.temperature_K"),
        eit::atomdata::Line::D2);
  else
    r.gamma_D = mhz_to_rad(cfg.get_num("run.gamma_D_MHz", 100.0));
  if (r.gamma_D <= 0.0) throw ConfigError("Doppler width must be > 0");

  r.gamma_sg_frac = cfg.get_num("run.gamma_sg_over_gamma", 1e-4);
  if (r.gamma_sg_frac < 0.0)
    throw ConfigError("run.gamma_sg_over_gamma must be >= 0");
  r.probe_frac = cfg.get_num("run.probe_rabi_over_gamma", 0.01);
  if (r.probe_frac <= 0.0)
    throw ConfigError("run.probe_rabi_over_gamma must be > 0");
  r.od_scale = cfg.get_num("run.od_scale", 60.0);
  if (r.od_scale < 0.0) throw ConfigError("run.od_scale must be >= 0");
  r.velocity_nodes = cfg.get_int("run.velocity_nodes", 2048);
  if (r.velocity_nodes < 2)
    throw ConfigError("run.velocity_nodes must be >= 2");
  r.output_path = cfg.get_str("output.path", "-");
  return r;
}

LevelScheme scheme_of(const Run& r) {
  LevelScheme s =
      (r.model == Model::six)
          ? eit::atomdata::cs_six_level_scheme(
                r.omega_c, r.delta_c, r.probe_frac * r.species.gamma)
          : eit::atomdata::cs_three_level_scheme(
                r.omega_c, r.delta_c, r.probe_frac * r.species.gamma);
  s.gamma_sg = r.gamma_sg_frac * s.gamma;
  return s;
}

std::vector<double> linspace_mhz(double lo, double hi, int steps) {
  if (steps < 2) throw ConfigError("sweep needs >= 2 steps");
  if (!(hi > lo)) throw ConfigError("sweep range is empty");
  std::vector<double> out(steps);
  for (int i = 0; i < steps; ++i)
    out[i] = mhz_to_rad(lo + (hi - lo) * i / (steps - 1));
  return out;
}

std::vector<double> probe_sweep(const Config& cfg) {
  return linspace_mhz(cfg.require_num("sweep.probe_lo_MHz"),
                      cfg.require_num("sweep.probe_hi_MHz"),
                      cfg.get_int("sweep.probe_steps", 0));
}

struct Pump {
  eit::pumping::PumpConfig pc;
  std::vector<double> delta_pump_mhz;  // hole-burning pump detunings
  std::vector<double> grid;            // Delta_D nodes (rad/s)
  bool contrast_report = false;
};

Pump parse_pump(const Config& cfg, const Run& r) {
  Pump p;
  p.pc.gamma = r.species.gamma;
  p.pc.tau_d = cfg.get_num("pumping.tau_d_us", 300.0) * 1e-6;
  if (p.pc.tau_d <= 0.0) throw ConfigError("pumping.tau_d_us must be > 0");
  p.pc.omega_control = r.omega_c;
  p.pc.delta_c = r.delta_c;
  p.pc.omega_repump = mhz_to_rad(cfg.get_num("pumping.omega_repump_MHz", 0.0));
  if (p.pc.omega_repump < 0.0)
    throw ConfigError("pumping.omega_repump_MHz must be >= 0");
  p.pc.delta_repump = mhz_to_rad(cfg.get_num("pumping.delta_repump_MHz", 0.0));
  p.pc.counter_propagating_repump =
      cfg.get_bool("pumping.counter_propagating_repump", true);
  const double pump_frac = cfg.get_num("pumping.omega_pump_over_gamma", 0.0);
  if (pump_frac < 0.0)
    throw ConfigError("pumping.omega_pump_over_gamma must be >= 0");
  p.pc.omega_pump = pump_frac * r.species.gamma;
  if (cfg.has("pumping.delta_pump_MHz"))
    p.delta_pump_mhz = cfg.get_list("pumping.delta_pump_MHz");
  else
    p.delta_pump_mhz = {0.0};
  const auto& hf = r.species.hyperfine_splittings_d2;
  p.pc.omega_exc = {0.0, hf[0], hf[0] + hf[1], hf[0] + hf[1] + hf[2]};
  const int nodes = cfg.get_int("pumping.grid_nodes", 641);
  if (nodes < 2) throw ConfigError("pumping.grid_nodes must be >= 2");
  const double half = cfg.get_num("pumping.grid_half_width_MHz", 800.0);
  if (half <= 0.0)
    throw ConfigError("pumping.grid_half_width_MHz must be > 0");
  p.grid.resize(nodes);
  for (int i = 0; i < nodes; ++i)
    p.grid[i] = mhz_to_rad(-half + 2.0 * half * i / (nodes - 1));
  p.contrast_report = cfg.get_bool("pumping.contrast_report", false);
  return p;
}

// ---------------------------------------------------------------------------
// CSV emission.
// ---------------------------------------------------------------------------

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw ConfigError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_header(std::ostream& os, const Config& cfg, const char* columns) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.canonical())));
  os << "# " << kVersion << "\n"
     << "# config-hash: fnv1a64:" << hash << "\n"
     << "# units: MHz = omega/2pi; chi columns are the reduced susceptibility "
        "per cyclic MHz\n"
     << "# columns: " << columns << "\n";
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

eit::doppler::VelocityDistribution distribution_of(const Run& r,
                                                   const Config& cfg,
                                                   double delta_pump_mhz,
                                                   int workers) {
  auto base = eit::doppler::gaussian_grid(r.gamma_D, r.velocity_nodes);
  if (!cfg.has_section("pumping")) return base;
  Pump p = parse_pump(cfg, r);
  p.pc.delta_pump = mhz_to_rad(delta_pump_mhz);
  const auto md = eit::pumping::modified_distribution(p.pc, p.grid, workers);
  // Normalized so that the no-field steady state (rho_gg = 1/16) leaves the
  // Gaussian unchanged.
  std::vector<double> mult(md.rho_gg.size());
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = 16.0 * md.rho_gg[i];
  return eit::doppler::modified_grid(base, md.nodes, mult);
}

void log_derived(const LevelScheme& s, const Run& r,
                 const std::vector<double>& dp, const std::vector<double>& t) {
  const double eit = (r.model == Model::six)
                         ? eit::resonance::eit_shift_six_level(s)
                         : 0.0;
  std::fprintf(stderr, "delta_EIT estimate: %.4f MHz\n", rad_to_mhz(eit));
  try {
    const auto c = eit::doppler::contrast(dp, t, eit, s.gamma);
    std::fprintf(stderr,
                 "contrast: %.4f (t_max %.4f at %.3f MHz, plateau %.4f)\n",
                 c.contrast, c.t_max, rad_to_mhz(c.peak_position), c.t_min);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "contrast: n/a (%s)\n", e.what());
  }
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

int cmd_spectrum(const Config& cfg, int workers) {
  const Run r = parse_run(cfg);
  const LevelScheme s = scheme_of(r);
  const auto dp = probe_sweep(cfg);
  const double delta_pump0 =
      cfg.has_section("pumping") ? parse_pump(cfg, r).delta_pump_mhz.front()
                                 : 0.0;
  const auto dist = distribution_of(r, cfg, delta_pump0, workers);
  const auto chi = eit::doppler::average_chi_curve(
      s, dist, dp, r.model, eit::susceptibility::SixLevelMode::full, workers);
  const auto t = eit::doppler::transmittance_scaled(chi, r.od_scale);

  Output out(r.output_path);
  auto& os = out.stream();
  write_header(os, cfg, "delta_p_MHz,re_chi,im_chi,transmittance");
  const double per_mhz = 2.0 * eit::atomdata::kPi * 1e6;
  for (std::size_t i = 0; i < dp.size(); ++i)
    os << num(rad_to_mhz(dp[i])) << ',' << num(chi[i].real() * per_mhz) << ','
       << num(chi[i].imag() * per_mhz) << ',' << num(t[i]) << '\n';
  log_derived(s, r, dp, t);
  return 0;
}

int cmd_resonances(const Config& cfg) {
  const Run r = parse_run(cfg);
  const LevelScheme s = scheme_of(r);
  std::vector<double> dd_mhz;
  if (cfg.has("resonances.delta_D_list_MHz")) {
    dd_mhz = cfg.get_list("resonances.delta_D_list_MHz");
  } else {
    const double lo = cfg.require_num("resonances.delta_D_lo_MHz");
    const double hi = cfg.require_num("resonances.delta_D_hi_MHz");
    const int steps = cfg.get_int("resonances.delta_D_steps", 0);
    for (double x : linspace_mhz(lo, hi, steps)) dd_mhz.push_back(rad_to_mhz(x));
  }

  Output out(r.output_path);
  auto& os = out.stream();
  write_header(os, cfg,
               "delta_D_MHz,analytic_MHz,numeric_MHz,height_rel,converged");
  int n_ok = 0;
  for (double dd : dd_mhz) {
    const double dD = mhz_to_rad(dd);
    const double analytic =
        (r.model == Model::three)
            ? eit::resonance::atr_shift_three_level(std::abs(s.omega_c[0]), dD)
            : eit::resonance::atr_shift_six_level(s, dD);
    const auto est = eit::resonance::find_pole(s, dD, r.model);
    if (est.ok)
      ++n_ok;
    else
      std::fprintf(stderr, "delta_D = %g MHz: %s\n", dd, est.error.c_str());
    os << num(dd) << ',' << num(rad_to_mhz(analytic)) << ','
       << num(est.ok ? rad_to_mhz(est.position) : 0.0) << ','
       << num(est.ok ? est.height : 0.0) << ',' << (est.ok ? '1' : '0')
       << '\n';
  }
  // Isolated failures are expected physics (near a control-field resonance
  // the single-pole estimator does not apply; the row is marked converged=0),
  // but a scan with no converged point at all is a numeric failure.
  if (n_ok == 0) {
    std::fprintf(stderr, "resonances: no pole search converged\n");
    return 3;
  }
  return 0;
}

int cmd_pump(const Config& cfg, int workers) {
  const Run r = parse_run(cfg);
  if (!cfg.has_section("pumping"))
    throw ConfigError("pump command needs a [pumping] section");
  const Pump p0 = parse_pump(cfg, r);

  Output out(r.output_path);
  auto& os = out.stream();
  write_header(os, cfg, "delta_pump_MHz,delta_D_MHz,f_value");
  const double gd_mhz = rad_to_mhz(r.gamma_D);
  for (double dpump : p0.delta_pump_mhz) {
    Pump p = p0;
    p.pc.delta_pump = mhz_to_rad(dpump);
    const auto md = eit::pumping::modified_distribution(p.pc, p.grid, workers);
    for (std::size_t i = 0; i < md.nodes.size(); ++i) {
      const double x_mhz = rad_to_mhz(md.nodes[i]);
      const double f = eit::doppler::gaussian_pdf(x_mhz, gd_mhz) * 16.0 *
                       md.rho_gg[i];
      os << num(dpump) << ',' << num(x_mhz) << ',' << num(f) << '\n';
    }
  }

  if (p0.contrast_report) {
    const LevelScheme s = scheme_of(r);
    const double eit = (r.model == Model::six)
                           ? eit::resonance::eit_shift_six_level(s)
                           : 0.0;
    // The transparency peak is sub-MHz wide at large Gamma_D, so the report
    // uses its own probe grid: 0.05 MHz within +-6 MHz of the expected peak,
    // 0.5 MHz across the contrast windows.
    const double eit_mhz = rad_to_mhz(eit);
    const double g_mhz = rad_to_mhz(s.gamma);
    std::vector<double> dp;
    for (double x = eit_mhz - 5.0 * g_mhz; x <= eit_mhz + 26.0 * g_mhz;
         x += 0.5)
      if (std::abs(x - eit_mhz) > 6.0) dp.push_back(mhz_to_rad(x));
    for (double x = eit_mhz - 6.0; x <= eit_mhz + 6.0; x += 0.05)
      dp.push_back(mhz_to_rad(x));
    std::sort(dp.begin(), dp.end());
    auto contrast_with = [&](const eit::doppler::VelocityDistribution& d) {
      const auto chi = eit::doppler::average_chi_curve(
          s, d, dp, r.model, eit::susceptibility::SixLevelMode::full, workers);
      const auto t = eit::doppler::transmittance_scaled(chi, r.od_scale);
      return eit::doppler::contrast(dp, t, eit, s.gamma).contrast;
    };
    const auto base =
        eit::doppler::gaussian_grid(r.gamma_D, r.velocity_nodes);
    auto pumped = [&](double omega_pump, double dpump_mhz) {
      Pump p = p0;
      p.pc.omega_pump = omega_pump;
      p.pc.delta_pump = mhz_to_rad(dpump_mhz);
      const auto md =
          eit::pumping::modified_distribution(p.pc, p.grid, workers);
      std::vector<double> mult(md.rho_gg.size());
      for (std::size_t i = 0; i < mult.size(); ++i)
        mult[i] = 16.0 * md.rho_gg[i];
      return eit::doppler::modified_grid(base, md.nodes, mult);
    };
    // Baseline: control + repump pumping only, hole-burning pump off.
    const double c_off = contrast_with(pumped(0.0, 0.0));
    std::fprintf(stderr, "contrast (pump off): %.4f\n", c_off);
    for (double dpump : p0.delta_pump_mhz) {
      const double c_on = contrast_with(pumped(p0.pc.omega_pump, dpump));
      std::fprintf(stderr,
                   "contrast (delta_pump = %+.1f MHz): %.4f  ratio %.2f\n",
                   dpump, c_on, c_off > 0.0 ? c_on / c_off : 0.0);
    }
  }
  return 0;
}

int cmd_validate(const Config& cfg) {
  const Run r = parse_run(cfg);
  if (cfg.has_section("pumping")) (void)parse_pump(cfg, r);
  if (cfg.has("sweep.probe_lo_MHz") || cfg.has("sweep.probe_hi_MHz") ||
      cfg.has("sweep.probe_steps"))
    (void)probe_sweep(cfg);
  const LevelScheme s = scheme_of(r);
  std::printf("config ok\n");
  std::printf("model: %s\n", r.model == Model::six ? "six" : "three");
  std::printf("Gamma_D: %.4f MHz\n", rad_to_mhz(r.gamma_D));
  std::printf("Omega_control: %.4f MHz (%.3f gamma)\n", rad_to_mhz(r.omega_c),
              r.omega_c / s.gamma);
  if (r.model == Model::six)
    std::printf("delta_EIT estimate: %.4f MHz\n",
                rad_to_mhz(eit::resonance::eit_shift_six_level(s)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cs D2 EIT simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_override;
  int workers = 0;

  auto add_common = [&](CLI::App* sub, bool needs_output) {
    sub->add_option("config", config_path, "config file (key = value)")
        ->required();
    sub->add_option("--set", overrides,
                    "override a config key: section.key=value");
    if (needs_output)
      sub->add_option("-o,--output", output_override,
                      "output CSV path ('-' = stdout)");
    sub->add_option("--workers", workers,
                    "worker threads (default: EIT_WORKERS env or 1)");
  };

  auto* spectrum = app.add_subcommand(
      "spectrum", "Doppler-averaged susceptibility/transmittance sweep");
  auto* resonances = app.add_subcommand(
      "resonances", "Autler-Townes resonance positions vs Doppler shift");
  auto* pump = app.add_subcommand(
      "pump", "pump-modified velocity distribution (+ contrast report)");
  auto* validate = app.add_subcommand(
      "validate-config", "parse and validate a config file");
  add_common(spectrum, true);
  add_common(resonances, true);
  add_common(pump, true);
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Config cfg;
    cfg.load(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    if (!output_override.empty()) cfg.set("output.path", output_override);

    if (spectrum->parsed()) return cmd_spectrum(cfg, workers);
    if (resonances->parsed()) return cmd_resonances(cfg);
    if (pump->parsed()) return cmd_pump(cfg, workers);
    return cmd_validate(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  }
}
