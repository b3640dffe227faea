#include "hqm/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hqm/units.hpp"

namespace hqm::config {

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys{
      {"geometry.yig_radius_m", Kind::number, "45e-9", "YIG sphere radius, m"},
      {"geometry.spin_density_m3", Kind::number, "4.2e27", "lattice sites per m^3"},
      {"geometry.spin_s", Kind::number, "0.5", "effective spin per lattice site"},
      {"geometry.fq_persistent_current_a", Kind::number, "500e-9", "flux-qubit persistent current, A"},
      {"geometry.fq_wire_distance_m", Kind::number, "0.25e-6", "FQ wire axis to YIG centre, m"},
      {"geometry.nv_surface_distance_m", Kind::number, "60e-9", "NV to YIG surface along +x, m"},

      {"model.fq_frequency_hz", Kind::number, "2.40e9", "FQ gap omega_F / 2 pi"},
      {"model.zero_field_splitting_hz", Kind::number, "2.87e9", "NV zero-field splitting / 2 pi"},
      {"model.gyromagnetic_ratio", Kind::number, "-1.76e11", "gamma_e, rad s^-1 T^-1"},
      {"model.fq_kittel_detuning_hz", Kind::number, "170e6", "omega_F - omega_K at B_res, / 2 pi"},
      {"model.delta_b_on_t", Kind::number, "80e-4", "tunable field at B_res (B_res - B_L), T"},
      {"model.critical_field_t", Kind::number, "100e-4", "upper limit on the tunable field, T"},
      {"model.g_fy_hz", Kind::number_or_auto, "auto", "FQ-Kittel coupling / 2 pi; auto = lattice sum"},
      {"model.g_yn_hz", Kind::number_or_auto, "auto", "Kittel-NV coupling / 2 pi; auto = lattice sum"},
      {"model.delta_yn_hz", Kind::number_or_auto, "auto", "static NV shift / 2 pi; auto = lattice sum"},
      {"model.g_minus_hz", Kind::number_or_auto, "700e3", "g_(-1) / 2 pi used by the protocol; auto = SWT"},
      {"model.g_plus_hz", Kind::number_or_auto, "auto", "g_(+1) / 2 pi; auto = SWT ratio times g_(-1)"},

      {"rates.convention", Kind::text, "cyclic", "lifetime to rate mapping: cyclic | exact"},
      {"rates.fq_t1_s", Kind::number, "10e-6", "FQ T1"},
      {"rates.fq_t2_s", Kind::number, "10e-6", "FQ T2"},
      {"rates.nv_t1_s", Kind::number, "6e-3", "NV T1 during transfer and retrieval"},
      {"rates.nv_t2_s", Kind::number, "90e-6", "NV T2* during transfer and retrieval"},
      {"rates.fq_storage_t1_s", Kind::number, "10e-6", "FQ T1 during storage"},
      {"rates.fq_storage_t2_s", Kind::number, "10e-6", "FQ T2 during storage"},
      {"rates.nv_storage_t1_s", Kind::number, "10", "NV T1 during storage (dynamical decoupling)"},
      {"rates.nv_storage_t2_s", Kind::number, "0.6", "NV T2 during storage (dynamical decoupling)"},

      {"protocol.initial_state", Kind::text, "1/2", "named state 1 | 1/2 | 1/3 | 1/4 | 1/5 | 0"},
      {"protocol.theta_rad", Kind::number_or_auto, "auto", "overrides the named state's theta"},
      {"protocol.phi_rad", Kind::number, "0", "relative phase of the |0_F> component"},
      {"protocol.storage_time_s", Kind::number, "10e-3", "storage hold"},
      {"protocol.ramp_shape", Kind::text, "step", "step | linear | exponential"},
      {"protocol.rise_time_s", Kind::number, "0", "duration of each field ramp"},
      {"protocol.exp_tau_fraction", Kind::number, "0.3333333333333333", "exponential time constant / rise time"},
      {"protocol.transfer_hold_s", Kind::number_or_auto, "auto", "auto = pi / (2 g_(-1))"},
      {"protocol.retrieval_hold_s", Kind::number_or_auto, "auto", "auto = transfer hold"},
      {"protocol.storage_coupling", Kind::flag, "false", "keep the flip-flop terms on during storage"},
      {"protocol.drop_counter_rotating", Kind::flag, "false", "drop the fast g_(+1) term"},
      {"protocol.calibrate", Kind::flag, "false", "optimize the hold time before running"},
      {"protocol.calibration_window", Kind::number, "0.05", "relative search window around pi / (2 g)"},

      {"integrator.dt_s", Kind::number, "0.05e-9", "RK4 step"},
      {"integrator.stride", Kind::integer, "1", "keep every stride-th state in trajectories"},
      {"integrator.check_invariants", Kind::flag, "true", "verify density-matrix invariants while stepping"},
      {"integrator.workers", Kind::integer, "0", "threads for tables and sweeps; 0 = hardware"},

      {"oracle.n_max", Kind::integer, "3", "magnon Fock cutoff"},
      {"oracle.g_fy_hz", Kind::number, "11e6", "FQ-Kittel coupling / 2 pi in the full model"},
      {"oracle.g_yn_hz", Kind::number, "11e6", "Kittel-NV coupling / 2 pi in the full model"},
      {"oracle.duration_s", Kind::number_or_auto, "auto", "auto = pi / (2 g_eff) of the oracle couplings"},
      {"oracle.dt_s", Kind::number, "1e-12", "exact-propagator step"},
      {"oracle.checkpoints", Kind::integer, "200", "comparison points"},
  };
  return keys;
}

namespace {

std::size_t key_index(const std::string& key) {
  const auto& s = schema();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].name == key) return i;
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> parse_long(const std::string& text) {
  if (text.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) return std::nullopt;
  return v;
}

void validate_value(const KeySpec& spec, const std::string& value) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("invalid value '" + value + "' for " + spec.name + ": " + what);
  };
  switch (spec.kind) {
    case Kind::number:
      if (!parse_double(value)) fail("expected a number");
      break;
    case Kind::number_or_auto:
      if (value != "auto" && !parse_double(value)) fail("expected a number or 'auto'");
      break;
    case Kind::integer: {
      const auto v = parse_long(value);
      if (!v || *v < 0) fail("expected a non-negative integer");
      break;
    }
    case Kind::flag:
      if (value != "true" && value != "false") fail("expected true or false");
      break;
    case Kind::text:
      if (value.empty()) fail("expected a value");
      if (spec.name == "rates.convention") dynamics::parse_rate_convention(value);
      if (spec.name == "protocol.ramp_shape") dynamics::parse_ramp_profile(value);
      if (spec.name == "protocol.initial_state") protocol::InitialState::named(value);
      break;
  }
}

}  // namespace

Config::Config() {
  for (const auto& k : schema()) values_.push_back(k.default_value);
}

void Config::set(const std::string& key, const std::string& value) {
  const auto i = key_index(key);
  try {
    validate_value(schema()[i], value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid value '" + value + "' for " + key + ": " + e.what());
  }
  values_[i] = value;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + "malformed section header '" + body + "'");
      section = trim(body.substr(1, body.size() - 2));
      static const std::vector<std::string> sections{"geometry", "model", "rates", "protocol", "integrator", "oracle"};
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    try {
      cfg.set(section + "." + key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const std::string& Config::raw(const std::string& key) const { return values_[key_index(key)]; }

bool Config::is_auto(const std::string& key) const { return raw(key) == "auto"; }

double Config::number(const std::string& key) const {
  const auto v = parse_double(raw(key));
  if (!v) throw ConfigError(key + " is not a number ('" + raw(key) + "')");
  return *v;
}

std::optional<double> Config::optional_number(const std::string& key) const {
  if (is_auto(key)) return std::nullopt;
  return number(key);
}

long Config::integer(const std::string& key) const {
  const auto v = parse_long(raw(key));
  if (!v) throw ConfigError(key + " is not an integer ('" + raw(key) + "')");
  return *v;
}

bool Config::flag(const std::string& key) const { return raw(key) == "true"; }

std::string Config::dump() const {
  std::ostringstream out;
  std::string section;
  const auto& s = schema();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto dot = s[i].name.find('.');
    const std::string sec = s[i].name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << s[i].name.substr(dot + 1) << " = " << values_[i] << '\n';
  }
  return out.str();
}

Device build_device(const Config& cfg) {
  using units::hz_to_rad;
  Device d;
  d.sphere.radius = cfg.number("geometry.yig_radius_m");
  d.sphere.spin_density = cfg.number("geometry.spin_density_m3");
  d.sphere.spin_s = cfg.number("geometry.spin_s");
  d.fq.persistent_current = cfg.number("geometry.fq_persistent_current_a");
  d.fq.wire_distance = cfg.number("geometry.fq_wire_distance_m");
  d.nv.surface_distance = cfg.number("geometry.nv_surface_distance_m");
  d.sphere.validate();
  d.site_count = geometry::site_count(d.sphere);

  auto& p = d.params;
  p.omega_F = hz_to_rad(cfg.number("model.fq_frequency_hz"));
  p.delta_ZS = hz_to_rad(cfg.number("model.zero_field_splitting_hz"));
  p.gamma_e = cfg.number("model.gyromagnetic_ratio");
  p.I_p = d.fq.persistent_current;
  const auto g_fy = cfg.optional_number("model.g_fy_hz");
  const auto g_yn = cfg.optional_number("model.g_yn_hz");
  const auto delta_yn = cfg.optional_number("model.delta_yn_hz");
  p.g_FY = g_fy ? hz_to_rad(*g_fy) : geometry::coupling_g_fy(d.sphere, d.fq);
  p.g_YN = g_yn ? hz_to_rad(*g_yn) : geometry::coupling_g_yn(d.sphere, d.nv);
  p.delta_YN = delta_yn ? hz_to_rad(*delta_yn) : geometry::shift_delta_yn(d.sphere, d.nv);

  d.critical_field = cfg.number("model.critical_field_t");
  d.delta_b_on = cfg.number("model.delta_b_on_t");
  if (!(d.delta_b_on > 0.0) || d.delta_b_on > d.critical_field)
    throw ConfigError("model.delta_b_on_t must lie in (0, critical_field_t]");
  const double detuning = hz_to_rad(cfg.number("model.fq_kittel_detuning_hz"));
  p = model::operating_point(p, detuning, d.delta_b_on, d.critical_field);
  d.effective = model::effective_params(p, d.critical_field);
  d.kittel = geometry::KittelMode::calibrated(p.omega_F, detuning, p.B_L, d.effective.B_res, p.gamma_e);
  return d;
}

protocol::InitialState build_initial_state(const Config& cfg) {
  auto s = protocol::InitialState::named(cfg.raw("protocol.initial_state"));
  if (const auto theta = cfg.optional_number("protocol.theta_rad")) {
    s.theta = *theta;
    s.label = "theta=" + cfg.raw("protocol.theta_rad");
  }
  s.phi = cfg.number("protocol.phi_rad");
  return s;
}

protocol::MemoryProtocol build_protocol(const Config& cfg, const Device& device) {
  using units::hz_to_rad;
  protocol::MemoryProtocol p;
  p.effective = device.effective;
  p.b_off = device.effective.B_res - device.delta_b_on;

  if (const auto g = cfg.optional_number("model.g_minus_hz")) {
    if (p.effective.g_minus == 0.0)
      p.effective.g_minus = hz_to_rad(*g);
    else
      p.set_coupling(hz_to_rad(*g));
  }
  if (const auto gp = cfg.optional_number("model.g_plus_hz")) p.effective.g_plus = hz_to_rad(*gp);

  p.ramp = dynamics::parse_ramp_profile(cfg.raw("protocol.ramp_shape"));
  p.rise_time = cfg.number("protocol.rise_time_s");
  p.tau_fraction = cfg.number("protocol.exp_tau_fraction");
  p.storage_time = cfg.number("protocol.storage_time_s");
  p.storage_coupling = cfg.flag("protocol.storage_coupling");
  p.keep_counter_rotating = !cfg.flag("protocol.drop_counter_rotating");

  p.convention = dynamics::parse_rate_convention(cfg.raw("rates.convention"));
  p.transfer_lifetimes = {{cfg.number("rates.fq_t1_s"), cfg.number("rates.fq_t2_s")},
                          {cfg.number("rates.nv_t1_s"), cfg.number("rates.nv_t2_s")}};
  p.storage_lifetimes = {{cfg.number("rates.fq_storage_t1_s"), cfg.number("rates.fq_storage_t2_s")},
                         {cfg.number("rates.nv_storage_t1_s"), cfg.number("rates.nv_storage_t2_s")}};

  p.integrator.dt = cfg.number("integrator.dt_s");
  p.integrator.stride = static_cast<std::size_t>(std::max(1L, cfg.integer("integrator.stride")));
  p.integrator.check_invariants = cfg.flag("integrator.check_invariants");

  const auto hold = cfg.optional_number("protocol.transfer_hold_s");
  if (hold)
    p.transfer_hold = *hold;
  else if (p.effective.g_minus != 0.0)
    p.transfer_hold = p.nominal_hold();
  const auto retrieval = cfg.optional_number("protocol.retrieval_hold_s");
  p.retrieval_hold = retrieval ? *retrieval : p.transfer_hold;
  return p;
}

oracle::FullModel build_oracle_model(const Config& cfg, const Device& device) {
  oracle::FullModel m;
  m.n_max = static_cast<std::size_t>(cfg.integer("oracle.n_max"));
  m.params = device.params;
  m.params.g_FY = units::hz_to_rad(cfg.number("oracle.g_fy_hz"));
  m.params.g_YN = units::hz_to_rad(cfg.number("oracle.g_yn_hz"));
  // Re-centre on the resonance of the stronger couplings, keeping the Kittel detuning.
  const double detuning = m.params.omega_F - m.params.omega_K;
  m.params = model::operating_point(m.params, detuning, device.delta_b_on, device.critical_field);
  return m;
}

double oracle_duration(const Config& cfg, const oracle::FullModel& m) {
  if (const auto d = cfg.optional_number("oracle.duration_s")) return *d;
  const double g = model::effective_coupling(m.params, model::Transition::minus);
  if (g == 0.0) throw ConfigError("oracle.duration_s = auto needs a nonzero effective coupling");
  return units::pi / (2.0 * std::abs(g));
}

}  // namespace hqm::config
