#pragma once

// Run configuration: INI-style `key = value` lines grouped under
// [geometry], [model], [rates], [protocol], [integrator] and [oracle].
// Every key has a default; unknown keys are rejected with the offending line.
// Frequencies are ordinary (Hz) in the file and angular inside the library.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqm/effective_model.hpp"
#include "hqm/geometry.hpp"
#include "hqm/oracle.hpp"
#include "hqm/protocol.hpp"

namespace hqm::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { number, number_or_auto, integer, flag, text };

struct KeySpec {
  std::string name;  // "section.key"
  Kind kind;
  std::string default_value;
  std::string help;
};

/// All recognized keys in output order.
const std::vector<KeySpec>& schema();

class Config {
 public:
  Config();  // defaults

  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  /// `key` is "section.key"; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  const std::string& raw(const std::string& key) const;
  bool is_auto(const std::string& key) const;

  double number(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;  // nullopt for `auto`
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// Fully resolved configuration in the input format, defaults included.
  std::string dump() const;

 private:
  std::vector<std::string> values_;  // parallel to schema()
};

/// Everything derived from the geometry and model blocks.
struct Device {
  geometry::YigSphere sphere;
  geometry::FluxQubitGeom fq;
  geometry::NvGeom nv;
  std::size_t site_count = 0;
  double critical_field = 0.0;  // T
  double delta_b_on = 0.0;      // T
  model::PhysicalParams params;     // at the transfer operating point
  model::EffectiveParams effective; // SWT output at B_res (no overrides)
  geometry::KittelMode kittel;
};

Device build_device(const Config& cfg);
protocol::InitialState build_initial_state(const Config& cfg);
/// Applies the coupling overrides, rates and ramp settings. Calibration is
/// not run here.
protocol::MemoryProtocol build_protocol(const Config& cfg, const Device& device);
oracle::FullModel build_oracle_model(const Config& cfg, const Device& device);
/// Oracle duration: the configured value, or one transfer time of the
/// oracle's own effective coupling.
double oracle_duration(const Config& cfg, const oracle::FullModel& m);

}  // namespace hqm::config
