#pragma once

// Experiment configuration: a plain `key = value` document with `#` comments.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "detmodes/diagnostics.hpp"
#include "detmodes/solver.hpp"
#include "detmodes/spectral.hpp"

namespace detmodes {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SyncMode { twin, steady };

std::string to_string(SyncMode mode);
SyncMode parse_sync_mode(const std::string& name);

struct ExperimentConfig {
  // Required.
  double nu = 0.0;
  double L = 0.0;
  int N = 0;
  double dt = 0.0;
  double T_total = 0.0;

  /// Time between binary snapshots written by `simulate`; 0 disables them.
  double snapshot_interval = 0.0;
  /// Time between diagnostic records; 0 records every step.
  double sample_interval = 0.0;
  double r = 2.5;
  double c_r = 0.05;
  double c0 = 0.05;

  ForcingSpec::Kind forcing = ForcingSpec::Kind::steady_low_mode;
  double forcing_amplitude = 1.0;
  std::vector<ForcingSpec::Mode> forcing_modes;

  std::uint64_t seed_u = 1;
  std::uint64_t seed_v = 2;
  double init_urms = 1.0;
  double init_k0 = 2.0;
  std::string output_dir = ".";

  /// Averages use the final T_avg of the run; unset means the whole run.
  std::optional<double> T_avg;
  std::optional<double> d_override;

  SyncMode sync_mode = SyncMode::twin;
  /// Steady variant: rms of the high-pass perturbation added to the steady state.
  double perturbation_urms = 1e-3;
  double steady_tol = 1e-8;

  ForcingSpec forcing_spec() const;
  RandomFieldSpec initial_spec() const;
  DiagnosticParams diagnostic_params() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates a document. Missing required keys are listed
/// together; unknown keys, malformed values and out-of-range values are
/// reported with the key name and the accepted range.
ExperimentConfig parse_config(const std::string& text);

/// Rejects values outside their accepted ranges.
void validate(const ExperimentConfig& config);

/// Normalized document with every key; parse_config(dump_config(c)) == c.
std::string dump_config(const ExperimentConfig& config);

/// Applies one `key = value` assignment to an existing config (used for
/// command-line overrides). Call validate() once all overrides are in.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Keys accepted by parse_config, in dump order.
const std::vector<std::string>& config_keys();

/// "kx ky kz re_x im_x re_y im_y re_z im_z; ..." for custom forcing.
std::vector<ForcingSpec::Mode> parse_forcing_modes(const std::string& text);
std::string format_forcing_modes(const std::vector<ForcingSpec::Mode>& modes);

}  // namespace detmodes
