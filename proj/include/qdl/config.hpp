#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdl/model.hpp"

namespace qdl {

enum class SweepAxis { Delta_1, eta, temperature, Omega, Delta_p };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Delta_1;
  double start = 0.0;
  double stop = 1.0;
  int points = 2;

  /// Uniform grid, start and stop included.
  std::vector<double> values() const;
  void validate() const;
};

/// Sets the swept parameter of `p` (eta sets eta_1 = eta_2, Omega sets
/// Omega_1 = Omega_2).
void apply_axis(SystemParams& p, SweepAxis axis, double value);

struct ConvergenceSettings {
  bool enabled = true;
  std::vector<std::string> observables{"n1", "n2"};
  int step = 2;
  int max_n = 14;
  double rel_tol = 0.005;
};

struct WitnessSettings {
  double phi1 = -0.5;
  double phi2 = -0.5;
  int scan_points = 256;
};

struct RunConfig {
  std::optional<std::string> preset;
  SystemParams base;
  ModelForm model_form = ModelForm::full;
  std::optional<SweepSpec> sweep;
  std::vector<std::string> outputs;  // empty: every observable column
  std::string output_path;           // empty: stdout
  ConvergenceSettings convergence;
  WitnessSettings witness;
  int workers = 1;
  static constexpr bool deterministic = true;

  void validate() const;
  /// Canonical document; parse_config(to_json().dump()) reproduces the config.
  nlohmann::json to_json() const;
};

/// Parses a JSON config document. Unknown keys, out-of-range values and a
/// preset combined with an explicit sweep throw ConfigError. An empty
/// document gives the default working point with no sweep.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& doc);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }

/// Named figure recipes: fig2 ... fig13 (fig6, fig10, fig13 split into a/b).
const std::vector<std::string>& preset_names();
RunConfig preset_config(const std::string& name);

/// Column labels a config may request in `outputs`.
const std::vector<std::string>& output_labels();

}  // namespace qdl
