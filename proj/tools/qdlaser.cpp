#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qdl/config.hpp"
#include "qdl/emit.hpp"
#include "qdl/sweep.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string format = "csv";
  std::string out;
  int nmax = 0;
  int workers = 0;
  std::string model;
  int points = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", f.out, "Output file (default stdout)");
  cmd->add_option("--nmax", f.nmax, "Photon cutoff for both modes")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", f.workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  cmd->add_option("--model", f.model, "Master-equation form")->check(CLI::IsMember({"full", "effective"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qdl::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qdl::RunConfig load(const CommonFlags& f) {
  qdl::RunConfig cfg = f.config_path.empty() ? qdl::parse_config(std::string{}) : qdl::parse_config(read_file(f.config_path));
  return cfg;
}

void apply_overrides(qdl::RunConfig& cfg, const CommonFlags& f) {
  if (!f.model.empty()) cfg.model_form = f.model == "full" ? qdl::ModelForm::full : qdl::ModelForm::effective;
  if (f.nmax > 0) {
    cfg.base.layout = qdl::SpaceLayout{f.nmax, f.nmax};
    if (cfg.convergence.max_n < f.nmax) cfg.convergence.max_n = f.nmax;
  }
  if (f.workers > 0) cfg.workers = f.workers;
  if (f.points > 0) {
    if (!cfg.sweep) throw qdl::ConfigError("--points needs a sweep");
    cfg.sweep->points = f.points;
    cfg.preset.reset();
  }
  if (!f.out.empty()) cfg.output_path = f.out;
  cfg.validate();
}

int run_rows(const qdl::RunConfig& cfg, const CommonFlags& f) {
  const std::vector<qdl::ResultRow> rows = qdl::run_sweep(cfg);
  qdl::emit_results(rows, cfg, qdl::parse_format(f.format), cfg.output_path);
  for (const auto& r : rows) {
    if (r.status == qdl::RowStatus::failed) {
      std::cerr << "point " << qdl::format_number(r.axis_value) << " failed: " << r.message << '\n';
    }
  }
  return qdl::sweep_exit_code(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states of a two-mode quantum-dot laser with phonon dressing"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string preset_name;
  double omega_min = -20.0, omega_max = 20.0;
  int omega_points = 401;

  auto* steady = app.add_subcommand("steady", "Solve the configured working point");
  auto* sweep = app.add_subcommand("sweep", "Scan the configured sweep axis");
  auto* rates = app.add_subcommand("rates", "Emission-rate decomposition scan (effective form)");
  auto* entangle = app.add_subcommand("entangle", "Entanglement-witness scan");
  auto* kernels = app.add_subcommand("kernels", "Tabulate the phonon half-Fourier kernels");
  auto* preset = app.add_subcommand("preset", "Run a named figure preset");
  for (auto* c : {steady, sweep, rates, entangle, kernels, preset}) add_common(c, f);
  for (auto* c : {sweep, rates, entangle, preset}) {
    c->add_option("--points", f.points, "Override the number of sweep points")->check(CLI::Range(2, 100000));
  }
  kernels->add_option("--omega-min", omega_min, "Lowest frequency (g)");
  kernels->add_option("--omega-max", omega_max, "Highest frequency (g)");
  kernels->add_option("--points", omega_points, "Frequency points")->check(CLI::Range(2, 1000000));
  preset->add_option("name", preset_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*preset) {
      if (!f.config_path.empty()) throw qdl::ConfigError("preset and --config cannot be combined");
      qdl::RunConfig cfg = qdl::preset_config(preset_name);
      apply_overrides(cfg, f);
      return run_rows(cfg, f);
    }

    qdl::RunConfig cfg = load(f);

    if (*kernels) {
      apply_overrides(cfg, f);
      if (!(omega_min < omega_max)) throw qdl::ConfigError("--omega-min must be below --omega-max");
      const qdl::PhononKernels k(cfg.base.bath);
      const auto table = qdl::kernel_table(k, omega_min, omega_max, omega_points);
      qdl::write_output(qdl::format_kernel_table(table, k, qdl::parse_format(f.format)), cfg.output_path);
      return 0;
    }
    if (*steady) {
      cfg.sweep.reset();
      cfg.preset.reset();
      apply_overrides(cfg, f);
      return run_rows(cfg, f);
    }
    if (!cfg.sweep) throw qdl::ConfigError("this subcommand needs a sweep (config 'sweep' or 'preset')");
    if (*rates) {
      if (f.model == "full") throw qdl::ConfigError("rates requires the effective model");
      cfg.model_form = qdl::ModelForm::effective;
      if (cfg.outputs.empty()) cfg.outputs = {"n1", "n2", "single1_net", "single2_net", "twophoton_net"};
    }
    if (*entangle && cfg.outputs.empty()) cfg.outputs = {"n1", "n2", "variance_sum", "variance_min"};
    apply_overrides(cfg, f);
    return run_rows(cfg, f);
  } catch (const qdl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qdl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
