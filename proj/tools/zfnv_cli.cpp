// zfnv: run zero-field NV spectroscopy experiments from key-value config files.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zfnv/errors.hpp"
#include "zfnv/experiment.hpp"

namespace ex = zfnv::experiment;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int cmd_run(const std::string& config_path, unsigned jobs, const std::string& out_override) {
  const ex::ExperimentConfig cfg = ex::resolve(ex::load_config(config_path));
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  const std::filesystem::path out = out_override.empty() ? cfg.output_dir : out_override;
  for (const auto& p : ex::run(cfg, out, jobs)) std::cout << p.string() << '\n';
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const ex::ValidationReport report = ex::validate(ex::load_config(config_path));
  ex::print_report(report, std::cout);
  return report.ok() ? 0 : kExitConfig;
}

int cmd_presets() {
  for (const auto& [name, description] : ex::list_presets()) std::cout << name << "\t" << description << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-field NV magnetic resonance spectroscopy simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned jobs = 0;
  auto* run = app.add_subcommand("run", "Run an experiment and write CSV outputs plus a manifest");
  run->add_option("config", config_path, "Key-value config file")->required();
  run->add_option("--jobs", jobs, "Worker threads for sweeps (0 = all cores)");
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Resolve a config and report parameters and checks");
  validate->add_option("config", validate_path, "Key-value config file")->required();

  app.add_subcommand("presets", "List experiment presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(config_path, jobs, out_dir);
    if (app.got_subcommand("validate")) return cmd_validate(validate_path);
    return cmd_presets();
  } catch (const zfnv::SpecError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const zfnv::NumericalInvariantError& e) {
    std::cerr << "numerical invariant violated: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
