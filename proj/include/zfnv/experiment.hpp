#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zfnv/errors.hpp"

namespace zfnv::experiment {

inline constexpr int kCsvSchemaVersion = 1;

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public SpecError {
 public:
  ConfigError(std::string field, const std::string& message)
      : SpecError(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Preset { boron_nqr, water_pair, polarization_check, conventional_bias_comparison };
enum class Emit { time_trace, sweep, eigensystem, estimate };

std::string to_string(Preset p);
std::string to_string(Emit e);

/// Presets with a one-line description each.
std::vector<std::pair<std::string, std::string>> list_presets();

/// Raw `key = value` lines in file order.
struct ConfigFile {
  std::vector<std::pair<std::string, std::string>> entries;
};

ConfigFile parse_config(std::istream& in);
ConfigFile load_config(const std::filesystem::path& path);

struct Parameter {
  std::string key;
  std::string value;
  std::string unit;
  bool overridden = false;
};

/// Fully resolved experiment: preset defaults merged with overrides, range-checked.
struct ExperimentConfig {
  Preset preset = Preset::boron_nqr;
  std::set<Emit> emit;
  std::string output_dir = "out";

  double zfs = 2870.0;
  double qbar = 2.9921;
  std::vector<double> etas{0.0, 0.5, 1.0};
  double boron_ax = 0.66e-3;
  double boron_az = 0.0;
  double water_d = 0.15;
  double water_ax = 0.63e-3;
  double water_az = 0.0;
  double rabi = 0.0;          // MHz; 0 with rabi_matched = true means "at the matching condition"
  bool rabi_matched = true;
  double t_max = 1000.0;      // us
  int time_samples = 1001;
  double t_fixed = 750.0;     // us
  int sweep_points = 201;
  double sweep_half_width = 3.0;  // in units of a_x
  double dt = 2e-6;           // us
  double bias_delta = 100.0;  // MHz
  double larmor = 0.42577;    // MHz
  std::vector<double> thetas_deg{0.0, 54.735610317245346, 90.0};

  std::vector<Parameter> parameters;
  std::vector<std::string> warnings;
};

/// Throws ConfigError naming the first invalid field.
ExperimentConfig resolve(const ConfigFile& file);

struct ValidationReport {
  std::vector<Parameter> parameters;
  std::vector<std::string> checks;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const ConfigFile& file);
void print_report(const ValidationReport& report, std::ostream& out);

struct OutputFile {
  std::string name;
  std::string contents;
};

/// Computes every output in memory, in deterministic order. `jobs` = 0 uses all cores.
std::vector<OutputFile> compute(const ExperimentConfig& cfg, unsigned jobs);

/// compute() then writes all files into `out_dir` through a staging directory, so a failure
/// leaves no partial outputs. Returns the written paths.
std::vector<std::filesystem::path> run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                       unsigned jobs);

/// CSV cell text: 17 significant digits, '.' decimal separator.
std::string format_number(double v);

}  // namespace zfnv::experiment
