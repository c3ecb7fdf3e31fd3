#include "zfnv/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <locale>
#include <map>
#include <sstream>

#include "zfnv/constants.hpp"
#include "zfnv/inference.hpp"
#include "zfnv/parallel.hpp"
#include "zfnv/spectroscopy.hpp"

#ifndef ZFNV_VERSION
#define ZFNV_VERSION "unknown"
#endif

namespace zfnv::experiment {

namespace fs = std::filesystem;

std::string to_string(Preset p) {
  switch (p) {
    case Preset::boron_nqr: return "boron_nqr";
    case Preset::water_pair: return "water_pair";
    case Preset::polarization_check: return "polarization_check";
    case Preset::conventional_bias_comparison: return "conventional_bias_comparison";
  }
  return "?";
}

std::string to_string(Emit e) {
  switch (e) {
    case Emit::time_trace: return "time_trace";
    case Emit::sweep: return "sweep";
    case Emit::eigensystem: return "eigensystem";
    case Emit::estimate: return "estimate";
  }
  return "?";
}

std::vector<std::pair<std::string, std::string>> list_presets() {
  return {
      {"boron_nqr", "11B quadrupole resonance: S(t) and S(Omega) for eta in {0, 0.5, 1}, qbar recovery"},
      {"water_pair", "1H2O proton pair at zero field: S(t), S(Omega), H-H distance recovery"},
      {"polarization_check", "lab-frame sigma+ vs linear drive of the bare NV: |-1> leakage and Rabi periods"},
      {"conventional_bias_comparison", "bias-field linear drive and bias-field proton-pair eigensystems"},
  };
}

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

namespace {

std::string short_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s;
}

Preset parse_preset(const std::string& text) {
  for (Preset p : {Preset::boron_nqr, Preset::water_pair, Preset::polarization_check,
                   Preset::conventional_bias_comparison})
    if (to_string(p) == text) return p;
  throw ConfigError("preset", "unknown preset '" + text + "'");
}

struct ParamDef {
  std::string key;
  std::string unit;
  std::vector<Preset> presets;
  std::function<void(ExperimentConfig&, const std::string&)> apply;
  std::function<std::string(const ExperimentConfig&)> show;
};

constexpr Preset kBoron = Preset::boron_nqr;
constexpr Preset kWater = Preset::water_pair;
constexpr Preset kPol = Preset::polarization_check;
constexpr Preset kConv = Preset::conventional_bias_comparison;

ParamDef number(std::string key, std::string unit, std::vector<Preset> presets, double ExperimentConfig::*field) {
  return {key, std::move(unit), std::move(presets),
          [key, field](ExperimentConfig& c, const std::string& v) { c.*field = parse_double(key, v); },
          [field](const ExperimentConfig& c) { return format_number(c.*field); }};
}

ParamDef integer(std::string key, std::vector<Preset> presets, int ExperimentConfig::*field) {
  return {key, "count", std::move(presets),
          [key, field](ExperimentConfig& c, const std::string& v) { c.*field = parse_int(key, v); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

ParamDef number_list(std::string key, std::string unit, std::vector<Preset> presets,
                     std::vector<double> ExperimentConfig::*field) {
  return {key, std::move(unit), std::move(presets),
          [key, field](ExperimentConfig& c, const std::string& v) { c.*field = parse_doubles(key, v); },
          [field](const ExperimentConfig& c) { return join_numbers(c.*field); }};
}

const std::vector<ParamDef>& param_table() {
  static const std::vector<ParamDef> table = [] {
    const std::vector<Preset> all{kBoron, kWater, kPol, kConv};
    std::vector<ParamDef> t;
    t.push_back({"output_dir", "path", all, [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const ExperimentConfig& c) { return c.output_dir; }});
    t.push_back({"emit", "set", all,
                 [](ExperimentConfig& c, const std::string& v) {
                   c.emit.clear();
                   for (const auto& item : split_list(v)) {
                     bool found = false;
                     for (Emit e : {Emit::time_trace, Emit::sweep, Emit::eigensystem, Emit::estimate})
                       if (to_string(e) == item) {
                         c.emit.insert(e);
                         found = true;
                       }
                     if (!found) throw ConfigError("emit", "unknown output kind '" + item + "'");
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string s;
                   for (Emit e : c.emit) s += (s.empty() ? "" : ", ") + to_string(e);
                   return s;
                 }});
    t.push_back(number("nv.D", "MHz", {kPol, kConv}, &ExperimentConfig::zfs));
    t.push_back(number("boron.qbar", "MHz", {kBoron}, &ExperimentConfig::qbar));
    t.push_back(number_list("boron.eta", "1", {kBoron}, &ExperimentConfig::etas));
    t.push_back(number("boron.a_x", "MHz", {kBoron}, &ExperimentConfig::boron_ax));
    t.push_back(number("boron.a_z", "MHz", {kBoron}, &ExperimentConfig::boron_az));
    t.push_back(number("water.d", "nm", {kWater}, &ExperimentConfig::water_d));
    t.push_back(number("water.a_x", "MHz", {kWater}, &ExperimentConfig::water_ax));
    t.push_back(number("water.a_z", "MHz", {kWater}, &ExperimentConfig::water_az));
    t.push_back({"drive.rabi", "MHz", all,
                 [](ExperimentConfig& c, const std::string& v) {
                   c.rabi = parse_double("drive.rabi", v);
                   c.rabi_matched = false;
                 },
                 [](const ExperimentConfig& c) { return c.rabi_matched ? std::string("matched") : format_number(c.rabi); }});
    t.push_back(number("time.t_max", "us", all, &ExperimentConfig::t_max));
    t.push_back(integer("time.samples", all, &ExperimentConfig::time_samples));
    t.push_back(number("sweep.t_fixed", "us", {kBoron, kWater}, &ExperimentConfig::t_fixed));
    t.push_back(integer("sweep.points", {kBoron, kWater}, &ExperimentConfig::sweep_points));
    t.push_back(number("sweep.half_width", "a_x", {kBoron, kWater}, &ExperimentConfig::sweep_half_width));
    t.push_back(number("step.dt", "us", {kPol, kConv}, &ExperimentConfig::dt));
    t.push_back(number("bias.delta", "MHz", {kConv}, &ExperimentConfig::bias_delta));
    t.push_back(number("bias.larmor", "MHz", {kConv}, &ExperimentConfig::larmor));
    t.push_back(number_list("bias.theta_deg", "deg", {kConv}, &ExperimentConfig::thetas_deg));
    return t;
  }();
  return table;
}

void apply_preset_defaults(ExperimentConfig& c) {
  c.emit = {Emit::time_trace, Emit::sweep, Emit::eigensystem, Emit::estimate};
  switch (c.preset) {
    case Preset::boron_nqr:
      c.t_max = 1000.0;
      c.time_samples = 1001;
      c.t_fixed = 750.0;
      break;
    case Preset::water_pair:
      c.t_max = 1000.0;
      c.time_samples = 1001;
      c.t_fixed = 800.0;
      break;
    case Preset::polarization_check:
    case Preset::conventional_bias_comparison:
      c.rabi = 5.0;
      c.rabi_matched = false;
      c.t_max = 1.0;
      c.time_samples = 501;
      break;
  }
}

bool applies(const ParamDef& d, Preset p) { return std::find(d.presets.begin(), d.presets.end(), p) != d.presets.end(); }

void check_ranges(ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(key, msg);
  };
  require(c.t_max > 0.0, "time.t_max", "must be > 0");
  require(c.time_samples >= 2, "time.samples", "must be >= 2");
  require(c.rabi_matched || c.rabi >= 0.0, "drive.rabi", "must be >= 0");
  switch (c.preset) {
    case Preset::boron_nqr: {
      require(c.qbar > 0.0, "boron.qbar", "must be > 0");
      for (double eta : c.etas) {
        require(eta >= 0.0, "boron.eta", "must be >= 0");
        if (eta > 1.0) c.warnings.push_back("boron.eta: value above 1 is outside the conventional asymmetry range");
      }
      require(c.boron_ax != 0.0, "boron.a_x", "must be non-zero (sets the dip width)");
      if (std::abs(c.boron_az) / c.qbar >= 0.05)
        c.warnings.push_back("boron.a_z: pseudosecular coupling not << Q (|a_z|/qbar = " +
                             short_number(std::abs(c.boron_az) / c.qbar) + ")");
      break;
    }
    case Preset::water_pair: {
      require(c.water_d > 0.05, "water.d", "must be larger than 0.05 nm");
      require(c.water_ax != 0.0, "water.a_x", "must be non-zero (sets the dip width)");
      const double g = g12(c.water_d);
      if (std::abs(c.water_az) / g >= 0.05)
        c.warnings.push_back("water.a_z: coupling not << g12 (|a_z|/g12 = " + short_number(std::abs(c.water_az) / g) +
                             ")");
      break;
    }
    case Preset::polarization_check:
    case Preset::conventional_bias_comparison: {
      require(c.zfs > 0.0, "nv.D", "must be > 0");
      require(c.dt > 0.0, "step.dt", "must be > 0");
      const double extra = c.preset == Preset::conventional_bias_comparison ? std::abs(c.bias_delta) : 0.0;
      const double phase = kTwoPi * c.dt * (c.zfs + extra + 2.0 * c.rabi);
      require(phase <= 0.5, "step.dt", "too coarse: one step rotates by " + short_number(phase) + " rad (limit 0.5)");
      if (phase > 0.1) c.warnings.push_back("step.dt: marginal, one step rotates by " + short_number(phase) + " rad");
      if (c.preset == Preset::conventional_bias_comparison) {
        require(c.larmor >= 0.0, "bias.larmor", "must be >= 0");
        require(c.zfs - std::abs(c.bias_delta) > 0.0, "bias.delta", "must be smaller than nv.D");
      }
      break;
    }
  }
  if (c.preset == Preset::boron_nqr || c.preset == Preset::water_pair) {
    require(c.t_fixed > 0.0, "sweep.t_fixed", "must be > 0");
    require(c.sweep_points >= 3, "sweep.points", "must be >= 3");
    require(c.sweep_half_width > 0.0, "sweep.half_width", "must be > 0");
  }
}

}  // namespace

ConfigFile parse_config(std::istream& in) {
  ConfigFile f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    for (const auto& [k, v] : f.entries)
      if (k == key) throw ConfigError(key, "duplicate key");
    f.entries.emplace_back(std::move(key), std::move(value));
  }
  return f;
}

ConfigFile load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  return parse_config(in);
}

ExperimentConfig resolve(const ConfigFile& file) {
  std::map<std::string, std::string> overrides;
  for (const auto& [k, v] : file.entries) overrides[k] = v;
  const auto preset_it = overrides.find("preset");
  if (preset_it == overrides.end()) throw ConfigError("preset", "missing; run `presets` for the list");

  ExperimentConfig c;
  c.preset = parse_preset(preset_it->second);
  apply_preset_defaults(c);
  overrides.erase(preset_it);

  for (const auto& def : param_table()) {
    if (!applies(def, c.preset)) continue;
    const auto it = overrides.find(def.key);
    if (it == overrides.end()) continue;
    def.apply(c, it->second);
    overrides.erase(it);
  }
  if (!overrides.empty())
    throw ConfigError(overrides.begin()->first, "unknown key for preset " + to_string(c.preset));

  check_ranges(c);

  c.parameters.push_back({"preset", to_string(c.preset), "", true});
  for (const auto& def : param_table()) {
    if (!applies(def, c.preset)) continue;
    const bool overridden = std::any_of(file.entries.begin(), file.entries.end(),
                                        [&](const auto& e) { return e.first == def.key; });
    c.parameters.push_back({def.key, def.show(c), def.unit, overridden});
  }
  return c;
}

ValidationReport validate(const ConfigFile& file) {
  ValidationReport r;
  try {
    const ExperimentConfig c = resolve(file);
    r.parameters = c.parameters;
    r.warnings = c.warnings;
    r.checks.push_back("ranges: ok");
    switch (c.preset) {
      case Preset::boron_nqr:
        for (double eta : c.etas)
          r.checks.push_back("matching Rabi frequency (eta = " + short_number(eta) +
                             "): " + format_number(hh_condition(QuadrupoleSpec{c.qbar, eta})) + " MHz");
        break;
      case Preset::water_pair:
        r.checks.push_back("g12: " + format_number(g12(c.water_d)) + " MHz");
        r.checks.push_back("matching Rabi frequency: " + format_number(0.75 * g12(c.water_d)) + " MHz");
        break;
      case Preset::polarization_check:
      case Preset::conventional_bias_comparison:
        r.checks.push_back("steps: " + std::to_string(static_cast<long long>(std::ceil(c.t_max / c.dt))));
        break;
    }
  } catch (const ConfigError& e) {
    r.errors.push_back(e.what());
  }
  return r;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  for (const auto& p : report.parameters)
    out << p.key << " = " << p.value << (p.unit.empty() ? "" : "  [" + p.unit + "]")
        << (p.overridden ? "  (override)" : "  (default)") << '\n';
  for (const auto& c : report.checks) out << "check: " << c << '\n';
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  for (const auto& e : report.errors) out << "error: " << e << '\n';
}

namespace {

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    text_row(std::move(cells));
  }
  void text_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string str() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string eta_label(double eta) { return "eta_" + short_number(eta); }

void add_eigensystem_rows(Csv& csv, const std::string& system, const std::string& param, const EigenSystem& es) {
  for (Index k = 0; k < es.size(); ++k) {
    std::vector<std::string> cells{system, param, to_string(es.provenance), es.labels[static_cast<std::size_t>(k)],
                                   format_number(es.energies(k))};
    for (Index j = 0; j < es.states.rows(); ++j) {
      cells.push_back(format_number(es.states(j, k).real()));
      cells.push_back(format_number(es.states(j, k).imag()));
    }
    csv.text_row(std::move(cells));
  }
}

Csv eigensystem_csv(Index dim) {
  std::vector<std::string> header{"system", "parameter", "provenance", "label", "energy_MHz"};
  for (Index j = 0; j < dim; ++j) {
    header.push_back("re_c" + std::to_string(j));
    header.push_back("im_c" + std::to_string(j));
  }
  return Csv(std::move(header));
}

std::vector<double> detuning_grid(const ExperimentConfig& c, double ax) {
  const double half = c.sweep_half_width * std::abs(ax);
  return linspace(-half, half, static_cast<std::size_t>(c.sweep_points));
}

std::vector<OutputFile> compute_boron(const ExperimentConfig& c, unsigned jobs) {
  std::vector<OutputFile> files;
  const auto times = linspace(0.0, c.t_max, static_cast<std::size_t>(c.time_samples));
  const auto detunings = detuning_grid(c, c.boron_ax);
  std::vector<BoronSystem> systems;
  for (double eta : c.etas) systems.push_back({{c.qbar, eta}, {c.boron_ax, c.boron_az}});

  if (c.emit.contains(Emit::time_trace)) {
    std::vector<std::string> header{"t_us"};
    std::vector<std::vector<double>> cols;
    for (const auto& s : systems) {
      header.push_back("S_" + eta_label(s.quad.eta));
      const double rabi = c.rabi_matched ? hh_condition(s.quad) : c.rabi;
      cols.push_back(time_scan(s, rabi, times).values);
    }
    for (const auto& s : systems) {
      if (s.quad.eta != 0.0) continue;
      header.push_back("S_analytic_" + eta_label(s.quad.eta));
      const double rabi = c.rabi_matched ? hh_condition(s.quad) : c.rabi;
      cols.push_back(analytic_time_scan(s, rabi, times).values);
    }
    Csv csv(header);
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::vector<double> r{times[i]};
      for (const auto& col : cols) r.push_back(col[i]);
      csv.row(r);
    }
    files.push_back({"fig2b.csv", csv.str()});
  }

  std::vector<SweepTrace> sweeps;
  if (c.emit.contains(Emit::sweep) || c.emit.contains(Emit::estimate)) {
    for (const auto& s : systems) {
      std::vector<double> grid;
      for (double d : detunings) grid.push_back(hh_condition(s.quad) + d);
      sweeps.push_back(rabi_sweep(s, grid, c.t_fixed, jobs));
    }
  }
  if (c.emit.contains(Emit::sweep)) {
    std::vector<std::string> header{"detuning_MHz"};
    for (const auto& s : systems) header.push_back("S_" + eta_label(s.quad.eta));
    Csv csv(header);
    for (std::size_t i = 0; i < detunings.size(); ++i) {
      std::vector<double> r{detunings[i]};
      for (const auto& sw : sweeps) r.push_back(sw.signal[i]);
      csv.row(r);
    }
    files.push_back({"fig2c.csv", csv.str()});
  }
  if (c.emit.contains(Emit::eigensystem)) {
    Csv csv = eigensystem_csv(4);
    for (const auto& s : systems) {
      add_eigensystem_rows(csv, "boron", eta_label(s.quad.eta), boron_eigensystem_analytic(s.quad));
      add_eigensystem_rows(csv, "boron", eta_label(s.quad.eta), numeric_eigensystem(quadrupole_h(s.quad)));
    }
    files.push_back({"eigensystem.csv", csv.str()});
  }
  if (c.emit.contains(Emit::estimate)) {
    Csv csv({"eta_true", "omega_star_MHz", "omega_predicted_MHz", "depth", "width_MHz", "qbar_hat_MHz",
             "qbar_true_MHz", "relative_error", "relative_error_bound"});
    for (std::size_t k = 0; k < systems.size(); ++k) {
      const DipEstimate dip = locate_dip(sweeps[k]);
      const QbarEstimate q = estimate_qbar(dip);
      csv.row({systems[k].quad.eta, dip.omega_star, sweeps[k].resonance_prediction, dip.depth, dip.width, q.qbar_hat,
               c.qbar, q.qbar_hat / c.qbar - 1.0, q.relative_error_bound});
    }
    files.push_back({"estimate.csv", csv.str()});
  }
  return files;
}

std::vector<OutputFile> compute_water(const ExperimentConfig& c, unsigned jobs) {
  std::vector<OutputFile> files;
  WaterSystem s;
  s.water.d_nm = c.water_d;
  s.water.coupling = {c.water_ax, c.water_az};
  const double matched = hh_condition(s);
  const double rabi = c.rabi_matched ? matched : c.rabi;

  if (c.emit.contains(Emit::time_trace)) {
    const auto times = linspace(0.0, c.t_max, static_cast<std::size_t>(c.time_samples));
    const TimeTrace num = time_scan(s, rabi, times);
    const TimeTrace ana = analytic_time_scan(s, rabi, times);
    Csv csv({"t_us", "S_numeric", "S_analytic"});
    for (std::size_t i = 0; i < times.size(); ++i) csv.row({times[i], num.values[i], ana.values[i]});
    files.push_back({"fig3b.csv", csv.str()});
  }
  SweepTrace sweep;
  if (c.emit.contains(Emit::sweep) || c.emit.contains(Emit::estimate)) {
    std::vector<double> grid;
    for (double d : detuning_grid(c, c.water_ax)) grid.push_back(matched + d);
    sweep = rabi_sweep(s, grid, c.t_fixed, jobs);
  }
  if (c.emit.contains(Emit::sweep)) {
    Csv csv({"rabi_MHz", "S_numeric", "S_analytic"});
    for (std::size_t i = 0; i < sweep.rabi_values.size(); ++i)
      csv.row({sweep.rabi_values[i], sweep.signal[i], analytic_signal(s, sweep.rabi_values[i], c.t_fixed)});
    files.push_back({"fig3c.csv", csv.str()});
  }
  if (c.emit.contains(Emit::eigensystem)) {
    Csv csv = eigensystem_csv(4);
    add_eigensystem_rows(csv, "water", "zero_field", water_eigensystem_zero(s.water));
    add_eigensystem_rows(csv, "water", "zero_field", numeric_eigensystem(water_zero_h(s.water)));
    files.push_back({"eigensystem.csv", csv.str()});
  }
  if (c.emit.contains(Emit::estimate)) {
    const DipEstimate dip = locate_dip(sweep);
    const double d_hat = estimate_distance(dip);
    Csv csv({"omega_star_MHz", "omega_predicted_MHz", "depth", "width_MHz", "g12_hat_MHz", "d_hat_nm", "d_true_nm",
             "relative_error"});
    csv.row({dip.omega_star, matched, dip.depth, dip.width, 4.0 / 3.0 * dip.omega_star, d_hat, c.water_d,
             d_hat / c.water_d - 1.0});
    files.push_back({"estimate.csv", csv.str()});
  }
  return files;
}

struct DriveRun {
  std::string name;
  NvPopulations pops;
  double expected_period;
};

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TimeTrace zero_population(const NvPopulations& p) { return {p.times, p.zero, {}}; }

void add_leakage_row(Csv& csv, const DriveRun& r) {
  const double period = oscillation_period(zero_population(r.pops));
  csv.text_row({r.name, format_number(*std::max_element(r.pops.minus1.begin(), r.pops.minus1.end())),
                format_number(max_abs_difference(r.pops.plus1, r.pops.minus1)), format_number(period),
                format_number(r.expected_period), format_number(r.pops.diagnostics.unitarity_drift),
                format_number(r.pops.max_density_error)});
}

Csv leakage_csv() {
  return Csv({"drive", "max_P_minus1", "max_abs_P_plus1_minus_P_minus1", "rabi_period_us", "expected_period_us",
              "unitarity_drift", "max_density_error"});
}

std::vector<OutputFile> compute_polarization(const ExperimentConfig& c, unsigned jobs) {
  const EvolutionConfig ev{c.dt, c.t_max, c.time_samples, StepMethod::stepped_midpoint};
  const DriveSpec sigma{Polarization::sigma_plus, c.rabi, c.zfs, 0.0};
  const DriveSpec linear{Polarization::linear, c.rabi, c.zfs, 0.0};
  auto runs = parallel_map(2, jobs, [&](std::size_t k) {
    return k == 0 ? DriveRun{"sigma_plus", nv_lab_populations(c.zfs, sigma, ev), 1.0 / c.rabi}
                  : DriveRun{"linear", nv_lab_populations(c.zfs, linear, ev), 1.0 / (std::sqrt(2.0) * c.rabi)};
  });
  std::vector<OutputFile> files;
  if (c.emit.contains(Emit::time_trace)) {
    Csv csv({"t_us", "P_plus1_sigma_plus", "P_zero_sigma_plus", "P_minus1_sigma_plus", "P_plus1_linear",
             "P_zero_linear", "P_minus1_linear"});
    const auto& a = runs[0].pops;
    const auto& b = runs[1].pops;
    for (std::size_t i = 0; i < a.times.size(); ++i)
      csv.row({a.times[i], a.plus1[i], a.zero[i], a.minus1[i], b.plus1[i], b.zero[i], b.minus1[i]});
    files.push_back({"polarization.csv", csv.str()});
  }
  if (c.emit.contains(Emit::estimate)) {
    Csv csv = leakage_csv();
    for (const auto& r : runs) add_leakage_row(csv, r);
    files.push_back({"leakage.csv", csv.str()});
  }
  return files;
}

std::vector<OutputFile> compute_conventional(const ExperimentConfig& c, unsigned) {
  std::vector<OutputFile> files;
  if (c.emit.contains(Emit::time_trace) || c.emit.contains(Emit::estimate)) {
    const EvolutionConfig ev{c.dt, c.t_max, c.time_samples, StepMethod::stepped_midpoint};
    const DriveSpec drive{Polarization::linear, c.rabi, c.zfs + c.bias_delta, 0.0};
    // With the bias, the linear drive's |0> <-> |+1> coupling is rabi/2, so the period is 1/rabi.
    const DriveRun run{"linear_biased", nv_lab_populations(c.zfs, drive, ev, c.bias_delta), 1.0 / c.rabi};
    if (c.emit.contains(Emit::time_trace)) {
      Csv csv({"t_us", "P_plus1", "P_zero", "P_minus1"});
      const auto& p = run.pops;
      for (std::size_t i = 0; i < p.times.size(); ++i) csv.row({p.times[i], p.plus1[i], p.zero[i], p.minus1[i]});
      files.push_back({"conventional.csv", csv.str()});
    }
    if (c.emit.contains(Emit::estimate)) {
      Csv csv = leakage_csv();
      add_leakage_row(csv, run);
      files.push_back({"leakage.csv", csv.str()});
    }
  }
  if (c.emit.contains(Emit::eigensystem)) {
    Csv csv = eigensystem_csv(4);
    WaterSpec w;
    add_eigensystem_rows(csv, "water", "zero_field", water_eigensystem_zero(w));
    w.larmor = c.larmor;
    for (double deg : c.thetas_deg) {
      w.theta = deg * std::numbers::pi / 180.0;
      const std::string label = "theta_deg_" + short_number(deg);
      add_eigensystem_rows(csv, "water_bias", label, water_eigensystem_bias(w));
      add_eigensystem_rows(csv, "water_bias", label, numeric_eigensystem(water_bias_h(w)));
    }
    files.push_back({"eigensystem.csv", csv.str()});
  }
  return files;
}

std::string manifest(const ExperimentConfig& c, const std::vector<OutputFile>& files) {
  std::string s = "# zfnv run manifest\n";
  auto kv = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  kv("version", ZFNV_VERSION);
  kv("csv_schema", std::to_string(kCsvSchemaVersion));
  kv("preset", to_string(c.preset));
  for (const auto& p : c.parameters) {
    if (p.key == "preset" || p.key == "output_dir") continue;
    kv("param." + p.key, p.value);
    kv("param." + p.key + ".unit", p.unit);
    kv("param." + p.key + ".provenance", p.overridden ? "override" : "default");
  }
  kv("constant.mu0_hbar_over_4pi_SI", format_number(constants::kMu0HbarOver4Pi));
  kv("constant.gamma_e_MHz_per_T", format_number(constants::kGammaElectron));
  kv("constant.gamma_1H_MHz_per_T", format_number(constants::kGammaProton));
  kv("constant.gamma_11B_MHz_per_T", format_number(constants::kGammaBoron11));
  for (const auto& w : c.warnings) kv("warning", w);
  for (const auto& f : files) kv("file", f.name);
  return s;
}

}  // namespace

std::vector<OutputFile> compute(const ExperimentConfig& cfg, unsigned jobs) {
  std::vector<OutputFile> files;
  switch (cfg.preset) {
    case Preset::boron_nqr: files = compute_boron(cfg, jobs); break;
    case Preset::water_pair: files = compute_water(cfg, jobs); break;
    case Preset::polarization_check: files = compute_polarization(cfg, jobs); break;
    case Preset::conventional_bias_comparison: files = compute_conventional(cfg, jobs); break;
  }
  files.push_back({"manifest.txt", manifest(cfg, files)});
  return files;
}

std::vector<fs::path> run(const ExperimentConfig& cfg, const fs::path& out_dir, unsigned jobs) {
  const std::vector<OutputFile> files = compute(cfg, jobs);

  fs::create_directories(out_dir);
  const fs::path staging = out_dir / ".zfnv-staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  std::vector<fs::path> written;
  try {
    for (const auto& f : files) {
      std::ofstream out(staging / f.name, std::ios::binary);
      out << f.contents;
      if (!out) throw std::runtime_error("failed writing " + (staging / f.name).string());
    }
    for (const auto& f : files) {
      fs::rename(staging / f.name, out_dir / f.name);
      written.push_back(out_dir / f.name);
    }
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    fs::remove_all(staging, ec);
    throw;
  }
  return written;
}

}  // namespace zfnv::experiment
