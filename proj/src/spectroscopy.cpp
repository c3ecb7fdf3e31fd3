#include "zfnv/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zfnv/errors.hpp"
#include "zfnv/parallel.hpp"

namespace zfnv {

namespace {

const double kSqrt3 = std::sqrt(3.0);

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

cvec unit(Index n, Index k) {
  cvec v = cvec::Zero(n);
  v(k) = 1.0;
  return v;
}

/// Sorts (energy, state, label) triples ascending by energy, ties keep input order.
EigenSystem assemble(std::vector<double> energies, std::vector<cvec> states, std::vector<std::string> labels,
                     Provenance provenance) {
  std::vector<std::size_t> order(energies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return energies[a] < energies[b]; });
  const auto n = static_cast<Index>(energies.size());
  EigenSystem es;
  es.energies.resize(n);
  es.states.resize(states.front().size(), n);
  es.provenance = provenance;
  for (Index k = 0; k < n; ++k) {
    const std::size_t src = order[static_cast<std::size_t>(k)];
    es.energies(k) = energies[src];
    es.states.col(k) = states[src];
    es.labels.push_back(labels[src]);
  }
  return es;
}

}  // namespace

std::string system_name(const SystemPreset& s) {
  return std::visit(overloaded{[](const BoronSystem&) { return std::string("boron"); },
                               [](const WaterSystem&) { return std::string("water"); }},
                    s);
}

Index nuclear_dim(const SystemPreset&) { return 4; }

double transverse_coupling(const SystemPreset& s) {
  return std::visit(overloaded{[](const BoronSystem& b) { return b.coupling.a_x; },
                               [](const WaterSystem& w) { return w.water.coupling.a_x; }},
                    s);
}

Metadata describe(const SystemPreset& s) {
  return std::visit(overloaded{[](const BoronSystem& b) {
                                 return Metadata{{"system", "boron"},
                                                 {"qbar_MHz", fmt(b.quad.qbar)},
                                                 {"eta", fmt(b.quad.eta)},
                                                 {"a_x_MHz", fmt(b.coupling.a_x)},
                                                 {"a_z_MHz", fmt(b.coupling.a_z)}};
                               },
                               [](const WaterSystem& w) {
                                 return Metadata{{"system", "water"},
                                                 {"d_nm", fmt(w.water.d_nm)},
                                                 {"g12_MHz", fmt(g12(w.water.d_nm, w.water.gamma_n))},
                                                 {"a_x_MHz", fmt(w.water.coupling.a_x)},
                                                 {"a_z_MHz", fmt(w.water.coupling.a_z)}};
                               }},
                    s);
}

EigenSystem boron_eigensystem_analytic(const QuadrupoleSpec& q) {
  (void)q.validate();
  const double eta = q.eta;
  const double root = std::sqrt(3.0 + eta * eta);
  const double upper = (15.0 + 4.0 * kSqrt3 * root) * q.qbar / 48.0;
  const double lower = (15.0 - 4.0 * kSqrt3 * root) * q.qbar / 48.0;
  // Basis {|3/2>, |1/2>, |-1/2>, |-3/2>}.
  const cvec e0 = unit(4, 0), e1 = unit(4, 1), e2 = unit(4, 2), e3 = unit(4, 3);
  std::vector<cvec> states;
  if (eta < 1e-6) {
    states = {e0, e3, e2, e1};
  } else {
    const double a = (kSqrt3 + root) / eta;
    const double b = (kSqrt3 - root) / eta;
    const double na = std::sqrt(1.0 + a * a), nb = std::sqrt(1.0 + b * b);
    states = {(a * e0 + e2) / na, (e3 - b * e1) / nb, (b * e0 + e2) / nb, (e3 - a * e1) / na};
  }
  return assemble({upper, upper, lower, lower}, std::move(states), {"psi1", "psi2", "psi3", "psi4"},
                  Provenance::analytic);
}

EigenSystem water_eigensystem_zero(const WaterSpec& w) {
  w.validate();
  const double g = g12(w.d_nm, w.gamma_n);
  // Basis {|uu>, |ud>, |du>, |dd>}.
  const double r = 1.0 / std::sqrt(2.0);
  const cvec uu = unit(4, 0), ud = unit(4, 1), du = unit(4, 2), dd = unit(4, 3);
  return assemble({0.5 * g, 0.0, -0.25 * g, -0.25 * g}, {r * (ud + du), r * (ud - du), dd, uu},
                  {"E0", "E1", "E2", "E3"}, Provenance::analytic);
}

EigenSystem water_eigensystem_bias(const WaterSpec& w) {
  w.validate();
  const double g = g12(w.d_nm, w.gamma_n);
  const double c = std::cos(w.theta);
  const double angular = 1.0 - 3.0 * c * c;
  const double r = 1.0 / std::sqrt(2.0);
  const cvec uu = unit(4, 0), ud = unit(4, 1), du = unit(4, 2), dd = unit(4, 3);
  return assemble({-0.25 * g * angular, 0.0, -w.larmor + 0.125 * g * angular, w.larmor + 0.125 * g * angular},
                  {r * (ud + du), r * (ud - du), dd, uu}, {"E0'", "E1'", "E2'", "E3'"}, Provenance::analytic);
}

EigenSystem numeric_eigensystem(const Hamiltonian& h) {
  EigenSystem es = eig_hermitian(h.matrix());
  es.energies /= kTwoPi;
  return es;
}

EigenMatch match_eigensystems(const EigenSystem& analytic, const EigenSystem& numeric, double degeneracy_tol) {
  if (analytic.states.rows() != numeric.states.rows())
    throw DimensionError("match_eigensystems: state dimensions differ");
  // Numeric energies are ascending: split into clusters at gaps above the tolerance.
  std::vector<std::vector<Index>> clusters;
  for (Index k = 0; k < numeric.size(); ++k) {
    if (clusters.empty() || numeric.energies(k) - numeric.energies(clusters.back().back()) > degeneracy_tol)
      clusters.emplace_back();
    clusters.back().push_back(k);
  }
  EigenMatch m;
  for (Index i = 0; i < analytic.size(); ++i) {
    const cvec psi = analytic.states.col(i);
    double best = -1.0;
    Index best_c = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      double ov = 0.0;
      for (Index k : clusters[c]) ov += std::norm(numeric.states.col(k).dot(psi));
      if (ov > best) {
        best = ov;
        best_c = static_cast<Index>(c);
      }
    }
    double mean_e = 0.0;
    for (Index k : clusters[static_cast<std::size_t>(best_c)]) mean_e += numeric.energies(k);
    mean_e /= static_cast<double>(clusters[static_cast<std::size_t>(best_c)].size());
    m.cluster.push_back(best_c);
    m.overlaps.push_back(best);
    m.offsets.push_back(analytic.energies(i) - mean_e);
    m.min_overlap = std::min(m.min_overlap, best);
  }
  const auto [lo, hi] = std::minmax_element(m.offsets.begin(), m.offsets.end());
  m.max_difference_error = *hi - *lo;
  m.mean_offset = std::accumulate(m.offsets.begin(), m.offsets.end(), 0.0) / static_cast<double>(m.offsets.size());
  return m;
}

double hh_condition(const QuadrupoleSpec& q) {
  (void)q.validate();
  return kSqrt3 * std::sqrt(3.0 + q.eta * q.eta) * q.qbar / 6.0;
}

double hh_condition(const WaterSpec& w) {
  w.validate();
  return 0.75 * g12(w.d_nm, w.gamma_n);
}

double hh_condition(const SystemPreset& s) {
  return std::visit(overloaded{[](const BoronSystem& b) { return hh_condition(b.quad); },
                               [](const WaterSystem& w) { return hh_condition(w.water); }},
                    s);
}

double analytic_signal_boron(double rabi, const QuadrupoleSpec& q, const DipolarCoupling& c, double t) {
  const double detuning = rabi - hh_condition(q);
  const double ax2 = c.a_x * c.a_x;
  const double denom = 6.0 * ax2 + 8.0 * detuning * detuning;
  if (denom == 0.0) return 1.0;
  const double freq = std::sqrt(0.75 * ax2 + detuning * detuning);
  const double s = std::sin(0.5 * kTwoPi * freq * t);
  return 1.0 - 3.0 * ax2 / denom * s * s;
}

double analytic_signal_water(double rabi, const WaterSpec& w, double t) {
  const double detuning = rabi - hh_condition(w);
  const double ax2 = w.coupling.a_x * w.coupling.a_x;
  const double denom = ax2 + detuning * detuning;
  if (denom == 0.0) return 1.0;
  const double s = std::sin(0.5 * kTwoPi * std::sqrt(denom) * t);
  return 0.75 + 0.25 * (1.0 - ax2 / denom * s * s);
}

double analytic_signal(const SystemPreset& s, double rabi, double t) {
  return std::visit(
      overloaded{[&](const BoronSystem& b) { return analytic_signal_boron(rabi, b.quad, b.coupling, t); },
                 [&](const WaterSystem& w) { return analytic_signal_water(rabi, w.water, t); }},
      s);
}

Hamiltonian dressed_h(const SystemPreset& s, double rabi) {
  return std::visit(overloaded{[&](const BoronSystem& b) { return boron_dressed_h(rabi, b.quad, b.coupling); },
                               [&](const WaterSystem& w) { return water_dressed_h(rabi, w.water); }},
                    s);
}

DensityMatrix dressed_initial_state(Index nuclear_dim) {
  return kron(DensityMatrix::pure(dressed_plus_state(), dressed_basis()), DensityMatrix::maximally_mixed(nuclear_dim));
}

double numeric_signal(const SystemPreset& s, double rabi, double t) {
  const Index nd = nuclear_dim(s);
  const DensityMatrix rho0 = dressed_initial_state(nd);
  const SpectralEvolver ev(dressed_h(s, rabi).matrix());
  const DensityMatrix rho = DensityMatrix::from({ev.evolve(rho0.mat(), t), rho0.basis(), Structure::hermitian}, 1e-8);
  return expectation(rho, dressed_plus_projector(nd));
}

void SweepTrace::validate() const {
  if (rabi_values.size() != signal.size()) throw DimensionError("sweep: grid and signal differ in length");
  for (double v : signal)
    if (!(v >= -1e-6 && v <= 1.0 + 1e-6)) throw NumericalInvariantError("sweep signal outside [0, 1]");
}

std::vector<double> default_rabi_grid(const SystemPreset& s, std::size_t points, double half_width_in_coupling) {
  if (points < 3) throw SpecError("sweep grid needs at least 3 points");
  const double center = hh_condition(s);
  const double half = half_width_in_coupling * std::abs(transverse_coupling(s));
  if (!(half > 0.0)) throw SpecError("sweep half width must be positive");
  return linspace(center - half, center + half, points);
}

SweepTrace rabi_sweep(const SystemPreset& s, std::span<const double> rabi_grid, double t_fixed, unsigned jobs) {
  if (rabi_grid.empty()) throw SpecError("rabi_sweep: empty grid");
  SweepTrace out;
  out.rabi_values.assign(rabi_grid.begin(), rabi_grid.end());
  out.signal = parallel_map(rabi_grid.size(), jobs, [&](std::size_t i) { return numeric_signal(s, rabi_grid[i], t_fixed); });
  out.t_fixed = t_fixed;
  out.resonance_prediction = hh_condition(s);
  out.metadata = describe(s);
  out.metadata.emplace_back("t_fixed_us", fmt(t_fixed));
  out.validate();
  return out;
}

TimeTrace time_scan(const SystemPreset& s, double rabi, std::span<const double> t_grid) {
  const Index nd = nuclear_dim(s);
  TimeTrace tr = population_trace(dressed_initial_state(nd), dressed_h(s, rabi).matrix(), dressed_plus_projector(nd), t_grid);
  tr.metadata = describe(s);
  tr.metadata.emplace_back("rabi_MHz", fmt(rabi));
  return tr;
}

TimeTrace analytic_time_scan(const SystemPreset& s, double rabi, std::span<const double> t_grid) {
  TimeTrace tr;
  tr.times.assign(t_grid.begin(), t_grid.end());
  for (double t : t_grid) tr.values.push_back(analytic_signal(s, rabi, t));
  tr.metadata = describe(s);
  tr.metadata.emplace_back("rabi_MHz", fmt(rabi));
  tr.validate();
  return tr;
}

NvPopulations nv_lab_populations(double zfs, const DriveSpec& drive, const EvolutionConfig& cfg, double bias) {
  drive.validate();
  const auto basis = spin_basis(kSpinOne);
  const DensityMatrix rho0 = DensityMatrix::pure(unit(3, 1), basis);
  HamiltonianFn h;
  if (drive.polarization == Polarization::linear)
    h = [=](double t) { return nv_lab_linear(zfs, drive, t, bias).matrix(); };
  else
    h = [=](double t) { return nv_lab_circular(zfs, drive, t).matrix(); };
  NvPopulations out;
  auto observe = [&](double t, const DensityMatrix& rho) {
    out.times.push_back(t);
    out.plus1.push_back(rho.mat()(0, 0).real());
    out.zero.push_back(rho.mat()(1, 1).real());
    out.minus1.push_back(rho.mat()(2, 2).real());
    const DensityCheck c = check_density(rho.mat());
    out.max_density_error = std::max({out.max_density_error, c.trace_error, c.hermiticity_error, -c.min_eigenvalue});
  };
  (void)evolve_time_dependent(rho0, h, cfg, observe, &out.diagnostics);
  return out;
}

}  // namespace zfnv
