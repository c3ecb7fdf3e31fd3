#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zfnv/hamiltonians.hpp"
#include "zfnv/propagator.hpp"

namespace zfnv {

/// 11B (spin 3/2) quadrupolar target coupled to the dressed NV.
struct BoronSystem {
  QuadrupoleSpec quad{2.9921, 0.0};
  DipolarCoupling coupling{0.66e-3, 0.0};
};

/// Proton pair of a water molecule coupled to the dressed NV.
struct WaterSystem {
  WaterSpec water{.d_nm = 0.15, .coupling = {0.63e-3, 0.0}};
};

using SystemPreset = std::variant<BoronSystem, WaterSystem>;

std::string system_name(const SystemPreset& s);
/// Nuclear Hilbert-space dimension (4 for both targets).
Index nuclear_dim(const SystemPreset& s);
double transverse_coupling(const SystemPreset& s);
Metadata describe(const SystemPreset& s);

// Closed-form eigensystems; energies are ordinary frequencies in MHz, sorted ascending.

/// Spin-3/2 quadrupole eigenstates psi1..psi4. Energies carry the constant +5 qbar/16
/// offset of the closed form relative to quadrupole_h(). Below eta = 1e-6 the limiting
/// Zeeman-basis states are used.
EigenSystem boron_eigensystem_analytic(const QuadrupoleSpec& q);
/// Zero-field proton pair: E0 triplet-0, E1 singlet, E2 |dd>, E3 |uu> (molecular axis along z).
EigenSystem water_eigensystem_zero(const WaterSpec& w);
/// High-field proton pair with Larmor frequency and bias angle theta.
EigenSystem water_eigensystem_bias(const WaterSpec& w);

/// eig_hermitian() of a builder output, converted to MHz.
EigenSystem numeric_eigensystem(const Hamiltonian& h);

struct EigenMatch {
  std::vector<Index> cluster;     // numeric degenerate cluster assigned to each analytic state
  std::vector<double> overlaps;   // |projection of analytic state onto that cluster|^2
  std::vector<double> offsets;    // analytic energy - numeric energy, per analytic state
  double mean_offset = 0.0;
  double max_difference_error = 0.0;  // max |offset_i - offset_j|
  double min_overlap = 1.0;
};

/// Compares states subspace-wise: numeric eigenvalues within `degeneracy_tol` form one cluster and
/// each analytic state is assigned to the cluster it overlaps most.
EigenMatch match_eigensystems(const EigenSystem& analytic, const EigenSystem& numeric, double degeneracy_tol);

/// Rabi frequency (MHz) at which the dressed splitting matches the target transition.
double hh_condition(const QuadrupoleSpec& q);
double hh_condition(const WaterSpec& w);
double hh_condition(const SystemPreset& s);

/// Flip-flop signal of the dressed NV with a spin-3/2 target in the eta = 0 form; the
/// detuning is taken from the matching condition of `q`.
double analytic_signal_boron(double rabi, const QuadrupoleSpec& q, const DipolarCoupling& c, double t);
double analytic_signal_water(double rabi, const WaterSpec& w, double t);
double analytic_signal(const SystemPreset& s, double rabi, double t);

Hamiltonian dressed_h(const SystemPreset& s, double rabi);
/// |+><+| (x) identity / d.
DensityMatrix dressed_initial_state(Index nuclear_dim);

/// Population of dressed |+> after time t under the dressed Hamiltonian.
double numeric_signal(const SystemPreset& s, double rabi, double t);

struct SweepTrace {
  std::vector<double> rabi_values;  // MHz
  std::vector<double> signal;
  double t_fixed = 0.0;             // us
  double resonance_prediction = 0.0;  // MHz
  Metadata metadata;

  void validate() const;
};

/// `points` Rabi values spanning +-half_width_in_coupling * a_x around the matching condition.
std::vector<double> default_rabi_grid(const SystemPreset& s, std::size_t points = 201,
                                      double half_width_in_coupling = 3.0);

/// numeric_signal on every grid point, evaluated with up to `jobs` threads (0 = all cores).
SweepTrace rabi_sweep(const SystemPreset& s, std::span<const double> rabi_grid, double t_fixed, unsigned jobs = 0);

TimeTrace time_scan(const SystemPreset& s, double rabi, std::span<const double> t_grid);
TimeTrace analytic_time_scan(const SystemPreset& s, double rabi, std::span<const double> t_grid);

/// Lab-frame populations of |+1>, |0>, |-1> for a bare NV started in |0>.
struct NvPopulations {
  std::vector<double> times;
  std::vector<double> plus1, zero, minus1;
  StepDiagnostics diagnostics;
  double max_density_error = 0.0;  // worst trace/hermiticity error over samples
};

NvPopulations nv_lab_populations(double zfs, const DriveSpec& drive, const EvolutionConfig& cfg, double bias = 0.0);

}  // namespace zfnv
