#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "zfnv/hamiltonians.hpp"
#include "zfnv/spin.hpp"
#include "zfnv/types.hpp"

namespace zfnv {

enum class Provenance { analytic, numeric };

std::string to_string(Provenance p);

/// Eigenvalues (ascending) with eigenvectors as the columns of `states`.
///
/// eig_hermitian() reports energies in the units of its input matrix; the
/// spectroscopy layer converts to ordinary frequency (MHz).
struct EigenSystem {
  rvec energies;
  cmat states;
  std::vector<std::string> labels;
  Provenance provenance = Provenance::numeric;

  Index size() const { return energies.size(); }
};

EigenSystem eig_hermitian(const cmat& h);

/// exp(-i H t) through the eigendecomposition.
cmat propagator(const EigenSystem& es, double t);
cmat propagator(const cmat& h, double t);

/// Diagonalizes once, then evolves density matrices to arbitrary times.
class SpectralEvolver {
 public:
  explicit SpectralEvolver(const cmat& h);

  const EigenSystem& eigensystem() const { return es_; }
  cmat propagator(double t) const;
  /// U rho0 U^dagger evaluated in the eigenbasis.
  cmat evolve(const cmat& rho0, double t) const;

 private:
  EigenSystem es_;
};

DensityMatrix evolve(const DensityMatrix& rho0, const cmat& h, double t);
DensityMatrix evolve(const DensityMatrix& rho0, const Hamiltonian& h, double t);

enum class StepMethod { exact_diagonalization, stepped_midpoint };

struct EvolutionConfig {
  double dt = 2e-6;    // us
  double t_max = 0.0;  // us
  int samples = 2;     // observer calls, including t = 0 and t = t_max
  StepMethod method = StepMethod::stepped_midpoint;

  void validate() const;
};

/// Hamiltonian matrix (rad/us) at time t (us).
using HamiltonianFn = std::function<cmat(double)>;
using Observer = std::function<void(double, const DensityMatrix&)>;

struct StepDiagnostics {
  std::size_t steps = 0;
  double dt_used = 0.0;
  double max_phase_per_step = 0.0;
  double unitarity_drift = 0.0;
  std::vector<std::string> warnings;
};

/// Largest |eigenvalue| * dt over the probe times: the rotation angle of one step.
double step_phase(const HamiltonianFn& h, double dt, std::span<const double> probe_times);

/// Ordered product of midpoint step propagators (or exact exponentials of h(0)).
///
/// Rejects dt when one step rotates by more than 0.5 rad, warns above 0.1 rad. Samples
/// fall on step boundaries; the observer sees validated density matrices.
DensityMatrix evolve_time_dependent(const DensityMatrix& rho0, const HamiltonianFn& h, const EvolutionConfig& cfg,
                                    const Observer& observer = {}, StepDiagnostics* diagnostics = nullptr);

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct TimeTrace {
  std::vector<double> times;  // us
  std::vector<double> values;
  Metadata metadata;

  void validate() const;
};

/// tr(rho(t) P) at each time, for time-independent h.
TimeTrace population_trace(const DensityMatrix& rho0, const cmat& h, const cmat& projector,
                           std::span<const double> times);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace zfnv
