#include "zfnv/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "zfnv/errors.hpp"

namespace zfnv {

std::string to_string(Provenance p) { return p == Provenance::analytic ? "analytic" : "numeric"; }

EigenSystem eig_hermitian(const cmat& h) {
  if (!is_hermitian(h, kHermTol * std::max(1.0, max_abs(h))))
    throw SpecError("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<cmat> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalInvariantError("eig_hermitian: eigensolver did not converge");
  EigenSystem es;
  es.energies = solver.eigenvalues();
  es.states = solver.eigenvectors();
  es.provenance = Provenance::numeric;
  es.labels.resize(static_cast<std::size_t>(h.rows()));
  for (Index k = 0; k < h.rows(); ++k) es.labels[static_cast<std::size_t>(k)] = "n" + std::to_string(k);
  return es;
}

cmat propagator(const EigenSystem& es, double t) {
  const cvec phases = (-kI * t * es.energies.cast<cplx>()).array().exp();
  return es.states * phases.asDiagonal() * es.states.adjoint();
}

cmat propagator(const cmat& h, double t) { return propagator(eig_hermitian(h), t); }

SpectralEvolver::SpectralEvolver(const cmat& h) : es_(eig_hermitian(h)) {}

cmat SpectralEvolver::propagator(double t) const { return zfnv::propagator(es_, t); }

cmat SpectralEvolver::evolve(const cmat& rho0, double t) const {
  const cmat& v = es_.states;
  cmat r = v.adjoint() * rho0 * v;
  const Index n = r.rows();
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      if (j != k) r(j, k) *= std::exp(-kI * (es_.energies(j) - es_.energies(k)) * t);
  return v * r * v.adjoint();
}

namespace {

void require_square_match(const DensityMatrix& rho, const cmat& h) {
  if (h.rows() != h.cols() || h.rows() != rho.dim())
    throw DimensionError("evolve: Hamiltonian and density matrix dimensions differ");
}

DensityMatrix to_density(cmat rho, const Basis& basis) {
  return DensityMatrix::from(OperatorMatrix{std::move(rho), basis, Structure::hermitian}, 1e-8);
}

}  // namespace

DensityMatrix evolve(const DensityMatrix& rho0, const cmat& h, double t) {
  require_square_match(rho0, h);
  if (t == 0.0) return rho0;
  const cmat u = propagator(h, t);
  return to_density(u * rho0.mat() * u.adjoint(), rho0.basis());
}

DensityMatrix evolve(const DensityMatrix& rho0, const Hamiltonian& h, double t) { return evolve(rho0, h.matrix(), t); }

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw SpecError("evolution dt must be > 0");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw SpecError("evolution t_max must be >= 0");
  if (samples < 2) throw SpecError("evolution samples must be >= 2");
}

double step_phase(const HamiltonianFn& h, double dt, std::span<const double> probe_times) {
  double worst = 0.0;
  for (double t : probe_times) {
    const rvec ev = Eigen::SelfAdjointEigenSolver<cmat>(h(t), Eigen::EigenvaluesOnly).eigenvalues();
    worst = std::max(worst, ev.cwiseAbs().maxCoeff() * dt);
  }
  return worst;
}

DensityMatrix evolve_time_dependent(const DensityMatrix& rho0, const HamiltonianFn& h, const EvolutionConfig& cfg,
                                    const Observer& observer, StepDiagnostics* diagnostics) {
  cfg.validate();
  StepDiagnostics diag;
  const Index dim = rho0.dim();

  std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9)));
  if (cfg.t_max == 0.0) steps = 1;
  const double dt = cfg.t_max / static_cast<double>(steps);
  diag.steps = steps;
  diag.dt_used = dt;

  // Sample k sits on step boundary round(k * steps / (samples - 1)).
  std::vector<std::size_t> sample_steps;
  const auto n_samples = static_cast<std::size_t>(cfg.samples);
  for (std::size_t k = 0; k < n_samples; ++k)
    sample_steps.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(steps) / static_cast<double>(n_samples - 1))));

  auto emit = [&](std::size_t step, const cmat& u) {
    if (!observer) return;
    const DensityMatrix rho = to_density(u * rho0.mat() * u.adjoint(), rho0.basis());
    observer(static_cast<double>(step) * dt, rho);
  };

  cmat u = cmat::Identity(dim, dim);
  std::size_t next_sample = 0;
  auto flush = [&](std::size_t step) {
    while (next_sample < sample_steps.size() && sample_steps[next_sample] == step) {
      emit(step, u);
      ++next_sample;
    }
  };

  if (cfg.method == StepMethod::exact_diagonalization) {
    const SpectralEvolver ev(h(0.0));
    diag.max_phase_per_step = 0.0;
    for (std::size_t k = 0; k < sample_steps.size(); ++k) {
      u = ev.propagator(static_cast<double>(sample_steps[k]) * dt);
      emit(sample_steps[k], u);
    }
    u = ev.propagator(cfg.t_max);
  } else {
    const double probes[] = {0.0, 0.5 * dt, 0.25 * cfg.t_max, 0.5 * cfg.t_max};
    diag.max_phase_per_step = step_phase(h, dt, probes);
    if (diag.max_phase_per_step > 0.5) {
      std::ostringstream msg;
      msg << "time step too coarse: one step rotates by " << diag.max_phase_per_step << " rad (limit 0.5)";
      throw SpecError(msg.str());
    }
    if (diag.max_phase_per_step > 0.1) {
      std::ostringstream msg;
      msg << "time step marginal: one step rotates by " << diag.max_phase_per_step << " rad";
      diag.warnings.push_back(msg.str());
    }
    flush(0);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t_mid = (static_cast<double>(s) + 0.5) * dt;
      const cmat hm = h(t_mid);
      if (hm.rows() != dim || hm.cols() != dim)
        throw DimensionError("evolve_time_dependent: Hamiltonian dimension differs from state");
      u = propagator(hm, dt) * u;
      flush(s + 1);
    }
  }

  diag.unitarity_drift = max_abs(u * u.adjoint() - cmat::Identity(dim, dim));
  if (diagnostics) *diagnostics = diag;
  if (diag.unitarity_drift > 1e-8) throw NumericalInvariantError("accumulated propagator lost unitarity");
  return to_density(u * rho0.mat() * u.adjoint(), rho0.basis());
}

void TimeTrace::validate() const {
  if (times.size() != values.size()) throw DimensionError("time trace: times and values differ in length");
  for (double v : values)
    if (!(v >= -1e-6 && v <= 1.0 + 1e-6)) throw NumericalInvariantError("time trace value outside [0, 1]");
}

TimeTrace population_trace(const DensityMatrix& rho0, const cmat& h, const cmat& projector,
                           std::span<const double> times) {
  require_square_match(rho0, h);
  if (projector.rows() != rho0.dim() || !is_hermitian(projector) ||
      max_abs(projector * projector - projector) > 1e-10)
    throw SpecError("population_trace: projector must be Hermitian and idempotent");
  const SpectralEvolver ev(h);
  TimeTrace tr;
  tr.times.assign(times.begin(), times.end());
  tr.values.reserve(times.size());
  for (double t : times) {
    const DensityMatrix rho = to_density(ev.evolve(rho0.mat(), t), rho0.basis());
    tr.values.push_back(expectation(rho, projector));
  }
  tr.validate();
  return tr;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t k = 0; k < n; ++k)
    out[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

}  // namespace zfnv
