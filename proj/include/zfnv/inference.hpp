#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "zfnv/constants.hpp"
#include "zfnv/propagator.hpp"
#include "zfnv/spectroscopy.hpp"

namespace zfnv {

/// A located resonance dip in a Rabi-frequency sweep.
struct DipEstimate {
  double omega_star = 0.0;  // MHz
  double depth = 0.0;
  double width = 0.0;       // MHz, full width at half depth
  std::string refine_method;
};

struct QbarEstimate {
  double qbar_hat = 0.0;  // MHz
  double eta_assumed = 0.0;
  double relative_error_bound = 0.0;
};

/// Minimum of the sweep refined by a parabola through the lowest sample and its two
/// neighbours. Throws NoResonanceError when the lowest sample sits on the grid edge or the
/// sweep is flat.
DipEstimate locate_dip(const SweepTrace& sweep);

/// Quadrupole constant under the eta = 0 reading, qbar = 2 * omega_star. The bound is the
/// worst-case overestimate sqrt(3 + eta_max^2)/sqrt(3) - 1.
QbarEstimate estimate_qbar(const DipEstimate& dip, double eta_max = 1.0);

/// Relative overestimate of qbar when a system with asymmetry `eta` is read as eta = 0.
double eta_misassumption_error(double eta);

/// H-H distance (nm) from a water dip: g12 = (4/3) omega_star.
double estimate_distance(const DipEstimate& dip, double gamma_n = constants::kGammaProton);

/// Per-point signal perturbation; receives (index, rabi, clean signal) and returns the noisy value.
using NoiseHook = std::function<double(std::size_t, double, double)>;

SweepTrace apply_noise(SweepTrace sweep, const NoiseHook& hook);

/// Mean spacing of the refined interior minima of an oscillating trace. Throws
/// NoResonanceError with fewer than two minima.
double oscillation_period(const TimeTrace& trace);

/// Time (us) of the lowest sample, parabola-refined when interior.
double first_minimum_time(const TimeTrace& trace);

}  // namespace zfnv
