#include "zfnv/inference.hpp"

#include <algorithm>
#include <cmath>

#include "zfnv/errors.hpp"

namespace zfnv {

namespace {

struct Vertex {
  double x;
  double y;
};

// Vertex of the parabola through three points with x0 < x1 < x2.
Vertex parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature > 0.0)) return {x1, y1};
  const double x = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  // Newton form of the interpolant.
  return {x, y0 + d01 * (x - x0) + curvature * (x - x0) * (x - x1)};
}

double crossing(double xa, double ya, double xb, double yb, double level) {
  if (yb == ya) return xa;
  return xa + (level - ya) * (xb - xa) / (yb - ya);
}

}  // namespace

DipEstimate locate_dip(const SweepTrace& sweep) {
  sweep.validate();
  const auto& x = sweep.rabi_values;
  const auto& y = sweep.signal;
  const std::size_t n = y.size();
  if (n < 3) throw NoResonanceError("sweep has fewer than three points");
  const auto min_it = std::min_element(y.begin(), y.end());
  const auto k = static_cast<std::size_t>(min_it - y.begin());
  const double top = *std::max_element(y.begin(), y.end());
  if (k == 0 || k + 1 == n) throw NoResonanceError("sweep minimum lies on the grid edge: no resonance in range");
  if (!(top - *min_it > 1e-12)) throw NoResonanceError("sweep is flat: no resonance");

  const Vertex v = parabola_vertex(x[k - 1], y[k - 1], x[k], y[k], x[k + 1], y[k + 1]);
  DipEstimate d;
  d.omega_star = std::clamp(v.x, x[k - 1], x[k + 1]);
  const double floor = std::min(v.y, *min_it);
  d.depth = std::clamp(top - floor, 0.0, 1.0);
  d.refine_method = "parabola3";

  const double half = floor + 0.5 * (top - floor);
  double left = x.front(), right = x.back();
  for (std::size_t i = k; i > 0; --i)
    if (y[i - 1] >= half) {
      left = crossing(x[i - 1], y[i - 1], x[i], y[i], half);
      break;
    }
  for (std::size_t i = k; i + 1 < n; ++i)
    if (y[i + 1] >= half) {
      right = crossing(x[i], y[i], x[i + 1], y[i + 1], half);
      break;
    }
  d.width = right - left;
  return d;
}

QbarEstimate estimate_qbar(const DipEstimate& dip, double eta_max) {
  if (!(dip.omega_star > 0.0)) throw SpecError("estimate_qbar: dip frequency must be positive");
  return {2.0 * dip.omega_star, 0.0, eta_misassumption_error(eta_max)};
}

double eta_misassumption_error(double eta) { return std::sqrt(3.0 + eta * eta) / std::sqrt(3.0) - 1.0; }

double estimate_distance(const DipEstimate& dip, double gamma_n) {
  if (!(dip.omega_star > 0.0)) throw SpecError("estimate_distance: dip frequency must be positive");
  return distance_from_g12(4.0 / 3.0 * dip.omega_star, gamma_n);
}

SweepTrace apply_noise(SweepTrace sweep, const NoiseHook& hook) {
  if (!hook) return sweep;
  for (std::size_t i = 0; i < sweep.signal.size(); ++i)
    sweep.signal[i] = hook(i, sweep.rabi_values[i], sweep.signal[i]);
  return sweep;
}

double oscillation_period(const TimeTrace& trace) {
  const auto& t = trace.times;
  const auto& y = trace.values;
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] < y[i - 1] && y[i] <= y[i + 1])
      minima.push_back(parabola_vertex(t[i - 1], y[i - 1], t[i], y[i], t[i + 1], y[i + 1]).x);
  if (minima.size() < 2) throw NoResonanceError("trace has fewer than two interior minima");
  return (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
}

double first_minimum_time(const TimeTrace& trace) {
  const auto& t = trace.times;
  const auto& y = trace.values;
  if (y.empty()) throw NoResonanceError("empty trace");
  const auto k = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
  if (k == 0 || k + 1 == y.size()) return t[k];
  return parabola_vertex(t[k - 1], y[k - 1], t[k], y[k], t[k + 1], y[k + 1]).x;
}

}  // namespace zfnv
