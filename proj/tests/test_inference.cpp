#include <doctest.h>

#include <cmath>

#include "zfnv/errors.hpp"
#include "zfnv/inference.hpp"

using namespace zfnv;

namespace {

SweepTrace synthetic(const std::vector<double>& x, const std::function<double(double)>& f) {
  SweepTrace s;
  s.rabi_values = x;
  for (double v : x) s.signal.push_back(f(v));
  return s;
}

double grid_step(const SweepTrace& s) { return s.rabi_values[1] - s.rabi_values[0]; }

}  // namespace

TEST_CASE("locate_dip recovers the vertex of a parabola") {
  const auto x = linspace(0.0, 2.0, 21);
  const SweepTrace s = synthetic(x, [](double v) { return 0.3 + 0.3 * (v - 1.234) * (v - 1.234); });
  const DipEstimate d = locate_dip(s);
  CHECK(d.omega_star == doctest::Approx(1.234).epsilon(1e-12));
  CHECK(d.depth == doctest::Approx(0.3 * 1.234 * 1.234).epsilon(1e-10));
  CHECK(d.refine_method == "parabola3");
  CHECK(d.width > 0.0);
}

TEST_CASE("locate_dip half-depth width of a triangular dip") {
  const auto x = linspace(-1.0, 1.0, 201);
  const SweepTrace s = synthetic(x, [](double v) { return std::min(1.0, 0.5 + std::abs(v)); });
  const DipEstimate d = locate_dip(s);
  CHECK(d.width == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.depth == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("locate_dip rejects sweeps without an interior minimum") {
  const auto x = linspace(0.0, 1.0, 11);
  CHECK_THROWS_AS(locate_dip(synthetic(x, [](double v) { return 1.0 - 0.5 * v; })), NoResonanceError);
  CHECK_THROWS_AS(locate_dip(synthetic(x, [](double v) { return 0.5 + 0.5 * v; })), NoResonanceError);
  CHECK_THROWS_AS(locate_dip(synthetic(x, [](double) { return 0.8; })), NoResonanceError);
  CHECK_THROWS_AS(locate_dip(synthetic({0.0, 1.0}, [](double) { return 0.8; })), NoResonanceError);
}

TEST_CASE("estimate_qbar examples") {
  DipEstimate d;
  d.omega_star = 1.49605;
  const QbarEstimate q = estimate_qbar(d);
  CHECK(q.qbar_hat == doctest::Approx(2.9921).epsilon(1e-15));
  CHECK(q.eta_assumed == 0.0);
  CHECK(q.relative_error_bound == doctest::Approx(2.0 / std::sqrt(3.0) - 1.0).epsilon(1e-14));
  CHECK(q.relative_error_bound <= 0.16);

  CHECK(eta_misassumption_error(1.0) == doctest::Approx(0.1547).epsilon(1e-3));
  CHECK(1.0 + eta_misassumption_error(0.5) == doctest::Approx(1.0408).epsilon(1e-4));
  CHECK(eta_misassumption_error(0.0) == 0.0);

  d.omega_star = 0.0;
  CHECK_THROWS_AS(estimate_qbar(d), SpecError);
  CHECK_THROWS_AS(estimate_distance(d), SpecError);
}

TEST_CASE("estimate_distance follows the cube-root law") {
  DipEstimate d;
  d.omega_star = 0.75 * g12(0.15);
  CHECK(estimate_distance(d) == doctest::Approx(0.15).epsilon(1e-12));

  DipEstimate doubled = d;
  doubled.omega_star *= 2.0;
  CHECK(estimate_distance(d) / estimate_distance(doubled) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  CHECK(g12(0.15 * std::cbrt(2.0)) == doctest::Approx(0.5 * g12(0.15)).epsilon(1e-12));
}

TEST_CASE("round trips through the simulated sweeps") {
  const BoronSystem b;
  const SweepTrace sb = rabi_sweep(b, default_rabi_grid(b), 750.0);
  const DipEstimate db = locate_dip(sb);
  CHECK(std::abs(db.omega_star - 1.49605) <= 0.5 * grid_step(sb));
  CHECK(estimate_qbar(db).qbar_hat == doctest::Approx(b.quad.qbar).epsilon(1e-2));

  const WaterSystem w;
  const SweepTrace sw = rabi_sweep(w, default_rabi_grid(w), 800.0);
  const DipEstimate dw = locate_dip(sw);
  CHECK(std::abs(dw.omega_star - hh_condition(w.water)) <= 0.5 * grid_step(sw));
  CHECK(estimate_distance(dw) == doctest::Approx(0.15).epsilon(1e-2));
  CHECK(dw.depth == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("estimate_qbar is scale-equivariant") {
  const auto x = linspace(1.0, 2.0, 51);
  auto dip = [](double v) { return 1.0 - 0.4 * std::exp(-std::pow((v - 1.4962) / 0.05, 2)); };
  const double base = estimate_qbar(locate_dip(synthetic(x, dip))).qbar_hat;
  for (double c : {0.5, 3.0, 17.0}) {
    CAPTURE(c);
    std::vector<double> xs;
    for (double v : x) xs.push_back(c * v);
    const double scaled = estimate_qbar(locate_dip(synthetic(xs, [&](double v) { return dip(v / c); }))).qbar_hat;
    CHECK(scaled == doctest::Approx(c * base).epsilon(1e-12));
  }

  // Scaling every frequency by c and time by 1/c leaves the simulated signal unchanged.
  const double c = 2.0;
  BoronSystem b, bc;
  bc.quad.qbar = c * b.quad.qbar;
  bc.coupling.a_x = c * b.coupling.a_x;
  const auto grid = default_rabi_grid(b, 41, 3.0);
  std::vector<double> grid_c;
  for (double v : grid) grid_c.push_back(c * v);
  const double q1 = estimate_qbar(locate_dip(rabi_sweep(b, grid, 750.0))).qbar_hat;
  const double q2 = estimate_qbar(locate_dip(rabi_sweep(bc, grid_c, 750.0 / c))).qbar_hat;
  CHECK(q2 == doctest::Approx(c * q1).epsilon(1e-8));
}

TEST_CASE("empirical asymmetry error is monotone and below 16 percent") {
  std::vector<double> errors;
  for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CAPTURE(eta);
    BoronSystem b;
    b.quad.eta = eta;
    const DipEstimate d = locate_dip(rabi_sweep(b, default_rabi_grid(b), 750.0));
    const double error = estimate_qbar(d).qbar_hat / b.quad.qbar - 1.0;
    CHECK(error == doctest::Approx(eta_misassumption_error(eta)).epsilon(1e-4));
    errors.push_back(error);
  }
  CHECK(std::is_sorted(errors.begin(), errors.end()));
  CHECK(errors.back() <= 0.16);
  CHECK(errors.back() == doctest::Approx(2.0 / std::sqrt(3.0) - 1.0).epsilon(0.005 / 0.1547));
}

TEST_CASE("noise hook perturbs points in place") {
  const auto x = linspace(0.0, 1.0, 5);
  const SweepTrace s = synthetic(x, [](double v) { return 0.5 + 0.1 * v; });
  CHECK(apply_noise(s, {}).signal == s.signal);
  const SweepTrace n = apply_noise(s, [](std::size_t i, double, double y) { return y + (i % 2 ? 1e-3 : -1e-3); });
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(n.signal[i] - s.signal[i]) == doctest::Approx(1e-3));
  CHECK(n.rabi_values == s.rabi_values);
}

TEST_CASE("oscillation_period and first_minimum_time") {
  TimeTrace tr;
  tr.times = linspace(0.0, 10.0, 2001);
  for (double t : tr.times) tr.values.push_back(0.5 + 0.5 * std::cos(kTwoPi * t / 1.7));
  CHECK(oscillation_period(tr) == doctest::Approx(1.7).epsilon(1e-4));
  CHECK(first_minimum_time(tr) == doctest::Approx(0.85).epsilon(1e-4));

  TimeTrace flat;
  flat.times = {0.0, 1.0, 2.0};
  flat.values = {1.0, 0.9, 0.8};
  CHECK_THROWS_AS(oscillation_period(flat), NoResonanceError);
}
