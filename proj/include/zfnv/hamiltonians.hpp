#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "zfnv/constants.hpp"
#include "zfnv/spin.hpp"
#include "zfnv/types.hpp"

namespace zfnv {

// Unit convention: every frequency-valued input is an ordinary frequency in MHz and
// every time is in microseconds. Builders multiply by 2 pi once, so matrix entries are
// angular frequencies in rad/us.

enum class Polarization { linear, sigma_plus, sigma_minus };

std::string to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);

struct DriveSpec {
  Polarization polarization = Polarization::sigma_plus;
  double rabi = 0.0;     // MHz
  double carrier = constants::kZeroFieldSplitting;  // MHz
  double phase = 0.0;    // rad

  void validate() const;
};

/// Spin-3/2 quadrupole interaction: coupling constant qbar (MHz) and asymmetry eta.
struct QuadrupoleSpec {
  double qbar = 0.0;
  double eta = 0.0;

  /// Throws on hard violations, returns soft warnings (eta above 1).
  std::vector<std::string> validate() const;
};

struct GeometrySpec {
  Eigen::Vector3d r_nm = Eigen::Vector3d::UnitZ();
  double gamma_e = constants::kGammaElectron;  // MHz/T
  double gamma_n = constants::kGammaBoron11;   // MHz/T

  void validate() const;
};

/// Transverse (a_x) and longitudinal (a_z) NV-nucleus couplings, MHz.
struct DipolarCoupling {
  double a_x = 0.0;
  double a_z = 0.0;

  /// Warns when |a_z| is not small against `scale` (ratio >= 0.05).
  std::vector<std::string> validate(double scale) const;
};

/// Proton pair. `axis` is the H-H direction in the NV frame.
struct WaterSpec {
  double d_nm = 0.15;
  DipolarCoupling coupling;
  double larmor = 0.0;  // MHz, bias-field variant only
  double theta = 0.0;   // rad, bias-field variant only
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double gamma_n = constants::kGammaProton;

  void validate() const;
};

enum class FrameTag { lab, interaction_rwa, dressed };

std::string to_string(FrameTag f);

struct Hamiltonian {
  OperatorMatrix op;
  FrameTag frame;

  const cmat& matrix() const { return op.mat; }
  Index dim() const { return op.dim(); }
};

/// mu0 hbar gamma_a gamma_b / (4 pi r^3) expressed as ordinary frequency, MHz.
double dipolar_constant(double r_nm, double gamma_a, double gamma_b);

/// Proton-pair coupling g12 = mu0 hbar gamma^2 / (2 pi d^3), MHz.
double g12(double d_nm, double gamma_n = constants::kGammaProton);
/// Inverse of g12(): distance in nm for a given coupling in MHz.
double distance_from_g12(double g12_mhz, double gamma_n = constants::kGammaProton);

// NV electron spin alone, basis {|+1>, |0>, |-1>}.
Hamiltonian nv_lab_linear(double zfs, const DriveSpec& drive, double t, double bias = 0.0);
Hamiltonian nv_lab_circular(double zfs, const DriveSpec& drive, double t);
/// Resonant rotating-wave form in the frame of zfs * Sz^2. Requires carrier == zfs.
Hamiltonian nv_rwa(double zfs, const DriveSpec& drive);

struct DipolarTerm {
  Hamiltonian h;  // NV (x) target, lab frame
  DipolarCoupling coupling;
};

/// Secular NV-target dipolar interaction for a target of spin `target`.
DipolarTerm dipolar_secular(const GeometrySpec& geom, Spin target);
DipolarCoupling hyperfine_from_geometry(const GeometrySpec& geom);

Hamiltonian quadrupole_h(const QuadrupoleSpec& q);

/// Lab-frame sigma+ driven NV coupled to a spin-3/2 quadrupolar nucleus (dim 12).
Hamiltonian boron_full_h(double zfs, const DriveSpec& drive, const QuadrupoleSpec& q,
                         const DipolarCoupling& c, double t);

/// Dressed-state form on {|+>, |->} (x) spin-3/2 (dim 8), |+-> = (|+1> +- |0>)/sqrt2.
Hamiltonian boron_dressed_h(double rabi, const QuadrupoleSpec& q, const DipolarCoupling& c);

Hamiltonian water_bias_h(const WaterSpec& w);
Hamiltonian water_zero_h(const WaterSpec& w);
/// Dressed NV coupled to the proton pair (dim 8); both protons share `w.coupling`.
Hamiltonian water_dressed_h(double rabi, const WaterSpec& w);

/// Projector |+><+| (x) identity on a dressed-frame space with nuclear dimension `nuclear_dim`.
cmat dressed_plus_projector(Index nuclear_dim);
cvec dressed_plus_state();
Basis dressed_basis();

}  // namespace zfnv
