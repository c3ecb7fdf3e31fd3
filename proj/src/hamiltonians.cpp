#include "zfnv/hamiltonians.hpp"

#include <cmath>
#include <sstream>

#include "zfnv/errors.hpp"

namespace zfnv {

namespace {

const double kSqrt2 = std::sqrt(2.0);

const SpinOperators& nv_ops() {
  static const SpinOperators ops = spin_operators(kSpinOne);
  return ops;
}

const SpinOperators& spin32_ops() {
  static const SpinOperators ops = spin_operators(kSpinThreeHalves);
  return ops;
}

const SpinOperators& spin12_ops() {
  static const SpinOperators ops = spin_operators(kSpinHalf);
  return ops;
}

Hamiltonian make(cmat m, Basis basis, FrameTag frame) {
  return {OperatorMatrix{std::move(m), std::move(basis), Structure::hermitian}, frame};
}

cmat kron_mat(const cmat& a, const cmat& b) { return kron(OperatorMatrix{a, {}}, OperatorMatrix{b, {}}).mat; }

Basis kron_basis(const Basis& a, const Basis& b) {
  Basis out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x + "," + y);
  return out;
}

// Dressed-frame Pauli/2 matrices on {|+>, |->}.
cmat sigma_x_half() {
  cmat s = cmat::Zero(2, 2);
  s(0, 1) = s(1, 0) = 0.5;
  return s;
}

cmat sigma_z_half() {
  cmat s = cmat::Zero(2, 2);
  s(0, 0) = 0.5;
  s(1, 1) = -0.5;
  return s;
}

struct PairOps {
  cmat x1, y1, z1, x2, y2, z2;
  Basis basis;
};

const PairOps& pair_ops() {
  static const PairOps ops = [] {
    const auto& s = spin12_ops();
    const cmat id = cmat::Identity(2, 2);
    return PairOps{kron_mat(s.x.mat, id), kron_mat(s.y.mat, id), kron_mat(s.z.mat, id),
                   kron_mat(id, s.x.mat), kron_mat(id, s.y.mat), kron_mat(id, s.z.mat),
                   kron_basis(s.z.basis, s.z.basis)};
  }();
  return ops;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw SpecError(std::string(what) + " must be finite");
}

}  // namespace

std::string to_string(Polarization p) {
  switch (p) {
    case Polarization::linear: return "linear";
    case Polarization::sigma_plus: return "sigma_plus";
    case Polarization::sigma_minus: return "sigma_minus";
  }
  return "?";
}

Polarization polarization_from_string(const std::string& s) {
  if (s == "linear") return Polarization::linear;
  if (s == "sigma_plus") return Polarization::sigma_plus;
  if (s == "sigma_minus") return Polarization::sigma_minus;
  throw SpecError("unknown polarization '" + s + "'");
}

std::string to_string(FrameTag f) {
  switch (f) {
    case FrameTag::lab: return "lab";
    case FrameTag::interaction_rwa: return "interaction_rwa";
    case FrameTag::dressed: return "dressed";
  }
  return "?";
}

void DriveSpec::validate() const {
  require_finite(rabi, "drive.rabi");
  require_finite(carrier, "drive.carrier");
  require_finite(phase, "drive.phase");
  if (rabi < 0.0) throw SpecError("drive.rabi must be >= 0");
  if (carrier <= 0.0) throw SpecError("drive.carrier must be > 0");
}

std::vector<std::string> QuadrupoleSpec::validate() const {
  require_finite(qbar, "qbar");
  require_finite(eta, "eta");
  if (qbar <= 0.0) throw SpecError("qbar must be > 0");
  if (eta < 0.0) throw SpecError("eta must be >= 0");
  if (eta > 1.0) return {"eta above 1 is outside the conventional asymmetry range"};
  return {};
}

void GeometrySpec::validate() const {
  if (!r_nm.allFinite()) throw SpecError("geometry.r must be finite");
  if (r_nm.norm() <= 0.1) throw SpecError("geometry.r must be longer than 0.1 nm");
  require_finite(gamma_e, "gamma_e");
  require_finite(gamma_n, "gamma_n");
}

std::vector<std::string> DipolarCoupling::validate(double scale) const {
  require_finite(a_x, "a_x");
  require_finite(a_z, "a_z");
  if (scale > 0.0 && std::abs(a_z) / scale >= 0.05) {
    std::ostringstream msg;
    msg << "pseudosecular coupling not << Q: |a_z|/scale = " << std::abs(a_z) / scale;
    return {msg.str()};
  }
  return {};
}

void WaterSpec::validate() const {
  require_finite(d_nm, "d");
  if (d_nm <= 0.05) throw SpecError("d must be larger than 0.05 nm");
  require_finite(larmor, "larmor");
  require_finite(theta, "theta");
  if (!axis.allFinite() || axis.norm() == 0.0) throw SpecError("water axis must be a non-zero vector");
  (void)coupling.validate(0.0);
}

double dipolar_constant(double r_nm, double gamma_a, double gamma_b) {
  const double r = r_nm * 1e-9;
  const double wa = kTwoPi * gamma_a * 1e6;  // rad/s/T
  const double wb = kTwoPi * gamma_b * 1e6;
  const double rad_per_s = constants::kMu0HbarOver4Pi * wa * wb / (r * r * r);
  return rad_per_s / kTwoPi / 1e6;
}

double g12(double d_nm, double gamma_n) { return 2.0 * dipolar_constant(d_nm, gamma_n, gamma_n); }

double distance_from_g12(double g12_mhz, double gamma_n) {
  if (!(g12_mhz > 0.0)) throw SpecError("g12 must be positive");
  return std::cbrt(2.0 * dipolar_constant(1.0, gamma_n, gamma_n) / g12_mhz);
}

Hamiltonian nv_lab_linear(double zfs, const DriveSpec& drive, double t, double bias) {
  drive.validate();
  if (drive.polarization != Polarization::linear)
    throw SpecError("nv_lab_linear requires a linearly polarized drive");
  const auto& s = nv_ops();
  const double c = std::cos(kTwoPi * drive.carrier * t + drive.phase);
  cmat m = zfs * s.z.mat * s.z.mat + bias * s.z.mat + kSqrt2 * drive.rabi * c * s.x.mat;
  return make(kTwoPi * m, s.z.basis, FrameTag::lab);
}

Hamiltonian nv_lab_circular(double zfs, const DriveSpec& drive, double t) {
  drive.validate();
  if (drive.polarization == Polarization::linear)
    throw SpecError("nv_lab_circular requires a circularly polarized drive");
  const auto& s = nv_ops();
  const double sign = drive.polarization == Polarization::sigma_plus ? 1.0 : -1.0;
  const double phase = kTwoPi * drive.carrier * t + drive.phase;
  const double amp = drive.rabi / kSqrt2;
  cmat m = zfs * s.z.mat * s.z.mat + amp * std::cos(phase) * s.x.mat + sign * amp * std::sin(phase) * s.y.mat;
  return make(kTwoPi * m, s.z.basis, FrameTag::lab);
}

Hamiltonian nv_rwa(double zfs, const DriveSpec& drive) {
  drive.validate();
  if (std::abs(drive.carrier - zfs) > 1e-9 * std::max(1.0, std::abs(zfs)))
    throw SpecError("nv_rwa requires a resonant carrier (carrier == zero-field splitting)");
  // Basis {|+1>, |0>, |-1>}.
  const cplx coupling = 0.5 * drive.rabi * std::exp(-kI * drive.phase);
  cmat m = cmat::Zero(3, 3);
  if (drive.polarization != Polarization::sigma_minus) m(0, 1) = coupling;
  if (drive.polarization != Polarization::sigma_plus) m(2, 1) = coupling;
  m(1, 0) = std::conj(m(0, 1));
  m(1, 2) = std::conj(m(2, 1));
  return make(kTwoPi * m, nv_ops().z.basis, FrameTag::interaction_rwa);
}

DipolarCoupling hyperfine_from_geometry(const GeometrySpec& geom) {
  geom.validate();
  const double r = geom.r_nm.norm();
  const Eigen::Vector3d e = geom.r_nm / r;
  const double g = dipolar_constant(r, geom.gamma_e, geom.gamma_n);
  const double transverse = std::hypot(e.x(), e.y());
  return {-3.0 * g * e.z() * transverse, -g * (3.0 * e.z() * e.z() - 1.0)};
}

DipolarTerm dipolar_secular(const GeometrySpec& geom, Spin target) {
  geom.validate();
  const double r = geom.r_nm.norm();
  const Eigen::Vector3d e = geom.r_nm / r;
  const double g = dipolar_constant(r, geom.gamma_e, geom.gamma_n);
  const SpinOperators i = spin_operators(target);
  const cmat inner = 3.0 * e.z() * (e.x() * i.x.mat + e.y() * i.y.mat) + (3.0 * e.z() * e.z() - 1.0) * i.z.mat;
  cmat m = -kTwoPi * g * kron_mat(nv_ops().z.mat, inner);
  return {make(std::move(m), kron_basis(nv_ops().z.basis, i.z.basis), FrameTag::lab),
          hyperfine_from_geometry(geom)};
}

Hamiltonian quadrupole_h(const QuadrupoleSpec& q) {
  (void)q.validate();
  const auto& i = spin32_ops();
  // qbar / (4 I (2I - 1)) with I = 3/2.
  const cmat m = (q.qbar / 12.0) * (3.0 * i.z.mat * i.z.mat - i.sq.mat +
                                   q.eta * (i.x.mat * i.x.mat - i.y.mat * i.y.mat));
  return make(kTwoPi * m, i.z.basis, FrameTag::lab);
}

Hamiltonian boron_full_h(double zfs, const DriveSpec& drive, const QuadrupoleSpec& q, const DipolarCoupling& c,
                         double t) {
  if (drive.polarization != Polarization::sigma_plus) throw SpecError("boron_full_h requires a sigma_plus drive");
  const auto& s = nv_ops();
  const auto& i = spin32_ops();
  const Hamiltonian nv = nv_lab_circular(zfs, drive, t);
  const Hamiltonian quad = quadrupole_h(q);
  cmat m = kron_mat(nv.matrix(), cmat::Identity(4, 4)) + kron_mat(cmat::Identity(3, 3), quad.matrix()) +
           kTwoPi * kron_mat(s.z.mat, c.a_x * i.x.mat + c.a_z * i.z.mat);
  return make(std::move(m), kron_basis(s.z.basis, i.z.basis), FrameTag::lab);
}

Hamiltonian boron_dressed_h(double rabi, const QuadrupoleSpec& q, const DipolarCoupling& c) {
  const auto& i = spin32_ops();
  const cmat quad = quadrupole_h(q).matrix() / kTwoPi;
  const cmat id2 = cmat::Identity(2, 2);
  cmat m = rabi * kron_mat(sigma_z_half(), cmat::Identity(4, 4)) + kron_mat(id2, quad - 0.5 * c.a_z * i.z.mat) +
           kron_mat(sigma_x_half(), c.a_x * i.x.mat + c.a_z * i.z.mat);
  return make(kTwoPi * m, kron_basis(dressed_basis(), i.z.basis), FrameTag::dressed);
}

Hamiltonian water_bias_h(const WaterSpec& w) {
  w.validate();
  const auto& p = pair_ops();
  const double c = std::cos(w.theta);
  const double g_prime = 0.5 * g12(w.d_nm, w.gamma_n) * (1.0 - 3.0 * c * c);
  const cmat m = w.larmor * (p.z1 + p.z2) + g_prime * (p.z1 * p.z2 - 0.5 * (p.x1 * p.x2 + p.y1 * p.y2));
  return make(kTwoPi * m, p.basis, FrameTag::lab);
}

Hamiltonian water_zero_h(const WaterSpec& w) {
  w.validate();
  const auto& p = pair_ops();
  const Eigen::Vector3d n = w.axis.normalized();
  const cmat n1 = n.x() * p.x1 + n.y() * p.y1 + n.z() * p.z1;
  const cmat n2 = n.x() * p.x2 + n.y() * p.y2 + n.z() * p.z2;
  const cmat dot = p.x1 * p.x2 + p.y1 * p.y2 + p.z1 * p.z2;
  const cmat m = 0.5 * g12(w.d_nm, w.gamma_n) * (dot - 3.0 * n1 * n2);
  return make(kTwoPi * m, p.basis, FrameTag::lab);
}

Hamiltonian water_dressed_h(double rabi, const WaterSpec& w) {
  const auto& p = pair_ops();
  const double ax = w.coupling.a_x, az = w.coupling.a_z;
  const cmat id2 = cmat::Identity(2, 2);
  const cmat nuclear = water_zero_h(w).matrix() / kTwoPi - 0.5 * az * (p.z1 + p.z2);
  cmat m = rabi * kron_mat(sigma_z_half(), cmat::Identity(4, 4)) + kron_mat(id2, nuclear) +
           kron_mat(sigma_x_half(), ax * (p.x1 + p.x2) + az * (p.z1 + p.z2));
  return make(kTwoPi * m, kron_basis(dressed_basis(), p.basis), FrameTag::dressed);
}

Basis dressed_basis() { return {"+", "-"}; }

cvec dressed_plus_state() {
  cvec v(2);
  v << 1.0, 0.0;
  return v;
}

cmat dressed_plus_projector(Index nuclear_dim) {
  cmat p = cmat::Zero(2, 2);
  p(0, 0) = 1.0;
  return kron_mat(p, cmat::Identity(nuclear_dim, nuclear_dim));
}

}  // namespace zfnv
