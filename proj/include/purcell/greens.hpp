#pragma once
//
// Dyadic Green tensors G(r, r', ω) of the Helmholtz operator
// ∇×∇× − ω²ε(r, ω) for the canonical geometries, plus the numerical checks
// of their conjugation, reciprocity and absorption identities.
//

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "purcell/errors.hpp"
#include "purcell/numerics.hpp"
#include "purcell/permittivity.hpp"

namespace purcell {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I_unit{0.0, 1.0};

// ---------------------------------------------------------------------------
// Geometry catalogue

struct FreeSpace {};

/// Unbounded homogeneous medium. Coincidence limits are available only where
/// the medium is transparent at the evaluated frequency.
struct HomogeneousBulk {
  PermittivityModel model;
};

/// Vacuum for z > 0 above a homogeneous medium filling z < 0; the atom sits
/// on the z axis at height z_atom.
struct HalfSpace {
  PermittivityModel model;
  double z_atom = 1.0;
};

/// Vacuum sphere of radius `radius` with the atom at its center, embedded in
/// a wall medium extending to infinity.
struct SphereCavityCenter {
  double radius = 1.0;
  PermittivityModel wall;
};

struct Layer {
  double thickness = 0.0;
  PermittivityModel model;
};

/// One-dimensional scalar toy: finite layers on [0, Σ thickness] between two
/// semi-infinite absorbing outer media.
struct Toy1D {
  PermittivityModel left;
  std::vector<Layer> layers;
  PermittivityModel right;
};

using Geometry = std::variant<FreeSpace, HomogeneousBulk, HalfSpace, SphereCavityCenter, Toy1D>;

inline std::string geometry_name(const Geometry &g) {
  static const char *names[] = {"free", "bulk", "halfspace", "sphere", "toy1d"};
  return names[g.index()];
}

// ---------------------------------------------------------------------------
// Free space and homogeneous bulk

struct GreenSample {
  Mat3c matrix;
  Vec3 r;
  Vec3 r_prime;
  double omega = 0.0;
};

/// Closed-form outgoing dyadic of a homogeneous medium with wavenumber k:
///   G = e^{iu}/(4πR) [ (1 + (iu − 1)/u²) I + ((3 − 3iu − u²)/u²) R̂R̂ ],  u = kR.
inline Mat3c dyadic_homogeneous(const Vec3 &r, const Vec3 &r_prime, cplx k) {
  const Vec3 d = r - r_prime;
  const double dist = d.norm();
  require(dist > 0.0, "dyadic Green tensor: r and r' must differ");
  const Vec3 n = d / dist;
  const cplx u = k * dist;
  const cplx u2 = u * u;
  const cplx scale = std::exp(I_unit * u) / (4.0 * pi * dist);
  const cplx a = 1.0 + (I_unit * u - 1.0) / u2;
  const cplx b = (3.0 - 3.0 * I_unit * u - u2) / u2;
  return scale * (a * Mat3c::Identity() + b * (n * n.transpose()).cast<cplx>());
}

/// Vacuum Green tensor. Negative ω is accepted and yields conj(G(ω)).
inline GreenSample green_free(const Vec3 &r, const Vec3 &r_prime, double omega) {
  require(omega != 0.0, "green_free: omega must be nonzero");
  return {dyadic_homogeneous(r, r_prime, cplx(omega, 0.0)), r, r_prime, omega};
}

inline GreenSample green_bulk(const Vec3 &r, const Vec3 &r_prime, double omega,
                              const PermittivityModel &model) {
  require(omega != 0.0, "green_bulk: omega must be nonzero");
  return {dyadic_homogeneous(r, r_prime, medium_wavenumber(model, omega)), r, r_prime, omega};
}

// ---------------------------------------------------------------------------
// Planar interface: Sommerfeld integrals for the reflected field at the atom

struct HalfSpaceDiagonal {
  cplx xx{0.0, 0.0}; ///< g_xx = g_yy of the scattered field at coincidence
  cplx zz{0.0, 0.0};
};

namespace detail {

// The propagating segment carries e^{ik_z h} across k·h/2π periods; give the
// adaptive rule enough subdivisions to resolve every one of them.
inline QuadratureSpec propagating_spec(const QuadratureSpec &spec, double k, double h) {
  QuadratureSpec s = spec;
  const double periods = k * h / (2.0 * pi);
  s.max_subdivisions = std::max(spec.max_subdivisions, static_cast<int>(std::min(8.0 * periods, 1e7)));
  return s;
}

// Breakpoints for the evanescent range [0, split] under the decay e^{−κh}:
// doubling steps from 1/h so the mass near κ = 0 is never stepped over, plus
// the medium's branch point.
inline std::vector<double> evanescent_cuts(double branch, double split, double h) {
  std::vector<double> cuts{0.0, split};
  for (double c = 1.0 / h; c < split; c *= 2.0)
    cuts.push_back(c);
  if (branch > 0.0 && branch < split)
    cuts.push_back(branch);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

} // namespace detail

/// Scattering part of G at coincidence, height z above a planar interface:
///   g_xx = (i/8π) ∫ dq (q/k_z) [r_s − r_p k_z²/k²] e^{2ik_z z}
///   g_zz = (i/4π) ∫ dq (q³/(k_z k²)) r_p e^{2ik_z z}.
/// The q-axis is split at the branch point q = |k|; with q dq/k_z = −dk_z the
/// propagating segment becomes an integral over k_z ∈ [0, k] and the
/// evanescent one over κ = Im k_z ∈ [0, ∞), both free of endpoint
/// singularities.
inline HalfSpaceDiagonal green_scatter_halfspace_diag(double z, double omega,
                                                      const PermittivityModel &model,
                                                      const QuadratureSpec &spec = {}) {
  require(z > 0.0, "green_scatter_halfspace_diag: z must be > 0");
  require(omega != 0.0, "green_scatter_halfspace_diag: omega must be nonzero");
  if (model.is_vacuum())
    return {};

  const double sign = omega > 0.0 ? 1.0 : -1.0;
  const double k = omega;
  const double k2 = k * k;
  const cplx eps = eval_permittivity(model, omega);

  struct Fresnel {
    cplx rs, rp;
  };
  auto fresnel = [&](cplx kz) -> Fresnel {
    const cplx kz_medium = upper_sqrt((eps - 1.0) * k2 + kz * kz, sign);
    return {(kz - kz_medium) / (kz + kz_medium),
            (eps * kz - kz_medium) / (eps * kz + kz_medium)};
  };

  // Propagating: k_z = sign·t, t ∈ [0, |k|].
  auto prop_xx = [&](double t) {
    const cplx kz = sign * t;
    const Fresnel f = fresnel(kz);
    return sign * (f.rs - f.rp * kz * kz / k2) * std::exp(2.0 * I_unit * kz * z);
  };
  auto prop_zz = [&](double t) {
    const cplx kz = sign * t;
    return sign * (1.0 - kz * kz / k2) * fresnel(kz).rp * std::exp(2.0 * I_unit * kz * z);
  };
  // Evanescent: k_z = iκ, q dq/k_z = −i dκ.
  auto evan_xx = [&](double kappa) {
    const Fresnel f = fresnel(I_unit * kappa);
    return -I_unit * (f.rs + f.rp * kappa * kappa / k2) * std::exp(-2.0 * kappa * z);
  };
  auto evan_zz = [&](double kappa) {
    return -I_unit * (1.0 + kappa * kappa / k2) * fresnel(I_unit * kappa).rp *
           std::exp(-2.0 * kappa * z);
  };

  const double kabs = std::abs(k);
  const double branch = kabs * std::sqrt(std::max(eps.real() - 1.0, 0.0));
  const double split = std::max({2.0 * kabs, 2.0 * branch, 1.0 / z});
  const QuadratureSpec tail_spec = spec.with_period(2.0 / z);

  const std::vector<double> cuts = detail::evanescent_cuts(branch, split, 2.0 * z);
  auto integrate_evanescent = [&](auto &&f) {
    QuadratureResult r{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      r += integrate_adaptive(f, cuts[i], cuts[i + 1], spec);
    r += integrate_semi_infinite_oscillatory(f, split, tail_spec);
    return r;
  };

  const QuadratureSpec prop_spec = detail::propagating_spec(spec, kabs, 2.0 * z);
  QuadratureResult xx = integrate_adaptive(prop_xx, 0.0, kabs, prop_spec);
  xx += integrate_evanescent(evan_xx);
  QuadratureResult zz = integrate_adaptive(prop_zz, 0.0, kabs, prop_spec);
  zz += integrate_evanescent(evan_zz);
  if (!xx.converged || !zz.converged)
    throw ConvergenceError("green_scatter_halfspace_diag: Sommerfeld integral did not converge "
                           "(z = " + std::to_string(z) + ", omega = " + std::to_string(omega) + ")");
  return {I_unit / (8.0 * pi) * xx.value, I_unit / (4.0 * pi) * zz.value};
}

/// Reflected part of G between two points above the interface (z, z' > 0),
/// from the angular spectrum of s- and p-polarized plane waves:
///   G_R = (i/8π²) ∫d²k_∥ (1/k_z) [r_s M_s + r_p M_p] e^{i k_∥·ρ + i k_z (z + z')}.
/// The azimuthal integral is done in closed form, leaving J₀, J₁, J₂ kernels.
inline Mat3c green_reflected_halfspace(const Vec3 &r, const Vec3 &r_prime, double omega,
                                       const PermittivityModel &model,
                                       const QuadratureSpec &spec = {}) {
  require(r.z() > 0.0 && r_prime.z() > 0.0,
          "green_reflected_halfspace: both points must lie above the interface");
  require(omega != 0.0, "green_reflected_halfspace: omega must be nonzero");
  if (model.is_vacuum())
    return Mat3c::Zero();

  const double sign = omega > 0.0 ? 1.0 : -1.0;
  const double k = omega;
  const double k2 = k * k;
  const double kabs = std::abs(k);
  const cplx eps = eval_permittivity(model, omega);
  const double height = r.z() + r_prime.z();
  const double dx = r.x() - r_prime.x(), dy = r.y() - r_prime.y();
  const double rho = std::hypot(dx, dy);
  const double cos_phi = rho > 0.0 ? dx / rho : 1.0;
  const double sin_phi = rho > 0.0 ? dy / rho : 0.0;

  // Components: ∫ (q dq/k_z) e^{ik_z h} × { r_s J₀, r_s J₂, r_p (k_z²/k²) J₀,
  // r_p (k_z²/k²) J₂, r_p (q k_z/k²) J₁, r_p (q²/k²) J₀ }.
  using Terms = ComplexArray<6>;
  auto terms = [&](cplx kz, double q, cplx measure) {
    const cplx kz_medium = upper_sqrt((eps - 1.0) * k2 + kz * kz, sign);
    const cplx rs = (kz - kz_medium) / (kz + kz_medium);
    const cplx rp = (eps * kz - kz_medium) / (eps * kz + kz_medium);
    const cplx w = measure * std::exp(I_unit * kz * height);
    const double x = q * rho;
    const double j0 = std::cyl_bessel_j(0.0, x);
    const double j1 = rho > 0.0 ? std::cyl_bessel_j(1.0, x) : 0.0;
    const double j2 = rho > 0.0 ? std::cyl_bessel_j(2.0, x) : 0.0;
    Terms t;
    t[0] = w * rs * j0;
    t[1] = w * rs * j2;
    t[2] = w * rp * (kz * kz / k2) * j0;
    t[3] = w * rp * (kz * kz / k2) * j2;
    t[4] = w * rp * (q * kz / k2) * j1;
    t[5] = w * rp * (q * q / k2) * j0;
    return t;
  };
  // Propagating: k_z = sign·t, q = √(k² − t²), q dq/k_z → sign·dt.
  auto propagating = [&](double t) {
    return terms(sign * t, std::sqrt(std::max(k2 - t * t, 0.0)), cplx(sign, 0.0));
  };
  // Evanescent: k_z = iκ, q = √(k² + κ²), q dq/k_z → −i dκ.
  auto evanescent = [&](double kappa) {
    return terms(I_unit * kappa, std::sqrt(k2 + kappa * kappa), -I_unit);
  };

  const double branch = kabs * std::sqrt(std::max(eps.real() - 1.0, 0.0));
  const double split = std::max({2.0 * kabs, 2.0 * branch, 1.0 / height});
  QuadratureSpec tail_spec = spec.without_period();
  if (rho > 0.0)
    tail_spec = spec.with_period(2.0 * pi / rho);

  BasicQuadratureResult<Terms> total =
      integrate_adaptive(propagating, 0.0, kabs, detail::propagating_spec(spec, kabs, height));
  const std::vector<double> cuts = detail::evanescent_cuts(branch, split, height);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_adaptive(evanescent, cuts[i], cuts[i + 1], spec);
  total += integrate_semi_infinite_oscillatory(evanescent, split, tail_spec);
  if (!total.converged)
    throw ConvergenceError("green_reflected_halfspace: Sommerfeld integral did not converge");

  const Terms &I = total.value;
  const double c2 = cos_phi * cos_phi - sin_phi * sin_phi;
  const double s2 = 2.0 * sin_phi * cos_phi;
  Mat3c g;
  g(0, 0) = 0.5 * (I[0] + c2 * I[1]) - 0.5 * (I[2] - c2 * I[3]);
  g(1, 1) = 0.5 * (I[0] - c2 * I[1]) - 0.5 * (I[2] + c2 * I[3]);
  g(0, 1) = 0.5 * s2 * (I[1] + I[3]);
  g(1, 0) = g(0, 1);
  g(0, 2) = -I_unit * cos_phi * I[4];
  g(2, 0) = I_unit * cos_phi * I[4];
  g(1, 2) = -I_unit * sin_phi * I[4];
  g(2, 1) = I_unit * sin_phi * I[4];
  g(2, 2) = I[5];
  return I_unit / (4.0 * pi) * g;
}

inline GreenSample green_halfspace(const Vec3 &r, const Vec3 &r_prime, double omega,
                                   const PermittivityModel &model, const QuadratureSpec &spec = {}) {
  GreenSample s = green_free(r, r_prime, omega);
  s.matrix += green_reflected_halfspace(r, r_prime, omega, model, spec);
  return s;
}

// ---------------------------------------------------------------------------
// Sphere: l = 1 electric-type reflection seen from the center

namespace detail {

// Riccati-Bessel functions ψ(x) = x j₁(x), ζ(x) = x h₁⁽¹⁾(x) and their
// derivatives, for complex argument.
inline cplx riccati_j(cplx x) {
  if (std::abs(x) < 0.1) {
    const cplx x2 = x * x;
    return x2 / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)));
  }
  return std::sin(x) / x - std::cos(x);
}
inline cplx riccati_j_prime(cplx x) {
  if (std::abs(x) < 0.1) {
    const cplx x2 = x * x;
    return 2.0 * x / 3.0 * (1.0 - x2 / 5.0 * (1.0 - 3.0 * x2 / 56.0 * (1.0 - 2.0 * x2 / 81.0)));
  }
  return std::cos(x) / x - std::sin(x) / (x * x) + std::sin(x);
}
inline cplx riccati_h(cplx x) { return -std::exp(I_unit * x) * (1.0 + I_unit / x); }
inline cplx riccati_h_prime(cplx x) {
  return -std::exp(I_unit * x) * (I_unit - 1.0 / x - I_unit / (x * x));
}
// ζ'(x)/ζ(x) without the exponential, safe for large Im x.
inline cplx riccati_h_log_derivative(cplx x) {
  return (I_unit - 1.0 / x - I_unit / (x * x)) / (1.0 + I_unit / x);
}

} // namespace detail

/// Coefficient R1 of the regular (ψ) wave that the wall sends back to the
/// center: inside the cavity the l = 1 TM radial function is ζ(kr) + R1 ψ(kr),
/// matched to a transmitted ζ(nkr) in the wall. The scattered Green tensor at
/// the center is (ik/6π) R1 · I.
inline cplx sphere_center_reflection(double radius, double omega, const PermittivityModel &wall,
                                     const QuadratureSpec & = {}) {
  require(radius > 0.0, "sphere_center_reflection: radius must be > 0");
  require(omega != 0.0, "sphere_center_reflection: omega must be nonzero");
  if (wall.is_vacuum())
    return {0.0, 0.0};
  const cplx k_wall = medium_wavenumber(wall, omega);
  const cplx n = k_wall / omega;
  const cplx x_in = omega * radius;
  const cplx x_out = k_wall * radius;
  // Continuity of tangential E (∝ ξ'/x·k) and H (∝ ξ/x·k²/ω) at r = R.
  const cplx q = detail::riccati_h_log_derivative(x_out) / n;
  return (q * detail::riccati_h(x_in) - detail::riccati_h_prime(x_in)) /
         (detail::riccati_j_prime(x_in) - q * detail::riccati_j(x_in));
}

/// Ratio of incoming to outgoing spherical-wave amplitude at the wall,
/// r = (R1/2)/(1 + R1/2). Passivity means |r| ≤ 1.
inline cplx sphere_wall_reflection(cplx center_reflection) {
  return center_reflection / (2.0 + center_reflection);
}

// ---------------------------------------------------------------------------
// Coincidence limit at the atom

inline Mat3 im_green_free_coincident(double omega) {
  return (omega / (6.0 * pi)) * Mat3::Identity();
}

/// Im G(r_A, r_A, ω) for a geometry whose atom sits in a transparent region.
inline Mat3 im_green_at_atom(const Geometry &geometry, double omega,
                             const QuadratureSpec &spec = {}) {
  require(omega > 0.0, "im_green_at_atom: omega must be > 0");
  return std::visit(
      [&](const auto &g) -> Mat3 {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, FreeSpace>) {
          return im_green_free_coincident(omega);
        } else if constexpr (std::is_same_v<T, HomogeneousBulk>) {
          const cplx eps = eval_permittivity(g.model, omega);
          if (eps.imag() != 0.0)
            throw ContractViolation("im_green_at_atom: atom inside an absorbing bulk medium "
                                    "(Im eps != 0) has no finite local field");
          require(eps.real() > 0.0, "im_green_at_atom: bulk medium must be propagating");
          return (omega * std::sqrt(eps.real()) / (6.0 * pi)) * Mat3::Identity();
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          const HalfSpaceDiagonal s = green_scatter_halfspace_diag(g.z_atom, omega, g.model, spec);
          Mat3 m = im_green_free_coincident(omega);
          m(0, 0) += s.xx.imag();
          m(1, 1) += s.xx.imag();
          m(2, 2) += s.zz.imag();
          return m;
        } else if constexpr (std::is_same_v<T, SphereCavityCenter>) {
          const cplx r1 = sphere_center_reflection(g.radius, omega, g.wall, spec);
          const double scattered = (I_unit * omega / (6.0 * pi) * r1).imag();
          return im_green_free_coincident(omega) + scattered * Mat3::Identity();
        } else {
          throw ContractViolation("im_green_at_atom: Toy1D is a scalar test geometry without "
                                  "an atom position");
        }
      },
      geometry);
}

// ---------------------------------------------------------------------------
// One-dimensional scalar toy: (−d²/dx² − ω²ε(x)) g = δ(x − x')

/// Scalar Green function of a layered line, assembled from the two
/// homogeneous solutions u_L (decaying to the left) and u_R (decaying to the
/// right), each propagated across the interfaces by transfer matrices.
class Toy1DSolver {
public:
  Toy1DSolver(const Toy1D &stack, double omega) : omega_(omega) {
    require(omega != 0.0, "Toy1D: omega must be nonzero");
    regions_.push_back({-INFINITY, 0.0, 0.0, stack.left});
    double x = 0.0;
    for (const auto &layer : stack.layers) {
      require(layer.thickness > 0.0, "Toy1D: layer thickness must be > 0");
      regions_.push_back({x, x + layer.thickness, x, layer.model});
      x += layer.thickness;
    }
    regions_.push_back({x, INFINITY, x, stack.right});
    for (auto &r : regions_) {
      r.eps = eval_permittivity(r.model, omega);
      r.k = upper_sqrt(omega * omega * r.eps, omega);
      require(r.k.imag() >= 0.0, "Toy1D: branch Im k >= 0 violated");
    }
    require(regions_.front().k.imag() > 0.0 && regions_.back().k.imag() > 0.0,
            "Toy1D: the semi-infinite outer media must be absorbing");
    sweep_left();
    sweep_right();
  }

  struct Value {
    cplx u, du;
  };

  /// g(x, x'): field at x from a unit source at x'. The Wronskian is taken
  /// at the source point, so g(x, x') and g(x', x) come from different
  /// evaluations.
  cplx green(double x, double x_prime) const {
    const Value l_src = left_solution(x_prime);
    const Value r_src = right_solution(x_prime);
    const cplx wronskian = l_src.du * r_src.u - l_src.u * r_src.du;
    if (x <= x_prime)
      return left_solution(x).u * r_src.u / wronskian;
    return l_src.u * right_solution(x).u / wronskian;
  }

  /// ∂g(x, x')/∂x.
  cplx green_dx(double x, double x_prime) const {
    const Value l_src = left_solution(x_prime);
    const Value r_src = right_solution(x_prime);
    const cplx wronskian = l_src.du * r_src.u - l_src.u * r_src.du;
    if (x <= x_prime)
      return left_solution(x).du * r_src.u / wronskian;
    return l_src.u * right_solution(x).du / wronskian;
  }

  cplx permittivity_at(double x) const { return region_at(x).eps; }
  double omega() const { return omega_; }

  std::vector<double> interfaces() const {
    std::vector<double> xs;
    for (std::size_t i = 1; i < regions_.size(); ++i)
      xs.push_back(regions_[i].lo);
    return xs;
  }
  double outer_left_decay() const { return regions_.front().k.imag(); }
  double outer_right_decay() const { return regions_.back().k.imag(); }

private:
  struct Region {
    double lo, hi, ref;
    PermittivityModel model;
    cplx eps{}, k{};
    cplx left_a{}, left_b{};   // u_L = a e^{ik(x−ref)} + b e^{−ik(x−ref)}
    cplx right_a{}, right_b{}; // u_R likewise
  };

  const Region &region_at(double x) const {
    for (const auto &r : regions_)
      if (x < r.hi)
        return r;
    return regions_.back();
  }

  static Value evaluate(const Region &r, cplx a, cplx b, double x) {
    const cplx p = std::exp(I_unit * r.k * (x - r.ref));
    const cplx m = std::exp(-I_unit * r.k * (x - r.ref));
    return {a * p + b * m, I_unit * r.k * (a * p - b * m)};
  }

  // Coefficients in `to` (referenced at x) that reproduce value/derivative v.
  static void match(const Region &to, double x, const Value &v, cplx &a, cplx &b) {
    const cplx p = std::exp(I_unit * to.k * (x - to.ref));
    const cplx m = std::exp(-I_unit * to.k * (x - to.ref));
    const cplx ratio = v.du / (I_unit * to.k);
    a = 0.5 * (v.u + ratio) / p;
    b = 0.5 * (v.u - ratio) / m;
  }

  void sweep_left() {
    regions_.front().left_a = 0.0;
    regions_.front().left_b = 1.0;
    for (std::size_t i = 1; i < regions_.size(); ++i) {
      const Region &prev = regions_[i - 1];
      const double x = regions_[i].lo;
      match(regions_[i], x, evaluate(prev, prev.left_a, prev.left_b, x), regions_[i].left_a,
            regions_[i].left_b);
    }
  }

  void sweep_right() {
    regions_.back().right_a = 1.0;
    regions_.back().right_b = 0.0;
    for (std::size_t i = regions_.size() - 1; i-- > 0;) {
      const Region &next = regions_[i + 1];
      const double x = next.lo;
      match(regions_[i], x, evaluate(next, next.right_a, next.right_b, x), regions_[i].right_a,
            regions_[i].right_b);
    }
  }

  Value left_solution(double x) const {
    const Region &r = region_at(x);
    return evaluate(r, r.left_a, r.left_b, x);
  }
  Value right_solution(double x) const {
    const Region &r = region_at(x);
    return evaluate(r, r.right_a, r.right_b, x);
  }

  double omega_;
  std::vector<Region> regions_;
};

inline cplx toy1d_green(double x, double x_prime, double omega, const Toy1D &layers,
                        const QuadratureSpec & = {}) {
  return Toy1DSolver(layers, omega).green(x, x_prime);
}

struct IdentityCheck {
  cplx lhs{};           ///< ω² ∫ ε″(s) g(x,s) g*(x',s) ds over the truncated line
  double rhs = 0.0;     ///< Im g(x, x')
  double defect = 0.0;  ///< |lhs − rhs| / |rhs|
  double boundary_flux = 0.0; ///< surface term left over at the truncation points
  bool truncation_ok = true;
};

/// Absorption identity of the Green function in one dimension,
///   ω² ∫ ds ε″(s, ω) g(x, s) g*(x', s) = Im g(x, x').
/// The line is truncated where the outer-layer attenuation has reduced the
/// surface term below a tenth of the requested tolerance.
inline IdentityCheck check_identity_1d(const Toy1D &layers, double x, double x_prime,
                                       double omega, const QuadratureSpec &spec = {}) {
  const Toy1DSolver solver(layers, omega);
  require(layers.left.is_vacuum() == false && layers.right.is_vacuum() == false,
          "check_identity_1d: outer media must be absorbing");
  for (const auto &layer : layers.layers)
    require(eval_permittivity(layer.model, omega).imag() > 0.0,
            "check_identity_1d: every layer needs eps'' > 0");

  const double target = 0.1 * spec.rel_tol;
  const double lo_anchor = std::min({x, x_prime, 0.0});
  double hi_anchor = std::max(x, x_prime);
  for (double xi : solver.interfaces())
    hi_anchor = std::max(hi_anchor, xi);
  const double left_len = std::log(1.0 / target) / (2.0 * solver.outer_left_decay());
  const double right_len = std::log(1.0 / target) / (2.0 * solver.outer_right_decay());
  const double lo = lo_anchor - left_len;
  const double hi = hi_anchor + right_len;

  std::vector<double> cuts = {lo, hi, x, x_prime};
  for (double xi : solver.interfaces())
    cuts.push_back(xi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](double s) {
    return omega * omega * solver.permittivity_at(s).imag() * solver.green(x, s) *
           std::conj(solver.green(x_prime, s));
  };
  // Reciprocity lets g(x, s) be evaluated with the source at x.
  auto u = [&](double s) { return solver.green(s, x); };
  auto du = [&](double s) { return solver.green_dx(s, x); };
  auto v = [&](double s) { return solver.green(s, x_prime); };
  auto dv = [&](double s) { return solver.green_dx(s, x_prime); };

  QuadratureSpec piece_spec = spec;
  piece_spec.rel_tol = 0.1 * spec.rel_tol;
  piece_spec.abs_tol = 0.0;
  IdentityCheck out;
  QuadratureResult total{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] < lo || cuts[i + 1] > hi || !(cuts[i] < cuts[i + 1]))
      continue;
    total += integrate_adaptive(integrand, cuts[i], cuts[i + 1], piece_spec);
  }
  if (!total.converged)
    throw ConvergenceError("check_identity_1d: quadrature did not converge");
  out.lhs = total.value;
  out.rhs = solver.green(x, x_prime).imag();
  auto surface = [&](double s) {
    return (u(s) * std::conj(dv(s)) - du(s) * std::conj(v(s))) / (2.0 * I_unit);
  };
  out.boundary_flux = std::abs(surface(hi) - surface(lo));
  out.defect = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  out.truncation_ok = out.boundary_flux <= 0.1 * spec.rel_tol * std::abs(out.rhs) + 1e-300;
  return out;
}

// ---------------------------------------------------------------------------
// Reciprocity

inline double max_abs(const Mat3c &m) { return m.cwiseAbs().maxCoeff(); }

/// ‖G(r, r') − Gᵀ(r', r)‖_max / ‖G‖_max. The sphere is implemented only at
/// its center, where the scattered tensor is isotropic and the defect is 0.
inline double check_reciprocity(const Geometry &geometry, const Vec3 &r, const Vec3 &r_prime,
                                double omega, const QuadratureSpec &spec = {}) {
  return std::visit(
      [&](const auto &g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, FreeSpace>) {
          const Mat3c a = green_free(r, r_prime, omega).matrix;
          const Mat3c b = green_free(r_prime, r, omega).matrix;
          return max_abs(a - b.transpose()) / max_abs(a);
        } else if constexpr (std::is_same_v<T, HomogeneousBulk>) {
          const Mat3c a = green_bulk(r, r_prime, omega, g.model).matrix;
          const Mat3c b = green_bulk(r_prime, r, omega, g.model).matrix;
          return max_abs(a - b.transpose()) / max_abs(a);
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          if (r == r_prime) {
            const HalfSpaceDiagonal d = green_scatter_halfspace_diag(r.z(), omega, g.model, spec);
            const Mat3c m = Eigen::Vector3cd(d.xx, d.xx, d.zz).asDiagonal();
            return max_abs(m - m.transpose()) / max_abs(m);
          }
          const Mat3c a = green_halfspace(r, r_prime, omega, g.model, spec).matrix;
          const Mat3c b = green_halfspace(r_prime, r, omega, g.model, spec).matrix;
          return max_abs(a - b.transpose()) / max_abs(a);
        } else if constexpr (std::is_same_v<T, Toy1D>) {
          const Toy1DSolver solver(g, omega);
          const cplx a = solver.green(r.x(), r_prime.x());
          const cplx b = solver.green(r_prime.x(), r.x());
          return std::abs(a - b) / std::abs(a);
        } else {
          require(r == r_prime && r.isZero(),
                  "check_reciprocity: the sphere cavity is implemented only at its center");
          return 0.0;
        }
      },
      geometry);
}

/// ‖G(r, r', −ω) − G(r, r', ω)*‖_max / ‖G‖_max. For the sphere the scattered
/// tensor at the center is compared, since the free part diverges there.
inline double check_conjugation(const Geometry &geometry, const Vec3 &r, const Vec3 &r_prime,
                                double omega, const QuadratureSpec &spec = {}) {
  require(omega > 0.0, "check_conjugation: omega must be > 0");
  auto defect = [](const Mat3c &plus, const Mat3c &minus) {
    return max_abs(minus - plus.conjugate()) / max_abs(plus);
  };
  return std::visit(
      [&](const auto &g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, FreeSpace>) {
          return defect(green_free(r, r_prime, omega).matrix, green_free(r, r_prime, -omega).matrix);
        } else if constexpr (std::is_same_v<T, HomogeneousBulk>) {
          return defect(green_bulk(r, r_prime, omega, g.model).matrix,
                        green_bulk(r, r_prime, -omega, g.model).matrix);
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return defect(green_halfspace(r, r_prime, omega, g.model, spec).matrix,
                        green_halfspace(r, r_prime, -omega, g.model, spec).matrix);
        } else if constexpr (std::is_same_v<T, SphereCavityCenter>) {
          const cplx plus = I_unit * omega / (6.0 * pi) * sphere_center_reflection(g.radius, omega, g.wall);
          const cplx minus =
              -I_unit * omega / (6.0 * pi) * sphere_center_reflection(g.radius, -omega, g.wall);
          if (plus == cplx(0.0, 0.0))
            return std::abs(minus);
          return std::abs(minus - std::conj(plus)) / std::abs(plus);
        } else {
          const cplx plus = Toy1DSolver(g, omega).green(r.x(), r_prime.x());
          const cplx minus = Toy1DSolver(g, -omega).green(r.x(), r_prime.x());
          return std::abs(minus - std::conj(plus)) / std::abs(plus);
        }
      },
      geometry);
}

} // namespace purcell
