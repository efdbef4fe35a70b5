#pragma once
//
// Lorentz-oscillator permittivity models in reduced units (c = ħ = ε₀ = 1)
// and Kramers-Kronig transforms between their real and imaginary parts.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "purcell/errors.hpp"
#include "purcell/numerics.hpp"

namespace purcell {

struct LorentzOscillator {
  double omega_t = 1.0; ///< transverse resonance frequency
  double omega_p = 0.0; ///< coupling (plasma) frequency
  double gamma = 0.0;   ///< absorption linewidth

  void validate() const {
    require(omega_t > 0.0, "LorentzOscillator: omega_t must be > 0");
    require(omega_p >= 0.0, "LorentzOscillator: omega_p must be >= 0");
    require(gamma > 0.0, "LorentzOscillator: gamma must be > 0");
  }

  cplx susceptibility(cplx omega) const {
    return omega_p * omega_p / (omega_t * omega_t - omega * omega - cplx(0.0, gamma) * omega);
  }

  bool operator==(const LorentzOscillator &) const = default;
};

/// ε(ω) = 1 + Σ_k ω_P,k² / (ω_T,k² − ω² − iγ_k ω). An empty model is vacuum.
class PermittivityModel {
public:
  PermittivityModel() = default;
  explicit PermittivityModel(std::vector<LorentzOscillator> oscillators)
      : oscillators_(std::move(oscillators)) {
    for (const auto &o : oscillators_)
      o.validate();
  }

  static PermittivityModel vacuum() { return {}; }

  const std::vector<LorentzOscillator> &oscillators() const { return oscillators_; }
  bool is_vacuum() const {
    return std::all_of(oscillators_.begin(), oscillators_.end(),
                       [](const LorentzOscillator &o) { return o.omega_p == 0.0; });
  }

  /// Largest resonance scale max(ω_T + γ); zero for vacuum.
  double resonance_scale() const {
    double s = 0.0;
    for (const auto &o : oscillators_)
      s = std::max(s, o.omega_t + o.gamma);
    return s;
  }

  bool operator==(const PermittivityModel &) const = default;

private:
  std::vector<LorentzOscillator> oscillators_;
};

/// Closed-form ε at a complex frequency in the closed upper half-plane.
inline cplx eval_permittivity(const PermittivityModel &model, cplx omega) {
  require(omega.imag() >= 0.0,
          "eval_permittivity: frequency must lie in the closed upper half-plane");
  cplx eps{1.0, 0.0};
  for (const auto &o : model.oscillators())
    eps += o.susceptibility(omega);
  return eps;
}

inline cplx eval_permittivity(const PermittivityModel &model, double omega) {
  return eval_permittivity(model, cplx(omega, 0.0));
}

/// Square root on the branch Im ≥ 0. On the real axis, where the branch is
/// ambiguous, the sign follows `real_sign` (the sign of the frequency), which
/// keeps k(−ω) = −k(ω)* for propagating waves.
inline cplx upper_sqrt(cplx z, double real_sign = 1.0) {
  cplx s = std::sqrt(z);
  if (s.imag() < 0.0)
    s = -s;
  if (s.imag() == 0.0 && real_sign < 0.0)
    s = -s;
  return s;
}

/// Wavenumber ω·√ε(ω) in a homogeneous medium, Im k ≥ 0 for either sign of ω.
inline cplx medium_wavenumber(const PermittivityModel &model, double omega) {
  const cplx eps = eval_permittivity(model, omega);
  return upper_sqrt(omega * omega * eps, omega);
}

/// A single oscillator whose ε at `omega` equals `target` (Im target > 0).
/// Convenient for reproducing a prescribed complex permittivity.
inline LorentzOscillator oscillator_matching(cplx target, double omega) {
  require(omega > 0.0, "oscillator_matching: omega must be > 0");
  const cplx chi = target - 1.0;
  require(chi.imag() > 0.0, "oscillator_matching: Im eps must be > 0");
  const double mag2 = std::norm(chi);
  double coupling = omega * omega * std::sqrt(mag2);
  if (chi.real() < 0.0)
    coupling = std::min(coupling, 0.5 * omega * omega * mag2 / -chi.real());
  const cplx d = coupling * std::conj(chi) / mag2; // ω_T² − ω² − iγω
  LorentzOscillator o;
  o.omega_p = std::sqrt(coupling);
  o.omega_t = std::sqrt(omega * omega + d.real());
  o.gamma = -d.imag() / omega;
  return o;
}

namespace detail {

inline double kk_upper_limit(const PermittivityModel &model, double omega) {
  return 2.0 * std::max({omega, model.resonance_scale(), 1.0}) + 10.0 * omega;
}

inline double integral_or_throw(const QuadratureResult &r, const char *what) {
  if (!r.converged)
    throw ConvergenceError(std::string(what) +
                           ": quadrature did not converge (error estimate " +
                           std::to_string(r.error_estimate) + ")");
  return r.value.real();
}

} // namespace detail

/// ε′(ω) − 1 reconstructed from ε″ alone:
///   ε′(ω) − 1 = (2/π) P∫₀^∞ ω′ ε″(ω′) / (ω′² − ω²) dω′,
/// the full-axis principal value folded onto [0, ∞) using ε″(−ω) = −ε″(ω).
inline double kk_real_from_imag(const PermittivityModel &model, double omega,
                                const QuadratureSpec &spec = {}) {
  require(omega > 0.0, "kk_real_from_imag: omega must be > 0");
  if (model.is_vacuum())
    return 0.0;
  auto eps_imag = [&](double w) { return eval_permittivity(model, w).imag(); };
  auto numerator = [&](double w) {
    return 2.0 / std::numbers::pi * w * eps_imag(w) / (w + omega);
  };
  const double cut = detail::kk_upper_limit(model, omega);
  const QuadratureResult near = principal_value(numerator, omega, 0.0, cut, spec);
  auto tail = [&](double w) { return numerator(w) / (w - omega); };
  const QuadratureResult far = integrate_semi_infinite_oscillatory(tail, cut, spec);
  return detail::integral_or_throw(near, "kk_real_from_imag") +
         detail::integral_or_throw(far, "kk_real_from_imag tail");
}

/// ε″(ω) reconstructed from ε′ − 1 alone:
///   ε″(ω) = −(2ω/π) P∫₀^∞ (ε′(ω′) − 1) / (ω′² − ω²) dω′.
inline double kk_imag_from_real(const PermittivityModel &model, double omega,
                                const QuadratureSpec &spec = {}) {
  require(omega > 0.0, "kk_imag_from_real: omega must be > 0");
  if (model.is_vacuum())
    return 0.0;
  auto numerator = [&](double w) {
    return -2.0 * omega / std::numbers::pi * (eval_permittivity(model, w).real() - 1.0) /
           (w + omega);
  };
  const double cut = detail::kk_upper_limit(model, omega);
  const QuadratureResult near = principal_value(numerator, omega, 0.0, cut, spec);
  auto tail = [&](double w) { return numerator(w) / (w - omega); };
  const QuadratureResult far = integrate_semi_infinite_oscillatory(tail, cut, spec);
  return detail::integral_or_throw(near, "kk_imag_from_real") +
         detail::integral_or_throw(far, "kk_imag_from_real tail");
}

struct KkResidual {
  double real_part = 0.0; ///< max |ε′_KK − ε′|
  double imag_part = 0.0; ///< max |ε″_KK − ε″|
};

/// Largest deviation of both Kramers-Kronig reconstructions from the closed
/// form over a grid of positive frequencies.
inline KkResidual kk_residual(const PermittivityModel &model, std::span<const double> omega_grid,
                              const QuadratureSpec &spec = {}) {
  KkResidual r;
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    const double w = omega_grid[i];
    require(w > 0.0, "kk_residual: grid frequencies must be > 0");
    if (i > 0)
      require(w > omega_grid[i - 1], "kk_residual: grid must be strictly ascending");
    const cplx eps = eval_permittivity(model, w);
    r.real_part = std::max(r.real_part, std::abs(1.0 + kk_real_from_imag(model, w, spec) - eps.real()));
    r.imag_part = std::max(r.imag_part, std::abs(kk_imag_from_real(model, w, spec) - eps.imag()));
  }
  return r;
}

} // namespace purcell
