#pragma once
//
// Upper-state amplitude C_u(t) from the Volterra equation
//   C_u(t) = 1 + ∫₀ᵗ dt' K̄(t − t') C_u(t'),
// its Markov limit, and a discretized-reservoir Schrödinger solution used as
// an independent reference.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "purcell/errors.hpp"
#include "purcell/numerics.hpp"
#include "purcell/spectral.hpp"

namespace purcell {

struct TimeGrid {
  double t_max = 1.0;
  std::size_t n_steps = 2;

  TimeGrid() = default;
  TimeGrid(double horizon, std::size_t steps) : t_max(horizon), n_steps(steps) {
    require(t_max > 0.0, "TimeGrid: t_max must be > 0");
    require(n_steps >= 2, "TimeGrid: n_steps must be >= 2");
  }
  double dt() const { return t_max / static_cast<double>(n_steps); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt(); }
};

struct Trajectory {
  TimeGrid grid;
  std::vector<cplx> c_values;

  double population(std::size_t i) const { return std::norm(c_values[i]); }
  std::size_t size() const { return c_values.size(); }
};

/// Product-trapezoidal marching:
///   C₀ = 1,  C_n = 1 + dt [½ K̄(τ_n) C₀ + Σ_{m=1}^{n−1} K̄(τ_{n−m}) C_m].
/// The implicit m = n term drops out because K̄(0) = 0.
inline Trajectory solve_volterra(const KernelTable &kt, const TimeGrid &grid) {
  const double dt = grid.dt();
  require(std::abs(kt.dt - dt) <= 1e-12 * dt, "solve_volterra: kernel table step differs from grid step");
  require(kt.k_values.size() >= grid.n_steps + 1, "solve_volterra: kernel table shorter than horizon");
  require(kt.k_values.front() == cplx(0.0, 0.0), "solve_volterra: kernel must vanish at tau = 0");

  const std::vector<cplx> &k = kt.k_values;
  std::vector<cplx> c(grid.n_steps + 1);
  c[0] = 1.0;
  for (std::size_t n = 1; n <= grid.n_steps; ++n) {
    cplx acc = 0.5 * k[n] * c[0];
    for (std::size_t m = 1; m < n; ++m)
      acc += k[n - m] * c[m];
    c[n] = 1.0 + dt * acc;
  }
  return {grid, std::move(c)};
}

struct MarkovLimit {
  double gamma = 0.0;       ///< decay rate Γ = 2π J(ω_A)
  double delta_omega = 0.0; ///< line shift δω = P∫_window J(ω)/(ω_A − ω) dω

  cplx amplitude(double t) const { return std::exp(-cplx(0.5 * gamma, delta_omega) * t); }
};

/// τ → ∞ limit of the kernel, K̄(∞) = −Γ/2 − iδω, giving
/// C_u(t) = exp[−(Γ/2 + iδω) t].
inline MarkovLimit markov_limit(const SpectralDensity &sd, const AtomConfig &atom,
                                const QuadratureSpec &spec = {}) {
  atom.validate();
  require(sd.window.contains(atom.omega_a), "markov_limit: window must enclose omega_a");
  MarkovLimit m;
  m.gamma = 2.0 * pi * kernel_weight(sd, atom, atom.omega_a);
  auto minus_weight = [&](double w) { return -kernel_weight(sd, atom, w); };
  const QuadratureResult shift =
      principal_value(minus_weight, atom.omega_a, sd.window.lo, sd.window.hi, spec);
  if (!shift.converged)
    throw ConvergenceError("markov_limit: line-shift principal value did not converge");
  m.delta_omega = shift.value.real();
  return m;
}

inline Trajectory markov_trajectory(const MarkovLimit &m, const TimeGrid &grid) {
  Trajectory t{grid, std::vector<cplx>(grid.n_steps + 1)};
  for (std::size_t i = 0; i <= grid.n_steps; ++i)
    t.c_values[i] = m.amplitude(grid.time(i));
  return t;
}

struct BathMode {
  double detuning = 0.0; ///< ω_A − ω_k
  double coupling = 0.0; ///< g_k
};

/// Single-excitation Schrödinger dynamics of the atom coupled to discrete
/// modes, in the frame rotating with each mode:
///   ċ_u = −Σ g_k β_k,   β̇_k = i(ω_A − ω_k) β_k + g_k c_u,
/// with β_k = b_k e^{i(ω_A−ω_k)t}. Classical RK4 with sub-steps sized so the
/// fastest phase advances by at most `max_phase_step` per sub-step.
inline Trajectory integrate_mode_system(std::span<const BathMode> modes, const TimeGrid &grid,
                                        double max_phase_step = 0.2) {
  double rate = 0.0, coupling2 = 0.0;
  for (const auto &m : modes) {
    rate = std::max(rate, std::abs(m.detuning));
    coupling2 += m.coupling * m.coupling;
  }
  rate = std::max(rate, std::sqrt(coupling2));
  const double dt = grid.dt();
  const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(rate * dt / max_phase_step)));
  const double h = dt / static_cast<double>(substeps);
  const std::size_t n = modes.size();

  std::vector<cplx> beta(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
  cplx c = 1.0;
  auto derivative = [&](cplx cu, const std::vector<cplx> &b, std::vector<cplx> &db) {
    cplx dc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dc -= modes[k].coupling * b[k];
      db[k] = cplx(0.0, modes[k].detuning) * b[k] + modes[k].coupling * cu;
    }
    return dc;
  };

  Trajectory out{grid, std::vector<cplx>(grid.n_steps + 1)};
  out.c_values[0] = c;
  for (std::size_t step = 1; step <= grid.n_steps; ++step) {
    for (std::size_t s = 0; s < substeps; ++s) {
      const cplx c1 = derivative(c, beta, k1);
      for (std::size_t k = 0; k < n; ++k)
        tmp[k] = beta[k] + 0.5 * h * k1[k];
      const cplx c2 = derivative(c + 0.5 * h * c1, tmp, k2);
      for (std::size_t k = 0; k < n; ++k)
        tmp[k] = beta[k] + 0.5 * h * k2[k];
      const cplx c3 = derivative(c + 0.5 * h * c2, tmp, k3);
      for (std::size_t k = 0; k < n; ++k)
        tmp[k] = beta[k] + h * k3[k];
      const cplx c4 = derivative(c + h * c3, tmp, k4);
      c += h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
      for (std::size_t k = 0; k < n; ++k)
        beta[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    out.c_values[step] = c;
  }
  return out;
}

/// Longest horizon a bath of n uniformly spaced modes over the window can
/// represent before the discrete spectrum revives: 2π/Δω.
inline double recurrence_time(const FrequencyWindow &window, std::size_t n_modes) {
  return 2.0 * pi * static_cast<double>(n_modes) / window.width();
}

/// Reference solution from a discretized reservoir: midpoint modes
/// ω_k with g_k² = J(ω_k) Δω.
inline Trajectory discrete_bath_oracle(const SpectralDensity &sd, const AtomConfig &atom,
                                       std::size_t n_modes, const TimeGrid &grid) {
  atom.validate();
  require(n_modes >= 100, "discrete_bath_oracle: n_modes must be >= 100");
  const double horizon = recurrence_time(sd.window, n_modes);
  if (grid.t_max > horizon)
    throw ContractViolation("discrete_bath_oracle: horizon " + std::to_string(grid.t_max) +
                            " exceeds the recurrence time 2*pi/d_omega = " + std::to_string(horizon));
  const double spacing = sd.window.width() / static_cast<double>(n_modes);
  std::vector<BathMode> modes(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    const double w = sd.window.lo + (static_cast<double>(k) + 0.5) * spacing;
    modes[k].detuning = atom.omega_a - w;
    modes[k].coupling = std::sqrt(std::max(0.0, kernel_weight(sd, atom, w)) * spacing);
  }
  return integrate_mode_system(modes, grid);
}

} // namespace purcell
