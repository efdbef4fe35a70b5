#pragma once
//
// Normalized local density of states S(ω) at the atom, the memory kernel
//   K̄(τ) = ∫ dω J(ω) [e^{−i(ω−ω_A)τ} − 1] / (i(ω−ω_A)),
//   J(ω) = Γ₀ ω S(ω) / (2π ω_A),
// and its tabulation on a uniform τ grid.
//

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "purcell/errors.hpp"
#include "purcell/greens.hpp"
#include "purcell/numerics.hpp"

namespace purcell {

struct AtomConfig {
  double omega_a = 1.0;                    ///< transition frequency ω_A
  Vec3 dipole_dir = Vec3::UnitZ();         ///< unit dipole orientation
  double gamma0 = 1e-3;                    ///< vacuum decay rate Γ₀

  void validate() const {
    require(omega_a > 0.0, "AtomConfig: omega_a must be > 0");
    require(gamma0 > 0.0, "AtomConfig: gamma0 must be > 0");
    require(std::abs(dipole_dir.norm() - 1.0) <= 1e-12, "AtomConfig: dipole_dir must be a unit vector");
  }
};

struct FrequencyWindow {
  double lo = 0.5;
  double hi = 1.5;

  bool contains(double w) const { return lo < w && w < hi; }
  double width() const { return hi - lo; }
  bool operator==(const FrequencyWindow &) const = default;
};

/// Not-a-knot cubic spline through strictly ascending abscissae.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    require(n >= 4 && y_.size() == n, "CubicSpline: needs at least 4 matching samples");
    for (std::size_t i = 1; i < n; ++i)
      require(x_[i] > x_[i - 1], "CubicSpline: abscissae must be strictly ascending");
    solve_second_derivatives();
  }

  std::size_t panels() const { return x_.empty() ? 0 : x_.size() - 1; }
  double knot(std::size_t i) const { return x_[i]; }

  /// Local cubic on panel i in t = x − x_i: y_i + b t + c t² + d t³.
  std::array<double, 4> coefficients(std::size_t i) const {
    const double h = x_[i + 1] - x_[i];
    const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    return {y_[i], b, 0.5 * m_[i], (m_[i + 1] - m_[i]) / (6.0 * h)};
  }

  double operator()(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, panels() - 1);
    const auto c = coefficients(i);
    const double t = x - x_[i];
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
  }

private:
  void solve_second_derivatives() {
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      h[i] = x_[i + 1] - x_[i];
    m_.assign(n, 0.0);
    if (n == 4) {
      // Not-a-knot on four points is the single interpolating cubic.
      const double d01 = (y_[1] - y_[0]) / h[0], d12 = (y_[2] - y_[1]) / h[1],
                   d23 = (y_[3] - y_[2]) / h[2];
      const double dd0 = (d12 - d01) / (h[0] + h[1]), dd1 = (d23 - d12) / (h[1] + h[2]);
      const double ddd = (dd1 - dd0) / (h[0] + h[1] + h[2]);
      const double centre = (x_[0] + x_[1] + x_[2]) / 3.0;
      for (std::size_t i = 0; i < 4; ++i)
        m_[i] = 2.0 * dd0 + 6.0 * ddd * (x_[i] - centre);
      return;
    }
    const std::size_t rows = n - 2;
    std::vector<double> diag(rows), lower(rows), upper(rows), rhs(rows);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const std::size_t r = i - 1;
      lower[r] = h[i - 1];
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i];
      rhs[r] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    // Not-a-knot: third derivative continuous across x_1 and x_{n-2}; the end
    // values M_0, M_{n-1} are eliminated from the first and last rows.
    diag[0] = (h[0] + h[1]) * (h[0] + 2.0 * h[1]) / h[1];
    upper[0] = (h[1] * h[1] - h[0] * h[0]) / h[1];
    const double ha = h[n - 3], hb = h[n - 2];
    lower[rows - 1] = (ha * ha - hb * hb) / ha;
    diag[rows - 1] = (ha + hb) * (hb + 2.0 * ha) / ha;
    for (std::size_t r = 1; r < rows; ++r) {
      const double w = lower[r] / diag[r - 1];
      diag[r] -= w * upper[r - 1];
      rhs[r] -= w * rhs[r - 1];
    }
    for (std::size_t r = rows; r-- > 0;)
      m_[r + 1] = (rhs[r] - (r + 1 < rows ? upper[r] * m_[r + 2] : 0.0)) / diag[r];
    m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
    m_[n - 1] = ((ha + hb) * m_[n - 2] - hb * m_[n - 3]) / ha;
  }

  std::vector<double> x_, y_, m_;
};

/// S(ω) = 6π μ̂·Im G(r_A, r_A, ω)·μ̂ / ω sampled on an adaptively refined grid
/// (S ≡ 1 in vacuum), with a cubic spline between samples.
struct SpectralDensity {
  std::vector<double> omega_grid;
  std::vector<double> s_values;
  FrequencyWindow window;
  CubicSpline spline;

  double operator()(double omega) const { return spline(omega); }

  /// Samples `s` on n uniform points and bisects every interval whose
  /// midpoint disagrees with the spline by more than rel_tol·max|S|.
  template <class F>
  static SpectralDensity sample(F &&s, FrequencyWindow window, std::size_t n_samples,
                                const QuadratureSpec &spec = {}, std::size_t max_samples = 200000) {
    require(window.lo > 0.0 && window.lo < window.hi, "SpectralDensity: invalid window");
    require(n_samples >= 16, "SpectralDensity: at least 16 samples are required");
    std::map<double, double> values;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double w = window.lo + window.width() * static_cast<double>(i) / static_cast<double>(n_samples - 1);
      values[w] = s(w);
    }
    std::map<double, double> probes;
    for (;;) {
      std::vector<double> xs, ys;
      xs.reserve(values.size());
      ys.reserve(values.size());
      double scale = 0.0;
      for (const auto &[w, v] : values) {
        xs.push_back(w);
        ys.push_back(v);
        scale = std::max(scale, std::abs(v));
      }
      const CubicSpline spline(xs, ys);
      const double tol = spec.target(scale);
      std::vector<double> refine;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double mid = 0.5 * (xs[i] + xs[i + 1]);
        if (!(xs[i] < mid && mid < xs[i + 1]))
          continue;
        auto it = probes.find(mid);
        if (it == probes.end())
          it = probes.emplace(mid, s(mid)).first;
        if (std::abs(it->second - spline(mid)) > tol)
          refine.push_back(mid);
      }
      if (refine.empty()) {
        SpectralDensity sd;
        sd.omega_grid = std::move(xs);
        sd.s_values = std::move(ys);
        sd.window = window;
        sd.spline = spline;
        return sd;
      }
      if (values.size() + refine.size() > max_samples)
        throw ConvergenceError("SpectralDensity: interpolation tolerance not reached within " +
                               std::to_string(max_samples) + " samples");
      for (double w : refine)
        values[w] = probes.at(w);
    }
  }
};

/// S(ω) for one frequency: 6π μ̂·Im G·μ̂ / ω.
inline double spectral_value(const Geometry &geometry, const AtomConfig &atom, double omega,
                             const QuadratureSpec &spec = {}) {
  const Mat3 im_g = im_green_at_atom(geometry, omega, spec);
  return 6.0 * pi * atom.dipole_dir.dot(im_g * atom.dipole_dir) / omega;
}

inline SpectralDensity build_spectral_density(const Geometry &geometry, const AtomConfig &atom,
                                              FrequencyWindow window, std::size_t n_samples,
                                              const QuadratureSpec &spec = {}) {
  atom.validate();
  require(window.contains(atom.omega_a), "build_spectral_density: window must enclose omega_a");
  return SpectralDensity::sample(
      [&](double w) { return spectral_value(geometry, atom, w, spec); }, window, n_samples, spec);
}

/// Γ/Γ₀ in the Markov limit, i.e. S(ω_A).
inline double purcell_factor(const Geometry &geometry, const AtomConfig &atom,
                             const QuadratureSpec &spec = {}) {
  atom.validate();
  return spectral_value(geometry, atom, atom.omega_a, spec);
}

/// Kernel weight J(ω) = Γ₀ ω S(ω) / (2π ω_A).
inline double kernel_weight(const SpectralDensity &sd, const AtomConfig &atom, double omega) {
  return atom.gamma0 * omega * sd(omega) / (2.0 * pi * atom.omega_a);
}

/// [e^{−iΔτ} − 1] / (iΔ) without cancellation; a Taylor branch covers
/// |Δ| < 1e−6 ω_A including the removable point Δ = 0, where it equals −τ.
inline cplx kernel_bracket(double detuning, double tau, double omega_a) {
  const double x = detuning * tau;
  if (std::abs(detuning) < 1e-6 * omega_a) {
    const double x2 = x * x;
    return -tau * cplx(1.0 - x2 / 6.0, -x / 2.0 + x * x2 / 24.0);
  }
  const double s_half = std::sin(0.5 * x);
  const double c_half = std::cos(0.5 * x);
  return cplx(-2.0 * s_half * c_half, 2.0 * s_half * s_half) / detuning;
}

namespace detail {

// Largest phase span (radians) a Gauss-Legendre panel of the given order may
// cover while the Taylor remainder of e^{iθu} stays below tol.
inline double max_phase_span(int order, double tol) {
  const double two_n = 2.0 * order;
  return 2.0 * std::exp((std::log(tol) + std::lgamma(two_n + 1.0)) / two_n);
}

} // namespace detail

/// K̄(τ) by composite Gauss-Legendre quadrature over the spline panels of S.
/// Each panel is split so that the phase Δ·τ varies by a bounded amount per
/// sub-panel; since S is piecewise cubic the only approximation left is that
/// of the oscillatory bracket, controlled by spec.rel_tol.
inline cplx kernel_eval(const SpectralDensity &sd, const AtomConfig &atom, double tau,
                        const QuadratureSpec &spec = {}) {
  require(tau >= 0.0, "kernel_eval: tau must be >= 0");
  require(sd.window.contains(atom.omega_a), "kernel_eval: window must enclose omega_a");
  if (tau == 0.0)
    return {0.0, 0.0};

  const double tol = std::min(spec.rel_tol, 1e-6);
  const std::array<int, 3> orders = {8, 16, 32};
  const std::array<double, 3> spans = {detail::max_phase_span(8, tol),
                                       detail::max_phase_span(16, tol),
                                       detail::max_phase_span(32, tol)};
  const double prefactor = atom.gamma0 / (2.0 * pi * atom.omega_a);

  cplx total{0.0, 0.0};
  for (std::size_t p = 0; p < sd.spline.panels(); ++p) {
    const double lo = sd.spline.knot(p);
    const double hi = sd.spline.knot(p + 1);
    const auto c = sd.spline.coefficients(p);
    const double phase = tau * (hi - lo);
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(phase / spans[2])));
    const double sub_phase = phase / static_cast<double>(pieces);
    std::size_t which = 0;
    while (which < 2 && sub_phase > spans[which])
      ++which;
    const GaussLegendreRule &rule = gauss_legendre(orders[which]);
    const double h = (hi - lo) / static_cast<double>(pieces);
    cplx panel_sum{0.0, 0.0};
    for (std::size_t s = 0; s < pieces; ++s) {
      const double centre = lo + (static_cast<double>(s) + 0.5) * h;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double w = centre + 0.5 * h * rule.nodes[j];
        const double t = w - lo;
        const double s_val = c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        panel_sum += rule.weights[j] * (w * s_val) * kernel_bracket(w - atom.omega_a, tau, atom.omega_a);
      }
    }
    total += 0.5 * h * panel_sum;
  }
  return prefactor * total;
}

struct KernelTable {
  double dt = 0.0;
  std::vector<double> tau_grid;
  std::vector<cplx> k_values;
  FrequencyWindow window;
};

/// K̄ on {0, dt, …, n_steps·dt}; every entry is an independent kernel_eval.
inline KernelTable kernel_table(const SpectralDensity &sd, const AtomConfig &atom, double dt,
                                std::size_t n_steps, const QuadratureSpec &spec = {}) {
  require(dt > 0.0, "kernel_table: dt must be > 0");
  KernelTable table;
  table.dt = dt;
  table.window = sd.window;
  table.tau_grid.resize(n_steps + 1);
  table.k_values.resize(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n) {
    table.tau_grid[n] = static_cast<double>(n) * dt;
    table.k_values[n] = kernel_eval(sd, atom, table.tau_grid[n], spec);
  }
  return table;
}

} // namespace purcell
