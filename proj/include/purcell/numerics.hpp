#pragma once
//
// One-dimensional quadrature engines: global adaptive Gauss-Kronrod,
// Cauchy principal values, and semi-infinite integrals of decaying or
// oscillating integrands with epsilon-algorithm acceleration.
//

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <type_traits>
#include <vector>

#include "purcell/errors.hpp"

namespace purcell {

using cplx = std::complex<double>;

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  std::optional<double> oscillation_period_hint{};

  void validate() const {
    require(rel_tol > 0.0, "QuadratureSpec: rel_tol must be > 0");
    require(abs_tol >= 0.0, "QuadratureSpec: abs_tol must be >= 0");
    require(max_subdivisions >= 1, "QuadratureSpec: max_subdivisions must be >= 1");
    if (oscillation_period_hint)
      require(*oscillation_period_hint > 0.0,
              "QuadratureSpec: oscillation_period_hint must be > 0");
  }

  QuadratureSpec with_period(double period) const {
    QuadratureSpec s = *this;
    s.oscillation_period_hint = period;
    return s;
  }
  QuadratureSpec without_period() const {
    QuadratureSpec s = *this;
    s.oscillation_period_hint.reset();
    return s;
  }

  double target(double magnitude) const {
    return std::max(abs_tol, rel_tol * magnitude);
  }
};

/// Fixed-size complex vector for integrating several related integrands in
/// one pass over shared abscissae.
template <std::size_t N> struct ComplexArray {
  std::array<cplx, N> c{};

  cplx &operator[](std::size_t i) { return c[i]; }
  const cplx &operator[](std::size_t i) const { return c[i]; }

  friend ComplexArray operator+(ComplexArray a, const ComplexArray &b) {
    for (std::size_t i = 0; i < N; ++i)
      a.c[i] += b.c[i];
    return a;
  }
  friend ComplexArray operator-(ComplexArray a, const ComplexArray &b) {
    for (std::size_t i = 0; i < N; ++i)
      a.c[i] -= b.c[i];
    return a;
  }
  friend ComplexArray operator*(cplx s, ComplexArray a) {
    for (auto &x : a.c)
      x *= s;
    return a;
  }
  friend ComplexArray operator*(double s, ComplexArray a) { return cplx(s, 0.0) * a; }
  friend ComplexArray operator/(ComplexArray a, cplx s) { return (1.0 / s) * a; }
  ComplexArray &operator+=(const ComplexArray &b) { return *this = *this + b; }
  ComplexArray &operator-=(const ComplexArray &b) { return *this = *this - b; }
  ComplexArray &operator*=(double s) { return *this = s * *this; }
};

namespace detail {

inline double magnitude(const cplx &v) { return std::abs(v); }
template <std::size_t N> double magnitude(const ComplexArray<N> &v) {
  double m = 0.0;
  for (const auto &x : v.c)
    m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(const cplx &v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
template <std::size_t N> bool all_finite(const ComplexArray<N> &v) {
  for (const auto &x : v.c)
    if (!all_finite(x))
      return false;
  return true;
}

// Real- and complex-valued integrands are both integrated as complex.
template <class F>
using value_of = std::conditional_t<std::is_convertible_v<std::invoke_result_t<F &, double>, cplx>,
                                    cplx, std::decay_t<std::invoke_result_t<F &, double>>>;

} // namespace detail

template <class V> struct BasicQuadratureResult {
  V value{};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  BasicQuadratureResult &operator+=(const BasicQuadratureResult &other) {
    value += other.value;
    error_estimate += other.error_estimate;
    evaluations += other.evaluations;
    converged = converged && other.converged;
    return *this;
  }
};

/// Error estimates of vector-valued results are max-norms over components.
using QuadratureResult = BasicQuadratureResult<cplx>;

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> gk21_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> gk21_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208064614490, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> g10_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class F> value_of<F> call_checked(F &f, double x) {
  value_of<F> v;
  if constexpr (std::is_convertible_v<std::invoke_result_t<F &, double>, double>)
    v = cplx(static_cast<double>(f(x)), 0.0);
  else
    v = f(x);
  if (!all_finite(v))
    throw NonFiniteValue("integrand returned a non-finite value", x);
  return v;
}

template <class V> struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel &o) const { return error < o.error; }
};

template <class F> Panel<value_of<F>> gauss_kronrod21(F &f, double a, double b) {
  using V = value_of<F>;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  V kronrod = gk21_weights[10] * call_checked(f, c);
  V gauss{};
  for (std::size_t i = 0; i < 10; ++i) {
    const double dx = h * gk21_nodes[i];
    const V sum = call_checked(f, c - dx) + call_checked(f, c + dx);
    kronrod += gk21_weights[i] * sum;
    if (i % 2 == 1)
      gauss += g10_weights[i / 2] * sum;
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, magnitude(kronrod - gauss)};
}

} // namespace detail

/// Global adaptive Gauss-Kronrod (21-point) quadrature of a real- or
/// complex-valued function over [a, b]. The panel with the largest error is
/// bisected until the summed error meets the tolerance or the subdivision
/// budget is spent, in which case `converged` is false.
template <class F>
BasicQuadratureResult<detail::value_of<F>> integrate_adaptive(F &&f, double a, double b,
                                                              const QuadratureSpec &spec = {}) {
  using V = detail::value_of<F>;
  spec.validate();
  require(a < b, "integrate_adaptive: requires a < b");

  std::priority_queue<detail::Panel<V>> panels;
  panels.push(detail::gauss_kronrod21(f, a, b));
  std::size_t evaluations = 21;
  V total = panels.top().value;
  double error = panels.top().error;
  int subdivisions = 0;
  bool exhausted = false;

  while (error > spec.target(detail::magnitude(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      exhausted = true;
      break;
    }
    const detail::Panel<V> worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      exhausted = true; // cannot bisect further in double precision
      break;
    }
    panels.pop();
    const detail::Panel<V> left = detail::gauss_kronrod21(f, worst.a, mid);
    const detail::Panel<V> right = detail::gauss_kronrod21(f, mid, worst.b);
    evaluations += 42;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum from scratch to drop accumulated update round-off.
  total = V{};
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  BasicQuadratureResult<V> result{total, error, evaluations, true};
  result.converged = !exhausted && error <= spec.target(detail::magnitude(total));
  return result;
}

/// Cauchy principal value of the integral of f(x)/(x - pole) over [a, b].
/// The pole is removed analytically:
///   P∫ f/(x-p) = ∫ [f(x) - f(p)]/(x-p) dx + f(p) ln((b-p)/(p-a)).
template <class F>
QuadratureResult principal_value(F &&f, double pole, double a, double b,
                                 const QuadratureSpec &spec = {}) {
  spec.validate();
  require(a < pole && pole < b,
          "principal_value: pole must lie strictly inside (a, b)");
  const cplx at_pole = detail::call_checked(f, pole);
  auto regular = [&](double x) -> cplx {
    return (detail::call_checked(f, x) - at_pole) / (x - pole);
  };
  QuadratureSpec half = spec;
  half.abs_tol = 0.5 * spec.abs_tol;
  QuadratureResult result = integrate_adaptive(regular, a, pole, half);
  result += integrate_adaptive(regular, pole, b, half);
  result.value += at_pole * std::log((b - pole) / (pole - a));
  result.evaluations += 1;
  return result;
}

namespace detail {

// Wynn's epsilon algorithm over the most recent partial sums. Returns the
// highest even-column entry of the table.
inline cplx wynn_epsilon(const std::vector<cplx> &sums, std::size_t window = 21) {
  const std::size_t n = std::min(sums.size(), window);
  if (n < 3)
    return sums.back();
  std::vector<cplx> prev(n, cplx{0.0, 0.0});
  std::vector<cplx> cur(sums.end() - static_cast<std::ptrdiff_t>(n), sums.end());
  cplx best = cur.back();
  for (std::size_t col = 1; col < n; ++col) {
    std::vector<cplx> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const cplx diff = cur[i + 1] - cur[i];
      if (std::abs(diff) <= std::numeric_limits<double>::min() * 1e10)
        return best;
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (col % 2 == 0) {
      if (!std::isfinite(cur.back().real()) || !std::isfinite(cur.back().imag()))
        return best;
      best = cur.back();
    }
  }
  return best;
}

template <std::size_t N>
ComplexArray<N> wynn_epsilon(const std::vector<ComplexArray<N>> &sums, std::size_t window = 21) {
  ComplexArray<N> out;
  std::vector<cplx> component(sums.size());
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < sums.size(); ++j)
      component[j] = sums[j][i];
    out[i] = wynn_epsilon(component, window);
  }
  return out;
}

} // namespace detail

/// Integral of f over [a, ∞). With an oscillation period hint the axis is cut
/// into half-period panels (an alternating series for sinusoidal integrands);
/// without one, panel lengths double, which turns algebraic decay into a
/// geometric series. Partial sums are accelerated with the epsilon algorithm.
template <class F>
BasicQuadratureResult<detail::value_of<F>>
integrate_semi_infinite_oscillatory(F &&f, double a, const QuadratureSpec &spec = {},
                                    int max_panels = 400) {
  using V = detail::value_of<F>;
  spec.validate();
  require(std::isfinite(a), "integrate_semi_infinite_oscillatory: a must be finite");
  require(max_panels >= 4, "integrate_semi_infinite_oscillatory: panel budget too small");

  const bool oscillating = spec.oscillation_period_hint.has_value();
  double length = oscillating ? 0.5 * *spec.oscillation_period_hint
                              : std::max(1.0, std::abs(a));
  QuadratureSpec panel_spec = spec.without_period();
  panel_spec.rel_tol = 0.1 * spec.rel_tol;
  panel_spec.abs_tol = 0.1 * spec.abs_tol;

  BasicQuadratureResult<V> result{};
  std::vector<V> sums;
  std::vector<double> magnitudes;
  sums.reserve(static_cast<std::size_t>(max_panels));
  V previous_estimate{};
  double quadrature_error = 0.0;
  int small_in_a_row = 0;
  double left = a;

  for (int panel = 0; panel < max_panels; ++panel) {
    const double right = left + length;
    const BasicQuadratureResult<V> piece = integrate_adaptive(f, left, right, panel_spec);
    result.evaluations += piece.evaluations;
    result.converged = result.converged && piece.converged;
    quadrature_error += piece.error_estimate;
    sums.push_back((sums.empty() ? V{} : sums.back()) + piece.value);
    left = right;
    if (!oscillating)
      length *= 2.0;

    const V estimate = detail::wynn_epsilon(sums);
    const double tol = spec.target(detail::magnitude(estimate));
    const double change = detail::magnitude(estimate - previous_estimate);
    previous_estimate = estimate;
    // A panel that is negligible on its own, twice in a row, means the tail
    // has decayed; an accelerated estimate that stops moving means the same
    // for oscillatory tails.
    // The epsilon algorithm also "sums" divergent geometric series, so its
    // estimate is trusted only while panel contributions shrink.
    small_in_a_row = detail::magnitude(piece.value) <= tol ? small_in_a_row + 1 : 0;
    magnitudes.push_back(detail::magnitude(piece.value));
    const std::size_t n = magnitudes.size();
    const bool decaying =
        n >= 3 && magnitudes[n - 1] < magnitudes[n - 2] && magnitudes[n - 1] < magnitudes[n - 3];
    if (panel >= 3 && (small_in_a_row >= 2 || (decaying && change <= tol))) {
      result.value = small_in_a_row >= 2 ? sums.back() : estimate;
      result.error_estimate = change + quadrature_error;
      result.converged = result.converged && result.error_estimate <= tol;
      return result;
    }
  }
  result.value = previous_estimate;
  result.error_estimate = detail::magnitude(sums.back() - previous_estimate) + quadrature_error;
  result.converged = false;
  return result;
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on P_n and cached per order.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendreRule make_gauss_legendre(int n) {
  require(n >= 1, "make_gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

inline const GaussLegendreRule &gauss_legendre(int n) {
  static const std::array<GaussLegendreRule, 3> rules = {
      make_gauss_legendre(8), make_gauss_legendre(16), make_gauss_legendre(32)};
  switch (n) {
  case 8:
    return rules[0];
  case 16:
    return rules[1];
  case 32:
    return rules[2];
  default:
    throw ContractViolation("gauss_legendre: cached orders are 8, 16 and 32");
  }
}

} // namespace purcell
