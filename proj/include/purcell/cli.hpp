#pragma once
//
// Subcommands behind the `purcell` tool. Tables are CSV with `#` header
// lines; every reported quantity is dimensionless (ω/ω_A, ω_A z, ω_A R,
// Γ₀ t, Γ/Γ₀).
//

#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "purcell/config.hpp"
#include "purcell/dynamics.hpp"
#include "purcell/greens.hpp"
#include "purcell/permittivity.hpp"
#include "purcell/spectral.hpp"

namespace purcell {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_nonconvergence = 2, exit_audit_failure = 3 };

inline const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> names = {"eps", "spectrum", "rate", "decay", "audit"};
  return names;
}

namespace detail {

inline std::string fmt(const char *format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

inline std::string sci(double v) { return fmt("%.12e", v); }

class CsvWriter {
public:
  CsvWriter(std::ostream &out, const RunConfig &cfg, const std::string &command,
            const std::vector<std::string> &columns)
      : out_(out) {
    std::string joined;
    for (const auto &c : columns)
      joined += (joined.empty() ? "" : ",") + c;
    out_ << "# purcell " << version << "\n"
         << "# command: " << command << "\n"
         << "# config_hash: fnv1a64:" << config_hash(cfg) << "\n"
         << "# units: c = hbar = eps0 = 1; frequencies in omega_a, lengths in c/omega_a, times in 1/gamma0, rates in gamma0\n"
         << "# columns: " << joined << "\n"
         << joined << "\n";
  }

  void row(const std::vector<double> &values, const std::string &label = {}) {
    if (!label.empty())
      out_ << label << ",";
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << sci(values[i]);
    out_ << "\n";
  }

private:
  std::ostream &out_;
};

inline std::string eps_material(const RunConfig &cfg) {
  if (!cfg.eps.material.empty())
    return cfg.eps.material;
  if (!cfg.geometry.material.empty())
    return cfg.geometry.material;
  if (cfg.materials.size() == 1)
    return cfg.materials.begin()->first;
  throw ConfigError("[eps] material: required when the geometry does not name a single material");
}

inline SpectralDensity config_density(const RunConfig &cfg) {
  return build_spectral_density(cfg.build_geometry(), cfg.atom(), cfg.window(), cfg.window_samples, cfg.quadrature);
}

} // namespace detail

/// ε′, ε″ and their Kramers-Kronig reconstructions on the [eps] grid.
inline int command_eps(const RunConfig &cfg, std::ostream &table) {
  const std::string name = detail::eps_material(cfg);
  const PermittivityModel model = cfg.material(name);
  detail::CsvWriter csv(table, cfg, "eps material=" + name,
                        {"omega_over_omega_a", "eps_re", "eps_im", "kk_eps_re", "kk_eps_im", "residual_re",
                         "residual_im"});
  for (std::size_t i = 0; i < cfg.eps.points; ++i) {
    const double x = cfg.eps.lo + (cfg.eps.hi - cfg.eps.lo) * static_cast<double>(i) /
                                      static_cast<double>(cfg.eps.points - 1);
    const double w = x * cfg.omega_a;
    const cplx eps = eval_permittivity(model, w);
    const double kk_re = 1.0 + kk_real_from_imag(model, w, cfg.quadrature);
    const double kk_im = kk_imag_from_real(model, w, cfg.quadrature);
    csv.row({x, eps.real(), eps.imag(), kk_re, kk_im, kk_re - eps.real(), kk_im - eps.imag()});
  }
  return exit_ok;
}

/// S(ω) on the adaptively refined sample grid.
inline int command_spectrum(const RunConfig &cfg, std::ostream &table) {
  const SpectralDensity sd = detail::config_density(cfg);
  detail::CsvWriter csv(table, cfg, "spectrum", {"omega_over_omega_a", "S"});
  for (std::size_t i = 0; i < sd.omega_grid.size(); ++i)
    csv.row({sd.omega_grid[i] / cfg.omega_a, sd.s_values[i]});
  return exit_ok;
}

/// Markov rate Γ/Γ₀ = S(ω_A) and window line shift δω/Γ₀.
inline int command_rate(const RunConfig &cfg, std::ostream &console, std::ostream *table) {
  const AtomConfig atom = cfg.atom();
  const double ratio = purcell_factor(cfg.build_geometry(), atom, cfg.quadrature);
  const MarkovLimit m = markov_limit(detail::config_density(cfg), atom, cfg.quadrature);
  const double shift = m.delta_omega / atom.gamma0;
  console << "Gamma/Gamma0 = " << detail::fmt("%.6f", ratio) << "\n"
          << "delta_omega/Gamma0 = " << detail::fmt("%.6f", shift) << "\n";
  if (table) {
    detail::CsvWriter csv(*table, cfg, "rate", {"gamma_over_gamma0", "delta_omega_over_gamma0"});
    csv.row({ratio, shift});
  }
  return exit_ok;
}

/// C_u(t) from the memory-kernel equation next to its Markov reference.
inline int command_decay(const RunConfig &cfg, std::ostream &table) {
  const AtomConfig atom = cfg.atom();
  const SpectralDensity sd = detail::config_density(cfg);
  const TimeGrid grid = cfg.time_grid();
  const Trajectory traj = solve_volterra(kernel_table(sd, atom, grid.dt(), grid.n_steps, cfg.quadrature), grid);
  const MarkovLimit m = markov_limit(sd, atom, cfg.quadrature);
  detail::CsvWriter csv(table, cfg, "decay",
                        {"gamma0_t", "re_c", "im_c", "population", "markov_re_c", "markov_im_c",
                         "markov_population"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const cplx c = traj.c_values[i];
    const cplx mk = m.amplitude(grid.time(i));
    csv.row({grid.time(i) * atom.gamma0, c.real(), c.imag(), std::norm(c), mk.real(), mk.imag(), std::norm(mk)});
  }
  return exit_ok;
}

struct AuditCheck {
  std::string name;
  bool passed = true;
  bool skipped = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

namespace detail {

// Built-in absorbing medium for checks that need one when the configuration
// defines no material.
inline PermittivityModel audit_reference_model() { return PermittivityModel({{1.0, 0.5, 0.1}}); }

inline std::vector<std::pair<std::string, PermittivityModel>> audit_materials(const RunConfig &cfg) {
  std::vector<std::pair<std::string, PermittivityModel>> out;
  for (const auto &[name, list] : cfg.materials)
    out.emplace_back(name, PermittivityModel(list));
  if (out.empty())
    out.emplace_back("builtin", audit_reference_model());
  return out;
}

inline double toy_length(const Toy1D &t) {
  double l = 0.0;
  for (const auto &layer : t.layers)
    l += layer.thickness;
  return l;
}

// Random point pairs suited to the geometry, in c/ω_A length units.
inline std::vector<std::pair<Vec3, Vec3>> audit_pairs(const RunConfig &cfg, const Geometry &g) {
  std::mt19937_64 rng(cfg.audit.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double scale = 1.0 / cfg.omega_a;
  std::vector<std::pair<Vec3, Vec3>> pairs;
  if (std::holds_alternative<SphereCavityCenter>(g)) {
    pairs.emplace_back(Vec3::Zero(), Vec3::Zero());
    return pairs;
  }
  for (std::size_t i = 0; i < cfg.audit.pairs; ++i) {
    Vec3 a(2.0 * u(rng), 2.0 * u(rng), 2.0 * u(rng));
    Vec3 b(2.0 * u(rng), 2.0 * u(rng), 2.0 * u(rng));
    if (std::holds_alternative<HalfSpace>(g)) {
      a.z() = 0.1 + 1.5 * (1.0 + u(rng));
      b.z() = 0.1 + 1.5 * (1.0 + u(rng));
    } else if (const auto *t = std::get_if<Toy1D>(&g)) {
      const double len = toy_length(*t) * cfg.omega_a;
      a = Vec3(-1.0 + (len + 2.0) * 0.5 * (1.0 + u(rng)), 0.0, 0.0);
      b = Vec3(-1.0 + (len + 2.0) * 0.5 * (1.0 + u(rng)), 0.0, 0.0);
    }
    pairs.emplace_back(scale * a, scale * b);
  }
  return pairs;
}

inline bool has_atom_site(const Geometry &g, double omega) {
  if (std::holds_alternative<Toy1D>(g))
    return false;
  if (const auto *b = std::get_if<HomogeneousBulk>(&g))
    return eval_permittivity(b->model, omega).imag() == 0.0;
  return true;
}

} // namespace detail

/// The invariant suite: reciprocity, conjugation, 1D absorption identity,
/// Kramers-Kronig residuals and memory-kernel solver vs discretized bath.
inline std::vector<AuditCheck> run_audit(const RunConfig &cfg, std::ostream *progress = nullptr) {
  std::vector<AuditCheck> checks;
  const Geometry g = cfg.build_geometry();
  const double w = cfg.omega_a;
  auto report = [&](const AuditCheck &c) {
    checks.push_back(c);
    if (progress)
      *progress << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << "  " << c.name << "  " << c.detail << "\n";
  };

  {
    const auto pairs = detail::audit_pairs(cfg, g);
    double worst_rec = 0.0, worst_conj = 0.0;
    for (const auto &[a, b] : pairs) {
      worst_rec = std::max(worst_rec, check_reciprocity(g, a, b, w, cfg.quadrature));
      worst_conj = std::max(worst_conj, check_conjugation(g, a, b, w, cfg.quadrature));
    }
    const double tol = cfg.audit.reciprocity_tolerance;
    const std::string n = std::to_string(pairs.size()) + " point pair(s)";
    report({"reciprocity", worst_rec < tol, false, worst_rec, tol,
            "max defect " + detail::fmt("%.3e", worst_rec) + " over " + n + ", tolerance " + detail::fmt("%.1e", tol)});
    report({"conjugation", worst_conj < tol, false, worst_conj, tol,
            "max defect " + detail::fmt("%.3e", worst_conj) + " over " + n + ", tolerance " + detail::fmt("%.1e", tol)});
  }

  {
    std::vector<std::pair<std::string, Toy1D>> stacks;
    if (const auto *t = std::get_if<Toy1D>(&g)) {
      stacks.emplace_back("configured stack", *t);
    } else {
      for (const auto &[name, model] : detail::audit_materials(cfg))
        stacks.emplace_back(name + " slab", Toy1D{model, {{1.0 / w, model}}, model});
    }
    double worst = 0.0;
    for (const auto &[label, stack] : stacks) {
      const double len = detail::toy_length(stack);
      for (double fx : {0.25, 0.75})
        for (double fy : {0.1, 0.5})
          worst = std::max(worst, check_identity_1d(stack, fx * len, fy * len, w, cfg.quadrature).defect);
    }
    const double tol = cfg.audit.identity_tolerance;
    report({"identity_1d", worst < tol, false, worst, tol,
            "max relative defect " + detail::fmt("%.3e", worst) + " over " + std::to_string(stacks.size()) +
                " stack(s), tolerance " + detail::fmt("%.1e", tol)});
  }

  {
    double worst = 0.0;
    const auto materials = detail::audit_materials(cfg);
    std::vector<double> grid(cfg.eps.points);
    for (std::size_t i = 0; i < grid.size(); ++i)
      grid[i] = w * (cfg.eps.lo + (cfg.eps.hi - cfg.eps.lo) * static_cast<double>(i) /
                                      static_cast<double>(grid.size() - 1));
    for (const auto &[name, model] : materials) {
      const KkResidual r = kk_residual(model, grid, cfg.quadrature);
      worst = std::max({worst, r.real_part, r.imag_part});
    }
    const double tol = cfg.audit.kk_tolerance;
    report({"kramers_kronig", worst < tol, false, worst, tol,
            "max residual " + detail::fmt("%.3e", worst) + " over " + std::to_string(materials.size()) +
                " material(s), tolerance " + detail::fmt("%.1e", tol)});
  }

  if (!detail::has_atom_site(g, w)) {
    report({"solver_vs_oracle", true, true, 0.0, cfg.audit.oracle_tolerance,
            "geometry has no atom site; nothing to compare"});
  } else {
    const AtomConfig atom = cfg.atom();
    const SpectralDensity sd = detail::config_density(cfg);
    const TimeGrid full = cfg.time_grid();
    const double horizon = std::min(full.t_max, recurrence_time(sd.window, cfg.audit.n_modes));
    const auto steps = static_cast<std::size_t>(std::max(2.0, std::round(horizon / full.dt())));
    const TimeGrid grid(horizon, steps);
    const Trajectory v = solve_volterra(kernel_table(sd, atom, grid.dt(), grid.n_steps, cfg.quadrature), grid);
    const Trajectory o = discrete_bath_oracle(sd, atom, cfg.audit.n_modes, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      worst = std::max(worst, std::abs(v.c_values[i] - o.c_values[i]));
    const double tol = cfg.audit.oracle_tolerance;
    report({"solver_vs_oracle", worst < tol, false, worst, tol,
            "max |dC| " + detail::fmt("%.3e", worst) + " with " + std::to_string(cfg.audit.n_modes) +
                " modes up to gamma0*t = " + detail::fmt("%.4g", horizon * atom.gamma0) + ", tolerance " +
                detail::fmt("%.1e", tol)});

    // Window sensitivity is a diagnostic only.
    const FrequencyWindow win = sd.window;
    const FrequencyWindow wide{std::max(0.5 * win.lo, win.lo - (atom.omega_a - win.lo)),
                               win.hi + (win.hi - atom.omega_a)};
    const SpectralDensity sd_wide =
        build_spectral_density(g, atom, wide, cfg.window_samples, cfg.quadrature);
    // The imaginary part carries the window-relative line shift, which is
    // absorbed into the renormalized ω_A, so the two parts are reported apart.
    double change_re = 0.0, change_im = 0.0;
    const double tau_max = 10.0 / atom.gamma0;
    for (int i = 1; i <= 40; ++i) {
      const double tau = tau_max * i / 40.0;
      const cplx d = (kernel_eval(sd_wide, atom, tau, cfg.quadrature) - kernel_eval(sd, atom, tau, cfg.quadrature)) /
                     atom.gamma0;
      change_re = std::max(change_re, std::abs(d.real()));
      change_im = std::max(change_im, std::abs(d.imag()));
    }
    if (progress)
      *progress << "DIAG  window  widening to [" << detail::fmt("%.4g", wide.lo / w) << ", "
                << detail::fmt("%.4g", wide.hi / w) << "] changes Re K/gamma0 by up to "
                << detail::fmt("%.3e", change_re) << " (tolerance " << detail::fmt("%.1e", cfg.window_tolerance)
                << ", " << (change_re < cfg.window_tolerance ? "within" : "exceeded")
                << ") and Im K/gamma0 by up to " << detail::fmt("%.3e", change_im)
                << " for gamma0*tau <= 10\n";
  }
  return checks;
}

inline int command_audit(const RunConfig &cfg, std::ostream &console, std::ostream *table) {
  const auto checks = run_audit(cfg, &console);
  bool ok = true;
  for (const auto &c : checks)
    ok = ok && c.passed;
  if (table) {
    detail::CsvWriter csv(*table, cfg, "audit", {"check", "passed", "value", "tolerance"});
    for (const auto &c : checks)
      csv.row({c.passed ? 1.0 : 0.0, c.value, c.tolerance}, c.name);
  }
  console << (ok ? "audit passed" : "audit FAILED") << "\n";
  return ok ? exit_ok : exit_audit_failure;
}

/// Runs one subcommand. `table` receives CSV; for eps, spectrum and decay it
/// is required, for rate and audit optional. Exceptions propagate.
inline int run_command(const std::string &command, const RunConfig &cfg, std::ostream &console,
                       std::ostream *table) {
  if (command == "rate")
    return command_rate(cfg, console, table);
  if (command == "audit")
    return command_audit(cfg, console, table);
  require(table != nullptr, "run_command: '" + command + "' needs an output stream");
  if (command == "eps")
    return command_eps(cfg, *table);
  if (command == "spectrum")
    return command_spectrum(cfg, *table);
  if (command == "decay")
    return command_decay(cfg, *table);
  throw ConfigError("unknown subcommand '" + command + "'");
}

/// Maps an exception from parsing or running to the documented exit code.
inline int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const ConvergenceError *>(&e) || dynamic_cast<const NonFiniteValue *>(&e))
    return exit_nonconvergence;
  return exit_usage;
}

} // namespace purcell
