#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cplens/caustics.hpp"
#include "cplens/config.hpp"
#include "cplens/errors.hpp"
#include "cplens/lefschetz.hpp"
#include "cplens/oracle.hpp"
#include "cplens/report_io.hpp"
#include "cplens/solver.hpp"

namespace cplens {

/// One fully specified command invocation. The front end fills this from
/// flags; every cmd_* function below consumes it and writes machine output
/// to `out`, diagnostics to `err`.
struct RunConfig {
  LensConfig lens;
  std::optional<Cx> source;
  std::string sources_file;
  int random_n = 0;
  std::uint32_t seed = 42;
  std::optional<Window> window;
  double tol = 1e-8;
  int jobs = 1;
  std::string svg_path;
};

namespace detail {

// Folds the raw engine stream to [0,1); byte-stable across platforms where
// the standard distributions are not.
inline double cli_uniform01(std::mt19937& rng) { return double(rng() >> 5) * 0x1.0p-27; }

inline Window require_window(const RunConfig& cfg, const char* cmd) {
  if (!cfg.window) throw ConfigError(std::string(cmd) + " needs --window CX,CY,HW,HH,NX,NY");
  try {
    cfg.window->check();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");
  return *cfg.window;
}

inline std::vector<Cx> gather_sources(const RunConfig& cfg) {
  std::vector<Cx> sources;
  if (!cfg.sources_file.empty()) {
    std::ifstream in(cfg.sources_file);
    if (!in) throw ConfigError("cannot open sources file '" + cfg.sources_file + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto pair = split(line, ',');
      if (pair.size() != 2)
        throw ConfigError(cfg.sources_file + ":" + std::to_string(lineno) +
                          ": expected 're,im' per line");
      sources.emplace_back(parse_double(pair[0], "source"), parse_double(pair[1], "source"));
    }
  } else if (cfg.random_n > 0) {
    std::mt19937 rng(cfg.seed);
    for (int k = 0; k < cfg.random_n; ++k)
      sources.emplace_back(4.0 * (cli_uniform01(rng) - 0.5), 4.0 * (cli_uniform01(rng) - 0.5));
  } else {
    throw ConfigError("invariant needs --sources FILE or --random N");
  }
  return sources;
}

}  // namespace detail

/// Structural checks on the configured model, one status line each.
inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ValidationReport rep = validate(cfg.lens.model);
  out << "degree: " << (rep.degree_ok ? "ok" : "FAIL (needs deg num < deg den)") << "\n";
  out << "symmetry: " << (rep.symmetry_ok ? "ok" : "FAIL (alpha2 is not the mirror of alpha1)")
      << "\n";
  out << "decay: " << (rep.decay_ok ? "ok" : "FAIL (deflection does not vanish at infinity)")
      << "\n";
  if (!rep.diagnostics.empty()) err << rep.diagnostics << "\n";
  return rep.all_ok() ? 0 : 1;
}

/// All complex fixed points of one source as JSON-lines plus a summary line.
inline int cmd_images(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.source) throw ConfigError("images needs --source RE,IM");
  const InvariantReport rep = lefschetz_sum(cfg.lens.model, *cfg.source, cfg.lens.options);
  write_image_records(rep, out);
  if (!rep.valid) {
    err << "invariant not certified: a fixed point is degenerate or unconverged"
        << " (source on or near a caustic)\n";
    return 1;
  }
  return 0;
}

/// Magnification-sum sweep over many sources, one CSV row each. Valid rows
/// must reproduce the unit sum within --tol; degenerate rows are reported
/// but, being uncertified, do not count against the check.
inline int cmd_invariant(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<Cx> sources = detail::gather_sources(cfg);
  write_invariant_csv_header(out);
  int violations = 0;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    InvariantReport rep;
    try {
      rep = lefschetz_sum(cfg.lens.model, sources[k], cfg.lens.options);
    } catch (const Error& e) {
      rep.source = sources[k];
      rep.model_name = cfg.lens.model.name;
      rep.valid = false;
      err << "row " << k << ": solve failed: " << e.what() << "\n";
    }
    write_invariant_csv_row(rep, out);
    if (rep.valid && std::abs(rep.complex_sum - Cx{1.0}) >= cfg.tol) {
      ++violations;
      err << "row " << k << ": |sum - 1| = " << fmt10(std::abs(rep.complex_sum - Cx{1.0}))
          << " at zeta = (" << fmt10(sources[k].real()) << ", " << fmt10(sources[k].imag())
          << ")\n";
    }
  }
  return violations == 0 ? 0 : 1;
}

/// Source-plane multiplicity scan as a count grid CSV (plus optional SVG).
inline int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Window win = detail::require_window(cfg, "scan");
  const MultiplicityGrid grid = multiplicity_scan(cfg.lens.model, win, cfg.lens.options, cfg.jobs);
  write_grid_csv(grid, out);
  int masked = 0;
  for (int c : grid.counts) masked += c < 0 ? 1 : 0;
  err << "scanned " << win.nx << "x" << win.ny << " nodes, max count " << grid.max_count << ", "
      << masked << " masked\n";
  if (!cfg.svg_path.empty()) {
    std::ofstream svg(cfg.svg_path);
    if (!svg) throw ConfigError("cannot write SVG to '" + cfg.svg_path + "'");
    write_scan_svg(grid, svg);
  }
  return 0;
}

/// Critical curves and caustics of the configured model as polyline CSV
/// (plus optional SVG).
inline int cmd_caustics(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Window win = detail::require_window(cfg, "caustics");
  std::vector<Polyline> critical;
  try {
    critical = critical_curves(cfg.lens.model, win);
  } catch (const EmptyWindow& e) {
    throw ConfigError(e.what());
  }
  int dropped = 0;
  const std::vector<Polyline> caustic = map_to_caustics(cfg.lens.model, critical, &dropped);
  if (dropped > 0) err << "dropped " << dropped << " caustic vertices on deflection poles\n";
  write_polyline_csv_header(out);
  write_polyline_csv("critical", critical, out, 0);
  write_polyline_csv("caustic", caustic, out, int(critical.size()));
  err << critical.size() << " critical polylines, " << caustic.size() << " caustic polylines\n";
  if (!cfg.svg_path.empty()) {
    std::ofstream svg(cfg.svg_path);
    if (!svg) throw ConfigError("cannot write SVG to '" + cfg.svg_path + "'");
    write_curves_svg(critical, caustic, svg);
  }
  return 0;
}

/// Cross-checks the algebraic pipeline against the independent oracles on
/// the configured model. Stops at the first failing comparison.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const DeflectionModel& m = cfg.lens.model;

  const ValidationReport vrep = validate(m);
  if (!vrep.degree_ok || !vrep.symmetry_ok || !vrep.decay_ok) {
    const char* which = !vrep.degree_ok ? "degree" : (!vrep.symmetry_ok ? "symmetry" : "decay");
    out << "FAIL validation: " << which << " check failed\n";
    if (!vrep.diagnostics.empty()) err << vrep.diagnostics << "\n";
    return 1;
  }
  out << "PASS validation: degree, symmetry, decay\n";

  // Sample well-conditioned sources; compare the resultant pipeline with the
  // multistart search image for image, and hold every real image to the
  // two-sided Jacobian identity.
  std::mt19937 rng(cfg.seed);
  const int wanted = 12;
  int accepted = 0, attempts = 0;
  double worst_match = 0.0, worst_jacobian = 0.0, worst_sum = 0.0;
  while (accepted < wanted && attempts < 600) {
    ++attempts;
    const Cx zeta{3.0 * (detail::cli_uniform01(rng) - 0.5),
                  3.0 * (detail::cli_uniform01(rng) - 0.5)};
    std::vector<FixedPoint> points;
    try {
      points = solve_fixed_points(m, zeta, cfg.lens.options);
    } catch (const Error&) {
      continue;
    }
    bool usable = !points.empty();
    std::vector<const FixedPoint*> real_points;
    for (const auto& fp : points) {
      if (fp.degenerate || !fp.converged || std::abs(fp.transversal_det) < 1e-3) usable = false;
      if (fp.is_real) real_points.push_back(&fp);
    }
    if (!usable) continue;
    ++accepted;

    const OracleResult oracle =
        multistart_newton_real(m, zeta, {Cx{0.0}, 5.0, 5.0, 8, 8}, 900);
    if (oracle.images.size() != real_points.size()) {
      out << "FAIL oracle-agreement: " << oracle.images.size() << " multistart images vs "
          << real_points.size() << " solver images at zeta = (" << fmt10(zeta.real()) << ", "
          << fmt10(zeta.imag()) << ")\n";
      return 1;
    }
    std::vector<bool> taken(real_points.size(), false);
    for (std::size_t k = 0; k < oracle.images.size(); ++k) {
      double best = 1e30;
      std::size_t best_l = 0;
      for (std::size_t l = 0; l < real_points.size(); ++l) {
        if (taken[l]) continue;
        const double d = std::abs(oracle.images[k] - real_points[l]->z1);
        if (d < best) best = d, best_l = l;
      }
      if (best >= 1e-6) {
        out << "FAIL oracle-agreement: unmatched image at distance " << fmt10(best)
            << " for zeta = (" << fmt10(zeta.real()) << ", " << fmt10(zeta.imag()) << ")\n";
        return 1;
      }
      taken[best_l] = true;
      worst_match = std::max(worst_match, best);
    }

    for (const FixedPoint* fp : real_points) {
      const double resid = jacobian_identity_residual(m, *fp);
      const double bound = 1e-10 * (1.0 + std::abs(fp->transversal_det));
      worst_jacobian = std::max(worst_jacobian, resid);
      if (resid >= bound) {
        out << "FAIL jacobian-identity: residual " << fmt10(resid) << " at z1 = ("
            << fmt10(fp->z1.real()) << ", " << fmt10(fp->z1.imag()) << ")\n";
        return 1;
      }
    }

    const InvariantReport rep = lefschetz_sum(m, zeta, cfg.lens.options);
    if (rep.valid) {
      const double gap = std::abs(rep.complex_sum - Cx{1.0});
      worst_sum = std::max(worst_sum, gap);
      if (gap >= 1e-8) {
        out << "FAIL unit-sum: |sum - 1| = " << fmt10(gap) << " at zeta = ("
            << fmt10(zeta.real()) << ", " << fmt10(zeta.imag()) << ")\n";
        return 1;
      }
    }
  }
  if (accepted < wanted) {
    out << "FAIL sampling: only " << accepted << " usable sources in " << attempts
        << " draws\n";
    return 1;
  }
  out << "PASS oracle-agreement: " << accepted << " sources, worst image distance "
      << fmt10(worst_match) << "\n";
  out << "PASS jacobian-identity: worst residual " << fmt10(worst_jacobian) << "\n";
  out << "PASS unit-sum: worst |sum - 1| = " << fmt10(worst_sum) << "\n";

  // Closed forms exist for two of the built-ins; use them when they apply.
  if (m.psi_form == PsiForm::filament) {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double y1 = (k % 2 ? -1.0 : 1.0) * (std::sqrt(8.0 * m.params.sigma0) + 0.01 + 0.02 * k);
      const OracleResult cf = filament_closed_form(m.params.sigma0, Cx{y1, 0.1 * k});
      worst = std::max(worst, std::abs(cf.mus[0] + cf.mus[1] - 1.0));
    }
    if (worst >= 1e-12) {
      out << "FAIL closed-form: filament pair sum off by " << fmt10(worst) << "\n";
      return 1;
    }
    out << "PASS closed-form: filament pair sums to 1 (worst gap " << fmt10(worst) << ")\n";
  }
  if (m.psi_form == PsiForm::point_ensemble && m.params.masses.size() == 1 &&
      m.params.positions[0] == Cx{0.0}) {
    double worst = 0.0;
    for (int k = 1; k <= 200; ++k) {
      const OracleResult cf =
          point_mass_closed_form(m.params.masses[0], std::polar(0.05 + 0.02 * k, 0.37 * k));
      worst = std::max(worst, std::abs(cf.mus[0] + cf.mus[1] - 1.0));
    }
    if (worst >= 1e-12) {
      out << "FAIL closed-form: point-mass pair sum off by " << fmt10(worst) << "\n";
      return 1;
    }
    out << "PASS closed-form: point-mass pair sums to 1 (worst gap " << fmt10(worst) << ")\n";
  }
  return 0;
}

}  // namespace cplens
