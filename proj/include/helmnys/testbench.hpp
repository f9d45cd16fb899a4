#ifndef HELMNYS_TESTBENCH_HPP
#define HELMNYS_TESTBENCH_HPP

// Experiment drivers: far-field and near-field convergence studies, field
// maps and the eta study, with CSV / flat binary emission.  The boundary
// data comes from point sources inside the obstacle, so the exact exterior
// solution is known analytically and every reported error is absolute
// truth, not self-convergence.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "system.hpp"

namespace helmnys {

inline Complex exact_field(const std::vector<PointSource>& sources, double k,
                           const Vec2& r) {
  Complex u(0.0, 0.0);
  for (const auto& s : sources) {
    const double d = (r - s.location).norm();
    u += s.strength * Complex(0.0, 0.25) * hankel1_0(k * d);
  }
  return u;
}

// fixed five-source excitation inside the starfish
inline std::vector<PointSource> default_sources() {
  const double radii[5] = {0.13, 0.17, 0.11, 0.19, 0.15};
  // angles chosen so that no testing location sits near a radiation null
  // of the combined excitation at any of the bench wavenumbers
  const double angles[5] = {0.95, 1.85, 3.75, 5.0, 5.85};
  const double strengths[5] = {0.9, 0.2, 0.6, 0.5, 0.8};
  std::vector<PointSource> s(5);
  for (int i = 0; i < 5; ++i) {
    s[i].location = Vec2{radii[i] * std::cos(angles[i]),
                         radii[i] * std::sin(angles[i])};
    s[i].strength = strengths[i];
  }
  return s;
}

// nine distant testing locations on a circle of radius 1.25
inline std::vector<Vec2> farfield_targets() {
  std::vector<Vec2> t(9);
  for (int i = 0; i < 9; ++i) {
    const double a = 2.0 * pi * i / 9.0;
    t[i] = Vec2{1.25 * std::cos(a), 1.25 * std::sin(a)};
  }
  return t;
}

// n x n Cartesian grid over [-0.75, 0.75]^2 (endpoints included); exterior
// points only, with their flat row-major indices (y row-major, x fastest)
struct FieldGrid {
  int n = 0;
  std::vector<Vec2> points;     // exterior points
  std::vector<int> flat_index;  // position of each point in the full grid
};

inline FieldGrid exterior_grid(const Curve& curve, int n) {
  FieldGrid g;
  g.n = n;
  for (int iy = 0; iy < n; ++iy) {
    const double y = -0.75 + 1.5 * iy / (n - 1);
    for (int ix = 0; ix < n; ++ix) {
      const double x = -0.75 + 1.5 * ix / (n - 1);
      const Vec2 p{x, y};
      if (!point_in_interior(curve, p)) {
        g.points.push_back(p);
        g.flat_index.push_back(iy * n + ix);
      }
    }
  }
  return g;
}

struct ExperimentConfig {
  Scheme scheme = Scheme::D;
  int n_pt = 16;
  std::vector<int> n_pan_sweep;
  double k = 28.0;
  std::string eta_rule = "k/2";  // "k/2", "k", "-k" or a number
  double gmres_tol = 1e-14;
  int gmres_max_iter = 1000;
  std::vector<PointSource> sources = default_sources();
  std::string out_path;

  double eta() const {
    if (eta_rule == "k/2") return 0.5 * k;
    if (eta_rule == "k") return k;
    if (eta_rule == "-k") return -k;
    size_t pos = 0;
    const double v = std::stod(eta_rule, &pos);
    if (pos != eta_rule.size())
      throw std::invalid_argument("bad eta rule: " + eta_rule);
    return v;
  }

  void validate() const {
    if (n_pt != 16 && n_pt != 32)
      throw std::invalid_argument("n_pt must be 16 or 32");
    for (int np : n_pan_sweep)
      if (np < 3) throw std::invalid_argument("n_pan must be >= 3");
    eta();  // throws on a malformed rule
    const Curve c = starfish_curve();
    for (const auto& s : sources)
      if (!point_in_interior(c, s.location))
        throw std::invalid_argument("source outside the obstacle");
  }
};

struct ErrorReport {
  int n_pan = 0;
  int n_unknowns = 0;
  int n_points = 0;
  double max_rel_err = 0.0;
  double avg_norm_err = 0.0;
  double max_norm_err = 0.0;
  int gmres_iters = 0;
  bool converged = false;
  double assemble_s = 0.0, solve_s = 0.0, eval_s = 0.0;
};

namespace detail {

inline double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct SolvedProblem {
  SystemOperator sys;
  Eigen::VectorXcd rho;
  ErrorReport report;
};

inline SolvedProblem solve_problem(const ExperimentConfig& cfg, int n_pan) {
  SolvedProblem out;
  const Curve curve = starfish_curve();
  auto t0 = std::chrono::steady_clock::now();
  out.sys = make_system(curve, n_pan, cfg.n_pt, cfg.k, cfg.eta(), cfg.scheme);
  out.report.assemble_s = seconds_since(t0);

  Eigen::VectorXcd rhs(out.sys.n());
  for (int i = 0; i < out.sys.n(); ++i)
    rhs(i) = 2.0 * exact_field(cfg.sources, cfg.k, out.sys.coarse.point[i]);

  t0 = std::chrono::steady_clock::now();
  const GmresResult gm =
      solve_density(out.sys, rhs, cfg.gmres_tol, cfg.gmres_max_iter);
  out.report.solve_s = seconds_since(t0);
  out.rho = gm.x;
  out.report.n_pan = n_pan;
  out.report.n_unknowns = out.sys.n();
  out.report.gmres_iters = gm.iterations;
  out.report.converged = gm.converged;
  return out;
}

inline void write_config_header(std::ostream& os,
                                const ExperimentConfig& cfg) {
  os << "# scheme=" << scheme_name(cfg.scheme) << " n_pt=" << cfg.n_pt
     << " k=" << cfg.k << " eta=" << cfg.eta_rule << " (" << cfg.eta() << ")"
     << " gmres_tol=" << cfg.gmres_tol << "\n";
  os << "# sources:";
  for (const auto& s : cfg.sources)
    os << " (" << s.location.x << "," << s.location.y << ";" << s.strength
       << ")";
  os << "\n";
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os.precision(16);
  return os;
}

}  // namespace detail

inline std::vector<ErrorReport> run_far_field(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<Vec2> targets = farfield_targets();
  std::vector<ErrorReport> series;

  std::ofstream os;
  if (!cfg.out_path.empty()) {
    os = detail::open_out(cfg.out_path);
    detail::write_config_header(os, cfg);
    os << "n_pan,n_unknowns,max_rel_err,gmres_iters,assemble_s,solve_s,"
          "eval_s\n";
  }

  for (int n_pan : cfg.n_pan_sweep) {
    detail::SolvedProblem sp = detail::solve_problem(cfg, n_pan);
    auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXcd u = evaluate_field(sp.sys, sp.rho, targets);
    sp.report.eval_s = detail::seconds_since(t0);
    sp.report.n_points = static_cast<int>(targets.size());
    for (size_t i = 0; i < targets.size(); ++i) {
      const Complex ref = exact_field(cfg.sources, cfg.k, targets[i]);
      sp.report.max_rel_err =
          std::max(sp.report.max_rel_err,
                   std::abs(u(static_cast<int>(i)) - ref) / std::abs(ref));
    }
    if (os.is_open())
      os << sp.report.n_pan << "," << sp.report.n_unknowns << ","
         << sp.report.max_rel_err << "," << sp.report.gmres_iters << ","
         << sp.report.assemble_s << "," << sp.report.solve_s << ","
         << sp.report.eval_s << "\n";
    series.push_back(sp.report);
  }
  return series;
}

inline std::vector<ErrorReport> run_near_field(const ExperimentConfig& cfg,
                                               int grid_n = 200) {
  cfg.validate();
  const Curve curve = starfish_curve();
  const FieldGrid grid = exterior_grid(curve, grid_n);
  std::vector<ErrorReport> series;

  std::ofstream os;
  if (!cfg.out_path.empty()) {
    os = detail::open_out(cfg.out_path);
    detail::write_config_header(os, cfg);
    os << "n_pan,n_unknowns,n_points,avg_norm_err,max_norm_err,gmres_iters\n";
  }

  // normalization: largest |u| over the zone
  double umax = 0.0;
  std::vector<Complex> ref(grid.points.size());
  for (size_t i = 0; i < grid.points.size(); ++i) {
    ref[i] = exact_field(cfg.sources, cfg.k, grid.points[i]);
    umax = std::max(umax, std::abs(ref[i]));
  }

  for (int n_pan : cfg.n_pan_sweep) {
    detail::SolvedProblem sp = detail::solve_problem(cfg, n_pan);
    auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXcd u = evaluate_field(sp.sys, sp.rho, grid.points);
    sp.report.eval_s = detail::seconds_since(t0);
    sp.report.n_points = static_cast<int>(grid.points.size());
    double sum = 0.0, worst = 0.0;
    for (size_t i = 0; i < grid.points.size(); ++i) {
      const double e = std::abs(u(static_cast<int>(i)) - ref[i]) / umax;
      sum += e;
      worst = std::max(worst, e);
    }
    sp.report.avg_norm_err = sum / static_cast<double>(grid.points.size());
    sp.report.max_norm_err = worst;
    if (os.is_open())
      os << sp.report.n_pan << "," << sp.report.n_unknowns << ","
         << sp.report.n_points << "," << sp.report.avg_norm_err << ","
         << sp.report.max_norm_err << "," << sp.report.gmres_iters << "\n";
    series.push_back(sp.report);
  }
  return series;
}

// emits <out>.f64 (Re u), <out>.err.f64 (log10 normalized error) and a
// <out>.meta text sidecar; interior points are NaN
inline ErrorReport run_field_map(const ExperimentConfig& cfg,
                                 int grid_n = 700) {
  cfg.validate();
  if (cfg.n_pan_sweep.size() != 1)
    throw std::invalid_argument("field map wants exactly one n_pan");
  if (cfg.out_path.empty())
    throw std::invalid_argument("field map needs an output path");
  const Curve curve = starfish_curve();
  const FieldGrid grid = exterior_grid(curve, grid_n);

  detail::SolvedProblem sp = detail::solve_problem(cfg, cfg.n_pan_sweep[0]);
  auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXcd u = evaluate_field(sp.sys, sp.rho, grid.points);
  sp.report.eval_s = detail::seconds_since(t0);
  sp.report.n_points = static_cast<int>(grid.points.size());

  double umax = 0.0;
  std::vector<Complex> ref(grid.points.size());
  for (size_t i = 0; i < grid.points.size(); ++i) {
    ref[i] = exact_field(cfg.sources, cfg.k, grid.points[i]);
    umax = std::max(umax, std::abs(ref[i]));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> re_u(grid_n * grid_n, nan);
  std::vector<double> log_err(grid_n * grid_n, nan);
  double sum = 0.0, worst = 0.0;
  for (size_t i = 0; i < grid.points.size(); ++i) {
    const double e = std::abs(u(static_cast<int>(i)) - ref[i]) / umax;
    re_u[grid.flat_index[i]] = u(static_cast<int>(i)).real();
    log_err[grid.flat_index[i]] = std::log10(std::max(e, 1e-300));
    sum += e;
    worst = std::max(worst, e);
  }
  sp.report.avg_norm_err = sum / static_cast<double>(grid.points.size());
  sp.report.max_norm_err = worst;

  auto write_f64 = [](const std::string& path,
                      const std::vector<double>& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
  };
  write_f64(cfg.out_path + ".f64", re_u);
  write_f64(cfg.out_path + ".err.f64", log_err);
  std::ofstream meta = detail::open_out(cfg.out_path + ".meta");
  detail::write_config_header(meta, cfg);
  meta << "nx=" << grid_n << "\nny=" << grid_n << "\n"
       << "xmin=-0.75\nxmax=0.75\nymin=-0.75\nymax=0.75\n"
       << "layout=row-major, y rows, x fastest\n"
       << "dtype=float64\nmask=NaN (interior)\n"
       << "n_exterior=" << grid.points.size() << "\n"
       << "n_pan=" << sp.report.n_pan << "\nn_unknowns="
       << sp.report.n_unknowns << "\ngmres_iters=" << sp.report.gmres_iters
       << "\navg_norm_err=" << sp.report.avg_norm_err << "\nmax_norm_err="
       << sp.report.max_norm_err << "\n";
  return sp.report;
}

struct EtaStudyRow {
  std::string rule;
  double eta = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
};

// identical solve at eta in {k/2, k, -k}, iteration counts tabulated
inline std::vector<EtaStudyRow> run_eta_study(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.n_pan_sweep.size() != 1)
    throw std::invalid_argument("eta study wants exactly one n_pan");
  const Curve curve = starfish_curve();
  std::vector<EtaStudyRow> rows;

  for (const std::string rule : {"k/2", "k", "-k"}) {
    ExperimentConfig c = cfg;
    c.eta_rule = rule;
    const SystemOperator sys =
        make_system(curve, cfg.n_pan_sweep[0], cfg.n_pt, cfg.k, c.eta(),
                    cfg.scheme);
    Eigen::VectorXcd rhs(sys.n());
    for (int i = 0; i < sys.n(); ++i)
      rhs(i) = 2.0 * exact_field(cfg.sources, cfg.k, sys.coarse.point[i]);
    const GmresResult gm =
        solve_density(sys, rhs, cfg.gmres_tol, cfg.gmres_max_iter);
    EtaStudyRow row;
    row.rule = rule;
    row.eta = c.eta();
    row.iterations = gm.iterations;
    row.converged = gm.converged;
    row.final_residual = gm.residuals.empty() ? 0.0 : gm.residuals.back();
    rows.push_back(row);
  }

  if (!cfg.out_path.empty()) {
    std::ofstream os = detail::open_out(cfg.out_path);
    detail::write_config_header(os, cfg);
    os << "eta_rule,eta,iterations,converged,final_residual\n";
    for (const auto& r : rows)
      os << r.rule << "," << r.eta << "," << r.iterations << ","
         << (r.converged ? 1 : 0) << "," << r.final_residual << "\n";
  }
  return rows;
}

}  // namespace helmnys

#endif
