// Acceptance suite: one criterion per invocation (argv[1] = 1..9), or all
// when run without arguments.  Each criterion prints a single PASS/FAIL
// line (plus detail lines) and the program exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <helmnys/helmnys.hpp>

#include "oracles.hpp"

using namespace helmnys;

namespace {

int g_failures = 0;

void report(int crit, const char* name, bool ok, const std::string& detail) {
  std::printf("c%d %-28s %s  (%s)\n", crit, name, ok ? "PASS" : "FAIL",
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double elapsed(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// least-squares slope of log(err) against log(n_pan)
double fitted_order(const std::vector<double>& n_pan,
                    const std::vector<double>& err) {
  const int m = static_cast<int>(n_pan.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    const double x = std::log(n_pan[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// --- criterion 1: product-integration weights vs oracles -------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;

  // self-panel: weights against the closed-form log moments
  for (int n : {16, 32}) {
    const CanonicalRule rule = gauss_legendre(n);
    std::vector<double> targets = rule.nodes;
    targets.push_back(-1.3);
    targets.push_back(1.7);
    const Eigen::MatrixXd w = wfrakL_init(targets, rule);
    for (size_t i = 0; i < targets.size(); ++i)
      for (int m = 0; m < n; ++m) {
        double q = 0.0;
        for (int j = 0; j < n; ++j)
          q += w(static_cast<int>(i), j) * std::pow(rule.nodes[j], m);
        worst = std::max(
            worst,
            std::abs(q - static_cast<double>(oracle::log_moment(targets[i], m))));
      }
  }
  ok = ok && worst < 1e-11;

  // neighbor-panel corrections: equal and 2:1 panel lengths on a circle arc
  const Curve circle = circle_curve();
  const CanonicalRule rule = gauss_legendre(16);
  for (const double ratio : {1.0, 2.0}) {
    const double a0 = 0.1, len_src = 0.2, len_tgt = ratio * len_src;
    const double a1 = a0 + len_src, a2 = a1 + len_tgt;
    const NeighborMap nm = neighbor_map(len_tgt, len_src, false);
    const Eigen::MatrixXd corr = neighbor_log_corrections(rule, nm);
    double w2 = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double ti = a1 + 0.5 * len_tgt * (rule.nodes[i] + 1.0);
      const Vec2 ri = circle.position(ti);
      double q = 0.0;
      for (int j = 0; j < 16; ++j) {
        const double tj = a0 + 0.5 * len_src * (rule.nodes[j] + 1.0);
        const Vec2 rj = circle.position(tj);
        const double sw = circle.speed(tj) * 0.5 * len_src * rule.weights[j];
        q += sw * std::cos(3.0 * tj) * (std::log((ri - rj).norm()) + corr(i, j));
      }
      const double ref = oracle::adaptive_quad(
          [&](double t) {
            return std::cos(3.0 * t) * circle.speed(t) *
                   std::log((ri - circle.position(t)).norm());
          },
          a0, a1, 1e-13);
      w2 = std::max(w2, std::abs(q - ref));
    }
    worst = std::max(worst, w2);
    ok = ok && w2 < 1e-11;
  }

  // straight-panel Cauchy compensation: int_{-1}^{1} -dx/(x^2+1) = -pi/2
  {
    Curve line;
    line.position = [](double t) { return Vec2{t, 0.0}; };
    line.derivative = [](double) { return Vec2{1.0, 0.0}; };
    line.second_derivative = [](double) { return Vec2{0.0, 0.0}; };
    std::vector<Vec2> nodes(16), normals(16);
    std::vector<double> sw(16);
    for (int i = 0; i < 16; ++i) {
      nodes[i] = Vec2{rule.nodes[i], 0.0};
      normals[i] = Vec2{0.0, -1.0};
      sw[i] = rule.weights[i];
    }
    const Vec2 target{0.0, -1.0};
    const CloseEvalCorrections cc =
        close_eval_corrections(line, -1.0, 1.0, target, nodes, normals, sw, rule);
    double q = 0.0;
    for (int i = 0; i < 16; ++i)
      q += cauchy_kernel(target, nodes[i], normals[i]) * sw[i] + cc.cauchy_corr[i];
    const double err = std::abs(q + 0.5 * pi);
    worst = std::max(worst, err);
    ok = ok && err < 1e-11;
  }

  const double dt = elapsed(t0);
  report(1, "quadrature oracles", ok && dt < 10.0,
         fmt("worst=%.2e runtime=%.1fs", worst, dt));
}

// --- criterion 2: interpolation operators ----------------------------------

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_qp = 0.0, worst_exact = 0.0;

  for (int n : {16, 32}) {
    const CanonicalRule c = gauss_legendre(n), f = gauss_legendre(2 * n);
    const InterpOperator P = build_P(c, f, 1), Q = build_Q(c, f, 1);
    worst_qp = std::max(
        worst_qp, (Q.block(0) * P.block(0) - Eigen::MatrixXd::Identity(n, n))
                      .cwiseAbs()
                      .maxCoeff());

    // both exact on polynomials of degree n-1 (Q restricted to that space)
    auto poly = [](double x, int d) { return std::pow(0.9 * x + 0.05, d); };
    Eigen::VectorXd xc(n), xf(2 * n);
    for (int i = 0; i < n; ++i) xc(i) = poly(c.nodes[i], n - 1);
    for (int i = 0; i < 2 * n; ++i) xf(i) = poly(f.nodes[i], n - 1);
    worst_exact = std::max(worst_exact,
                           (P.block(0) * xc - xf).cwiseAbs().maxCoeff());
    worst_exact = std::max(worst_exact,
                           (Q.block(0) * xf - xc).cwiseAbs().maxCoeff());
  }

  // Px exact through degree n_pt + 2 n_s - 1 across three equal panels
  {
    const int n = 16, ns = 4, deg = n + 2 * ns - 1;
    const CanonicalRule c = gauss_legendre(n), f = gauss_legendre(2 * n);
    const InterpOperator Px = build_Px({1.0, 1.0, 1.0}, c, f, ns);
    auto poly = [](double u, int d) { return std::pow(u / 3.0, d); };
    Eigen::VectorXcd xc(3 * n);
    for (int p = 0; p < 3; ++p)
      for (int i = 0; i < n; ++i)
        xc(p * n + i) = poly((p - 1) + 0.5 * (c.nodes[i] + 1.0) - 0.5, deg);
    // periodic panel ring: only the middle panel has genuine neighbors
    const Eigen::VectorXcd xf = Px.apply(xc);
    for (int i = 0; i < 2 * n; ++i)
      worst_exact =
          std::max(worst_exact, std::abs(xf(2 * n + i) -
                                         poly(0.5 * (f.nodes[i] + 1.0) - 0.5, deg)));
  }

  const double dt = elapsed(t0);
  report(2, "interpolation operators",
         worst_qp < 1e-12 && worst_exact < 1e-11 && dt < 5.0,
         fmt("qp=%.2e exact=%.2e runtime=%.1fs", worst_qp, worst_exact, dt));
}

// --- criterion 3: kernel-split reassembly ----------------------------------

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const Curve curve = starfish_curve();
  double worst = 0.0;
  unsigned state = 12345u;
  auto rnd = [&state]() {
    state = 1664525u * state + 1013904223u;
    return state / 4294967296.0;
  };

  for (int c = 0; c < 500; ++c) {
    const double k = 0.5 + 299.5 * rnd();
    const double t1 = 2.0 * pi * rnd() - pi;
    double t2 = 2.0 * pi * rnd() - pi;
    if (std::abs(t2 - t1) < 1e-3) t2 += 0.5;
    const Vec2 r = curve.position(t1), rp = curve.position(t2);
    const Vec2 nup = curve.outward_normal(t2);
    const double eta = 0.5 * k;
    const Complex direct = kernel_combined(k, eta, r, rp, nup);
    const Complex re =
        reassemble(split_combined_boundary(k, eta, r, rp, nup), r, rp, nup);
    worst = std::max(worst,
                     std::abs(direct - re) / std::max(1.0, std::abs(direct)));
    // off-boundary target with the Cauchy-type split
    const Vec2 rf = r + curve.outward_normal(t1) * (0.01 + rnd());
    const Complex df = kernel_combined(k, eta, rf, rp, nup);
    const Complex rf2 =
        reassemble(split_combined_field(k, eta, rf, rp, nup), rf, rp, nup);
    worst = std::max(worst, std::abs(df - rf2) / std::max(1.0, std::abs(df)));
  }

  // diagonal limits by approach along the curve, Richardson-extrapolated
  // to remove the O(h) term
  double worst_diag = 0.0;
  for (const double k : {2.8, 28.0}) {
    for (const double t : {0.3, 1.9}) {
      const KernelSplitParts lim = split_combined_boundary_diag(
          k, 0.5 * k, curve.curvature_term(t));
      auto at = [&](double h) {
        return split_combined_boundary(k, 0.5 * k, curve.position(t),
                                       curve.position(t + h),
                                       curve.outward_normal(t + h));
      };
      const KernelSplitParts f1 = at(1e-3), f2 = at(5e-4), f3 = at(2.5e-4);
      auto rich = [](Complex a, Complex b, Complex c) {
        return (8.0 * c - 6.0 * b + a) / 3.0;  // kills O(h) and O(h^2)
      };
      worst_diag = std::max(
          worst_diag,
          std::abs(rich(f1.smooth, f2.smooth, f3.smooth) - lim.smooth));
      worst_diag = std::max(
          worst_diag, std::abs(rich(f1.log_factor, f2.log_factor,
                                    f3.log_factor) - lim.log_factor));
    }
  }

  const double dt = elapsed(t0);
  report(3, "kernel-split reassembly",
         worst < 1e-11 && worst_diag < 1e-6 && dt < 10.0,
         fmt("reassembly=%.2e diag=%.2e runtime=%.1fs", worst, worst_diag, dt));
}

// --- criterion 4: near-field point count -----------------------------------

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const FieldGrid g = exterior_grid(starfish_curve(), 200);
  const double dt = elapsed(t0);
  report(4, "near-field point count",
         g.points.size() == 28460 && dt < 1.0,
         fmt("count=%zu runtime=%.2fs", g.points.size(), dt));
}

// --- criterion 5: desk-scale convergence at k=28 ---------------------------

void criterion5() {
  const double k = 28.0;
  const std::vector<int> sweep = {16, 24, 32, 40, 48, 64, 80, 96};

  // scheme A near-field order from the non-saturated part of the sweep
  {
    ExperimentConfig cfg;
    cfg.scheme = Scheme::A;
    cfg.k = k;
    // panel counts inside the asymptotic range: coarser meshes are still
    // pre-asymptotic at this wavenumber, finer ones saturate
    cfg.n_pan_sweep = {20, 24, 28, 32};
    const auto series = run_near_field(cfg);
    std::vector<double> ns, errs;
    for (const auto& r : series)
      if (r.avg_norm_err > 1e-12) {
        ns.push_back(r.n_pan);
        errs.push_back(r.avg_norm_err);
        std::printf("c5   scheme A n_pan=%d avg_err=%.3e\n", r.n_pan,
                    r.avg_norm_err);
      }
    const double order = ns.size() >= 3 ? fitted_order(ns, errs) : 0.0;
    report(5, "scheme A order", order >= 13.0 && order <= 18.0,
           fmt("fitted order=%.1f from %zu points", order, ns.size()));
  }

  // schemes B and C far field: saturation <= 1e-12, C <= B pre-saturation
  std::vector<ErrorReport> sb, sc;
  for (const Scheme s : {Scheme::B, Scheme::C}) {
    ExperimentConfig cfg;
    cfg.scheme = s;
    cfg.k = k;
    cfg.n_pan_sweep = sweep;
    auto series = run_far_field(cfg);
    for (const auto& r : series)
      std::printf("c5   scheme %s n_pan=%d max_rel_err=%.3e\n", scheme_name(s),
                  r.n_pan, r.max_rel_err);
    (s == Scheme::B ? sb : sc) = series;
  }
  double sat_b = 1.0, sat_c = 1.0;
  for (const auto& r : sb) sat_b = std::min(sat_b, r.max_rel_err);
  for (const auto& r : sc) sat_c = std::min(sat_c, r.max_rel_err);
  report(5, "scheme B saturation", sat_b <= 1e-12, fmt("min err=%.2e", sat_b));
  report(5, "scheme C saturation", sat_c <= 1e-12, fmt("min err=%.2e", sat_c));

  bool c_le_b = true;
  std::string detail;
  for (size_t i = 0; i < sweep.size(); ++i) {
    // a sweep point counts as non-saturated while either scheme is still
    // two orders above its own saturation floor
    const bool non_sat = sb[i].max_rel_err > 100.0 * sat_b ||
                         sc[i].max_rel_err > 100.0 * sat_c;
    if (non_sat && sc[i].max_rel_err > sb[i].max_rel_err) {
      c_le_b = false;
      detail += fmt("n_pan=%d C=%.1e>B=%.1e ", sweep[i], sc[i].max_rel_err,
                    sb[i].max_rel_err);
    }
  }
  report(5, "scheme C <= B pre-saturation", c_le_b,
         c_le_b ? "holds at all non-saturated sweep points" : detail);
}

// --- criterion 6: full-scale reproduction at k=280 -------------------------

void criterion6() {
  const double tol_digits = 3.17e-13;  // 12.5 digits
  ExperimentConfig cfg;
  cfg.scheme = Scheme::D;
  cfg.k = 280.0;
  cfg.gmres_tol = 1e-15;

  cfg.n_pan_sweep = {320, 400};
  const auto far = run_far_field(cfg);
  double best_far = 1.0;
  for (const auto& r : far) {
    std::printf("c6   far field n_pan=%d err=%.3e iters=%d\n", r.n_pan,
                r.max_rel_err, r.gmres_iters);
    best_far = std::min(best_far, r.max_rel_err);
  }
  report(6, "far field at k=280", best_far <= tol_digits,
         fmt("best max_rel_err=%.2e", best_far));

  cfg.n_pan_sweep = {400};
  const auto near = run_near_field(cfg);
  std::printf("c6   near field n_pan=%d avg=%.3e max=%.3e\n", near[0].n_pan,
              near[0].avg_norm_err, near[0].max_norm_err);
  report(6, "near field at k=280", near[0].avg_norm_err <= tol_digits,
         fmt("avg_norm_err=%.2e", near[0].avg_norm_err));
}

// --- criterion 7: GMRES iteration counts -----------------------------------

void criterion7() {
  {  // small-k check, threshold 1e-12
    ExperimentConfig cfg;
    cfg.k = 2.8;
    cfg.n_pan_sweep = {16};
    cfg.gmres_tol = 1e-12;
    const auto rows = run_eta_study(cfg);
    report(7, "iterations at k=2.8",
           rows[0].converged && rows[0].iterations <= 15,
           fmt("eta=k/2: %d iterations", rows[0].iterations));
  }
  {  // full-scale eta study at machine-epsilon threshold
    ExperimentConfig cfg;
    cfg.k = 280.0;
    cfg.n_pan_sweep = {400};
    cfg.gmres_tol = 2.3e-16;
    cfg.gmres_max_iter = 600;
    const auto rows = run_eta_study(cfg);
    for (const auto& r : rows)
      std::printf("c7   eta=%-4s iterations=%d residual=%.2e\n",
                  r.rule.c_str(), r.iterations, r.final_residual);
    report(7, "iterations at k=280, eta=k/2",
           rows[0].iterations >= 43 && rows[0].iterations <= 59,
           fmt("%d (expect 51+-8)", rows[0].iterations));
    report(7, "iterations at k=280, eta=k",
           rows[1].iterations >= 50 && rows[1].iterations <= 70,
           fmt("%d (expect 60+-10)", rows[1].iterations));
    report(7, "iterations at k=280, eta=-k",
           rows[2].iterations >= 313 && rows[2].iterations <= 433,
           fmt("%d (expect 373+-60)", rows[2].iterations));
  }
}

// --- criterion 8: conditioning at k=280 ------------------------------------

void criterion8() {
  const Curve curve = starfish_curve();
  const SystemOperator sys =
      make_system(curve, 162, 16, 280.0, 140.0, Scheme::D);  // n = 2592
  const double cond = condition_estimate(sys);
  report(8, "condition number", cond < 8.0, fmt("cond=%.3f at n=%d", cond,
                                                sys.n()));
}

// --- criterion 9: close evaluation -----------------------------------------

void criterion9() {
  const double k = 28.0;
  const Curve curve = starfish_curve();
  const auto srcs = default_sources();
  const SystemOperator sys = make_system(curve, 96, 16, k, 14.0, Scheme::D);
  Eigen::VectorXcd rhs(sys.n());
  for (int i = 0; i < sys.n(); ++i)
    rhs(i) = 2.0 * exact_field(srcs, k, sys.coarse.point[i]);
  const auto gm = solve_density(sys, rhs, 1e-14, 400);

  // targets 3e-6 outside the boundary, near panel midpoints
  std::vector<Vec2> targets;
  std::vector<double> params = {0.31, 1.27, 2.15, -0.83, -2.46};
  for (const double t : params)
    targets.push_back(curve.position(t) + curve.outward_normal(t) * 3e-6);
  const Eigen::VectorXcd u = evaluate_field(sys, gm.x, targets);
  double umax = 0.0;
  std::vector<Complex> ref(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    ref[i] = exact_field(srcs, k, targets[i]);
    umax = std::max(umax, std::abs(ref[i]));
  }
  double worst = 0.0;
  for (size_t i = 0; i < targets.size(); ++i)
    worst = std::max(worst,
                     std::abs(u(static_cast<int>(i)) - ref[i]) / umax);
  report(9, "close evaluation at 3e-6", gm.converged && worst <= 1e-11,
         fmt("worst normalized err=%.2e over %zu targets", worst,
             targets.size()));
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> crits;
  if (argc > 1) {
    crits.push_back(std::atoi(argv[1]));
  } else {
    for (int i = 1; i <= 9; ++i) crits.push_back(i);
  }
  for (int c : crits) {
    switch (c) {
      case 1: criterion1(); break;
      case 2: criterion2(); break;
      case 3: criterion3(); break;
      case 4: criterion4(); break;
      case 5: criterion5(); break;
      case 6: criterion6(); break;
      case 7: criterion7(); break;
      case 8: criterion8(); break;
      case 9: criterion9(); break;
      default:
        std::fprintf(stderr, "unknown criterion %d\n", c);
        return 2;
    }
  }
  return g_failures == 0 ? 0 : 1;
}
