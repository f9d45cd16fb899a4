#ifndef HELMNYS_PRODUCT_QUADRATURE_HPP
#define HELMNYS_PRODUCT_QUADRATURE_HPP

// Product integration on panels: exact quadratures for polynomial times
// log / Cauchy factors, expressed as corrections to plain Gauss-Legendre
// weights, plus the activation rules deciding where the corrections are
// needed.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "interpolation.hpp"

namespace helmnys {

namespace detail {

// monomial Vandermonde A_{ij} = x_i^{j-1} of the rule's own nodes
inline Eigen::MatrixXd monomial_vandermonde(const CanonicalRule& rule) {
  const int n = rule.n_pt;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j < n; ++j) {
      a(i, j) = p;
      p *= rule.nodes[i];
    }
  }
  return a;
}

}  // namespace detail

// W(i, j): weights of an n_pt-point quadrature on [-1,1] exact for
// integrands t^m log|x_i - t|, m < n_pt, one row per target x_i.  Targets
// may lie inside or outside [-1,1] but not on a node.
inline Eigen::MatrixXd wfrakL_init(const std::vector<double>& targets,
                                   const CanonicalRule& rule) {
  const int n = rule.n_pt;
  const int m = static_cast<int>(targets.size());
  Eigen::MatrixXd q(m, n);
  auto c2 = [](int j) -> long double {
    return (j % 2 == 0) ? 0.0L : 2.0L / j;
  };
  for (int i = 0; i < m; ++i) {
    const long double x = targets[i];
    // p[k] = -integral of t^k / (x - t) over [-1,1]
    std::vector<long double> p(n + 1);
    const long double p1 = logl(fabsl(1.0L - x * x));
    if (fabsl(x) <= 1.0L) {
      // forward recursion, stable inside [-1,1]
      p[0] = logl(fabsl((1.0L - x) / (1.0L + x)));
      for (int k = 1; k <= n; ++k) p[k] = x * p[k - 1] + c2(k);
    } else {
      // outside the panel the recursion amplifies by x^k; sum the
      // geometric series for each moment directly instead
      const long double xinv = 1.0L / x;
      const long double xinv2 = xinv * xinv;
      for (int k = 0; k <= n; ++k) {
        // p[k] = -sum over odd j >= k+1 of (2/j) x^{-(j-k)}
        long double acc = 0.0L;
        int j = (k % 2 == 0) ? k + 1 : k + 2;
        long double pw = (j == k + 1) ? xinv : xinv2;
        for (int it = 0; it < 400000; ++it, j += 2) {
          const long double term = (2.0L / j) * pw;
          acc += term;
          pw *= xinv2;
          if (fabsl(term) < 1e-21L * fabsl(acc)) break;
        }
        p[k] = -acc;
      }
    }
    for (int j = 0; j < n; ++j) {
      const int col = j + 1;
      const long double head = (col % 2 == 1) ? p1 : p[0];
      q(i, j) = static_cast<double>((head - p[col]) / col);
    }
  }
  // W = q A^{-1}: solve A^T W^T = q^T
  const Eigen::MatrixXd a = detail::monomial_vandermonde(rule);
  return a.transpose().partialPivLu().solve(q.transpose()).transpose();
}

// corrections turning plain weights into the log product quadrature on the
// panel containing the target itself.  Off-diagonal entries are added to
// log|r_i - r_j|; the diagonal entry still needs log(speed_i * dt / 2)
// added at assembly time.
inline Eigen::MatrixXd self_log_corrections(const CanonicalRule& rule) {
  const Eigen::MatrixXd w = wfrakL_init(rule.nodes, rule);
  const int n = rule.n_pt;
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c(i, j) = w(i, j) / rule.weights[j];
      if (i != j) c(i, j) -= std::log(std::abs(rule.nodes[i] - rule.nodes[j]));
    }
  return c;
}

// target panel's nodes mapped into the canonical coordinate of an adjacent
// source panel: tt = trans + scale * t
struct NeighborMap {
  double trans = 0.0;
  double scale = 1.0;
};

// lengths are parameter lengths in the grid's own parameterization;
// source_follows: the source panel comes after the target panel
inline NeighborMap neighbor_map(double len_target, double len_source,
                                bool source_follows) {
  NeighborMap nm;
  nm.scale = len_target / len_source;
  nm.trans = source_follows ? -(1.0 + nm.scale) : (1.0 + nm.scale);
  return nm;
}

// log corrections for targets on an adjacent panel, added to log|r_i - r_j|
inline Eigen::MatrixXd neighbor_log_corrections(const CanonicalRule& rule,
                                                const NeighborMap& nm) {
  const int n = rule.n_pt;
  std::vector<double> tt(n);
  for (int i = 0; i < n; ++i) tt[i] = nm.trans + nm.scale * rule.nodes[i];
  const Eigen::MatrixXd w = wfrakL_init(tt, rule);
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) = w(i, j) / rule.weights[j] -
                std::log(std::abs(tt[i] - rule.nodes[j]));
  return c;
}

// parameter of the point on the curve restricted to [ta, tb] nearest to p:
// coarse scan plus a few Newton steps on the squared distance
inline double nearest_param_on_panel(const Curve& curve, double ta, double tb,
                                     const Vec2& p, int n_scan = 20) {
  double best_t = ta, best_d2 = 1e300;
  for (int i = 0; i <= n_scan; ++i) {
    const double t = ta + (tb - ta) * i / n_scan;
    const double d2 = (curve.position(t) - p).norm2();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_t = t;
    }
  }
  double t = best_t;
  for (int iter = 0; iter < 8; ++iter) {
    const Vec2 d = curve.position(t) - p;
    const Vec2 dt = curve.derivative(t);
    const Vec2 dtt = curve.second_derivative(t);
    const double g = d.dot(dt);
    const double h = dt.norm2() + d.dot(dtt);
    if (h <= 0.0) break;
    double t_next = t - g / h;
    t_next = std::min(tb, std::max(ta, t_next));
    if (std::abs(t_next - t) < 1e-14) {
      t = t_next;
      break;
    }
    t = t_next;
  }
  if ((curve.position(t) - p).norm2() > best_d2) t = best_t;
  return t;
}

inline double min_distance_to_panel(const Curve& curve, double ta, double tb,
                                    const Vec2& p, int n_scan = 20) {
  const double t = nearest_param_on_panel(curve, ta, tb, p, n_scan);
  return (curve.position(t) - p).norm();
}

// close-evaluation corrections at a field target near one panel, via exact
// contour integrals of polynomial * log(z - r) and polynomial / (z - r).
//
//   log part:    |rpw_j| (log|r_j - r| + log_corr_j)
//   Cauchy part: cauchy_kernel(r, r_j, nu_j) |rpw_j| + cauchy_corr_j
//
// Accuracy degrades when the target sits very close to a panel endpoint
// (cancellation in log(+-1 - rtr)); callers keep targets activated for the
// nearest panel, which avoids that corner.
struct CloseEvalCorrections {
  std::vector<double> log_corr;
  std::vector<double> cauchy_corr;
};

inline CloseEvalCorrections close_eval_corrections(
    const Curve& curve, double ta, double tb, const Vec2& target,
    const std::vector<Vec2>& nodes, const std::vector<Vec2>& normals,
    const std::vector<double>& speed_weights, const CanonicalRule& rule) {
  using C = std::complex<long double>;
  const int n = rule.n_pt;
  auto cpx = [](const Vec2& v) { return C(v.x, v.y); };
  const Vec2 ra = curve.position(ta), rb = curve.position(tb);
  const C dr = (cpx(rb) - cpx(ra)) / 2.0L;
  const C mid = (cpx(rb) + cpx(ra)) / 2.0L;
  const C rtr = (cpx(target) - mid) / dr;

  // The closed forms below integrate along the straight chord; the true
  // path is the curved panel.  They differ by 2 pi i times the winding of
  // the closed loop (panel forward, chord backward) around the target.
  // The target is enclosed by that loop exactly when it lies between the
  // chord and the arc: its chord offset has the same sign as, and smaller
  // magnitude than, that of the nearest arc point.  This classification
  // stays exact arbitrarily close to the curve, where a sampled polyline
  // would fail.
  int winding = 0;
  {
    const double tn = nearest_param_on_panel(curve, ta, tb, target);
    const C ctr = (cpx(curve.position(tn)) - mid) / dr;
    const long double ci = ctr.imag(), ti = rtr.imag();
    if (ci > 0.0L && ti > 0.0L && ti < ci) winding = -1;  // loop is clockwise
    if (ci < 0.0L && ti < 0.0L && ti > ci) winding = 1;
  }
  const long double twopi = 2.0L * 3.141592653589793238462643383279502884L;
  const C branch(0.0L, twopi * winding);

  // p[k] = contour integral of z^k / (z - rtr) along the panel
  std::vector<C> p(n + 1);
  const C pchord1 = std::log(1.0L - rtr) - std::log(-1.0L - rtr);
  p[0] = pchord1 + branch;
  for (int k = 1; k <= n; ++k)
    p[k] = rtr * p[k - 1] + (1.0L - (k % 2 == 0 ? 1.0L : -1.0L)) / C(k);

  // by-parts boundary heads with the log branch continued along the panel;
  // p[0] is itself the continued difference of endpoint logs
  const C head_even = p[0];
  const C head_odd =
      std::log(1.0L - rtr) + std::log(-1.0L - rtr) + branch;

  Eigen::VectorXcd q(n), pvec(n);
  for (int j = 0; j < n; ++j) {
    const int col = j + 1;
    const C head = (col % 2 == 1) ? head_odd : head_even;
    q(j) = static_cast<Complex>((head - p[col]) / C(col));
    pvec(j) = static_cast<Complex>(p[j]);
  }

  // transposed Vandermonde in the transformed nodes: A v = q gives node
  // weights v with sum v_j f_j = integral of f for polynomial f
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j) {
    const C zj = (cpx(nodes[j]) - mid) / dr;
    C pw = 1.0L;
    for (int i = 0; i < n; ++i) {
      a(i, j) = static_cast<Complex>(pw);
      pw *= zj;
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::VectorXcd vlog = lu.solve(q);
  const Eigen::VectorXcd vcau = lu.solve(pvec);

  CloseEvalCorrections out;
  out.log_corr.resize(n);
  out.cauchy_corr.resize(n);
  const Complex drd = static_cast<Complex>(dr);
  for (int j = 0; j < n; ++j) {
    const Complex nu(normals[j].x, normals[j].y);
    const Complex zj(nodes[j].x, nodes[j].y);
    const Complex rt(target.x, target.y);
    out.log_corr[j] =
        std::imag(vlog(j) * drd * std::conj(nu)) / speed_weights[j] -
        std::log(std::abs((zj - rt) / drd));
    const Complex rpw = Complex(0.0, 1.0) * nu * speed_weights[j];  // z' w
    out.cauchy_corr[j] = std::imag(vcau(j) - rpw / (zj - rt));
  }
  return out;
}

// --- activation rules ------------------------------------------------------

inline double boundary_activation_factor(int n_pt) {
  if (n_pt < 32) return 1.0;
  if (n_pt < 64) return 0.7;
  return 0.5;
}

inline double field_activation_factor(int n_pt) {
  return n_pt < 32 ? 1.1 : 0.3;
}

// cyclic distance between grid parameters
inline double cyclic_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

// boundary target at grid parameter t against panel [pa, pb]
inline bool activate_boundary(double t, double pa, double pb, double period,
                              int n_pt) {
  const double center = 0.5 * (pa + pb);
  return cyclic_distance(t, center, period) <
         boundary_activation_factor(n_pt) * (pb - pa);
}

inline bool activate_field(double dist, double panel_arclen, int n_pt) {
  return dist < field_activation_factor(n_pt) * panel_arclen;
}

}  // namespace helmnys

#endif
