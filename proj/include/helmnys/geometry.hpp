#ifndef HELMNYS_GEOMETRY_HPP
#define HELMNYS_GEOMETRY_HPP

// Curve parameterization, panel meshes and the coarse/fine discretization
// grids, including the arclength machinery needed for equal-arclength
// meshes and unit-speed grids.

#include <functional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "interpolation.hpp"

namespace helmnys {

// closed curve with period 2 pi, parameter range [-pi, pi]
struct Curve {
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> derivative;
  std::function<Vec2(double)> second_derivative;
  // radial function R(theta) for starlike curves; empty otherwise
  std::function<double(double)> radial;

  double speed(double t) const { return derivative(t).norm(); }
  Vec2 outward_normal(double t) const {
    const Vec2 d = derivative(t);
    return d.perp_cw() / d.norm();
  }
  // (nu . r'') / |r'|^2, the kernel-split curvature term
  double curvature_term(double t) const {
    const Vec2 d = derivative(t);
    return outward_normal(t).dot(second_derivative(t)) / d.norm2();
  }
};

// r(t) = (9/20)(1 + (20/81) sin(5t)) (cos t, sin t)
inline Curve starfish_curve() {
  auto radius = [](double t) { return 0.45 * (1.0 + (20.0 / 81.0) * std::sin(5.0 * t)); };
  auto dradius = [](double t) { return 0.45 * (100.0 / 81.0) * std::cos(5.0 * t); };
  auto d2radius = [](double t) { return -0.45 * (500.0 / 81.0) * std::sin(5.0 * t); };
  Curve c;
  c.position = [=](double t) {
    const double r = radius(t);
    return Vec2{r * std::cos(t), r * std::sin(t)};
  };
  c.derivative = [=](double t) {
    const double r = radius(t), dr = dradius(t);
    const double ct = std::cos(t), st = std::sin(t);
    return Vec2{dr * ct - r * st, dr * st + r * ct};
  };
  c.second_derivative = [=](double t) {
    const double r = radius(t), dr = dradius(t), d2r = d2radius(t);
    const double ct = std::cos(t), st = std::sin(t);
    return Vec2{(d2r - r) * ct - 2.0 * dr * st, (d2r - r) * st + 2.0 * dr * ct};
  };
  c.radial = radius;
  return c;
}

inline Curve circle_curve(double radius = 1.0) {
  Curve c;
  c.position = [=](double t) { return Vec2{radius * std::cos(t), radius * std::sin(t)}; };
  c.derivative = [=](double t) { return Vec2{-radius * std::sin(t), radius * std::cos(t)}; };
  c.second_derivative = [=](double t) {
    return Vec2{-radius * std::cos(t), -radius * std::sin(t)};
  };
  c.radial = [=](double) { return radius; };
  return c;
}

struct Mesh {
  std::vector<double> breakpoints;       // n_pan+1 values, -pi ... pi
  std::vector<double> panel_arclengths;  // n_pan positive values

  int n_pan() const { return static_cast<int>(panel_arclengths.size()); }
  double total_arclength() const {
    double sum = 0.0;
    for (double a : panel_arclengths) sum += a;
    return sum;
  }
};

// cumulative arclength sigma(t) from t = -pi, evaluated by composite
// Gauss-Legendre on a fixed reference subdivision; machine precision for
// smooth curves
class ArclengthMap {
 public:
  explicit ArclengthMap(const Curve& curve, int n_ref = 256)
      : curve_(&curve), rule_(gauss_legendre(32)), n_ref_(n_ref) {
    cum_.resize(n_ref + 1);
    cum_[0] = 0.0;
    for (int j = 0; j < n_ref; ++j)
      cum_[j + 1] = cum_[j] + panel_integral(ref_point(j), ref_point(j + 1));
  }

  double total() const { return cum_.back(); }

  double sigma(double t) const {
    if (t <= -pi) return 0.0;
    if (t >= pi) return total();
    const double u = (t + pi) / (2.0 * pi) * n_ref_;
    int j = std::min(static_cast<int>(u), n_ref_ - 1);
    return cum_[j] + panel_integral(ref_point(j), t);
  }

  // invert sigma by Newton with bisection fallback
  double t_of_sigma(double target) const {
    double lo = -pi, hi = pi;
    double t = lo + (hi - lo) * target / total();
    for (int iter = 0; iter < 100; ++iter) {
      const double f = sigma(t) - target;
      if (f > 0.0) hi = t; else lo = t;
      const double dt = f / curve_->speed(t);
      double t_next = t - dt;
      if (t_next <= lo || t_next >= hi) t_next = 0.5 * (lo + hi);
      if (std::abs(t_next - t) < 1e-15 * (1.0 + std::abs(t))) return t_next;
      t = t_next;
    }
    if (hi - lo < 1e-12) return 0.5 * (lo + hi);
    throw std::runtime_error("ArclengthMap: Newton failed to converge");
  }

 private:
  double ref_point(int j) const { return -pi + 2.0 * pi * j / n_ref_; }

  double panel_integral(double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < rule_.n_pt; ++i)
      s += rule_.weights[i] * curve_->speed(c + h * rule_.nodes[i]);
    return s * h;
  }

  const Curve* curve_;
  CanonicalRule rule_;
  int n_ref_;
  std::vector<double> cum_;
};

inline Mesh equal_parameter_mesh(const Curve& curve, int n_pan) {
  if (n_pan < 3) throw std::invalid_argument("equal_parameter_mesh: n_pan < 3");
  Mesh mesh;
  mesh.breakpoints.resize(n_pan + 1);
  for (int p = 0; p <= n_pan; ++p)
    mesh.breakpoints[p] = -pi + 2.0 * pi * p / n_pan;
  const ArclengthMap arc(curve);
  mesh.panel_arclengths.resize(n_pan);
  for (int p = 0; p < n_pan; ++p)
    mesh.panel_arclengths[p] =
        arc.sigma(mesh.breakpoints[p + 1]) - arc.sigma(mesh.breakpoints[p]);
  return mesh;
}

inline Mesh equal_arclength_mesh(const Curve& curve, int n_pan,
                                 double tol = 1e-14) {
  if (n_pan < 3) throw std::invalid_argument("equal_arclength_mesh: n_pan < 3");
  if (tol < 1e-15) tol = 1e-15;
  const ArclengthMap arc(curve);
  const double total = arc.total();
  Mesh mesh;
  mesh.breakpoints.resize(n_pan + 1);
  mesh.breakpoints[0] = -pi;
  mesh.breakpoints[n_pan] = pi;
  for (int p = 1; p < n_pan; ++p)
    mesh.breakpoints[p] = arc.t_of_sigma(total * p / n_pan);
  mesh.panel_arclengths.assign(n_pan, total / n_pan);
  return mesh;
}

// one discretization grid; "param" is the grid's own parameterization:
// the curve parameter t for standard grids, cumulative arclength for
// unit-speed grids
struct Grid {
  int n_pt = 0;
  int n_pan = 0;
  // per node
  std::vector<double> param, weight, speed, curv, t_orig;
  std::vector<Vec2> point, normal;
  // per panel
  std::vector<double> panel_a, panel_b;    // grid-parameter endpoints
  std::vector<double> panel_ta, panel_tb;  // curve-parameter endpoints
  std::vector<double> panel_arclen;
  std::vector<Vec2> panel_ra, panel_rb;

  int size() const { return n_pt * n_pan; }
  int node(int panel, int i) const { return panel * n_pt + i; }
};

namespace detail {

inline Grid build_one_grid(const Curve& curve, const Mesh& mesh,
                           const CanonicalRule& rule, bool unit_speed,
                           const ArclengthMap& arc) {
  const int n_pan = mesh.n_pan();
  Grid g;
  g.n_pt = rule.n_pt;
  g.n_pan = n_pan;
  const int n = g.size();
  g.param.resize(n);
  g.weight.resize(n);
  g.speed.resize(n);
  g.curv.resize(n);
  g.t_orig.resize(n);
  g.point.resize(n);
  g.normal.resize(n);
  g.panel_a.resize(n_pan);
  g.panel_b.resize(n_pan);
  g.panel_ta.resize(n_pan);
  g.panel_tb.resize(n_pan);
  g.panel_arclen.resize(n_pan);
  g.panel_ra.resize(n_pan);
  g.panel_rb.resize(n_pan);

  for (int p = 0; p < n_pan; ++p) {
    const double ta = mesh.breakpoints[p], tb = mesh.breakpoints[p + 1];
    g.panel_ta[p] = ta;
    g.panel_tb[p] = tb;
    g.panel_ra[p] = curve.position(ta);
    g.panel_rb[p] = curve.position(tb);
    g.panel_arclen[p] = mesh.panel_arclengths[p];
    if (unit_speed) {
      const double sa = arc.sigma(ta), sb = arc.sigma(tb);
      g.panel_a[p] = sa;
      g.panel_b[p] = sb;
      for (int i = 0; i < rule.n_pt; ++i) {
        const int idx = g.node(p, i);
        const double s_node = sa + 0.5 * (sb - sa) * (rule.nodes[i] + 1.0);
        const double t = arc.t_of_sigma(s_node);
        g.param[idx] = s_node;
        g.t_orig[idx] = t;
        g.weight[idx] = 0.5 * (sb - sa) * rule.weights[i];
        g.speed[idx] = 1.0;  // arclength parameterization
        // nu.r_ss = nu.r_tt/s^2 since nu is orthogonal to r_t
        g.curv[idx] = curve.curvature_term(t);
        g.point[idx] = curve.position(t);
        g.normal[idx] = curve.outward_normal(t);
      }
    } else {
      g.panel_a[p] = ta;
      g.panel_b[p] = tb;
      for (int i = 0; i < rule.n_pt; ++i) {
        const int idx = g.node(p, i);
        const double t = ta + 0.5 * (tb - ta) * (rule.nodes[i] + 1.0);
        g.param[idx] = t;
        g.t_orig[idx] = t;
        g.weight[idx] = 0.5 * (tb - ta) * rule.weights[i];
        g.speed[idx] = curve.speed(t);
        g.curv[idx] = curve.curvature_term(t);
        g.point[idx] = curve.position(t);
        g.normal[idx] = curve.outward_normal(t);
      }
    }
  }
  return g;
}

}  // namespace detail

inline std::pair<Grid, Grid> build_grids(const Curve& curve, const Mesh& mesh,
                                         int n_pt, bool unit_speed = false) {
  const ArclengthMap arc(curve);
  const CanonicalRule coarse_rule = gauss_legendre(n_pt);
  const CanonicalRule fine_rule = gauss_legendre(2 * n_pt);
  Grid coarse = detail::build_one_grid(curve, mesh, coarse_rule, unit_speed, arc);
  Grid fine = detail::build_one_grid(curve, mesh, fine_rule, unit_speed, arc);
  return {std::move(coarse), std::move(fine)};
}

// starlike radial test; valid for the curves in this library
inline bool point_in_interior(const Curve& curve, const Vec2& p) {
  if (!curve.radial) throw std::logic_error("point_in_interior: curve has no radial function");
  return p.norm() < curve.radial(std::atan2(p.y, p.x));
}

struct PointSource {
  Vec2 location;
  double strength = 1.0;
};

}  // namespace helmnys

#endif
