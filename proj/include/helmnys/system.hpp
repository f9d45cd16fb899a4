#ifndef HELMNYS_SYSTEM_HPP
#define HELMNYS_SYSTEM_HPP

// Discretization of the combined-field integral equation
//
//   rho(r) + int_Gamma [K(r,r') - i eta S(r,r')] rho(r') dsigma' = 2 g(r)
//
// on panel Gauss-Legendre grids, with product integration on the panel-
// tridiagonal "star" band, plus GMRES, field evaluation and a condition
// estimate.  The scattered field is u = (1/2) int [K - i eta S] rho.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "interpolation.hpp"
#include "kernel_split.hpp"
#include "product_quadrature.hpp"

namespace helmnys {

// A: coarse star, equal-parameter mesh
// B: fine star via Q M P, equal-parameter mesh
// C: fine star, equal-arclength mesh with unit-speed grids
// D: scheme C with the extended interpolation Px
enum class Scheme { A, B, C, D };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::A: return "A";
    case Scheme::B: return "B";
    case Scheme::C: return "C";
    default: return "D";
  }
}

inline Scheme scheme_from_name(const std::string& s) {
  if (s == "A" || s == "a") return Scheme::A;
  if (s == "B" || s == "b") return Scheme::B;
  if (s == "C" || s == "c") return Scheme::C;
  if (s == "D" || s == "d") return Scheme::D;
  throw std::invalid_argument("unknown scheme: " + s);
}

struct SystemOperator {
  Scheme scheme = Scheme::A;
  Curve curve;
  Grid coarse, fine;
  double k = 0.0, eta = 0.0;

  // plain far interactions; zero on the panel-tridiagonal band
  Eigen::MatrixXcd circ;
  // per panel p: block of rows for p's nodes against the columns of panels
  // [p-1, p, p+1]; on the coarse grid for scheme A, fine otherwise
  std::vector<Eigen::MatrixXcd> star;
  InterpOperator up;    // coarse -> fine (P, or Px for scheme D)
  InterpOperator down;  // fine -> coarse (Q)

  bool fine_star() const { return scheme != Scheme::A; }
  int n() const { return coarse.size(); }

  // y = (I + A) x
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y = x + circ * x;
    const Grid& g = fine_star() ? fine : coarse;
    const Eigen::VectorXcd xs = fine_star() ? up.apply(x) : x;
    Eigen::VectorXcd ys = Eigen::VectorXcd::Zero(g.size());
    const int npt = g.n_pt, npan = g.n_pan;
    for (int p = 0; p < npan; ++p) {
      Eigen::VectorXcd local(3 * npt);
      const int prev = (p + npan - 1) % npan, next = (p + 1) % npan;
      local.segment(0, npt) = xs.segment(prev * npt, npt);
      local.segment(npt, npt) = xs.segment(p * npt, npt);
      local.segment(2 * npt, npt) = xs.segment(next * npt, npt);
      ys.segment(p * npt, npt) = star[p] * local;
    }
    if (fine_star())
      y += down.apply(ys);
    else
      y += ys;
    return y;
  }

  // full matrix I + A (for direct solves and conditioning studies)
  Eigen::MatrixXcd dense() const {
    const int nn = n();
    Eigen::MatrixXcd m = circ;
    m += Eigen::MatrixXcd::Identity(nn, nn);
    const Grid& g = fine_star() ? fine : coarse;
    const int npt = g.n_pt, npan = g.n_pan;
    const int cpt = coarse.n_pt;
    for (int p = 0; p < npan; ++p) {
      const int prev = (p + npan - 1) % npan, next = (p + 1) % npan;
      const int q[3] = {prev, p, next};
      if (!fine_star()) {
        for (int s = 0; s < 3; ++s)
          m.block(p * npt, q[s] * npt, npt, npt) +=
              star[p].middleCols(s * npt, npt);
        continue;
      }
      // Q_p * star_p * (up blocks of the three source panels)
      const Eigen::MatrixXcd qs = down.block(p).cast<Complex>() * star[p];
      for (int s = 0; s < 3; ++s) {
        const Eigen::MatrixXcd contrib =
            qs.middleCols(s * npt, npt) * up.block(q[s]).cast<Complex>();
        if (up.kind != InterpOperator::Kind::Px) {
          m.block(p * cpt, q[s] * cpt, cpt, cpt) += contrib;
        } else {
          const int ns = up.n_s;
          const int qprev = (q[s] + npan - 1) % npan;
          const int qnext = (q[s] + 1) % npan;
          m.block(p * cpt, qprev * cpt + cpt - ns, cpt, ns) +=
              contrib.leftCols(ns);
          m.block(p * cpt, q[s] * cpt, cpt, cpt) +=
              contrib.middleCols(ns, cpt);
          m.block(p * cpt, qnext * cpt, cpt, ns) += contrib.rightCols(ns);
        }
      }
    }
    return m;
  }
};

namespace detail {

// one corrected or plain row segment of the boundary operator: target node
// (index it in grid) against all nodes of source panel q
inline void fill_boundary_row(const Grid& g, double k, double eta, int it,
                              int q, bool corrected,
                              const Eigen::MatrixXd* corr, int corr_row,
                              Eigen::MatrixXcd& block, int col0) {
  const int npt = g.n_pt;
  const Vec2 ri = g.point[it];
  for (int jj = 0; jj < npt; ++jj) {
    const int j = g.node(q, jj);
    const double sw = g.speed[j] * g.weight[j];
    if (j == it) {
      const KernelSplitParts d =
          split_combined_boundary_diag(k, eta, g.curv[j]);
      const double dt = g.panel_b[q] - g.panel_a[q];
      const double lg = std::log(g.speed[j] * 0.5 * dt) + (*corr)(corr_row, jj);
      block(corr_row, col0 + jj) = (d.smooth + d.log_factor * lg) * sw;
    } else if (corrected) {
      const KernelSplitParts p =
          split_combined_boundary(k, eta, ri, g.point[j], g.normal[j]);
      const double lg =
          std::log((ri - g.point[j]).norm()) + (*corr)(corr_row, jj);
      block(corr_row, col0 + jj) = (p.smooth + p.log_factor * lg) * sw;
    } else {
      block(corr_row, col0 + jj) =
          kernel_combined(k, eta, ri, g.point[j], g.normal[j]) * sw;
    }
  }
}

inline std::vector<Eigen::MatrixXcd> build_star(const Grid& g, double k,
                                                double eta,
                                                const CanonicalRule& rule) {
  const int npt = g.n_pt, npan = g.n_pan;
  const double period = g.panel_b[npan - 1] - g.panel_a[0];
  const Eigen::MatrixXd self_corr = self_log_corrections(rule);
  std::vector<Eigen::MatrixXcd> star(npan);

#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < npan; ++p) {
    const int prev = (p + npan - 1) % npan, next = (p + 1) % npan;
    const double len_p = g.panel_b[p] - g.panel_a[p];
    const Eigen::MatrixXd corr_prev = neighbor_log_corrections(
        rule, neighbor_map(len_p, g.panel_b[prev] - g.panel_a[prev],
                           /*source_follows=*/false));
    const Eigen::MatrixXd corr_next = neighbor_log_corrections(
        rule, neighbor_map(len_p, g.panel_b[next] - g.panel_a[next],
                           /*source_follows=*/true));
    Eigen::MatrixXcd block(npt, 3 * npt);
    for (int ii = 0; ii < npt; ++ii) {
      const int it = g.node(p, ii);
      const double ti = g.param[it];
      const bool act_prev = activate_boundary(ti, g.panel_a[prev],
                                              g.panel_b[prev], period, npt);
      const bool act_next = activate_boundary(ti, g.panel_a[next],
                                              g.panel_b[next], period, npt);
      fill_boundary_row(g, k, eta, it, prev, act_prev, &corr_prev, ii,
                        block, 0);
      fill_boundary_row(g, k, eta, it, p, true, &self_corr, ii, block, npt);
      fill_boundary_row(g, k, eta, it, next, act_next, &corr_next, ii,
                        block, 2 * npt);
    }
    star[p] = std::move(block);
  }
  return star;
}

}  // namespace detail

inline SystemOperator assemble_system(const Curve& curve, const Grid& coarse,
                                      const Grid& fine, double k, double eta,
                                      Scheme scheme, int n_s = 4) {
  SystemOperator sys;
  sys.scheme = scheme;
  sys.curve = curve;
  sys.coarse = coarse;
  sys.fine = fine;
  sys.k = k;
  sys.eta = eta;

  const int npt = coarse.n_pt, npan = coarse.n_pan, n = coarse.size();
  const CanonicalRule coarse_rule = gauss_legendre(npt);
  const CanonicalRule fine_rule = gauss_legendre(2 * npt);

  // interpolation operators (also used for field evaluation)
  if (scheme == Scheme::D) {
    std::vector<double> lens(npan);
    for (int p = 0; p < npan; ++p)
      lens[p] = coarse.panel_b[p] - coarse.panel_a[p];
    sys.up = build_Px(lens, coarse_rule, fine_rule, n_s);
  } else {
    sys.up = build_P(coarse_rule, fine_rule, npan);
  }
  sys.down = build_Q(coarse_rule, fine_rule, npan);

  // plain far block, zero on the tridiagonal band
  sys.circ = Eigen::MatrixXcd::Zero(n, n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const int p = i / npt;
    const int prev = (p + npan - 1) % npan, next = (p + 1) % npan;
    const Vec2 ri = coarse.point[i];
    for (int q = 0; q < npan; ++q) {
      if (q == p || q == prev || q == next) continue;
      for (int jj = 0; jj < npt; ++jj) {
        const int j = coarse.node(q, jj);
        sys.circ(i, j) =
            kernel_combined(k, eta, ri, coarse.point[j], coarse.normal[j]) *
            coarse.speed[j] * coarse.weight[j];
      }
    }
  }

  if (scheme == Scheme::A)
    sys.star = detail::build_star(coarse, k, eta, coarse_rule);
  else
    sys.star = detail::build_star(fine, k, eta, fine_rule);
  return sys;
}

// mesh and grid construction matching each scheme
inline SystemOperator make_system(const Curve& curve, int n_pan, int n_pt,
                                  double k, double eta, Scheme scheme,
                                  int n_s = 4) {
  const bool arc = scheme == Scheme::C || scheme == Scheme::D;
  const Mesh mesh = arc ? equal_arclength_mesh(curve, n_pan)
                        : equal_parameter_mesh(curve, n_pan);
  auto [coarse, fine] = build_grids(curve, mesh, n_pt, /*unit_speed=*/arc);
  return assemble_system(curve, coarse, fine, k, eta, scheme, n_s);
}

// --- GMRES -----------------------------------------------------------------

struct GmresResult {
  Eigen::VectorXcd x;
  std::vector<double> residuals;  // relative preconditioned residual history
  int iterations = 0;
  bool converged = false;
};

// unrestarted GMRES with modified Gram-Schmidt plus one reorthogonalization
// pass; stops on the relative residual estimate, the iteration cap, or
// stagnation (no improvement over 5 consecutive iterations)
template <typename MatVec>
GmresResult gmres_solve(const MatVec& av, const Eigen::VectorXcd& b,
                        double tol, int max_iter) {
  GmresResult out;
  const int n = static_cast<int>(b.size());
  max_iter = std::min(max_iter, n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x = Eigen::VectorXcd::Zero(n);
    out.converged = true;
    return out;
  }

  std::vector<Eigen::VectorXcd> v;
  v.push_back(b / bnorm);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(max_iter + 1, max_iter);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(max_iter + 1);
  g(0) = bnorm;
  std::vector<Complex> cs(max_iter), sn(max_iter);

  double best_res = 1.0;
  int best_k = 0, stall = 0;
  int kdone = 0;

  for (int kk = 0; kk < max_iter; ++kk) {
    Eigen::VectorXcd w = av(v[kk]);
    for (int i = 0; i <= kk; ++i) {
      const Complex hik = v[i].dot(w);
      h(i, kk) = hik;
      w -= hik * v[i];
    }
    for (int i = 0; i <= kk; ++i) {  // reorthogonalization
      const Complex corr = v[i].dot(w);
      h(i, kk) += corr;
      w -= corr * v[i];
    }
    const double wnorm = w.norm();
    h(kk + 1, kk) = wnorm;

    // apply accumulated rotations, then a new one
    for (int i = 0; i < kk; ++i) {
      const Complex t = std::conj(cs[i]) * h(i, kk) + std::conj(sn[i]) * h(i + 1, kk);
      h(i + 1, kk) = -sn[i] * h(i, kk) + cs[i] * h(i + 1, kk);
      h(i, kk) = t;
    }
    const double denom =
        std::sqrt(std::norm(h(kk, kk)) + std::norm(h(kk + 1, kk)));
    if (denom == 0.0) {
      cs[kk] = 1.0;
      sn[kk] = 0.0;
    } else {
      cs[kk] = h(kk, kk) / denom;
      sn[kk] = h(kk + 1, kk) / denom;
    }
    h(kk, kk) = std::conj(cs[kk]) * h(kk, kk) + std::conj(sn[kk]) * h(kk + 1, kk);
    h(kk + 1, kk) = 0.0;
    g(kk + 1) = -sn[kk] * g(kk);
    g(kk) = std::conj(cs[kk]) * g(kk);

    const double res = std::abs(g(kk + 1)) / bnorm;
    out.residuals.push_back(res);
    kdone = kk + 1;

    if (res < best_res * (1.0 - 1e-3)) {
      best_res = res;
      best_k = kk + 1;
      stall = 0;
    } else {
      ++stall;
    }
    if (res < tol) {
      out.converged = true;
      best_k = kk + 1;
      break;
    }
    if (stall >= 5) break;  // stagnation
    if (wnorm == 0.0) {     // lucky breakdown
      out.converged = true;
      best_k = kk + 1;
      break;
    }
    if (kk + 1 < max_iter) v.push_back(w / wnorm);
  }

  // assemble the best iterate
  const int m = best_k;
  Eigen::VectorXcd y = h.topLeftCorner(m, m)
                           .triangularView<Eigen::Upper>()
                           .solve(g.head(m));
  out.x = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < m; ++i) out.x += y(i) * v[i];
  out.iterations = kdone;
  return out;
}

inline GmresResult solve_density(const SystemOperator& sys,
                                 const Eigen::VectorXcd& rhs, double tol,
                                 int max_iter = 1000) {
  return gmres_solve(
      [&](const Eigen::VectorXcd& x) { return sys.apply(x); }, rhs, tol,
      max_iter);
}

// ratio of extreme singular values of I + A
inline double condition_estimate(const SystemOperator& sys) {
  const Eigen::MatrixXcd m = sys.dense();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

// --- field evaluation ------------------------------------------------------

// u(r) = (1/2) sum_j M(r, r_j) rho_j s_j w_j with three zones per panel:
// far (coarse plain), intermediate (fine plain) and close (fine product
// integration)
inline Eigen::VectorXcd evaluate_field(const SystemOperator& sys,
                                       const Eigen::VectorXcd& rho,
                                       const std::vector<Vec2>& targets) {
  const Grid& cg = sys.coarse;
  const Grid& fg = sys.fine;
  const double k = sys.k, eta = sys.eta;
  const int npan = cg.n_pan;
  const Eigen::VectorXcd rho_fine = sys.up.apply(rho);
  const CanonicalRule fine_rule = gauss_legendre(fg.n_pt);

  // bounding data for a cheap distance precheck
  std::vector<Vec2> centers(npan);
  std::vector<double> radius(npan);
  for (int p = 0; p < npan; ++p) {
    Vec2 c{0.0, 0.0};
    for (int i = 0; i < fg.n_pt; ++i) c = c + fg.point[fg.node(p, i)];
    c = c / fg.n_pt;
    double r = 0.0;
    for (int i = 0; i < fg.n_pt; ++i)
      r = std::max(r, (fg.point[fg.node(p, i)] - c).norm());
    r = std::max(r, (fg.panel_ra[p] - c).norm());
    r = std::max(r, (fg.panel_rb[p] - c).norm());
    centers[p] = c;
    radius[p] = r;
  }

  const double inter_factor = 2.0;
  const double close_factor = field_activation_factor(fg.n_pt);

  Eigen::VectorXcd u(targets.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int ti = 0; ti < static_cast<int>(targets.size()); ++ti) {
    const Vec2 r = targets[ti];
    Complex acc(0.0, 0.0);
    for (int p = 0; p < npan; ++p) {
      const double arclen = fg.panel_arclen[p];
      const double lower = (r - centers[p]).norm() - radius[p];
      if (lower > inter_factor * arclen) {
        // far: coarse plain quadrature
        for (int i = 0; i < cg.n_pt; ++i) {
          const int j = cg.node(p, i);
          acc += kernel_combined(k, eta, r, cg.point[j], cg.normal[j]) *
                 (cg.speed[j] * cg.weight[j]) * rho(j);
        }
        continue;
      }
      const double dist =
          min_distance_to_panel(sys.curve, fg.panel_ta[p], fg.panel_tb[p], r);
      if (dist >= inter_factor * arclen) {
        for (int i = 0; i < cg.n_pt; ++i) {
          const int j = cg.node(p, i);
          acc += kernel_combined(k, eta, r, cg.point[j], cg.normal[j]) *
                 (cg.speed[j] * cg.weight[j]) * rho(j);
        }
      } else if (dist >= close_factor * arclen) {
        // intermediate: fine plain quadrature
        for (int i = 0; i < fg.n_pt; ++i) {
          const int j = fg.node(p, i);
          acc += kernel_combined(k, eta, r, fg.point[j], fg.normal[j]) *
                 (fg.speed[j] * fg.weight[j]) * rho_fine(j);
        }
      } else {
        // close: fine product integration
        std::vector<Vec2> nodes(fg.n_pt), normals(fg.n_pt);
        std::vector<double> sw(fg.n_pt);
        for (int i = 0; i < fg.n_pt; ++i) {
          const int j = fg.node(p, i);
          nodes[i] = fg.point[j];
          normals[i] = fg.normal[j];
          sw[i] = fg.speed[j] * fg.weight[j];
        }
        const CloseEvalCorrections cc = close_eval_corrections(
            sys.curve, fg.panel_ta[p], fg.panel_tb[p], r, nodes, normals, sw,
            fine_rule);
        for (int i = 0; i < fg.n_pt; ++i) {
          const int j = fg.node(p, i);
          const KernelSplitParts parts =
              split_combined_field(k, eta, r, nodes[i], normals[i]);
          const double lg = std::log((r - nodes[i]).norm());
          Complex val = parts.smooth * sw[i];
          val += parts.log_factor * ((lg + cc.log_corr[i]) * sw[i]);
          val += parts.cauchy_factor *
                 (cauchy_kernel(r, nodes[i], normals[i]) * sw[i] +
                  cc.cauchy_corr[i]);
          acc += val * rho_fine(j);
        }
      }
    }
    u(ti) = 0.5 * acc;
  }
  return u;
}

}  // namespace helmnys

#endif
