#ifndef HELMNYS_INTERPOLATION_HPP
#define HELMNYS_INTERPOLATION_HPP

// Canonical Gauss-Legendre rules and the panelwise interpolation operators
// between the coarse (n_pt per panel) and fine (2 n_pt per panel) grids.
// All operators are built from monomial Vandermonde systems solved with a
// backward-stable dense factorization; explicit inverses are never formed.

#include <Eigen/Dense>
#include <vector>

#include "common.hpp"

namespace helmnys {

struct CanonicalRule {
  int n_pt = 0;
  std::vector<double> nodes;    // strictly increasing in (-1,1)
  std::vector<double> weights;  // positive, sum to 2
};

// Legendre roots by Newton from Chebyshev initial guesses
inline CanonicalRule gauss_legendre(int n_pt) {
  if (n_pt < 1 || n_pt > 64)
    throw std::invalid_argument("gauss_legendre: order out of range");
  CanonicalRule rule;
  rule.n_pt = n_pt;
  rule.nodes.resize(n_pt);
  rule.weights.resize(n_pt);
  for (int i = 0; i < (n_pt + 1) / 2; ++i) {
    // i-th root counted from +1 side
    long double x = cosl(3.141592653589793238462643383279502884L *
                         (i + 0.75L) / (n_pt + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n and P_n'
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n_pt; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n_pt * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (fabsl(dx) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    rule.nodes[n_pt - 1 - i] = static_cast<double>(x);
    rule.nodes[i] = static_cast<double>(-x);
    rule.weights[n_pt - 1 - i] = static_cast<double>(w);
    rule.weights[i] = static_cast<double>(w);
  }
  if (n_pt % 2 == 1) rule.nodes[n_pt / 2] = 0.0;
  return rule;
}

namespace detail {

// generalized Vandermonde in the Legendre basis; far better conditioned
// than monomials at the orders used here, and the resulting interpolation
// operators are basis independent
inline Eigen::MatrixXd vandermonde(const std::vector<double>& pts, int n_cols) {
  Eigen::MatrixXd v(pts.size(), n_cols);
  for (size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i];
    double p0 = 1.0, p1 = x;
    for (int j = 0; j < n_cols; ++j) {
      if (j == 0) {
        v(i, j) = 1.0;
      } else if (j == 1) {
        v(i, j) = x;
      } else {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
        v(i, j) = p2;
      }
    }
  }
  return v;
}

// X = B * A^{-1} without forming the inverse: solve A^T X^T = B^T
inline Eigen::MatrixXd right_solve(const Eigen::MatrixXd& b,
                                   const Eigen::MatrixXd& a) {
  return a.transpose().colPivHouseholderQr().solve(b.transpose()).transpose();
}

}  // namespace detail

struct InterpOperator {
  enum class Kind { P, Q, Px };
  Kind kind = Kind::P;
  int n_pan = 0;
  int rows_per_panel = 0;  // output values per panel
  int cols_per_panel = 0;  // input values drawn from the source grid
  int n_s = 0;             // stencil half-width (Px only)
  // one block per panel; P and Q replicate a single block n_pan times
  std::vector<Eigen::MatrixXd> blocks;

  int out_size() const { return rows_per_panel * n_pan; }

  const Eigen::MatrixXd& block(int p) const {
    return blocks.size() == 1 ? blocks[0] : blocks[p];
  }

  // apply to a complex grid vector; Px gathers n_s values from each
  // cyclic neighbor in addition to the panel's own nodes
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    if (kind == Kind::Px) {
      const int n_pt = cols_per_panel - 2 * n_s;
      Eigen::VectorXcd y(out_size());
      Eigen::VectorXcd local(cols_per_panel);
      for (int p = 0; p < n_pan; ++p) {
        const int prev = (p + n_pan - 1) % n_pan, next = (p + 1) % n_pan;
        for (int i = 0; i < n_s; ++i)
          local(i) = x(prev * n_pt + n_pt - n_s + i);
        for (int i = 0; i < n_pt; ++i) local(n_s + i) = x(p * n_pt + i);
        for (int i = 0; i < n_s; ++i)
          local(n_s + n_pt + i) = x(next * n_pt + i);
        y.segment(p * rows_per_panel, rows_per_panel) = block(p) * local;
      }
      return y;
    }
    Eigen::VectorXcd y(out_size());
    for (int p = 0; p < n_pan; ++p)
      y.segment(p * rows_per_panel, rows_per_panel) =
          block(p) * x.segment(p * cols_per_panel, cols_per_panel);
    return y;
  }

  Eigen::VectorXd apply_real(const Eigen::VectorXd& x) const {
    Eigen::VectorXcd xc = x.cast<Complex>();
    return apply(xc).real();
  }
};

// P^(21) = V^(21) (V^(11))^{-1}: coarse -> fine, degree n_pt-1
inline InterpOperator build_P(const CanonicalRule& coarse,
                              const CanonicalRule& fine, int n_pan) {
  if (fine.n_pt != 2 * coarse.n_pt)
    throw std::invalid_argument("build_P: fine rule must have 2 n_pt nodes");
  InterpOperator op;
  op.kind = InterpOperator::Kind::P;
  op.n_pan = n_pan;
  op.rows_per_panel = fine.n_pt;
  op.cols_per_panel = coarse.n_pt;
  const Eigen::MatrixXd v11 = detail::vandermonde(coarse.nodes, coarse.n_pt);
  const Eigen::MatrixXd v21 = detail::vandermonde(fine.nodes, coarse.n_pt);
  op.blocks.push_back(detail::right_solve(v21, v11));
  return op;
}

// Q^(12) = V^(12) (V^(22))^{-1}: fine -> coarse, degree 2 n_pt-1
inline InterpOperator build_Q(const CanonicalRule& coarse,
                              const CanonicalRule& fine, int n_pan) {
  if (fine.n_pt != 2 * coarse.n_pt)
    throw std::invalid_argument("build_Q: fine rule must have 2 n_pt nodes");
  InterpOperator op;
  op.kind = InterpOperator::Kind::Q;
  op.n_pan = n_pan;
  op.rows_per_panel = coarse.n_pt;
  op.cols_per_panel = fine.n_pt;
  const Eigen::MatrixXd v12 = detail::vandermonde(coarse.nodes, fine.n_pt);
  const Eigen::MatrixXd v22 = detail::vandermonde(fine.nodes, fine.n_pt);
  op.blocks.push_back(detail::right_solve(v12, v22));
  return op;
}

// Extended interpolation: per-panel blocks over n_pt + 2 n_s nodes reaching
// n_s nodes into each cyclic neighbor. panel_lengths are parameter lengths
// in the grid's own parameterization.
inline InterpOperator build_Px(const std::vector<double>& panel_lengths,
                               const CanonicalRule& coarse,
                               const CanonicalRule& fine, int n_s) {
  const int n_pt = coarse.n_pt;
  const int n_ext = n_pt + 2 * n_s;
  if (n_s < 0 || n_ext > fine.n_pt)
    throw std::invalid_argument("build_Px: need n_pt + 2 n_s <= 2 n_pt");
  const int n_pan = static_cast<int>(panel_lengths.size());
  if (n_pan < 3) throw std::invalid_argument("build_Px: need >= 3 panels");

  InterpOperator op;
  op.kind = InterpOperator::Kind::Px;
  op.n_pan = n_pan;
  op.rows_per_panel = fine.n_pt;
  op.cols_per_panel = n_ext;
  op.n_s = n_s;
  op.blocks.resize(n_pan);

  const Eigen::MatrixXd v21x = detail::vandermonde(fine.nodes, n_ext);
  for (int p = 0; p < n_pan; ++p) {
    const double alpha = panel_lengths[(p + n_pan - 1) % n_pan] / panel_lengths[p];
    const double beta = panel_lengths[(p + 1) % n_pan] / panel_lengths[p];
    std::vector<double> ext(n_ext);
    for (int i = 0; i < n_s; ++i)
      ext[i] = alpha * (coarse.nodes[n_pt - n_s + i] - 1.0) - 1.0;
    for (int i = 0; i < n_pt; ++i) ext[n_s + i] = coarse.nodes[i];
    for (int i = 0; i < n_s; ++i)
      ext[n_s + n_pt + i] = beta * (coarse.nodes[i] + 1.0) + 1.0;
    const Eigen::MatrixXd v11x = detail::vandermonde(ext, n_ext);
    op.blocks[p] = detail::right_solve(v21x, v11x);
  }
  return op;
}

}  // namespace helmnys

#endif
