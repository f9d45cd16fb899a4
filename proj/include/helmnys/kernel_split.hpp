#ifndef HELMNYS_KERNEL_SPLIT_HPP
#define HELMNYS_KERNEL_SPLIT_HPP

// Explicit splits of the Helmholtz layer kernels into a smooth part, a
// logarithmic part and (for field targets) a Cauchy-type part:
//
//   kernel(r, r') = smooth + log_factor * log|r - r'|
//                 + cauchy_factor * ((r'-r).nu') / |r - r'|^2
//
// Everything is written in terms of the regularized combinations Y0_reg
// and Y1_reg, so the formulas stay accurate uniformly down to r = r'.

#include "common.hpp"
#include "geometry.hpp"
#include "special.hpp"

namespace helmnys {

struct KernelSplitParts {
  Complex smooth{};
  Complex log_factor{};
  Complex cauchy_factor{};
};

// ((r'-r).nu') / |r'-r|^2, the Cauchy-type singular kernel
inline double cauchy_kernel(const Vec2& r, const Vec2& rp, const Vec2& nup) {
  const Vec2 d = rp - r;
  return d.dot(nup) / d.norm2();
}

inline Complex reassemble(const KernelSplitParts& parts, const Vec2& r,
                          const Vec2& rp, const Vec2& nup) {
  Complex v = parts.smooth + parts.log_factor * std::log((r - rp).norm());
  if (parts.cauchy_factor != Complex(0.0))
    v += parts.cauchy_factor * cauchy_kernel(r, rp, nup);
  return v;
}

// single layer: S(r, r') = (i/2) H0(k|r-r'|)
inline Complex kernel_S(double k, const Vec2& r, const Vec2& rp) {
  return Complex(0.0, 0.5) * hankel1_0(k * (r - rp).norm());
}

inline KernelSplitParts split_S(double k, const Vec2& r, const Vec2& rp) {
  const double z = k * (r - rp).norm();
  const double j0 = bessel_j0(z);
  KernelSplitParts p;
  p.log_factor = -j0 / pi;
  p.smooth = Complex(-0.5 * bessel_y0_reg(z) -
                         (std::log(0.5 * k) + euler_gamma) * j0 / pi,
                     0.5 * j0);
  return p;
}

inline KernelSplitParts split_S_diag(double k) {
  KernelSplitParts p;
  p.log_factor = -1.0 / pi;
  p.smooth = Complex(-(std::log(0.5 * k) + euler_gamma) / pi, 0.5);
  return p;
}

// double layer: K(r, r') = -(ik/2) H1(k|r-r'|) ((r'-r).nu') / |r-r'|
inline Complex kernel_K(double k, const Vec2& r, const Vec2& rp,
                        const Vec2& nup) {
  const Vec2 d = rp - r;
  const double dist = d.norm();
  return Complex(0.0, -0.5 * k) * hankel1_1(k * dist) * (d.dot(nup) / dist);
}

// split for boundary targets: the Cauchy-type piece is smooth along the
// curve and is folded into the smooth part
inline KernelSplitParts split_K_boundary(double k, const Vec2& r,
                                         const Vec2& rp, const Vec2& nup) {
  const Vec2 d = rp - r;
  const double dist = d.norm();
  const double z = k * dist;
  const double c = d.dot(nup) / dist;
  const double j1 = bessel_j1(z);
  KernelSplitParts p;
  p.log_factor = k * j1 * c / pi;
  p.smooth =
      Complex(0.5 * k * c * (bessel_y1_reg(z) +
                             (2.0 / pi) * std::log(0.5 * k) * j1) -
                  d.dot(nup) / (pi * d.norm2()),
              -0.5 * k * c * j1);
  return p;
}

// coincidence limit; curv = (nu . r'') / |r'|^2 at the node
inline KernelSplitParts split_K_boundary_diag(double /*k*/, double curv) {
  KernelSplitParts p;
  p.smooth = curv / (2.0 * pi);
  return p;
}

// split for field targets: the 1/|r-r'| piece is kept as an explicit
// Cauchy-type term
inline KernelSplitParts split_K_field(double k, const Vec2& r, const Vec2& rp,
                                      const Vec2& nup) {
  const Vec2 d = rp - r;
  const double dist = d.norm();
  const double z = k * dist;
  const double c = d.dot(nup) / dist;
  const double j1 = bessel_j1(z);
  KernelSplitParts p;
  p.log_factor = k * j1 * c / pi;
  p.cauchy_factor = -1.0 / pi;
  p.smooth = Complex(
      0.5 * k * c * (bessel_y1_reg(z) + (2.0 / pi) * std::log(0.5 * k) * j1),
      -0.5 * k * c * j1);
  return p;
}

namespace detail {

inline KernelSplitParts combine(const KernelSplitParts& kk,
                                const KernelSplitParts& ss, double eta) {
  const Complex f(0.0, -eta);
  KernelSplitParts p;
  p.smooth = kk.smooth + f * ss.smooth;
  p.log_factor = kk.log_factor + f * ss.log_factor;
  p.cauchy_factor = kk.cauchy_factor + f * ss.cauchy_factor;
  return p;
}

}  // namespace detail

// combined kernel M = K - i eta S
inline Complex kernel_combined(double k, double eta, const Vec2& r,
                               const Vec2& rp, const Vec2& nup) {
  return kernel_K(k, r, rp, nup) + Complex(0.0, -eta) * kernel_S(k, r, rp);
}

inline KernelSplitParts split_combined_boundary(double k, double eta,
                                                const Vec2& r, const Vec2& rp,
                                                const Vec2& nup) {
  return detail::combine(split_K_boundary(k, r, rp, nup), split_S(k, r, rp),
                         eta);
}

inline KernelSplitParts split_combined_boundary_diag(double k, double eta,
                                                     double curv) {
  return detail::combine(split_K_boundary_diag(k, curv), split_S_diag(k), eta);
}

inline KernelSplitParts split_combined_field(double k, double eta,
                                             const Vec2& r, const Vec2& rp,
                                             const Vec2& nup) {
  return detail::combine(split_K_field(k, r, rp, nup), split_S(k, r, rp), eta);
}

}  // namespace helmnys

#endif
