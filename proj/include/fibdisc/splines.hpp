#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fibdisc/lattice.hpp"

namespace fibdisc {

/// Largest smoothness order accepted for test functions. Squared-norm
/// computations internally use order 2r, so the spline table goes to twice this.
inline constexpr int kMaxSmoothness = 8;
inline constexpr int kMaxSplineOrder = 2 * kMaxSmoothness;

/// Piecewise-polynomial form of the centered cardinal B-spline M_r (support
/// [-r/2, r/2), M_1 the indicator of [-1/2, 1/2)). Piece i lives on
/// [i - r/2, i + 1 - r/2) and is stored in powers of the offset from the
/// piece midpoint, lowest power first.
struct CardinalSpline {
  int order = 0;
  std::vector<std::vector<double>> pieces;

  double operator()(double x) const;
};

/// Exact construction by repeated convolution with the unit indicator; the
/// rational coefficients are rounded to double once. Thread-safe, built lazily.
const CardinalSpline& cardinal_bspline(int r);

/// Rational coefficients of piece i of M_r as "num/den" strings (same layout
/// as CardinalSpline::pieces). Intended for inspection and tests.
std::vector<std::vector<std::string>> cardinal_bspline_exact(int r);

/// Order r and base width u of the univariate hat h^r_u.
class HatSpec {
 public:
  HatSpec(int r, double u);

  int r() const { return r_; }
  double u() const { return u_; }
  /// Support is (-half_width, half_width).
  double half_width() const { return 0.5 * r_ * u_; }

 private:
  int r_;
  double u_;
};

/// h^r_u(x) = u^{r-1} M_r(x / u), the r-fold convolution of the indicator of
/// [-u/2, u/2).
double hat_eval(const HatSpec& spec, double x);

/// Fourier transform (sin(pi y u) / (pi y))^r, with u^r at y = 0.
double hat_fourier(const HatSpec& spec, double y);

/// sum over m in Z of h^r_u(x + m). Any width is accepted.
double periodized_hat_eval(const HatSpec& spec, double x);

/// Box of order r: center z, base widths u, support prod [z_j - r u_j / 2, z_j + r u_j / 2).
class SmoothBox {
 public:
  SmoothBox(int r, std::vector<double> z, std::vector<double> u);

  int r() const { return r_; }
  int dim() const { return static_cast<int>(u_.size()); }
  std::span<const double> z() const { return z_; }
  std::span<const double> u() const { return u_; }
  HatSpec axis(int j) const { return HatSpec(r_, u_[static_cast<std::size_t>(j)]); }

  /// pr(u) = prod u_j
  double product_u() const;
  /// vol(B) = prod r u_j
  double volume() const;

  /// B is contained in [0, 1]^d.
  bool inside_unit_cube() const;
  /// r u_j <= 1 for all j (at most one wrap per axis under periodization).
  bool periodic_admissible() const;

 private:
  int r_;
  std::vector<double> z_;
  std::vector<double> u_;
};

/// Slack used by the admissibility predicates for grid-generated shapes.
inline constexpr double kAdmissibilitySlack = 1e-12;

double box_hat_eval(const SmoothBox& box, std::span<const double> x);

/// Integral of h^r_B over R^d (equal to the torus integral of its periodization).
double box_hat_integral(const SmoothBox& box);

/// Periodization of h^r_B at x. Throws std::domain_error unless the box is
/// periodic admissible.
double periodized_box_hat_eval(const SmoothBox& box, std::span<const double> x);

/// k-th Fourier coefficient of the periodized h^r_B:
/// e^{-i 2 pi (k, z)} prod_j hat_fourier((r, u_j), k_j). Requires d = 2.
std::complex<double> periodized_fourier_coeff(const SmoothBox& box, const FreqIndex& k);

/// H^r_B(s) = (pr(u) / 2^{|s|_1})^{r/2} prod_j min((2^{s_j} u_j)^{r/2}, (2^{s_j} u_j)^{-r/2}).
double shell_majorant(const SmoothBox& box, const DyadicShell& s);

/// sigma^r_u(t): sum over |s|_1 = t of prod_j min((2^{s_j} u_j)^{r/2}, (2^{s_j} u_j)^{-r/2}).
double sigma_sum(double r, std::span<const double> u, int t);

}  // namespace fibdisc
