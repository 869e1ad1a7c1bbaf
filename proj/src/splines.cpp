#include "fibdisc/splines.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace fibdisc {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using RationalPoly = std::vector<Rational>;  // lowest power first

Rational eval(const RationalPoly& p, const Rational& t) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * t + *it;
  return acc;
}

RationalPoly antiderivative(const RationalPoly& p) {
  RationalPoly out(p.size() + 1, Rational(0));
  for (std::size_t i = 0; i < p.size(); ++i) out[i + 1] = p[i] / Rational(static_cast<long>(i + 1));
  return out;
}

// p(t + shift) expanded in powers of t.
RationalPoly taylor_shift(const RationalPoly& p, const Rational& shift) {
  RationalPoly out(p.size(), Rational(0));
  // Horner on polynomials: out = (...(c_n)(t + shift) + c_{n-1})...
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    RationalPoly next(p.size(), Rational(0));
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      next[i + 1] += out[i];
      next[i] += out[i] * shift;
    }
    next[0] += *it;
    out = std::move(next);
  }
  return out;
}

// Pieces of the uncentered B-spline N_r on [i, i + 1), i = 0..r-1, in the
// local variable t in [0, 1). N_r(i + t) = int_{t}^{1} p_{i-1} + int_{0}^{t} p_i.
std::vector<RationalPoly> uncentered_pieces(int r) {
  std::vector<RationalPoly> pieces{RationalPoly{Rational(1)}};
  for (int order = 2; order <= r; ++order) {
    std::vector<RationalPoly> prims;
    prims.reserve(pieces.size());
    for (const auto& p : pieces) prims.push_back(antiderivative(p));

    std::vector<RationalPoly> next;
    const std::size_t degree = pieces.front().size();  // new polys have this degree
    for (int i = 0; i < order; ++i) {
      RationalPoly q(degree + 1, Rational(0));
      if (i - 1 >= 0) {
        const auto& prev = prims[static_cast<std::size_t>(i - 1)];
        q[0] += eval(prev, Rational(1));
        for (std::size_t c = 0; c < prev.size(); ++c) q[c] -= prev[c];
      }
      if (i < order - 1) {
        const auto& cur = prims[static_cast<std::size_t>(i)];
        for (std::size_t c = 0; c < cur.size(); ++c) q[c] += cur[c];
      }
      next.push_back(std::move(q));
    }
    pieces = std::move(next);
  }
  return pieces;
}

// Centered pieces in powers of (offset from the piece midpoint).
std::vector<RationalPoly> centered_pieces(int r) {
  auto pieces = uncentered_pieces(r);
  const Rational half(1, 2);
  for (auto& p : pieces) p = taylor_shift(p, half);
  return pieces;
}

struct SplineTable {
  std::array<CardinalSpline, kMaxSplineOrder + 1> splines;

  SplineTable() {
    for (int r = 1; r <= kMaxSplineOrder; ++r) {
      CardinalSpline& s = splines[static_cast<std::size_t>(r)];
      s.order = r;
      for (const auto& p : centered_pieces(r)) {
        std::vector<double> coeffs;
        coeffs.reserve(p.size());
        for (const auto& c : p) coeffs.push_back(static_cast<double>(c));
        s.pieces.push_back(std::move(coeffs));
      }
    }
  }
};

void check_order(int r, int max_order, const char* who) {
  if (r < 1 || r > max_order) {
    throw std::domain_error(std::string(who) + ": order " + std::to_string(r) +
                            " outside [1, " + std::to_string(max_order) + "]");
  }
}

// min(x^{r/2}, x^{-r/2}) for x > 0
double balanced_min(double x, double r) {
  return std::pow(std::min(x, 1.0 / x), 0.5 * r);
}

}  // namespace

double CardinalSpline::operator()(double x) const {
  const double s = x + 0.5 * order;
  if (!(s >= 0.0) || s >= static_cast<double>(order)) return 0.0;
  const double fi = std::floor(s);
  const auto i = static_cast<std::size_t>(fi);
  if (i >= pieces.size()) return 0.0;
  const double tau = s - fi - 0.5;
  const auto& p = pieces[i];
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * tau + *it;
  return acc;
}

const CardinalSpline& cardinal_bspline(int r) {
  check_order(r, kMaxSplineOrder, "cardinal_bspline");
  static const SplineTable table;
  return table.splines[static_cast<std::size_t>(r)];
}

std::vector<std::vector<std::string>> cardinal_bspline_exact(int r) {
  check_order(r, kMaxSplineOrder, "cardinal_bspline_exact");
  std::vector<std::vector<std::string>> out;
  for (const auto& p : centered_pieces(r)) {
    std::vector<std::string> row;
    for (const auto& c : p) row.push_back(c.str());
    out.push_back(std::move(row));
  }
  return out;
}

HatSpec::HatSpec(int r, double u) : r_(r), u_(u) {
  check_order(r, kMaxSplineOrder, "HatSpec");
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw std::domain_error("HatSpec: width u must be positive and finite");
  }
}

double hat_eval(const HatSpec& spec, double x) {
  const auto& m = cardinal_bspline(spec.r());
  return std::pow(spec.u(), spec.r() - 1) * m(x / spec.u());
}

double hat_fourier(const HatSpec& spec, double y) {
  if (y == 0.0) return std::pow(spec.u(), spec.r());
  const double py = std::numbers::pi * y;
  return std::pow(std::sin(py * spec.u()) / py, spec.r());
}

double periodized_hat_eval(const HatSpec& spec, double x) {
  const double w = spec.half_width();
  const double base = x - std::floor(x);
  // translates m with |base + m| < w
  const auto m_lo = static_cast<long>(std::floor(-w - base));
  const auto m_hi = static_cast<long>(std::ceil(w - base));
  double acc = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) acc += hat_eval(spec, base + static_cast<double>(m));
  return acc;
}

SmoothBox::SmoothBox(int r, std::vector<double> z, std::vector<double> u)
    : r_(r), z_(std::move(z)), u_(std::move(u)) {
  check_order(r, kMaxSmoothness, "SmoothBox");
  if (u_.empty() || z_.size() != u_.size()) {
    throw std::domain_error("SmoothBox: center and widths must be non-empty with equal dimension");
  }
  for (double uj : u_) {
    if (!(uj > 0.0) || !std::isfinite(uj)) {
      throw std::domain_error("SmoothBox: widths must be positive and finite");
    }
  }
  for (double zj : z_) {
    if (!std::isfinite(zj)) throw std::domain_error("SmoothBox: center must be finite");
  }
}

double SmoothBox::product_u() const {
  double p = 1.0;
  for (double uj : u_) p *= uj;
  return p;
}

double SmoothBox::volume() const {
  double p = 1.0;
  for (double uj : u_) p *= r_ * uj;
  return p;
}

bool SmoothBox::inside_unit_cube() const {
  for (std::size_t j = 0; j < u_.size(); ++j) {
    const double w = 0.5 * r_ * u_[j];
    if (z_[j] - w < -kAdmissibilitySlack || z_[j] + w > 1.0 + kAdmissibilitySlack) return false;
  }
  return true;
}

bool SmoothBox::periodic_admissible() const {
  for (double uj : u_) {
    if (r_ * uj > 1.0 + kAdmissibilitySlack) return false;
  }
  return true;
}

double box_hat_eval(const SmoothBox& box, std::span<const double> x) {
  if (static_cast<int>(x.size()) != box.dim()) {
    throw std::domain_error("box_hat_eval: dimension mismatch");
  }
  double v = 1.0;
  for (int j = 0; j < box.dim() && v != 0.0; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    v *= hat_eval(box.axis(j), x[jj] - box.z()[jj]);
  }
  return v;
}

double box_hat_integral(const SmoothBox& box) { return std::pow(box.product_u(), box.r()); }

double periodized_box_hat_eval(const SmoothBox& box, std::span<const double> x) {
  if (!box.periodic_admissible()) {
    throw std::domain_error("periodized_box_hat_eval: requires r * u_j <= 1 on every axis");
  }
  if (static_cast<int>(x.size()) != box.dim()) {
    throw std::domain_error("periodized_box_hat_eval: dimension mismatch");
  }
  double v = 1.0;
  for (int j = 0; j < box.dim() && v != 0.0; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    v *= periodized_hat_eval(box.axis(j), x[jj] - box.z()[jj]);
  }
  return v;
}

std::complex<double> periodized_fourier_coeff(const SmoothBox& box, const FreqIndex& k) {
  if (box.dim() != 2) throw std::domain_error("periodized_fourier_coeff: box must be 2-dimensional");
  const double amp = hat_fourier(box.axis(0), static_cast<double>(k.k1)) *
                     hat_fourier(box.axis(1), static_cast<double>(k.k2));
  // reduce each phase term mod 1 before scaling to keep large k accurate
  auto frac = [](std::int64_t kj, double zj) {
    const double p = static_cast<double>(kj) * zj;
    return p - std::floor(p);
  };
  const double phase = 2.0 * std::numbers::pi * (frac(k.k1, box.z()[0]) + frac(k.k2, box.z()[1]));
  return std::polar(amp, -phase);
}

double shell_majorant(const SmoothBox& box, const DyadicShell& s) {
  if (s.dim() != box.dim()) throw std::domain_error("shell_majorant: dimension mismatch");
  const double r = box.r();
  double v = std::pow(box.product_u() / std::ldexp(1.0, s.level()), 0.5 * r);
  for (int j = 0; j < box.dim(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    v *= balanced_min(std::ldexp(box.u()[jj], s.s()[jj]), r);
  }
  return v;
}

double sigma_sum(double r, std::span<const double> u, int t) {
  if (u.empty()) throw std::domain_error("sigma_sum: need d >= 1");
  if (t < 0) throw std::domain_error("sigma_sum: t must be non-negative");
  if (!(r > 0.0)) throw std::domain_error("sigma_sum: r must be positive");
  const int d = static_cast<int>(u.size());
  // per-axis factors f_j(s) for s = 0..t
  std::vector<std::vector<double>> f(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    auto& fj = f[static_cast<std::size_t>(j)];
    for (int s = 0; s <= t; ++s) fj.push_back(balanced_min(std::ldexp(u[static_cast<std::size_t>(j)], s), r));
  }
  double total = 0.0;
  for (const auto& shell : DyadicShell::at_level(d, t)) {
    double term = 1.0;
    for (int j = 0; j < d; ++j) {
      term *= f[static_cast<std::size_t>(j)][static_cast<std::size_t>(shell.s()[static_cast<std::size_t>(j)])];
    }
    total += term;
  }
  return total;
}

}  // namespace fibdisc
