#include "fibdisc/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "fibdisc/numeric.hpp"

namespace fibdisc {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::DirectGrid: return "direct-grid";
    case Method::SpectralParseval: return "spectral-parseval";
    case Method::SpectralGrid: return "spectral-grid";
    case Method::DirectAutocorrelation: return "direct-autocorrelation";
  }
  return "unknown";
}

namespace {

// ---------------------------------------------------------------------------
// Tail certification. g(k) = min(a, (pi |k|)^{-q}) with g(0) = a; since
// |sin(pi k u)| <= 1 and |sin x / x| <= 1 this dominates |hat h^r_u(k)|^{q/r}.

constexpr int kExplicitTerms = 64;

double ipow(double x, int q) {
  double acc = 1.0;
  for (int i = 0; i < q; ++i) acc *= x;
  return acc;
}

struct Decay {
  double a;  // u^q
  int q;

  double operator()(double k) const {
    const double m = std::abs(k);
    return m == 0.0 ? a : std::min(a, 1.0 / ipow(std::numbers::pi * m, q));
  }
  // int_x^inf (pi t)^{-q} dt
  double integral_from(double x) const {
    return 1.0 / (ipow(std::numbers::pi, q) * ipow(x, q - 1) * (q - 1));
  }
};

// Bound on sum_{m >= 0} g(start + m * step) for start >= 0, step > 0.
double progression_bound(const Decay& g, double start, double step) {
  double acc = 0.0;
  for (int m = 0; m < kExplicitTerms; ++m) acc += g(start + m * step);
  // sum_{m >= J} f(m) <= int_{J-1}^inf f for decreasing f
  const double x0 = start + (kExplicitTerms - 1) * step;
  return acc + g.integral_from(x0) / step;
}

// Bound on sum_{k > x} g(k), x >= 0 integer.
double beyond_bound(const Decay& g, std::int64_t x) {
  double acc = 0.0;
  for (int j = 1; j <= kExplicitTerms; ++j) acc += g(static_cast<double>(x + j));
  return acc + g.integral_from(static_cast<double>(x + kExplicitTerms));
}

// Bound on sum over k == c (mod b) of g(k), all integers.
double residue_bound(const Decay& g, std::int64_t c, std::int64_t b) {
  const auto bd = static_cast<double>(b);
  return progression_bound(g, static_cast<double>(c), bd) +
         progression_bound(g, static_cast<double>(b - c), bd);
}

// Bound on sum over k == c (mod b), |k| > K, of g(k).
double residue_beyond_bound(const Decay& g, std::int64_t c, std::int64_t b, std::int64_t K) {
  auto first_above = [&](std::int64_t residue) {  // smallest k > K with k == residue
    const std::int64_t base = K + 1;
    const std::int64_t off = ((residue - base) % b + b) % b;
    return base + off;
  };
  const auto bd = static_cast<double>(b);
  const std::int64_t neg_residue = (b - c) % b;
  return progression_bound(g, static_cast<double>(first_above(c)), bd) +
         progression_bound(g, static_cast<double>(first_above(neg_residue)), bd);
}

constexpr std::int64_t kExplicitRows = 1024;

// ---------------------------------------------------------------------------

double frac(double x) { return x - std::floor(x); }

void require_2d(const SmoothBox& box, const char* who) {
  if (box.dim() != 2) throw std::domain_error(std::string(who) + ": box must be 2-dimensional");
}

void require_periodic(const SmoothBox& box, const char* who) {
  require_2d(box, who);
  if (!box.periodic_admissible()) {
    throw std::domain_error(std::string(who) + ": requires r * u_j <= 1 on every axis");
  }
}

void validate_p(double p) {
  if (!(p >= 1.0)) throw std::domain_error("norm exponent p must be >= 1 or inf");
}

// e^{-i 2 pi k w} for k in [-K, K], stored at index k + K
std::vector<std::complex<double>> phase_table(std::int64_t K, double w) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(2 * K + 1));
  for (std::int64_t k = -K; k <= K; ++k) {
    const double turn = frac(static_cast<double>(k) * w);
    out[static_cast<std::size_t>(k + K)] = std::polar(1.0, -2.0 * std::numbers::pi * turn);
  }
  return out;
}

std::vector<double> amplitude_table(const HatSpec& spec, std::int64_t K) {
  std::vector<double> out(static_cast<std::size_t>(2 * K + 1));
  for (std::int64_t k = -K; k <= K; ++k) {
    out[static_cast<std::size_t>(k + K)] = hat_fourier(spec, static_cast<double>(k));
  }
  return out;
}

double norm_of(std::span<const double> values, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double e : values) m = std::max(m, std::abs(e));
    return m;
  }
  std::vector<double> powered(values.size());
  std::transform(values.begin(), values.end(), powered.begin(),
                 [p](double e) { return p == 2.0 ? e * e : std::pow(std::abs(e), p); });
  const double mean = pairwise_sum(powered) / static_cast<double>(values.size());
  return std::pow(mean, 1.0 / p);
}

// (wrapped index, value) pairs with nonzero periodized hat at y - i/M
void axis_support(const HatSpec& spec, double y, int M,
                  std::vector<std::pair<int, double>>& out) {
  out.clear();
  const double w = spec.half_width();
  const auto lo = static_cast<std::int64_t>(std::floor(M * (y - w)));
  const auto hi = static_cast<std::int64_t>(std::ceil(M * (y + w)));
  auto emit = [&](int idx) {
    const double v = periodized_hat_eval(spec, y - static_cast<double>(idx) / M);
    if (v != 0.0) out.emplace_back(idx, v);
  };
  if (hi - lo + 1 >= M) {
    for (int i = 0; i < M; ++i) emit(i);
    return;
  }
  for (std::int64_t i = lo; i <= hi; ++i) {
    emit(static_cast<int>(((i % M) + M) % M));
  }
}

std::pair<double, double> square_free_shape(int r, double v, double u1) {
  return {u1, v / (static_cast<double>(r) * r * u1)};
}

void validate_volume(int r, double v) {
  if (!(v > 0.0) || !(v <= 1.0)) {
    throw InfeasibleVolume("volume v must lie in (0, 1]");
  }
  if (r < 1 || r > kMaxSmoothness) {
    throw std::domain_error("smoothness r must lie in [1, " + std::to_string(kMaxSmoothness) + "]");
  }
}

SmoothBox periodic_box_for_shape(int r, double u1, double u2) {
  return SmoothBox(r, {0.5 * r * u1, 0.5 * r * u2}, {u1, u2});
}

}  // namespace

// ---------------------------------------------------------------------------

double certify_tail(const SmoothBox& box, const FibIndex& n, std::int64_t K, TailKind kind) {
  require_2d(box, "certify_tail");
  if (K < 1) throw std::domain_error("certify_tail: K must be >= 1");
  const int q = kind == TailKind::Absolute ? box.r() : 2 * box.r();
  if (q <= 1) return kInfinity;
  const Decay g1{ipow(box.u()[0], q), q};
  const Decay g2{ipow(box.u()[1], q), q};
  const std::int64_t b = n.b();

  // |k_2| > K: the whole residue class of k_1 contributes. Rows up to
  // K + kExplicitRows use the exact residue; beyond that a uniform bound
  // (the j-th smallest |k_1| in any class is at least j b / 2).
  double outer = 0.0;
  for (std::int64_t k2 = K + 1; k2 <= K + kExplicitRows; ++k2) {
    outer += g2(static_cast<double>(k2)) * residue_bound(g1, dual_residue(k2, n), b);
  }
  const double half_b = 0.5 * static_cast<double>(b);
  const double uniform = g1.a + progression_bound(g1, half_b, half_b);
  outer += uniform * beyond_bound(g2, K + kExplicitRows);

  // |k_2| <= K: only |k_1| > K is omitted.
  double inner = g2(0.0) * residue_beyond_bound(g1, dual_residue(0, n), b, K);
  for (std::int64_t k2 = 1; k2 <= K; ++k2) {
    inner += 2.0 * g2(static_cast<double>(k2)) * residue_beyond_bound(g1, dual_residue(k2, n), b, K);
  }
  return 2.0 * outer + inner;
}

SpectralTruncation make_truncation(const SmoothBox& box, const FibIndex& n, std::int64_t K,
                                   TailKind kind) {
  return {K, certify_tail(box, n, K, kind)};
}

SpectralTruncation truncation_for_tail(const SmoothBox& box, const FibIndex& n, double target,
                                       std::int64_t K_max, TailKind kind) {
  if (K_max < 1) throw std::domain_error("truncation_for_tail: K_max must be >= 1");
  std::int64_t K = std::min<std::int64_t>(16, K_max);
  while (true) {
    auto t = make_truncation(box, n, K, kind);
    if (t.certified_tail <= target || K >= K_max) return t;
    K = std::min(2 * K, K_max);
  }
}

double error_direct(const PointSet& points, const SmoothBox& box, Point2 shift) {
  require_periodic(box, "error_direct");
  std::vector<double> terms;
  terms.reserve(points.points.size());
  for (const auto& y : points.points) {
    const std::array<double, 2> x{y.x1 - shift.x1, y.x2 - shift.x2};
    terms.push_back(periodized_box_hat_eval(box, x));
  }
  return pairwise_sum(terms) / static_cast<double>(points.index.b()) - box_hat_integral(box);
}

std::complex<double> error_spectral_complex(const FibIndex& n, const SmoothBox& box, Point2 shift,
                                            const SpectralTruncation& trunc) {
  require_2d(box, "error_spectral");
  const std::int64_t K = trunc.K;
  if (K < 1) throw std::domain_error("error_spectral: K must be >= 1");
  const auto amp1 = amplitude_table(box.axis(0), K);
  const auto amp2 = amplitude_table(box.axis(1), K);
  const auto ph1 = phase_table(K, box.z()[0] + shift.x1);
  const auto ph2 = phase_table(K, box.z()[1] + shift.x2);

  // one partial sum per k_2 row, combined pairwise in row order
  const auto rows = static_cast<std::size_t>(2 * K + 1);
  std::vector<double> re(rows, 0.0);
  std::vector<double> im(rows, 0.0);
  std::vector<std::complex<double>> row_acc(rows, 0.0);
  for_each_dual_in_box(n, K, [&](const FreqIndex& k) {
    const auto i1 = static_cast<std::size_t>(k.k1 + K);
    row_acc[static_cast<std::size_t>(k.k2 + K)] += amp1[i1] * ph1[i1];
  });
  for (std::size_t row = 0; row < rows; ++row) {
    const std::complex<double> c = row_acc[row] * (amp2[row] * ph2[row]);
    re[row] = c.real();
    im[row] = c.imag();
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

double error_spectral(const FibIndex& n, const SmoothBox& box, Point2 shift,
                      const SpectralTruncation& trunc) {
  const auto c = error_spectral_complex(n, box, shift, trunc);
  if (std::abs(c.imag()) > 1e-10) {
    throw std::logic_error("error_spectral: imaginary residue exceeds 1e-10");
  }
  return c.real();
}

DiscrepancyResult l2_norm_parseval(const FibIndex& n, const SmoothBox& box, std::int64_t K) {
  require_2d(box, "l2_norm_parseval");
  if (K < 1) throw std::domain_error("l2_norm_parseval: K must be >= 1");
  const auto amp1 = amplitude_table(box.axis(0), K);
  const auto amp2 = amplitude_table(box.axis(1), K);
  std::vector<double> rows(static_cast<std::size_t>(2 * K + 1), 0.0);
  for_each_dual_in_box(n, K, [&](const FreqIndex& k) {
    const double a = amp1[static_cast<std::size_t>(k.k1 + K)];
    rows[static_cast<std::size_t>(k.k2 + K)] += a * a;
  });
  for (std::size_t row = 0; row < rows.size(); ++row) rows[row] *= amp2[row] * amp2[row];
  const double sum = pairwise_sum(rows);
  const double tail = certify_tail(box, n, K, TailKind::Squared);

  DiscrepancyResult res;
  res.value = std::sqrt(sum);
  res.method = Method::SpectralParseval;
  res.tail_bound = std::sqrt(sum + tail) - res.value;
  res.K = K;
  res.shape_samples = 1;
  res.argmax_shape.assign(box.u().begin(), box.u().end());
  return res;
}

DiscrepancyResult l2_norm_autocorrelation(const PointSet& points, const SmoothBox& box) {
  require_periodic(box, "l2_norm_autocorrelation");
  const HatSpec s1(2 * box.r(), box.u()[0]);
  const HatSpec s2(2 * box.r(), box.u()[1]);
  std::vector<double> terms;
  terms.reserve(points.points.size());
  for (const auto& y : points.points) {
    terms.push_back(periodized_hat_eval(s1, y.x1) * periodized_hat_eval(s2, y.x2));
  }
  const double mean = pairwise_sum(terms) / static_cast<double>(points.index.b());
  const double sq = mean - std::pow(box.product_u(), 2 * box.r());

  DiscrepancyResult res;
  res.value = std::sqrt(std::max(sq, 0.0));
  res.method = Method::DirectAutocorrelation;
  res.shape_samples = 1;
  res.argmax_shape.assign(box.u().begin(), box.u().end());
  return res;
}

std::vector<double> error_on_shift_grid(const PointSet& points, const SmoothBox& box, int M) {
  require_periodic(box, "error_on_shift_grid");
  if (M < 2) throw std::domain_error("shift grid M must be >= 2");
  const auto MM = static_cast<std::size_t>(M);
  std::vector<double> grid(MM * MM, 0.0);
  const HatSpec s1 = box.axis(0);
  const HatSpec s2 = box.axis(1);
  std::vector<std::pair<int, double>> a1;
  std::vector<std::pair<int, double>> a2;
  for (const auto& y : points.points) {
    axis_support(s1, y.x1 - box.z()[0], M, a1);
    if (a1.empty()) continue;
    axis_support(s2, y.x2 - box.z()[1], M, a2);
    for (const auto& [i, v1] : a1) {
      double* row = grid.data() + static_cast<std::size_t>(i) * MM;
      for (const auto& [j, v2] : a2) row[j] += v1 * v2;
    }
  }
  const double inv_b = 1.0 / static_cast<double>(points.index.b());
  const double integral = box_hat_integral(box);
  for (double& g : grid) g = g * inv_b - integral;
  return grid;
}

DiscrepancyResult lp_norm_grid(const PointSet& points, const SmoothBox& box, double p, int M) {
  validate_p(p);
  const auto values = error_on_shift_grid(points, box, M);
  DiscrepancyResult res;
  res.value = norm_of(values, p);
  res.method = Method::DirectGrid;
  res.grid = M;
  res.shape_samples = 1;
  res.argmax_shape.assign(box.u().begin(), box.u().end());
  return res;
}

DiscrepancyResult lp_norm_spectral_grid(const FibIndex& n, const SmoothBox& box, double p, int M,
                                        const SpectralTruncation& trunc) {
  validate_p(p);
  if (M < 2) throw std::domain_error("shift grid M must be >= 2");
  std::vector<double> values(static_cast<std::size_t>(M) * static_cast<std::size_t>(M));
  parallel_for(values.size(), [&](std::size_t idx) {
    const Point2 z{static_cast<double>(idx / static_cast<std::size_t>(M)) / M,
                   static_cast<double>(idx % static_cast<std::size_t>(M)) / M};
    values[idx] = error_spectral(n, box, z, trunc);
  });
  DiscrepancyResult res;
  res.value = norm_of(values, p);
  res.method = Method::SpectralGrid;
  res.tail_bound = trunc.certified_tail;
  res.grid = M;
  res.K = trunc.K;
  res.shape_samples = 1;
  res.argmax_shape.assign(box.u().begin(), box.u().end());
  return res;
}

std::vector<double> shape_grid(int r, double v, int S) {
  validate_volume(r, v);
  if (S < 1 || S % 2 == 0) throw std::domain_error("shape grid size S must be odd and >= 1");
  const double square = std::sqrt(v) / r;
  if (S == 1) return {square};
  const double lo = std::log(v / r);
  const double hi = std::log(1.0 / r);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(S));
  for (int i = 0; i < S; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(S - 1);
    out.push_back(std::exp(lo + f * (hi - lo)));
  }
  out.front() = v / r;
  out.back() = 1.0 / r;
  out[static_cast<std::size_t>(S / 2)] = square;
  return out;
}

DiscrepancyResult fixed_volume_discrepancy_periodic(const PointSet& points, int r, double v,
                                                    double p, const PeriodicOptions& opts) {
  validate_p(p);
  const auto shapes = shape_grid(r, v, opts.shapes);
  const int M = opts.shift_grid > 0 ? opts.shift_grid : (std::isinf(p) ? 512 : 256);

  using Route = PeriodicOptions::L2Route;
  Route route = Route::Grid;
  if (p == 2.0) {
    route = opts.l2_route;
    if (route == Route::Auto) route = r == 1 ? Route::Autocorrelation : Route::Spectral;
  }

  std::vector<DiscrepancyResult> per_shape(shapes.size());
  parallel_for(shapes.size(), [&](std::size_t i) {
    const auto [u1, u2] = square_free_shape(r, v, shapes[i]);
    const SmoothBox box = periodic_box_for_shape(r, u1, u2);
    switch (route) {
      case Route::Autocorrelation:
        per_shape[i] = l2_norm_autocorrelation(points, box);
        break;
      case Route::Spectral: {
        std::int64_t K = 64;
        while (true) {
          per_shape[i] = l2_norm_parseval(points.index, box, K);
          const auto& res = per_shape[i];
          if (res.tail_bound <= opts.relative_tail * res.value || K >= opts.max_K) break;
          K = std::min(2 * K, opts.max_K);
        }
        break;
      }
      default:
        per_shape[i] = lp_norm_grid(points, box, p, M);
        break;
    }
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < per_shape.size(); ++i) {
    if (per_shape[i].value > per_shape[best].value) best = i;
  }
  DiscrepancyResult res = per_shape[best];
  res.shape_samples = static_cast<int>(shapes.size());
  res.tail_bound = 0.0;
  res.K = 0;
  for (const auto& s : per_shape) {
    res.tail_bound = std::max(res.tail_bound, s.tail_bound);
    res.K = std::max(res.K, s.K);
  }
  return res;
}

DiscrepancyResult fixed_volume_discrepancy_nonperiodic(const PointSet& points, int r, double v,
                                                       const NonperiodicOptions& opts) {
  const auto shapes = shape_grid(r, v, opts.shapes);
  const int Mc = opts.center_grid;
  if (Mc < 1) throw std::domain_error("center grid M_c must be >= 1");
  const double inv_b = 1.0 / static_cast<double>(points.index.b());

  struct ShapeBest {
    double value = 0.0;
  };
  std::vector<ShapeBest> per_shape(shapes.size());
  parallel_for(shapes.size(), [&](std::size_t s) {
    const auto [u1, u2] = square_free_shape(r, v, shapes[s]);
    const std::array<HatSpec, 2> spec{HatSpec(r, u1), HatSpec(r, u2)};
    std::array<double, 2> lo{};
    std::array<double, 2> step{};
    for (std::size_t j = 0; j < 2; ++j) {
      const double w = spec[j].half_width();
      const double a = w;
      const double b = std::max(1.0 - w, a);
      lo[j] = Mc == 1 ? 0.5 * (a + b) : a;
      step[j] = Mc == 1 ? 0.0 : (b - a) / (Mc - 1);
    }
    const auto MM = static_cast<std::size_t>(Mc);
    std::vector<double> grid(MM * MM, 0.0);
    std::vector<std::pair<int, double>> a1;
    std::vector<std::pair<int, double>> a2;
    auto support = [&](std::size_t j, double y, std::vector<std::pair<int, double>>& out) {
      out.clear();
      const double w = spec[j].half_width();
      int first = 0;
      int last = Mc - 1;
      if (step[j] > 0.0) {
        first = std::max(0, static_cast<int>(std::floor((y - w - lo[j]) / step[j])));
        last = std::min(Mc - 1, static_cast<int>(std::ceil((y + w - lo[j]) / step[j])));
      }
      for (int i = first; i <= last; ++i) {
        const double val = hat_eval(spec[j], y - (lo[j] + i * step[j]));
        if (val != 0.0) out.emplace_back(i, val);
      }
    };
    for (const auto& y : points.points) {
      support(0, y.x1, a1);
      if (a1.empty()) continue;
      support(1, y.x2, a2);
      for (const auto& [i, v1] : a1) {
        double* row = grid.data() + static_cast<std::size_t>(i) * MM;
        for (const auto& [j, v2] : a2) row[j] += v1 * v2;
      }
    }
    const double integral = std::pow(u1 * u2, r);
    double m = 0.0;
    for (double g : grid) m = std::max(m, std::abs(g * inv_b - integral));
    per_shape[s].value = m;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < per_shape.size(); ++i) {
    if (per_shape[i].value > per_shape[best].value) best = i;
  }
  const auto [u1, u2] = square_free_shape(r, v, shapes[best]);
  DiscrepancyResult res;
  res.value = per_shape[best].value;
  res.method = Method::DirectGrid;
  res.center_grid = Mc;
  res.shape_samples = static_cast<int>(shapes.size());
  res.argmax_shape = {u1, u2};
  return res;
}

DiscrepancyResult refine_periodic(const PointSet& points, int r, double v, double p,
                                  PeriodicOptions opts, double rel_change, int max_rounds) {
  if (opts.shift_grid <= 0) opts.shift_grid = std::isinf(p) ? 512 : 256;
  auto prev = fixed_volume_discrepancy_periodic(points, r, v, p, opts);
  for (int round = 0; round < max_rounds; ++round) {
    opts.shapes = 2 * opts.shapes - 1;
    opts.shift_grid *= 2;
    auto next = fixed_volume_discrepancy_periodic(points, r, v, p, opts);
    const double change = std::abs(next.value - prev.value) / std::max(next.value, 1e-300);
    prev = std::move(next);
    if (change < rel_change) break;
  }
  return prev;
}

DiscrepancyResult refine_nonperiodic(const PointSet& points, int r, double v,
                                     NonperiodicOptions opts, double rel_change, int max_rounds) {
  auto prev = fixed_volume_discrepancy_nonperiodic(points, r, v, opts);
  for (int round = 0; round < max_rounds; ++round) {
    opts.shapes = 2 * opts.shapes - 1;
    opts.center_grid = 2 * opts.center_grid - 1;
    auto next = fixed_volume_discrepancy_nonperiodic(points, r, v, opts);
    const double change = std::abs(next.value - prev.value) / std::max(next.value, 1e-300);
    prev = std::move(next);
    if (change < rel_change) break;
  }
  return prev;
}

double shell_l2_energy(const FibIndex& n, const SmoothBox& box, const DyadicShell& s) {
  require_2d(box, "shell_l2_energy");
  std::vector<double> terms;
  for (const auto& k : shell_members_in_dual(n, s)) {
    if (k.is_zero()) continue;
    const double c = std::abs(periodized_fourier_coeff(box, k));
    terms.push_back(c * c);
  }
  return std::sqrt(pairwise_sum(terms));
}

}  // namespace fibdisc
