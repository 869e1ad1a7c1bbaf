#include "fibdisc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fibdisc/discrepancy.hpp"
#include "fibdisc/lattice.hpp"
#include "fibdisc/splines.hpp"
#include "fibdisc/study.hpp"

namespace fibdisc {

bool SuiteResult::passed() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lattice", "splines", "discrepancy", "study"};
  return names;
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Integral of f over [a, b] split at the given breakpoints; f is smooth between them.
double piecewise_gauss(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> cuts, int sub = 1) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]);
    const double hi = std::min(b, cuts[i + 1]);
    if (!(hi > lo)) continue;
    const double h = (hi - lo) / sub;
    for (int m = 0; m < sub; ++m) {
      acc += boost::math::quadrature::gauss<double, 10>::integrate(f, lo + m * h, lo + (m + 1) * h);
    }
  }
  return acc;
}

std::vector<double> hat_knots(int r, double u, double shift = 0.0) {
  std::vector<double> k;
  for (int i = 0; i <= r; ++i) k.push_back(shift + (i - 0.5 * r) * u);
  return k;
}

// ---------------------------------------------------------------------------

SuiteResult lattice_suite(std::uint64_t seed) {
  SuiteResult res{"lattice", {}, {}};

  {  // exponential sum definition of Phi against the congruence rule
    auto rng = stream(seed, 1);
    double worst = 0.0;
    for (int n : {5, 8, 12}) {
      const FibIndex idx(n);
      const auto ps = fibonacci_point_set(idx);
      for (int i = 0; i < 200; ++i) {
        const FreqIndex k{uniform_int(rng, -1000, 1000), uniform_int(rng, -1000, 1000)};
        std::complex<double> acc = 0.0;
        for (const auto& y : ps.points) {
          acc += std::polar(1.0, 2.0 * std::numbers::pi * (k.k1 * y.x1 + k.k2 * y.x2));
        }
        acc /= static_cast<double>(idx.b());
        worst = std::max(worst, std::abs(acc - dual_phase(k, idx)));
      }
    }
    res.items.push_back({"dual_phase_exponential_sum", worst <= 1e-10, "max_err=" + fmt(worst)});
  }

  {  // shells partition Z^2: the 1-D bands partition [-2^10, 2^10], and containing() agrees
    bool ok = true;
    for (std::int64_t k = -1024; k <= 1024 && ok; ++k) {
      int hits = 0;
      for (int s = 0; s <= 12; ++s) {
        if (DyadicShell({s}).contains(std::span<const std::int64_t>(&k, 1))) ++hits;
      }
      ok = hits == 1;
    }
    auto rng = stream(seed, 2);
    for (int i = 0; i < 2000 && ok; ++i) {
      const FreqIndex k{uniform_int(rng, -1024, 1024), uniform_int(rng, -1024, 1024)};
      const auto s = DyadicShell::containing(k);
      ok = s.contains(k);
      for (int j = 0; j < 2 && ok; ++j) {
        for (int delta : {-1, 1}) {
          std::vector<int> other(s.s().begin(), s.s().end());
          other[static_cast<std::size_t>(j)] += delta;
          if (other[static_cast<std::size_t>(j)] >= 0 && DyadicShell(other).contains(k)) ok = false;
        }
      }
    }
    res.items.push_back({"shell_partition", ok, ""});
  }

  const double gamma = measured_gamma();
  res.constants.emplace_back("gamma", gamma);

  {  // no dual point below the minimum hyperbolic norm; gamma-hat bounds every ratio
    bool ok = true;
    double worst_ratio = 1.0;
    for (int n = 5; n <= 20; ++n) {
      const FibIndex idx(n);
      const auto m = min_hyperbolic_norm(idx);
      for_each_dual_in_box(idx, idx.b(), [&](const FreqIndex& k) {
        if (k.hyperbolic_norm() < m) ok = false;
      });
      const double ratio = static_cast<double>(m) / static_cast<double>(idx.b());
      worst_ratio = std::min(worst_ratio, ratio);
      if (ratio < gamma) ok = false;
    }
    res.items.push_back({"hyperbolic_cross_gap", ok, "min_ratio=" + fmt(worst_ratio)});
  }

  {  // closure under addition
    auto rng = stream(seed, 3);
    bool ok = true;
    for (int n : {5, 8, 12, 16}) {
      const FibIndex idx(n);
      const auto pts = enumerate_dual_in_box(idx, 200);
      for (int i = 0; i < 50; ++i) {
        const auto& a = pts[static_cast<std::size_t>(uniform_int(rng, 0, std::ssize(pts) - 1))];
        const auto& b = pts[static_cast<std::size_t>(uniform_int(rng, 0, std::ssize(pts) - 1))];
        if (!in_dual_lattice(FreqIndex{a.k1 + b.k1, a.k2 + b.k2}, idx)) ok = false;
      }
    }
    res.items.push_back({"closure", ok, ""});
  }

  {  // shell counts: C2 measured at n = 8 bounds n = 9..16
    const double c2 = shell_count_constant(FibIndex(8), gamma);
    double observed = 0.0;
    int worst_n = 0;
    for (int n = 9; n <= 16; ++n) {
      const double c = shell_count_constant(FibIndex(n), gamma);
      if (c > observed) {
        observed = c;
        worst_n = n;
      }
    }
    res.constants.emplace_back("C2_n8", c2);
    res.constants.emplace_back("C2_max_9_16", observed);
    res.items.push_back({"shell_count_C2", observed <= c2,
                         "C2=" + fmt(c2) + " needed=" + fmt(observed) + " at n=" +
                             std::to_string(worst_n)});
  }
  return res;
}

// ---------------------------------------------------------------------------

SuiteResult splines_suite(std::uint64_t seed) {
  SuiteResult res{"splines", {}, {}};

  {  // h^r = h^{r-1} * h^1
    auto rng = stream(seed, 11);
    double worst = 0.0;
    for (int r = 2; r <= 4; ++r) {
      for (int i = 0; i < 200; ++i) {
        const double u = uniform(rng, 0.05, 1.0);
        const double x = uniform(rng, -0.6 * r * u, 0.6 * r * u);
        const HatSpec prev(r - 1, u);
        const auto f = [&](double y) { return hat_eval(prev, x - y); };
        const double conv = piecewise_gauss(f, -0.5 * u, 0.5 * u, hat_knots(r - 1, -u, x));
        worst = std::max(worst, std::abs(conv - hat_eval(HatSpec(r, u), x)));
      }
    }
    res.items.push_back({"convolution_identity", worst <= 1e-9, "max_err=" + fmt(worst)});
  }

  {  // r = 2 closed form
    auto rng = stream(seed, 12);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double u = uniform(rng, 0.01, 1.0);
      const double x = uniform(rng, -1.5 * u, 1.5 * u);
      worst = std::max(worst, std::abs(hat_eval(HatSpec(2, u), x) - std::max(u - std::abs(x), 0.0)));
    }
    res.items.push_back({"closed_form_r2", worst <= 1e-15, "max_err=" + fmt(worst)});
  }

  {  // transform against adaptive quadrature
    auto rng = stream(seed, 13);
    double worst = 0.0;
    double worst_imag = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (int r = 1; r <= 4; ++r) {
      for (int i = 0; i < 50; ++i) {
        const double u = uniform(rng, 0.05, 1.0);
        const double y = uniform(rng, -20.0, 20.0);
        const HatSpec spec(r, u);
        double re = 0.0;
        double im = 0.0;
        const auto knots = hat_knots(r, u);
        for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
          re += GK::integrate(
              [&](double x) { return hat_eval(spec, x) * std::cos(2 * std::numbers::pi * y * x); },
              knots[j], knots[j + 1], 8, 1e-12);
          im += GK::integrate(
              [&](double x) { return -hat_eval(spec, x) * std::sin(2 * std::numbers::pi * y * x); },
              knots[j], knots[j + 1], 8, 1e-12);
        }
        worst = std::max(worst, std::abs(re - hat_fourier(spec, y)));
        worst_imag = std::max(worst_imag, std::abs(im));
      }
    }
    res.items.push_back({"fourier_transform", worst <= 1e-8 && worst_imag <= 1e-8,
                         "max_err=" + fmt(worst) + " max_imag=" + fmt(worst_imag)});
  }

  {  // |coefficient| <= H^r_B(s) on rho(s)
    auto rng = stream(seed, 14);
    double worst_excess = -kInfinity;
    for (int i = 0; i < 500; ++i) {
      const int r = static_cast<int>(uniform_int(rng, 1, 4));
      std::vector<double> u;
      std::vector<double> z;
      for (int j = 0; j < 2; ++j) {
        u.push_back(std::exp2(uniform(rng, -10.0, 0.0)) / r);
        z.push_back(uniform(rng, 0.0, 1.0));
      }
      const SmoothBox box(r, z, u);
      const FreqIndex k{uniform_int(rng, -4096, 4096), uniform_int(rng, -4096, 4096)};
      const double excess = std::abs(periodized_fourier_coeff(box, k)) -
                            shell_majorant(box, DyadicShell::containing(k));
      worst_excess = std::max(worst_excess, excess);
    }
    res.items.push_back({"majorant_domination", worst_excess <= 1e-12,
                         "max_excess=" + fmt(worst_excess)});
  }

  {  // measured constants stable across two disjoint samples of 100
    double lemma_spread = 1.0;
    for (int d : {2, 3}) {
      for (int r : {1, 2, 4}) {
        const double a = bound_constants_report(r, d, 100, seed, 0).get("lemma_sigma_C").value;
        const double b = bound_constants_report(r, d, 100, seed, 100).get("lemma_sigma_C").value;
        lemma_spread = std::max(lemma_spread, std::max(a, b) / std::min(a, b));
        if (d == 2 && r == 2) res.constants.emplace_back("lemma_C_d2_r2", std::max(a, b));
      }
    }
    double hb_spread = 1.0;
    for (int r : {1, 2, 3}) {
      const double a = bound_constants_report(r, 2, 100, seed, 0).get("hb_square_C1").value;
      const double b = bound_constants_report(r, 2, 100, seed, 100).get("hb_square_C1").value;
      hb_spread = std::max(hb_spread, std::max(a, b) / std::min(a, b));
      if (r == 2) res.constants.emplace_back("hb_C1_r2", std::max(a, b));
    }
    res.items.push_back({"lemma_sigma_stable", lemma_spread <= 2.0, "spread=" + fmt(lemma_spread)});
    res.items.push_back({"hb_bound_stable", hb_spread <= 2.0, "spread=" + fmt(hb_spread)});
  }

  {  // ||Delta^r_t h^r_u||_1 <= C |t|^r; Young's inequality gives C = 2^r
    auto rng = stream(seed, 15);
    bool ok = true;
    for (int r : {1, 2}) {
      double c = 0.0;
      for (int i = 0; i < 20; ++i) {
        const double u = uniform(rng, 0.05, 1.0);
        const double t = uniform(rng, 1e-3, u);
        const HatSpec spec(r, u);
        const auto diff = [&](double x) {
          double acc = 0.0;
          double binom = 1.0;
          for (int j = 0; j <= r; ++j) {
            acc += ((r - j) % 2 ? -1.0 : 1.0) * binom * hat_eval(spec, x + j * t);
            binom = binom * (r - j) / (j + 1);
          }
          return std::abs(acc);
        };
        std::vector<double> cuts;
        for (int j = 0; j <= r; ++j) {
          for (double k : hat_knots(r, u, -j * t)) cuts.push_back(k);
        }
        const double l1 = piecewise_gauss(diff, -0.5 * r * u - r * t, 0.5 * r * u, cuts, 16);
        c = std::max(c, l1 / std::pow(t, r));
      }
      res.constants.emplace_back("l1_smoothness_C_r" + std::to_string(r), c);
      if (!(c <= std::exp2(r) * (1.0 + 1e-9))) ok = false;
    }
    res.items.push_back({"l1_smoothness", ok, ""});
  }
  return res;
}

// ---------------------------------------------------------------------------

SmoothBox random_periodic_box(std::mt19937_64& rng, int r) {
  std::vector<double> u;
  std::vector<double> z;
  for (int j = 0; j < 2; ++j) {
    u.push_back(uniform(rng, 0.05, 1.0) / r);
    z.push_back(uniform(rng, 0.0, 1.0));
  }
  return SmoothBox(r, z, u);
}

SuiteResult discrepancy_suite(std::uint64_t seed) {
  SuiteResult res{"discrepancy", {}, {}};

  {  // spectral series against direct point sums
    auto rng = stream(seed, 21);
    bool ok = true;
    double worst = 0.0;
    for (int n : {8, 10, 12, 14}) {
      const FibIndex idx(n);
      const auto ps = fibonacci_point_set(idx);
      for (int r = 1; r <= 3; ++r) {
        for (int i = 0; i < 20; ++i) {
          const auto box = random_periodic_box(rng, r);
          const Point2 shift{uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
          const auto trunc = r == 1 ? make_truncation(box, idx, 512)
                                    : truncation_for_tail(box, idx, 1e-7, 2048);
          const double gap =
              std::abs(error_spectral(idx, box, shift, trunc) - error_direct(ps, box, shift));
          if (!(gap <= trunc.certified_tail + 1e-9)) ok = false;
          if (r > 1) worst = std::max(worst, gap);
        }
      }
    }
    res.items.push_back({"spectral_vs_direct", ok, "max_gap_r23=" + fmt(worst)});
  }

  {  // Parseval against the rectangle rule
    auto rng = stream(seed, 22);
    const FibIndex idx(12);
    const auto ps = fibonacci_point_set(idx);
    double worst_smooth = 0.0;
    double worst_indicator = 0.0;
    for (int i = 0; i < 6; ++i) {
      const int r = 2 + i % 2;
      const auto box = random_periodic_box(rng, r);
      const double spectral = l2_norm_parseval(idx, box, 4096).value;
      const double grid = lp_norm_grid(ps, box, 2.0, 256).value;
      worst_smooth = std::max(worst_smooth, std::abs(grid - spectral) / spectral);
    }
    for (int i = 0; i < 2; ++i) {
      const auto box = random_periodic_box(rng, 1);
      const double spectral = l2_norm_parseval(idx, box, 8192).value;
      const double grid = lp_norm_grid(ps, box, 2.0, 1024).value;
      worst_indicator = std::max(worst_indicator, std::abs(grid - spectral) / spectral);
    }
    res.constants.emplace_back("parseval_rel_err_r23", worst_smooth);
    res.items.push_back({"parseval_vs_grid", worst_smooth <= 0.01 && worst_indicator <= 0.05,
                         "r>=2: " + fmt(worst_smooth) + " r=1: " + fmt(worst_indicator)});
  }

  {  // shells below the minimum hyperbolic norm carry no energy
    auto rng = stream(seed, 23);
    const FibIndex idx(12);
    const auto m = min_hyperbolic_norm(idx);
    bool ok = true;
    const auto box = random_periodic_box(rng, 2);
    for (int t = 0; std::exp2(t) <= static_cast<double>(m); ++t) {
      for (const auto& s : DyadicShell::at_level(2, t)) {
        if (s.s()[0] == 0 && s.s()[1] == 0) continue;
        if (shell_l2_energy(idx, box, s) != 0.0) ok = false;
      }
    }
    res.items.push_back({"vanishing_low_shells", ok, "min_norm=" + std::to_string(m)});
  }

  {  // L_p norms nondecreasing in p on a fixed grid
    auto rng = stream(seed, 24);
    bool ok = true;
    const auto ps = fibonacci_point_set(FibIndex(10));
    for (int i = 0; i < 10; ++i) {
      const auto box = random_periodic_box(rng, 1 + i % 3);
      double prev = 0.0;
      for (double p : {1.0, 1.5, 2.0, 4.0, kInfinity}) {
        const double val = lp_norm_grid(ps, box, p, 64).value;
        if (val < prev * (1.0 - 1e-12)) ok = false;
        prev = val;
      }
    }
    res.items.push_back({"norm_ordering", ok, ""});
  }

  {  // fixed square shape: values shrink as n grows, at most one inversion
    int inversions = 0;
    double prev = kInfinity;
    const SmoothBox box(2, {0.25, 0.25}, {0.25, 0.25});
    for (int n = 8; n <= 16; ++n) {
      const double val = l2_norm_parseval(FibIndex(n), box, 4096).value;
      if (val > prev) ++inversions;
      prev = val;
    }
    res.items.push_back({"scale_sanity", inversions <= 1, "inversions=" + std::to_string(inversions)});
  }

  {  // certified tails shrink with K
    const SmoothBox box(2, {0.25, 0.25}, {0.5, 0.5});
    bool ok = true;
    double prev = kInfinity;
    for (std::int64_t K = 16; K <= 4096; K *= 2) {
      const double t = certify_tail(box, FibIndex(10), K);
      if (!(t <= prev)) ok = false;
      prev = t;
    }
    res.constants.emplace_back("tail_n10_K4096", prev);
    res.items.push_back({"tail_monotone", ok, ""});
  }
  return res;
}

// ---------------------------------------------------------------------------

SuiteResult study_suite(std::uint64_t seed) {
  SuiteResult res{"study", {}, {}};

  {
    const auto rows = gamma_table(3, 20);
    const double floor3 = std::min({rows[0].ratio, rows[1].ratio, rows[2].ratio});
    const bool ok = std::all_of(rows.begin(), rows.end(),
                                [&](const GammaRow& g) { return g.ratio >= floor3; }) &&
                    rows[1].n == 4 && rows[1].ratio == 0.4;
    res.items.push_back({"gamma_table", ok, "floor=" + fmt(floor3)});
  }

  {  // small IT.1 run
    StudyConfig cfg;
    cfg.r = 2;
    cfg.p = 2.0;
    cfg.n_first = 8;
    cfg.n_last = 12;
    cfg.volumes = FixedVolume{0.25};
    cfg.periodic_opts.shapes = 9;
    const auto rows = scaling_table(cfg);
    const double spread = ratio_spread(rows);
    res.constants.emplace_back("it1_spread_n8_12", spread);
    res.items.push_back({"it1_quick", spread <= 3.0, "spread=" + fmt(spread)});

    std::ostringstream a;
    std::ostringstream b;
    write_scaling_csv(a, rows);
    write_scaling_csv(b, scaling_table(cfg));
    res.items.push_back({"scaling_deterministic", a.str() == b.str(), ""});
  }

  {  // same seed, same report; larger samples extend smaller ones
    const auto small = bound_constants_report(2, 2, 50, seed);
    const auto again = bound_constants_report(2, 2, 50, seed);
    const auto large = bound_constants_report(2, 2, 100, seed);
    std::ostringstream a;
    std::ostringstream b;
    write_constants_json(a, small);
    write_constants_json(b, again);
    bool nested = true;
    for (const auto& c : small.constants) {
      if (large.get(c.name).value < c.value) nested = false;
    }
    res.items.push_back({"constants_deterministic", a.str() == b.str(), ""});
    res.items.push_back({"constants_nested", nested, ""});
  }
  return res;
}

}  // namespace

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "lattice") return lattice_suite(seed);
  if (name == "splines") return splines_suite(seed);
  if (name == "discrepancy") return discrepancy_suite(seed);
  if (name == "study") return study_suite(seed);
  throw std::invalid_argument("unknown suite: " + name);
}

std::string summary_line(const SuiteResult& result) {
  std::ostringstream os;
  const auto passed = std::count_if(result.items.begin(), result.items.end(),
                                    [](const CheckItem& c) { return c.passed; });
  os << result.suite << ' ' << (result.passed() ? "PASS" : "FAIL") << ' ' << passed << '/'
     << result.items.size();
  for (const auto& [name, value] : result.constants) os << ' ' << name << '=' << format_double(value);
  std::string failed;
  for (const auto& c : result.items) {
    if (c.passed) continue;
    failed += (failed.empty() ? "" : ",") + c.name + (c.detail.empty() ? "" : "(" + c.detail + ")");
  }
  if (!failed.empty()) os << " failed: " << failed;
  return os.str();
}

}  // namespace fibdisc
