#include "fibdisc/study.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fibdisc {

namespace {

std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform sample of log2 u in [lo, top]^d subject to sum >= lo. With d >= 1 and
// top <= 0 this region is the simplex {top - e : e >= 0, sum e <= d top - lo},
// sampled by the spacings of d sorted uniforms.
std::vector<double> sample_log_widths(std::mt19937_64& rng, int d, double lo, double top) {
  const double span = d * top - lo;
  std::uniform_real_distribution<double> unit(0.0, span);
  std::vector<double> cuts(static_cast<std::size_t>(d));
  for (auto& c : cuts) c = unit(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> logs(static_cast<std::size_t>(d));
  double prev = 0.0;
  for (std::size_t j = 0; j < logs.size(); ++j) {
    logs[j] = top - (cuts[j] - prev);
    prev = cuts[j];
  }
  return logs;
}

std::string describe(const std::vector<double>& u, int t) {
  std::ostringstream os;
  os << std::setprecision(6) << "t=" << t << " u=(";
  for (std::size_t j = 0; j < u.size(); ++j) os << (j ? "," : "") << u[j];
  os << ")";
  return os.str();
}

std::vector<double> volumes_for(const VolumePolicy& policy, std::int64_t b) {
  return std::visit(
      [b](const auto& pol) -> std::vector<double> {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, FixedVolume>) {
          return {pol.v};
        } else if constexpr (std::is_same_v<T, ProportionalVolume>) {
          return {std::min(1.0, std::max(pol.c0 / static_cast<double>(b), pol.floor))};
        } else {
          auto v = pol.v;
          std::sort(v.begin(), v.end());
          v.erase(std::unique(v.begin(), v.end()), v.end());
          return v;
        }
      },
      policy);
}

}  // namespace

double log_volume_scale(std::int64_t b, double v) { return std::log(static_cast<double>(b) * v); }

double study_normalizer(std::int64_t b, double v, double p, bool periodic) {
  const double lg = log_volume_scale(b, v);
  if (!(lg > 1.0)) throw std::domain_error("study normalizer requires b_n * v > e");
  return (periodic && !std::isinf(p)) ? std::sqrt(lg) : lg;
}

std::vector<StudyRow> scaling_table(const StudyConfig& config) {
  if (config.n_first < 2 || config.n_last < config.n_first) {
    throw std::domain_error("scaling_table: need 2 <= n_first <= n_last");
  }
  if (!(config.p >= 1.0)) throw std::domain_error("scaling_table: p must be >= 1 or inf");
  std::vector<StudyRow> rows;
  for (int n = config.n_first; n <= config.n_last; ++n) {
    const FibIndex idx(n);
    const PointSet points = fibonacci_point_set(idx);
    for (double v : volumes_for(config.volumes, idx.b())) {
      if (!(v > 0.0 && v <= 1.0)) throw InfeasibleVolume("scaling_table: v must lie in (0, 1]");
      if (!(log_volume_scale(idx.b(), v) > 1.0)) continue;
      StudyRow row;
      row.n = n;
      row.b = idx.b();
      row.r = config.r;
      row.p = config.periodic ? config.p : kInfinity;
      row.v = v;
      row.result = config.periodic
                       ? fixed_volume_discrepancy_periodic(points, config.r, v, config.p,
                                                           config.periodic_opts)
                       : fixed_volume_discrepancy_nonperiodic(points, config.r, v,
                                                              config.nonperiodic_opts);
      row.value = row.result.value;
      row.normalizer = study_normalizer(idx.b(), v, row.p, config.periodic);
      row.ratio = row.value * std::pow(static_cast<double>(idx.b()), config.r) / row.normalizer;
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) throw InfeasibleVolume("scaling_table: no (n, v) with b_n * v > e");
  return rows;
}

double ratio_spread(const std::vector<StudyRow>& rows) {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                      [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
  return hi->ratio / lo->ratio;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw std::domain_error("log_spaced: bad range");
  if (count == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<ProfileRow> worst_box_profile(int n, int r, double p, const std::vector<double>& v_grid,
                                          const PeriodicOptions& opts) {
  const FibIndex idx(n);
  const PointSet points = fibonacci_point_set(idx);
  std::vector<ProfileRow> rows;
  for (double v : v_grid) {
    const auto res = fixed_volume_discrepancy_periodic(points, r, v, p, opts);
    ProfileRow row;
    row.v = v;
    row.value = res.value;
    row.argmax_shape = res.argmax_shape;
    row.normalizer = study_normalizer(idx.b(), v, p, true);
    row.normalized = res.value * std::pow(static_cast<double>(idx.b()), r) / row.normalizer;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GammaRow> gamma_table(int n_first, int n_last) {
  if (n_first < 3 || n_last < n_first) throw std::domain_error("gamma_table: need 3 <= n_first <= n_last");
  std::vector<GammaRow> rows;
  for (int n = n_first; n <= n_last; ++n) {
    const FibIndex idx(n);
    const auto m = min_hyperbolic_norm(idx);
    rows.push_back({n, idx.b(), m, static_cast<double>(m) / static_cast<double>(idx.b())});
  }
  return rows;
}

double measured_gamma() {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& row : gamma_table(5, 10)) g = std::min(g, row.ratio);
  return g;
}

double lemma_sigma_ratio(double r, const std::vector<double>& u, int t) {
  double pr = 1.0;
  for (double uj : u) pr *= uj;
  const double scale = std::ldexp(pr, t);
  const double lg = std::log2(2.0 * scale);
  return sigma_sum(r, u, t) * std::pow(scale, 0.5 * r) /
         std::pow(lg, static_cast<double>(u.size()) - 1.0);
}

double majorant_square_sum(const SmoothBox& box, int t) {
  double acc = 0.0;
  for (const auto& s : DyadicShell::at_level(box.dim(), t)) {
    const double h = shell_majorant(box, s);
    acc += h * h;
  }
  return acc;
}

double majorant_sum(const SmoothBox& box, int t) {
  double acc = 0.0;
  for (const auto& s : DyadicShell::at_level(box.dim(), t)) acc += shell_majorant(box, s);
  return acc;
}

double shell_count_constant(const FibIndex& n, double gamma, int extra) {
  const int t0 = smallest_shell_level(n, gamma);
  double c = 0.0;
  for (int t = t0; t <= t0 + extra; ++t) {
    for (const auto& s : DyadicShell::at_level(2, t)) {
      const auto count = static_cast<double>(shell_members_in_dual(n, s).size());
      c = std::max(c, count / std::ldexp(1.0, t - t0));
    }
  }
  return c;
}

const MeasuredConstant& BoundConstantsReport::get(const std::string& name) const {
  for (const auto& c : constants) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("BoundConstantsReport: no constant named " + name);
}

BoundConstantsReport bound_constants_report(int r, int d, int sample_count, std::uint64_t seed,
                                            int first_sample) {
  if (r < 1 || r > kMaxSmoothness) throw std::domain_error("bound_constants_report: bad r");
  if (d < 1 || d > 6) throw std::domain_error("bound_constants_report: d must lie in [1, 6]");
  if (sample_count < 1 || first_sample < 0) {
    throw std::domain_error("bound_constants_report: bad sample range");
  }
  constexpr int kMaxLevel = 24;
  const double rd = r;

  MeasuredConstant lemma{"lemma_sigma_C", 0.0, ""};
  MeasuredConstant hb2{"hb_square_C1", 0.0, ""};
  MeasuredConstant hb1{"hb_sum_C1", 0.0, ""};

  // t at least 1 + d log2(r) + 1 so that v >= r^d 2^{1-t} is satisfiable with r u_j <= 1
  const int hb_t_min = static_cast<int>(std::ceil(1.0 + d * std::log2(rd))) + 1;

  for (int i = first_sample; i < first_sample + sample_count; ++i) {
    auto rng = sample_stream(seed, static_cast<std::uint64_t>(i));

    {  // Lemma: u in (0, 1/2]^d, pr(u) >= 2^{-t}
      std::uniform_int_distribution<int> pick_t(d, kMaxLevel);
      const int t = pick_t(rng);
      const auto logs = sample_log_widths(rng, d, -static_cast<double>(t), -1.0);
      std::vector<double> u;
      for (double l : logs) u.push_back(std::exp2(l));
      const double ratio = lemma_sigma_ratio(rd, u, t);
      if (ratio > lemma.value) lemma = {lemma.name, ratio, describe(u, t)};
    }

    {  // majorant sums: r u_j <= 1, v = r^d pr(u) >= r^d 2^{1-t}
      std::uniform_int_distribution<int> pick_t(hb_t_min, kMaxLevel + hb_t_min);
      const int t = pick_t(rng);
      const auto logs = sample_log_widths(rng, d, 1.0 - t, -std::log2(rd));
      std::vector<double> u;
      for (double l : logs) u.push_back(std::min(std::exp2(l), 1.0 / rd));
      const SmoothBox box(r, std::vector<double>(u.size(), 0.5), u);
      const double lg = std::log2(std::ldexp(box.volume(), t));
      const double denom_pow = std::pow(lg, d - 1.0);
      const double sq = majorant_square_sum(box, t) / (std::ldexp(1.0, -2 * r * t) * denom_pow);
      const double lin = majorant_sum(box, t) / (std::ldexp(1.0, -r * t) * denom_pow);
      if (sq > hb2.value) hb2 = {hb2.name, sq, describe(u, t)};
      if (lin > hb1.value) hb1 = {hb1.name, lin, describe(u, t)};
    }
  }

  BoundConstantsReport report;
  report.r = r;
  report.d = d;
  report.samples = sample_count;
  report.seed = seed;
  report.gamma = measured_gamma();
  report.constants = {lemma, hb2, hb1};

  MeasuredConstant c2{"shell_count_C2", shell_count_constant(FibIndex(8), report.gamma), "n=8"};
  MeasuredConstant c2_obs{"shell_count_observed_9_16", 0.0, ""};
  for (int n = 9; n <= 16; ++n) {
    const double c = shell_count_constant(FibIndex(n), report.gamma);
    if (c > c2_obs.value) c2_obs = {c2_obs.name, c, "n=" + std::to_string(n)};
  }
  report.constants.push_back(c2);
  report.constants.push_back(c2_obs);
  return report;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string format_p(double p) { return std::isinf(p) ? "inf" : format_double(p); }

void write_scaling_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
  os << "n,b_n,r,p,v,value,normalizer,ratio,method,S,M,K,tail\n";
  for (const auto& row : rows) {
    const auto& res = row.result;
    const int M = res.grid > 0 ? res.grid : res.center_grid;
    os << row.n << ',' << row.b << ',' << row.r << ',' << format_p(row.p) << ','
       << format_double(row.v) << ',' << format_double(row.value) << ','
       << format_double(row.normalizer) << ',' << format_double(row.ratio) << ','
       << to_string(res.method) << ',' << res.shape_samples << ',' << M << ',' << res.K << ','
       << format_double(res.tail_bound) << '\n';
  }
}

void write_gamma_csv(std::ostream& os, const std::vector<GammaRow>& rows) {
  os << "n,b_n,min_hyperbolic_norm,ratio\n";
  for (const auto& row : rows) {
    os << row.n << ',' << row.b << ',' << row.min_norm << ',' << format_double(row.ratio) << '\n';
  }
}

void write_profile_csv(std::ostream& os, int n, int r, double p,
                       const std::vector<ProfileRow>& rows) {
  os << "n,r,p,v,value,normalizer,normalized,u1,u2\n";
  for (const auto& row : rows) {
    os << n << ',' << r << ',' << format_p(p) << ',' << format_double(row.v) << ','
       << format_double(row.value) << ',' << format_double(row.normalizer) << ','
       << format_double(row.normalized) << ',' << format_double(row.argmax_shape.at(0)) << ','
       << format_double(row.argmax_shape.at(1)) << '\n';
  }
}

void write_constants_json(std::ostream& os, const BoundConstantsReport& report) {
  nlohmann::ordered_json j;
  j["r"] = report.r;
  j["d"] = report.d;
  j["samples"] = report.samples;
  j["seed"] = report.seed;
  j["gamma"] = report.gamma;
  auto& cs = j["constants"];
  cs = nlohmann::ordered_json::array();
  for (const auto& c : report.constants) {
    cs.push_back({{"name", c.name}, {"value", c.value}, {"argmax", c.argmax}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace fibdisc
