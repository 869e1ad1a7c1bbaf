#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fibdisc/study.hpp"
#include "oracles.hpp"

using namespace fibdisc;

namespace {

StudyConfig quick(int n_first, int n_last) {
  StudyConfig cfg;
  cfg.r = 2;
  cfg.p = 2.0;
  cfg.n_first = n_first;
  cfg.n_last = n_last;
  cfg.volumes = FixedVolume{0.25};
  cfg.periodic_opts.shapes = 5;
  return cfg;
}

}  // namespace

TEST_CASE("normalizers") {
  CHECK(study_normalizer(89, 0.25, 2.0, true) == doctest::Approx(std::sqrt(std::log(22.25))));
  CHECK(study_normalizer(89, 0.25, kInfinity, true) == doctest::Approx(std::log(22.25)));
  CHECK(study_normalizer(89, 0.25, 2.0, false) == doctest::Approx(std::log(22.25)));
  CHECK_THROWS_AS(study_normalizer(8, 0.25, 2.0, true), std::domain_error);
}

TEST_CASE("scaling table") {
  const auto one = scaling_table(quick(8, 8));
  REQUIRE(one.size() == 1);
  const auto& row = one[0];
  CHECK(row.n == 8);
  CHECK(row.b == 34);
  CHECK(row.ratio == doctest::Approx(row.value * 34.0 * 34.0 / row.normalizer));
  CHECK(row.ratio > 0.0);
  CHECK(std::isfinite(row.ratio));

  auto cfg = quick(8, 12);
  const auto rows = scaling_table(cfg);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].n == 8 + static_cast<int>(i));

  // rows with b_n v <= e are dropped; nothing left is an error
  cfg = quick(2, 5);
  CHECK_THROWS_AS(scaling_table(cfg), InfeasibleVolume);
  cfg = quick(4, 8);
  CHECK(scaling_table(cfg).front().n == 6);  // b_5 / 4 = 2 < e

  cfg = quick(8, 8);
  cfg.volumes = VolumeList{{0.25, 0.125, 0.25}};
  const auto listed = scaling_table(cfg);
  REQUIRE(listed.size() == 2);
  CHECK(listed[0].v == 0.125);
  CHECK(listed[1].v == 0.25);

  cfg = quick(10, 10);
  cfg.volumes = ProportionalVolume{16.0, 0.0};
  CHECK(scaling_table(cfg).front().v == doctest::Approx(16.0 / 89.0));
}

TEST_CASE("study tables are deterministic") {
  auto cfg = quick(8, 11);
  cfg.p = kInfinity;
  cfg.periodic_opts.shift_grid = 64;
  std::ostringstream a;
  std::ostringstream b;
  write_scaling_csv(a, scaling_table(cfg));
  write_scaling_csv(b, scaling_table(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("n,b_n,r,p,v,value,normalizer,ratio,method,S,M,K,tail\n", 0) == 0);
  CHECK(a.str().find(",inf,") != std::string::npos);
}

TEST_CASE("gamma table") {
  const auto rows = gamma_table(3, 18);
  REQUIRE(rows.size() == 16);
  CHECK(rows[1].n == 4);
  CHECK(rows[1].min_norm == 2);
  CHECK(rows[1].ratio == 0.4);
  const double floor3 = std::min({rows[0].ratio, rows[1].ratio, rows[2].ratio});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].ratio >= floor3);
    CHECK(rows[i].min_norm == oracle::min_hyperbolic_norm(rows[i].n));
    if (i > 0) CHECK(rows[i].n > rows[i - 1].n);
  }
  CHECK(measured_gamma() == 0.375);
}

TEST_CASE("worst box profile") {
  const int n = 12;
  const double bn = static_cast<double>(fib(n));
  const auto grid = log_spaced(16.0 / bn, 0.25, 5);
  PeriodicOptions opts;
  opts.shapes = 9;
  const auto rows = worst_box_profile(n, 2, 2.0, grid, opts);
  REQUIRE(rows.size() == 5);
  double lo = kInfinity;
  double hi = 0.0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.normalized);
    hi = std::max(hi, row.normalized);
    CHECK(row.argmax_shape.size() == 2);
  }
  CHECK(hi / lo <= 5.0);

  // the profile reproduces the scaling value at a matching (n, v)
  auto cfg = quick(n, n);
  cfg.periodic_opts = opts;
  CHECK(rows.back().value <= scaling_table(cfg).front().value * (1 + 1e-12));

  const auto near_one = worst_box_profile(n, 2, 2.0, {0.95}, opts);
  CHECK(near_one[0].value > 0.0);
  CHECK(std::isfinite(near_one[0].value));
}

TEST_CASE("bound constants") {
  const auto a = bound_constants_report(2, 2, 60);
  const auto b = bound_constants_report(2, 2, 60);
  std::ostringstream ja;
  std::ostringstream jb;
  write_constants_json(ja, a);
  write_constants_json(jb, b);
  CHECK(ja.str() == jb.str());
  for (const auto& c : a.constants) {
    CHECK(c.value > 0.0);
    CHECK(std::isfinite(c.value));
  }
  CHECK(a.seed == kDefaultSeed);
  CHECK(a.gamma == 0.375);

  const auto doubled = bound_constants_report(2, 2, 120);
  for (const auto& c : a.constants) CHECK(doubled.get(c.name).value >= c.value);
  CHECK_THROWS_AS(a.get("missing"), std::out_of_range);

  const auto other = bound_constants_report(2, 2, 60, 7);
  CHECK(other.get("lemma_sigma_C").value != a.get("lemma_sigma_C").value);
}

TEST_CASE("property: lemma ratio uses admissible inputs only") {
  oracle::Gen gen(401);
  for (int i = 0; i < 100; ++i) {
    const int t = static_cast<int>(gen.integer(2, 20));
    const std::vector<double> u{std::exp2(gen.real(-t / 2.0, -1)), std::exp2(gen.real(-t / 2.0, -1))};
    const double ratio = lemma_sigma_ratio(2.0, u, t);
    CHECK(ratio > 0.0);
    CHECK(ratio < 10.0);
  }
}

TEST_CASE("formatting") {
  CHECK(format_p(kInfinity) == "inf");
  CHECK(format_p(2.0) == "2");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
