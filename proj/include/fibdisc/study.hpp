#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "fibdisc/discrepancy.hpp"

namespace fibdisc {

/// Default seed for every randomized measurement.
inline constexpr std::uint64_t kDefaultSeed = 20190501;

struct StudyRow {
  int n = 0;
  std::int64_t b = 0;
  int r = 0;
  double p = 2.0;
  double v = 0.0;
  double value = 0.0;
  double normalizer = 0.0;  ///< sqrt(log(b_n v)) for p < inf, log(b_n v) otherwise
  double ratio = 0.0;       ///< value * b_n^r / normalizer
  DiscrepancyResult result;
};

struct FixedVolume {
  double v = 0.25;
};
/// v = max(c0 / b_n, floor)
struct ProportionalVolume {
  double c0 = 16.0;
  double floor = 0.0;
};
struct VolumeList {
  std::vector<double> v;
};
using VolumePolicy = std::variant<FixedVolume, ProportionalVolume, VolumeList>;

struct StudyConfig {
  int r = 2;
  double p = 2.0;
  bool periodic = true;
  int n_first = 8;
  int n_last = 16;
  VolumePolicy volumes = FixedVolume{};
  PeriodicOptions periodic_opts{};
  NonperiodicOptions nonperiodic_opts{};
};

/// log(b_n v), natural logarithm; the study only admits b_n v > e.
double log_volume_scale(std::int64_t b, double v);

/// sqrt(log(b_n v)) for periodic p < inf; log(b_n v) for p = inf or non-periodic.
double study_normalizer(std::int64_t b, double v, double p, bool periodic);

/// One row per admissible (n, v), sorted by n then v. Throws InfeasibleVolume
/// when no (n, v) pair passes b_n v > e.
std::vector<StudyRow> scaling_table(const StudyConfig& config);

/// max(ratio) / min(ratio)
double ratio_spread(const std::vector<StudyRow>& rows);

struct ProfileRow {
  double v = 0.0;
  double value = 0.0;
  std::vector<double> argmax_shape;
  double normalizer = 0.0;
  double normalized = 0.0;  ///< value * b_n^r / normalizer
};

std::vector<double> log_spaced(double lo, double hi, int count);

std::vector<ProfileRow> worst_box_profile(int n, int r, double p, const std::vector<double>& v_grid,
                                          const PeriodicOptions& opts = {});

struct GammaRow {
  int n = 0;
  std::int64_t b = 0;
  std::int64_t min_norm = 0;
  double ratio = 0.0;
};

std::vector<GammaRow> gamma_table(int n_first, int n_last);

/// gamma-hat: min over n in 5..10 of min_hyperbolic_norm(n) / b_n.
double measured_gamma();

/// Sample quantities behind the measured constants.
double lemma_sigma_ratio(double r, const std::vector<double>& u, int t);
double majorant_square_sum(const SmoothBox& box, int t);
double majorant_sum(const SmoothBox& box, int t);
/// max over t0 <= |s|_1 <= t0 + extra of #(rho(s) ∩ L(n)) / 2^{t - t0}, t0 from gamma.
double shell_count_constant(const FibIndex& n, double gamma, int extra = 6);

struct MeasuredConstant {
  std::string name;
  double value = 0.0;
  std::string argmax;  ///< human-readable description of the maximizing input
};

struct BoundConstantsReport {
  int r = 0;
  int d = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::vector<MeasuredConstant> constants;

  const MeasuredConstant& get(const std::string& name) const;
};

/// Randomized maxima of the bound ratios. Sample i is drawn from its own
/// stream seeded by (seed, i), so larger sample_count extends smaller runs.
/// first_sample offsets the stream (disjoint subsamples).
BoundConstantsReport bound_constants_report(int r, int d, int sample_count,
                                            std::uint64_t seed = kDefaultSeed,
                                            int first_sample = 0);

std::string format_p(double p);
std::string format_double(double x);

void write_scaling_csv(std::ostream& os, const std::vector<StudyRow>& rows);
void write_gamma_csv(std::ostream& os, const std::vector<GammaRow>& rows);
void write_profile_csv(std::ostream& os, int n, int r, double p,
                       const std::vector<ProfileRow>& rows);
void write_constants_json(std::ostream& os, const BoundConstantsReport& report);

}  // namespace fibdisc
