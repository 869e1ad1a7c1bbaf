#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fibdisc/lattice.hpp"
#include "fibdisc/splines.hpp"

namespace fibdisc {

/// Requested volume admits no box (v outside (0, 1]).
class InfeasibleVolume : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Method {
  DirectGrid,            ///< point sums on a uniform grid of shifts / centers
  SpectralParseval,      ///< truncated dual-lattice series, l2 of the coefficients
  SpectralGrid,          ///< truncated dual-lattice series sampled on a shift grid
  DirectAutocorrelation  ///< closed-form L2 via the lattice autocorrelation sum
};

std::string_view to_string(Method m);

/// Norm exponent; p = infinity is the sup norm.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SpectralTruncation {
  std::int64_t K = 0;           ///< max |k_j| kept
  double certified_tail = 0.0;  ///< bound on the omitted part of the series
};

struct DiscrepancyResult {
  double value = 0.0;
  Method method = Method::DirectGrid;
  double tail_bound = 0.0;
  int grid = 0;           ///< shift grid M (0 if unused)
  int center_grid = 0;    ///< non-periodic center grid M_c (0 if unused)
  int shape_samples = 0;  ///< number of aspect ratios scanned
  std::int64_t K = 0;     ///< spectral cutoff (0 if unused)
  std::vector<double> argmax_shape;
};

/// Whether certify_tail bounds sum |c_k| (error functional) or sum |c_k|^2 (Parseval).
enum class TailKind { Absolute, Squared };

/// Upper bound on the sum over k in L(n), max(|k_1|, |k_2|) > K, of
/// prod_j min(u_j^q, (pi |k_j|)^{-q}) with q = r (Absolute) or q = 2r (Squared),
/// which dominates |c_k| (resp. |c_k|^2) of the omitted coefficients.
/// Monotone nonincreasing in K. Infinite when q <= 1, where the series over a
/// residue class diverges.
double certify_tail(const SmoothBox& box, const FibIndex& n, std::int64_t K,
                    TailKind kind = TailKind::Absolute);

SpectralTruncation make_truncation(const SmoothBox& box, const FibIndex& n, std::int64_t K,
                                   TailKind kind = TailKind::Absolute);

/// Smallest power-of-two K (from 16, at most K_max) whose absolute tail is
/// <= target; returns K_max's truncation if the target is not reachable.
SpectralTruncation truncation_for_tail(const SmoothBox& box, const FibIndex& n,
                                       double target, std::int64_t K_max,
                                       TailKind kind = TailKind::Absolute);

/// E^r_B(z) = b_n^{-1} sum_mu periodized h^r_B(y^mu - z) - pr(u)^r.
double error_direct(const PointSet& points, const SmoothBox& box, Point2 shift);

/// Truncated dual-lattice series for E^r_B(z) before the real part is taken.
std::complex<double> error_spectral_complex(const FibIndex& n, const SmoothBox& box,
                                            Point2 shift, const SpectralTruncation& trunc);

/// Real part of the truncated series; |result - E^r_B(z)| <= trunc.certified_tail.
/// Throws std::logic_error if the imaginary residue exceeds 1e-10.
double error_spectral(const FibIndex& n, const SmoothBox& box, Point2 shift,
                      const SpectralTruncation& trunc);

/// sqrt of the sum over nonzero dual points with |k_j| <= K of |coefficient|^2.
/// tail_bound certifies the distance to the untruncated L2 norm.
DiscrepancyResult l2_norm_parseval(const FibIndex& n, const SmoothBox& box, std::int64_t K);

/// Exact L2 norm of E^r_B over shifts:
/// ||E||_2^2 = b_n^{-1} sum_mu periodized h^{2r}_u(y^mu) - pr(u)^{2r}.
/// This is the Parseval sum over L(n) \ {0} folded back to the point set by
/// Poisson summation.
DiscrepancyResult l2_norm_autocorrelation(const PointSet& points, const SmoothBox& box);

/// Values E^r_B(i/M, j/M), row-major in i. Same quantity as error_direct.
std::vector<double> error_on_shift_grid(const PointSet& points, const SmoothBox& box, int M);

/// Rectangle-rule L_p norm of E^r_B over the M x M shift grid (max for p = inf).
DiscrepancyResult lp_norm_grid(const PointSet& points, const SmoothBox& box, double p, int M);

/// L_p norm from the truncated spectral series sampled on the M x M grid.
DiscrepancyResult lp_norm_spectral_grid(const FibIndex& n, const SmoothBox& box, double p,
                                        int M, const SpectralTruncation& trunc);

/// log-spaced u_1 values in [v / r, 1 / r] (S >= 1; S = 1 is the square shape).
std::vector<double> shape_grid(int r, double v, int S);

struct PeriodicOptions {
  int shapes = 33;
  int shift_grid = 0;  ///< 0 selects 256 for p < inf and 512 for p = inf
  /// Method for p = 2. DirectGrid forces the grid route for every p.
  enum class L2Route { Auto, Spectral, Autocorrelation, Grid } l2_route = L2Route::Auto;
  std::int64_t max_K = 1 << 15;
  double relative_tail = 1e-6;  ///< spectral target for tail_bound / value
};

/// sup over S shapes of ||E^r_B||_p for boxes of volume v. The center is
/// immaterial because the norm already ranges over all shifts.
DiscrepancyResult fixed_volume_discrepancy_periodic(const PointSet& points, int r, double v,
                                                    double p,
                                                    const PeriodicOptions& opts = {});

struct NonperiodicOptions {
  int shapes = 33;
  int center_grid = 64;
};

/// max over S shapes and M_c x M_c centers with B inside the unit square of
/// |b_n^{-1} sum_mu h^r_B(y^mu) - pr(u)^r|. A lower estimate of the sup.
DiscrepancyResult fixed_volume_discrepancy_nonperiodic(const PointSet& points, int r, double v,
                                                       const NonperiodicOptions& opts = {});

/// Grid refinement until the relative change drops below rel_change (S -> 2S - 1,
/// M -> 2M, M_c -> 2M_c - 1), at most max_rounds doublings.
DiscrepancyResult refine_periodic(const PointSet& points, int r, double v, double p,
                                  PeriodicOptions opts, double rel_change = 0.01,
                                  int max_rounds = 3);
DiscrepancyResult refine_nonperiodic(const PointSet& points, int r, double v,
                                     NonperiodicOptions opts, double rel_change = 0.01,
                                     int max_rounds = 3);

/// ||delta_s(E^r_B)||_2: l2 norm of the coefficients over rho(s) ∩ L(n) \ {0}.
double shell_l2_energy(const FibIndex& n, const SmoothBox& box, const DyadicShell& s);

}  // namespace fibdisc
