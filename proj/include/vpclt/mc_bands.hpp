#ifndef VPCLT_MC_BANDS_HPP
#define VPCLT_MC_BANDS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vpclt/process.hpp"

namespace vpclt {

// Lower-triangular Cholesky factor of cov + jitter*I. Monte-Carlo
// covariances are PSD only in expectation, so the jitter escalates from
// 1e-12 * max diag by factors of 10 up to the 1e-6 * max diag cap before
// giving up with a PSD diagnostic.
struct CholFactor {
  std::size_t n = 0;
  std::vector<double> lower;  // row-major, upper part zero
  double jitter_used = 0;
};

CholFactor cholesky_psd(const CovarianceMatrix& cov);

// paths = chol.lower * iid standard normals, one stream per path.
PathEnsemble gaussian_limit_sample(const CovarianceMatrix& cov,
                                   std::size_t count,
                                   std::uint64_t master_seed);

struct TailCurve {
  std::vector<double> u;      // increasing, nonnegative
  std::vector<double> gamma;  // exceedance estimates, nonincreasing
  std::vector<double> std_err;  // Wilson-interval half-widths (z = 1)
  std::size_t replicas = 0;
};

// Empirical gamma(u) = P(max_j |path(t_j)| > u) over the ensemble (or the
// one-sided sup when two_sided = false).
struct SupOptions {
  bool two_sided = true;
  // Gaussian-bridge continuity correction for the probability that the
  // continuum path crosses the level inside a grid interval. Uses the
  // increment variances h_j, so it needs a covariance; for smooth processes
  // h_j is tiny and the correction vanishes, for Brownian-type paths it
  // removes the O(sqrt(h)) discrete-monitoring bias.
  bool bridge_correction = false;
};

TailCurve sup_tail(const PathEnsemble& ens, const std::vector<double>& u_grid,
                   const SupOptions& opts = {});

// Streaming tail curve of the Gaussian limit: replicas are generated, scored
// against every level and discarded, so count is not memory-bound. With
// bridge_correction (default) the curve estimates the continuum sup tail.
TailCurve gaussian_sup_tail(const CovarianceMatrix& cov, std::size_t count,
                            std::uint64_t master_seed,
                            const std::vector<double>& u_grid,
                            bool two_sided = true,
                            bool bridge_correction = true);

// Largest root of gamma(u) = eps by linear interpolation through the
// empirical curve. Requires eps * replicas >= 100 expected exceedances.
double quantile_U(const TailCurve& curve, double eps);

// Least squares for gamma(u) ~ K u^{kappa-1} exp(-u^2/(2 sigma^2)) on the
// curve points with gamma in [1e-4, 1e-1]: regress log gamma + u^2/(2s2)
// on log u. The estimates carry the bias of the fit window; deeper windows
// approach the asymptote.
struct TailFit {
  double K = 0;
  double kappa_minus_1 = 0;
  double rmse = 0;
  std::size_t points_used = 0;
};

TailFit tail_fit(const TailCurve& curve, double sigma2);

struct BetaSpec {
  enum class Kind { uniform, normal } kind = Kind::uniform;
  double a = -1.0, b = 1.0;   // uniform bounds
  double mu = 0.0, sd = 1.0;  // normal parameters
  double draw(class StreamRng& rng) const;
};

struct BandConfig {
  std::size_t n = 10000;       // Monte-Carlo sample size of I_n
  double epsilon = 0.05;       // confidence miss level
  std::size_t replicas = 20000;  // Gaussian-limit replicas for U(eps)
  std::size_t pilot = 4000;    // pilot sample for the limit covariance
  std::size_t ref_factor = 50; // reference truth I(t) uses n * ref_factor
  int grid_size = 64;          // periodic t-grid resolution
};

// The parametric-integral confidence band: I(t) ~ I_n(t) +- U(eps)/sqrt(n)
// uniformly in t, with U(eps) the sup-norm quantile of the Gaussian limit of
// eta(t) = v(t, beta) - I(t). The reference I(t) is a high-N Monte-Carlo
// value, not symbolic integration.
struct BandResult {
  double epsilon = 0;
  double U_eps = 0;
  std::size_t n = 0;
  double band_halfwidth = 0;  // U_eps / sqrt(n), exactly
  std::vector<double> t_nodes;
  std::vector<double> I_n;
  std::vector<double> I_ref;
  double sigma2_hat = 0;  // max_t of the pilot variance
  double chol_jitter = 0;
  TailCurve tail_curve;  // the gamma_infinity curve behind U_eps
};

BandResult param_integral_band(
    const std::function<double(double, double)>& integrand,
    const BetaSpec& beta, const BandConfig& cfg, std::uint64_t master_seed);

// Two-sample Kolmogorov-Smirnov distance (modifies copies by sorting).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Empirical CLT diagnostic: sup|zeta_n| against the sup of the Gaussian
// limit drawn from the empirical covariance of the same ensemble.
struct CltTestResult {
  double ks_distance = 0;
  bool pass = false;
  double threshold = 0.05;
  std::size_t replicas = 0;
  long n = 0;
};

CltTestResult clt_empirical_test(const ProcessSpec& spec,
                                 const PeriodicGrid& grid, long n,
                                 std::size_t replicas,
                                 std::uint64_t master_seed,
                                 double threshold = 0.05);

// min(s,t) covariance on the uniform grid {1/n, 2/n, ..., 1}.
CovarianceMatrix wiener_covariance(std::size_t nodes);

}  // namespace vpclt

#endif  // VPCLT_MC_BANDS_HPP
