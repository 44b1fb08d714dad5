#ifndef VPCLT_ENTROPY_HPP
#define VPCLT_ENTROPY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "vpclt/grid.hpp"

namespace vpclt {

// Finite metric sample: point ids 0..n-1 with a symmetric distance matrix.
// Construction validates symmetry, nonnegativity, zero diagonal and the
// triangle inequality within 1e-9 (exhaustively for n <= 500, on a
// deterministic sample of 2e6 triples above that); violations are rejected
// with a count.
class MetricSample {
 public:
  MetricSample(std::size_t n, std::vector<double> dist);

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  const std::vector<double>& raw() const { return d_; }
  double diameter() const;

 private:
  std::size_t n_;
  std::vector<double> d_;
};

struct CoverCount {
  std::size_t greedy_cover = 0;   // max-coverage greedy, upper bound on N_opt
  std::size_t packing_eps = 0;    // maximal eps-separated count (scan order)
  std::size_t packing_2eps = 0;   // maximal 2eps-separated count, lower bound
};

// Covering count: exhaustive optimum for samples of up to 12 points,
// max-coverage greedy above that (per round, the point whose closed eps-ball
// covers the most uncovered points; ties: higher eccentricity, then lower
// index). N_opt(eps) lies in [packing_2eps, greedy_cover].
CoverCount covering_number(const MetricSample& ms, double eps);

struct EntropyProfile {
  std::vector<double> eps;       // decreasing
  std::vector<double> H;         // log covering numbers, nondecreasing
  std::vector<std::size_t> n_greedy;
  std::vector<std::size_t> n_packing;  // at 2 eps (bracketing partner)
  std::size_t monotonicity_fixups = 0;  // raw greedy dips absorbed by a
                                        // running max (none in practice)
};

EntropyProfile entropy_profile(const MetricSample& ms,
                               const std::vector<double>& eps_grid);

// Profile assembled from analytic H values rather than a point sample.
EntropyProfile analytic_profile(std::vector<double> eps,
                                std::vector<double> H);

struct GrowthFit {
  std::string form;  // "polylog" or "exp"
  double slope = 0, intercept = 0, r2 = 0;
  double a = 0;  // exponent of eps^-a for the exp form
  bool valid = false;
};

// Trapezoid estimate of int H^{1/2} dz over the sampled range plus a trend
// verdict: fit H growth over the last decade by H ~ K (log 1/z)^b (polylog)
// and log H ~ c z^-a (exponential), extrapolate the winner below eps_min,
// and call diverging-trend when the extrapolated remainder exceeds 10x the
// computed part. Divergence of an improper integral is undecidable from
// finite data; this is a documented extrapolation, not a proof.
struct DudleyResult {
  double integral_estimate = 0;
  double extrapolated_remainder = 0;
  std::string trend;  // finite-trend | diverging-trend
  GrowthFit polylog_fit, exp_fit;
  std::string winner;
};

DudleyResult dudley_check(const EntropyProfile& profile);

// Probe of the normalized-Brownian example on T = [0, e^-4]. Builds the
// tau_0 node metric from the analytic variance (no sampling noise), checks
// the ball-volume ratio inequality exp(H) >= mu(T)/h_+(eps) on the node set,
// and evaluates the analytic ball-volume chain at the origin:
// mu(B(0,eps)) computed from the iterated-log distance
// tau_0(t,0) = 2^{-1/2} (log|log t|)^{-(1+delta)}, whose entropy lower bound
// H_chain(eps) = log( mu(T) / mu(B(0,eps)) ) feeds dudley_check. The
// normalized-Brownian variance itself decays with exponent -(1+delta)/2 in
// log|log t|; both exponents are reported and the mismatch is flagged, not
// resolved.
struct Probe41Report {
  double delta = 0;
  std::size_t node_count = 0;

  // sampled node metric (double-representable depths only)
  EntropyProfile sampled;
  double variance_exponent_fit = 0;  // slope of log tau(t,0) vs log log|log t|
  bool ball_ratio_ok = false;     // exp(H) >= mu(T)/h_+(eps) at every eps
  double ball_ratio_margin = 0;   // min over eps of exp(H) * h_+ / mu(T)

  // analytic ball-volume chain profile and its verdict
  EntropyProfile chain;
  DudleyResult dudley;
  double chain_fit_slope = 0;  // log H_chain vs eps^{-1/(1+delta)}
  double chain_fit_r2 = 0;

  std::string discrepancy_note;
};

Probe41Report example41_probe(double delta, std::size_t node_count = 400);

}  // namespace vpclt

#endif  // VPCLT_ENTROPY_HPP
