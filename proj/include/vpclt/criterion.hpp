#ifndef VPCLT_CRITERION_HPP
#define VPCLT_CRITERION_HPP

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vpclt/process.hpp"
#include "vpclt/trig.hpp"

namespace vpclt {

// Geometric lambda search grid for the U infimum, refined once by golden
// section around the grid minimizer. The exact infimum ranges over all
// lambda > 0; truncation to [lo, hi] is made visible by the cap-active flag
// when the minimizer pins to hi.
struct LambdaGrid {
  double lo = 1e-3;
  double hi = 1e3;
  int points = 61;
};

struct PsiEstimate {
  double log_psi = 0;
  double std_err = 0;      // batch standard error of log_psi
  double heavy_frac = 0;   // fraction of terms with lambda*z > exp guard
  bool integrability_warning = false;
};

// log Psi = log (2pi)^-1 int E exp(lambda Z(t)) dt, estimated by the mean of
// exp(lambda z) over grid nodes and realizations. Evaluated in the log
// domain (max shift before exponentiation); the heavy-tail fraction is a
// heuristic existence warning, Monte Carlo cannot prove integrability.
PsiEstimate psi_log_estimate(std::span<const double> block_values,
                             std::size_t paths, double lambda);

// Per-path Z_k values for a whole ensemble, flattened paths x nodes.
std::vector<double> block_values(const PathEnsemble& ens,
                                 const DyadicSequence& seq, int k);

PsiEstimate psi_estimate(const PathEnsemble& ens, const DyadicSequence& seq,
                         int k, double lambda);

struct BlockStatistic {
  int k = 0;
  long n_lo = 0, n_hi = 0;
  double lambda_star = 0;
  double U_value = 0;  // (log n_hi + log Psi(lambda*)) / lambda*
  std::vector<std::pair<double, double>> psi_curve;  // (lambda, log Psi)
  double mc_error = 0;  // std err of log Psi at lambda*
  bool cap_active = false;
  bool integrability_warning = false;
  double e_sup_z = 0;  // empirical E ||Z_k||_inf
  double ratio = 0;    // e_sup_z / U, the implied constant of the E||Z||<=C U bound
};

BlockStatistic u_term(const PathEnsemble& ens, const DyadicSequence& seq,
                      int k, const LambdaGrid& grid = {});

// Verdict thresholds are configuration, not truth: a finite computation
// cannot decide convergence of an infinite series.
struct VerdictRule {
  double converged_tail_frac = 0.1;  // final tail < frac * full sum
  double diverging_tail_frac = 0.3;  // final tail >= frac * full sum
};

struct CriterionReport {
  std::vector<long> sequence;
  std::vector<BlockStatistic> blocks;
  std::vector<double> tail_sums;  // tail_sums[m-1] = sum_{k>=m} max(U_k, 0)
  std::string verdict;            // series-converging-trend | inconclusive |
                                  // diverging-trend
  int clamped_terms = 0;          // negative U estimates clamped in the tails
};

CriterionReport series_check(const PathEnsemble& ens,
                             const DyadicSequence& seq,
                             const LambdaGrid& grid = {},
                             const VerdictRule& rule = {});

struct EquiconvergenceReport {
  std::vector<long> n_list;
  std::vector<CriterionReport> per_n;
  std::vector<double> sup_tail_sums;  // sup over n of tail_sums[m]
  std::string verdict;
  double variance_stability = 0;  // max over n,t of relative Var deviation
};

// Equiconvergence check: the generating functional of zeta_n is Phi^n(psi/sqrt n),
// realized here by direct simulation of zeta_n for each n in n_list.
EquiconvergenceReport equiconvergence_check(
    const ProcessSpec& spec, const PeriodicGrid& grid,
    const DyadicSequence& seq, const std::vector<long>& n_list,
    std::size_t count, std::uint64_t master_seed,
    const LambdaGrid& lambda_grid = {}, const VerdictRule& rule = {});

// Decay-series check for sum_r delta(2^r) / r^{1/m~}, m~ = min(m,2),
// m' = m~/(m~-1). The verdict compares sums over consecutive dyadic index
// windows (2^{j-1}, 2^j]: their ratio tends to 2^{1-theta} for terms ~ r^-theta,
// so a median ratio <= 0.97 over the last windows marks a converging trend.
// (A plain last-quarter/total ratio is also reported; it cannot separate
// theta = 1 from theta > 1 at practical r_max.)
struct DecayCheckResult {
  double sum = 0;
  std::string verdict;  // converging-trend | diverging-trend
  double window_ratio = 0;
  double last_quarter_fraction = 0;
  double m_tilde = 0, m_prime = 0;
};

DecayCheckResult decay_series_check(
    const std::function<double(long)>& delta_at_pow2, double m,
    long r_max = 16384);

// delta supplied as a table delta(n), n = 1..size; r_max = floor(log2(size)).
DecayCheckResult decay_series_check(std::span<const double> delta_table,
                                    double m);

// The log-power family delta(n) = [log(n+2)]^{-q}, evaluated at n = 2^r
// without forming 2^r: log(2^r + 2) = r log 2 + log1p(2^{1-r}).
std::function<double(long)> log_power_decay(double q);

}  // namespace vpclt

#endif  // VPCLT_CRITERION_HPP
