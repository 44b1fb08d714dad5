#ifndef VPCLT_PROCESS_HPP
#define VPCLT_PROCESS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vpclt/grid.hpp"

namespace vpclt {

// R independent realizations sampled on a common node set, row-major.
// Regenerating with the same spec/seed reproduces the matrix bit-identically
// whatever the thread count: path r depends only on (master_seed, r).
struct PathEnsemble {
  std::vector<double> nodes;
  std::size_t path_count = 0;
  std::vector<double> data;  // path_count x nodes.size()
  std::uint64_t master_seed = 0;

  std::size_t node_count() const { return nodes.size(); }
  std::span<const double> path(std::size_t r) const {
    return {data.data() + r * nodes.size(), nodes.size()};
  }
  std::span<double> path(std::size_t r) {
    return {data.data() + r * nodes.size(), nodes.size()};
  }
};

enum class ProcessKind { wiener, eta0, random_trig, sequence_example, user_table };
enum class CoefficientLaw { gaussian, uniform };

// Declarative description of a built-in process; validate() reports the
// offending field for out-of-range parameters.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::random_trig;

  // eta0: w(t) / ((2t)^{1/2} (log|log t|)^{(1+delta)/2}), t in (0, e^-4]
  double delta = 0.1;       // in (0, 1/4)
  int eta0_nodes = 64;      // log-spaced nodes below e^-4
  double eta0_tmin = 1e-12; // deepest node

  // random_trig: sum_k sigma_k (a_k cos kt + b_k sin kt)
  int max_degree = 6;
  CoefficientLaw law = CoefficientLaw::gaussian;
  std::vector<double> sigmas;  // per k = 1..max_degree; empty = 1/sqrt(D)

  // sequence_example: p0 in (1,2), alpha in (0, min(1, p0/(2-p0)))
  double alpha = 0.5;
  double p0 = 1.5;
  int n_max = 64;

  // user_table
  std::vector<double> table_nodes;
  std::vector<double> table_data;  // row-major realizations

  void validate() const;
  static ProcessSpec wiener_spec();
  static ProcessSpec eta0_spec(double delta, int nodes = 64,
                               double tmin = 1e-12);
  static ProcessSpec random_trig_spec(int max_degree, CoefficientLaw law,
                                      std::vector<double> sigmas = {});
  static ProcessSpec sequence_spec(double alpha, double p0, int n_max = 64);
};

// Generator with counter-derived per-path streams. fill_path(r, out) writes
// realization r; the result is a pure function of (spec, nodes, seed, r).
class ProcessSampler {
 public:
  virtual ~ProcessSampler() = default;
  const std::vector<double>& nodes() const { return nodes_; }
  std::uint64_t master_seed() const { return master_seed_; }

  virtual void fill_path(std::uint64_t path_index,
                         std::span<double> out) const = 0;

  // out += scale * sum of paths [first, first+count); overridable where a
  // cheaper accumulation exists (trig processes sum coefficients).
  virtual void accumulate_paths(std::uint64_t first, std::uint64_t count,
                                double scale, std::span<double> out) const;

 protected:
  ProcessSampler(std::vector<double> nodes, std::uint64_t seed)
      : nodes_(std::move(nodes)), master_seed_(seed) {}
  std::vector<double> nodes_;
  std::uint64_t master_seed_;
};

std::unique_ptr<ProcessSampler> make_sampler(const ProcessSpec& spec,
                                             const PeriodicGrid& grid,
                                             std::uint64_t master_seed);

// R independent realizations of the process.
PathEnsemble sample(const ProcessSpec& spec, const PeriodicGrid& grid,
                    std::size_t count, std::uint64_t master_seed);
PathEnsemble sample(const ProcessSampler& sampler, std::size_t count);

// zeta_n: each output path is n^{-1/2} times the sum of n fresh independent
// base paths (output r consumes base indices r*n .. r*n+n-1, so n = 1 with
// the same seed reproduces the base ensemble exactly).
PathEnsemble normalized_sum(const ProcessSampler& base, long n,
                            std::size_t count);

struct CovarianceMatrix {
  std::vector<double> nodes;
  std::vector<double> entries;  // n x n, symmetric
  std::size_t size() const { return nodes.size(); }
  double at(std::size_t i, std::size_t j) const {
    return entries[i * nodes.size() + j];
  }
  double max_diag() const;
};

// Unbiased sample covariance across realizations (requires R >= 2).
CovarianceMatrix empirical_covariance(const PathEnsemble& ens);

// tau(t_i,t_j) = sqrt(max(0, R_ii + R_jj - 2 R_ij)); negative radicands are
// Monte-Carlo artifacts, clamped to zero and counted.
struct TauMatrix {
  std::vector<double> nodes;
  std::vector<double> dist;  // n x n
  std::size_t clamped = 0;
  std::size_t size() const { return nodes.size(); }
  double at(std::size_t i, std::size_t j) const {
    return dist[i * nodes.size() + j];
  }
};
TauMatrix tau_distance(const CovarianceMatrix& cov);

// Optimal factorization |eta(t) - eta(s)| <= L * q(t,s): L is the per-path
// oscillation sup, q the max over paths of |increment|/L (empirical stand-in
// for the essential sup; path_count is reported so users can judge it).
struct FactorizationPair {
  std::vector<double> L_samples;
  std::vector<double> q;  // n x n, zero diagonal, entries <= 1
  std::size_t node_count = 0;
  std::size_t path_count = 0;
  bool trivial = false;  // all paths constant (L = 0)
  double at(std::size_t i, std::size_t j) const {
    return q[i * node_count + j];
  }
};
FactorizationPair factorization_pair(const PathEnsemble& ens);

// Moment diagnostics for the sequence-space example: decay of E|eta_n|^2 and
// stabilization of E||eta||^p around p0.
struct SequenceMomentsReport {
  double alpha = 0, p0 = 0;
  long n_max = 0;
  std::size_t replicas = 0;
  double a1 = 0;  // a(1), equals 0.5 for every alpha
  std::vector<long> n_values;
  std::vector<double> e2;          // empirical E|eta_n|^2
  std::vector<std::size_t> hits;   // support hits per n
  double fitted_exponent = 0;      // slope of log E|eta_n|^2 vs log n
  double fit_r2 = 0;
  double mean_abs_mean = 0;        // max_n |empirical mean of eta_n|
  double truncation_fraction = 0;  // paths landing beyond a(n_max+1)

  struct PowerDiag {
    double p = 0;
    std::vector<double> running_mean;    // at R/8, R/4, R/2, R
    std::vector<double> running_cummax;  // at R/8, R/4, R/2, R
    double rel_change_last = 0;          // |M_R - M_{R/2}| / M_R
    double cummax_growth = 0;            // cummax(R) / cummax(R/8)
    double max_share = 0;                // largest term / total sum
  };
  std::vector<PowerDiag> powers;
};
SequenceMomentsReport sequence_example_moments(double alpha, double p0,
                                               long n_max, std::size_t count,
                                               std::uint64_t master_seed);

}  // namespace vpclt

#endif  // VPCLT_PROCESS_HPP
