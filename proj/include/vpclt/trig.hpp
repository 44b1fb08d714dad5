#ifndef VPCLT_TRIG_HPP
#define VPCLT_TRIG_HPP

#include <complex>
#include <vector>

#include "vpclt/grid.hpp"

namespace vpclt {

// Complex Fourier coefficients c_k, k = -degree..degree, of a real grid
// function; c_{-k} = conj(c_k).
class TrigCoefficients {
 public:
  TrigCoefficients(int degree, std::vector<std::complex<double>> coeffs);

  int degree() const { return degree_; }
  std::complex<double> at(int k) const { return coeffs_[k + degree_]; }
  std::complex<double>& at(int k) { return coeffs_[k + degree_]; }
  const std::vector<std::complex<double>>& raw() const { return coeffs_; }

 private:
  int degree_;
  std::vector<std::complex<double>> coeffs_;  // index k + degree
};

// de la Vallee-Poussin operator V_{n,p}: the average of partial Fourier
// sums S_k, k = n-p..n. The classical window is p(n) = floor(n/2); at n = 1
// that would be empty, so the default clamps p to >= 1.
struct VPOperatorSpec {
  int degree;  // n
  int window;  // p, 1 <= p <= n

  VPOperatorSpec(int n, int p) : degree(n), window(p) {
    if (n < 1) throw validation_error("VP degree must be >= 1", "vp.n");
    if (p < 1 || p > n)
      throw validation_error("VP window must satisfy 1 <= p <= n", "vp.p");
  }

  static int default_window(int n) { return n >= 2 ? n / 2 : 1; }
  static VPOperatorSpec half_degree_window(int n) {
    return VPOperatorSpec(n, default_window(n));
  }
};

// Strictly increasing sequence of naturals n(1) < n(2) < ..., n(1) = 1.
class DyadicSequence {
 public:
  explicit DyadicSequence(std::vector<long> terms);

  // n(k) = 2^{k-1}: the default block sequence, k = 1..length
  static DyadicSequence dyadic(int length);

  int length() const { return static_cast<int>(terms_.size()); }
  long term(int k) const { return terms_[k - 1]; }  // 1-based, n(1) = 1
  const std::vector<long>& terms() const { return terms_; }

 private:
  std::vector<long> terms_;
};

// Multiplier of V_{n,p} acting on frequency m: 1 on |m| <= n-p, then
// (n-|m|+1)/(p+1) down to the window edge, 0 beyond n.
double vp_multiplier(const VPOperatorSpec& spec, int freq);

// Kernel K_{n,p}(t); evaluated through its cosine series so the removable
// singularity at t = 0 (mod 2pi) needs no special casing. Even, 2pi-periodic.
double vp_kernel_eval(const VPOperatorSpec& spec, double t);

// Discrete Fourier coefficients up to max_degree. Requires 2*max_degree <
// grid size (alias-free); exact for trig polynomials of degree <= max_degree.
TrigCoefficients fourier_analyze(const GridFunction& f, int max_degree);

// Evaluate the trig polynomial with the given coefficients on the grid.
GridFunction synthesize(const TrigCoefficients& c, const PeriodicGrid& grid);

// k-th partial Fourier sum S_k[f] from precomputed coefficients, k <= degree.
GridFunction partial_sum(const TrigCoefficients& c, int k,
                         const PeriodicGrid& grid);

// V_{n,p(n)}[f] via the coefficient multiplier (production route).
GridFunction vp_sum(const GridFunction& f, int n);
GridFunction vp_sum(const GridFunction& f, const VPOperatorSpec& spec);

// Same operator as the literal average (1/(p+1)) sum_{k=n-p}^{n} S_k[f].
// Reference route used to pin the convolution normalization; tests check the
// two routes agree.
GridFunction vp_sum_averaged(const GridFunction& f, const VPOperatorSpec& spec);

// Block operator Z_k[f] = V_{n(k+1),p(n(k+1))}[f] - V_{n(k),p(n(k))}[f],
// 1 <= k <= seq.length()-1.
GridFunction block_component(const GridFunction& f, const DyadicSequence& seq,
                             int k);

// Applies Z_k to already-analyzed coefficients (degree must cover n(k+1)).
GridFunction block_component(const TrigCoefficients& c,
                             const DyadicSequence& seq, int k,
                             const PeriodicGrid& grid);

// Upper bound on the best-approximation error E(m,f): the smaller of
// ||f - S_m f|| and ||f - V_{m,p(m)} f||, made nonincreasing in m by a
// running minimum over lower degrees. An upper bound only; exact minimax
// is out of scope.
double best_error_ub(const GridFunction& f, int m);

// best_error_ub for all m = 0..m_max in one pass (running minimum applied).
std::vector<double> best_error_profile(const GridFunction& f, int m_max);

// Grid modulus of continuity: max over shifts |h| <= delta, h a multiple of
// the grid step, of max_j |f(t_j+h) - f(t_j)|. A lower bound of the
// continuum modulus with error at most one grid-step oscillation.
double modulus_of_continuity(const GridFunction& f, double delta);

}  // namespace vpclt

#endif  // VPCLT_TRIG_HPP
