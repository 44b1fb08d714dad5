#include "vpclt/trig.hpp"

#include <algorithm>
#include <cmath>

namespace vpclt {

TrigCoefficients::TrigCoefficients(int degree,
                                   std::vector<std::complex<double>> coeffs)
    : degree_(degree), coeffs_(std::move(coeffs)) {
  if (degree < 0) throw validation_error("degree must be >= 0");
  if (coeffs_.size() != static_cast<std::size_t>(2 * degree + 1))
    throw validation_error("coefficient count must be 2*degree+1");
}

DyadicSequence::DyadicSequence(std::vector<long> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty() || terms_[0] != 1)
    throw validation_error("sequence must start at n(1) = 1", "sequence");
  for (std::size_t i = 1; i < terms_.size(); ++i)
    if (terms_[i] <= terms_[i - 1])
      throw validation_error("sequence must be strictly increasing",
                             "sequence");
}

DyadicSequence DyadicSequence::dyadic(int length) {
  if (length < 1) throw validation_error("sequence length must be >= 1");
  std::vector<long> t(length);
  long v = 1;
  for (int i = 0; i < length; ++i, v *= 2) t[i] = v;
  return DyadicSequence(std::move(t));
}

double vp_multiplier(const VPOperatorSpec& spec, int freq) {
  const int m = std::abs(freq);
  const int n = spec.degree, p = spec.window;
  if (m <= n - p) return 1.0;
  if (m <= n) return static_cast<double>(n - m + 1) / (p + 1);
  return 0.0;
}

double vp_kernel_eval(const VPOperatorSpec& spec, double t) {
  // K_{n,p}(t) = (1/(p+1)) sum_{k=n-p}^{n} D_k(t) with the Dirichlet kernel
  // D_k(t) = 1/2 + sum_{m=1}^{k} cos(mt); collapsing the average gives the
  // cosine series below, which equals the closed form
  // sin((2n+1-p)t/2) sin((p+1)t/2) / (2(p+1) sin^2(t/2)) away from t = 0.
  double s = 0.5;
  for (int m = 1; m <= spec.degree; ++m)
    s += vp_multiplier(spec, m) * std::cos(m * t);
  return s;
}

TrigCoefficients fourier_analyze(const GridFunction& f, int max_degree) {
  const int N = f.grid.size();
  if (max_degree < 0) throw validation_error("max_degree must be >= 0");
  if (2 * max_degree >= N)
    throw validation_error("degree too large for grid: need 2n < N",
                           "max_degree");
  std::vector<std::complex<double>> c(2 * max_degree + 1);
  // c_k = (1/N) sum_j f_j exp(-i k t_j); exact for degree <= max_degree input
  for (int k = 0; k <= max_degree; ++k) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < N; ++j) {
      const double ang = kTwoPi * static_cast<double>(k) * j / N;
      re += f.values[j] * std::cos(ang);
      im -= f.values[j] * std::sin(ang);
    }
    const std::complex<double> ck(re / N, im / N);
    c[max_degree + k] = ck;
    c[max_degree - k] = std::conj(ck);
  }
  return TrigCoefficients(max_degree, std::move(c));
}

GridFunction synthesize(const TrigCoefficients& c, const PeriodicGrid& grid) {
  return partial_sum(c, c.degree(), grid);
}

GridFunction partial_sum(const TrigCoefficients& c, int k,
                         const PeriodicGrid& grid) {
  if (k < 0 || k > c.degree())
    throw validation_error("partial sum order exceeds coefficient degree",
                           "k");
  const int N = grid.size();
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) {
    // real synthesis: c_0 + 2 sum_{m>=1} (Re c_m cos - Im c_m sin)
    double v = c.at(0).real();
    for (int m = 1; m <= k; ++m) {
      const double ang = kTwoPi * static_cast<double>(m) * j / N;
      v += 2.0 * (c.at(m).real() * std::cos(ang) -
                  c.at(m).imag() * std::sin(ang));
    }
    out[j] = v;
  }
  return GridFunction(grid, std::move(out));
}

GridFunction vp_sum(const GridFunction& f, int n) {
  return vp_sum(f, VPOperatorSpec::half_degree_window(n));
}

GridFunction vp_sum(const GridFunction& f, const VPOperatorSpec& spec) {
  if (2 * spec.degree >= f.grid.size())
    throw validation_error("VP degree too large for grid", "vp.n");
  TrigCoefficients c = fourier_analyze(f, spec.degree);
  for (int m = 1; m <= spec.degree; ++m) {
    const double w = vp_multiplier(spec, m);
    c.at(m) *= w;
    c.at(-m) *= w;
  }
  return synthesize(c, f.grid);
}

GridFunction vp_sum_averaged(const GridFunction& f,
                             const VPOperatorSpec& spec) {
  if (2 * spec.degree >= f.grid.size())
    throw validation_error("VP degree too large for grid", "vp.n");
  const TrigCoefficients c = fourier_analyze(f, spec.degree);
  std::vector<double> acc(f.grid.size(), 0.0);
  for (int k = spec.degree - spec.window; k <= spec.degree; ++k) {
    GridFunction sk = partial_sum(c, k, f.grid);
    for (int j = 0; j < f.grid.size(); ++j) acc[j] += sk.values[j];
  }
  const double inv = 1.0 / (spec.window + 1);
  for (double& v : acc) v *= inv;
  return GridFunction(f.grid, std::move(acc));
}

GridFunction block_component(const GridFunction& f, const DyadicSequence& seq,
                             int k) {
  if (k < 1 || k + 1 > seq.length())
    throw validation_error("block index out of range", "k");
  const int n_hi = static_cast<int>(seq.term(k + 1));
  if (2 * n_hi >= f.grid.size())
    throw validation_error("block degree too large for grid", "k");
  TrigCoefficients c = fourier_analyze(f, n_hi);
  return block_component(c, seq, k, f.grid);
}

GridFunction block_component(const TrigCoefficients& c,
                             const DyadicSequence& seq, int k,
                             const PeriodicGrid& grid) {
  if (k < 1 || k + 1 > seq.length())
    throw validation_error("block index out of range", "k");
  const int n_lo = static_cast<int>(seq.term(k));
  const int n_hi = static_cast<int>(seq.term(k + 1));
  if (n_hi > c.degree())
    throw validation_error("coefficients do not cover block degree");
  const VPOperatorSpec hi = VPOperatorSpec::half_degree_window(n_hi);
  const VPOperatorSpec lo = VPOperatorSpec::half_degree_window(n_lo);
  const int N = grid.size();
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) {
    double v = 0.0;
    for (int m = 1; m <= n_hi; ++m) {
      const double w = vp_multiplier(hi, m) - vp_multiplier(lo, m);
      if (w == 0.0) continue;
      const double ang = kTwoPi * static_cast<double>(m) * j / N;
      v += 2.0 * w * (c.at(m).real() * std::cos(ang) -
                      c.at(m).imag() * std::sin(ang));
    }
    out[j] = v;
  }
  return GridFunction(grid, std::move(out));
}

std::vector<double> best_error_profile(const GridFunction& f, int m_max) {
  const int N = f.grid.size();
  if (2 * m_max >= N)
    throw validation_error("degree too large for grid: need 2m < N", "m");
  const TrigCoefficients c = fourier_analyze(f, m_max);
  std::vector<double> prof(m_max + 1);

  // incremental partial sums: S_m = S_{m-1} + new frequency
  std::vector<double> sm(N, c.at(0).real());
  auto record = [&](const std::vector<double>& approx) {
    double err = 0.0;
    for (int j = 0; j < N; ++j)
      err = std::max(err, std::abs(f.values[j] - approx[j]));
    return err;
  };
  prof[0] = record(sm);
  for (int m = 1; m <= m_max; ++m) {
    for (int j = 0; j < N; ++j) {
      const double ang = kTwoPi * static_cast<double>(m) * j / N;
      sm[j] += 2.0 * (c.at(m).real() * std::cos(ang) -
                      c.at(m).imag() * std::sin(ang));
    }
    double err = record(sm);
    if (m >= 2) {
      GridFunction g = vp_sum(f, VPOperatorSpec::half_degree_window(m));
      err = std::min(err, sup_distance(f, g));
    }
    prof[m] = err;
  }
  // E(m,f) is nonincreasing in m; enforce on the bound
  for (int m = 1; m <= m_max; ++m) prof[m] = std::min(prof[m], prof[m - 1]);
  return prof;
}

double best_error_ub(const GridFunction& f, int m) {
  return best_error_profile(f, m).back();
}

double modulus_of_continuity(const GridFunction& f, double delta) {
  if (delta < 0.0 || delta > kTwoPi)
    throw validation_error("delta must lie in [0, 2pi]", "delta");
  const int N = f.grid.size();
  const int shift_max =
      std::min<int>(N, static_cast<int>(delta / f.grid.step() + 1e-9));
  double w = 0.0;
  for (int s = 1; s <= shift_max; ++s) {
    for (int j = 0; j < N; ++j) {
      const double d = std::abs(f.values[(j + s) % N] - f.values[j]);
      if (d > w) w = d;
    }
  }
  return w;
}

}  // namespace vpclt
