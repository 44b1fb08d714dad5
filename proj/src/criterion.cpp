#include "vpclt/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "vpclt/parallel.hpp"

namespace vpclt {

namespace {

constexpr double kExpGuard = 700.0;  // log of largest finite double, rounded

double objective(double log_n_hi, double log_psi, double lambda) {
  return (log_n_hi + log_psi) / lambda;
}

}  // namespace

PsiEstimate psi_log_estimate(std::span<const double> z, std::size_t paths,
                             double lambda) {
  if (lambda <= 0.0)
    throw validation_error("lambda must be positive", "lambda");
  if (z.empty() || paths == 0 || z.size() % paths != 0)
    throw validation_error("block value shape mismatch");
  const std::size_t nodes = z.size() / paths;

  double zmax = z[0];
  for (double v : z) zmax = std::max(zmax, v);
  const double shift = lambda * zmax;

  // per-path partial sums; combining in path order keeps the estimate
  // deterministic, and per-batch totals give the standard error
  const std::size_t batches = std::min<std::size_t>(16, paths);
  std::vector<double> path_sum(paths, 0.0);
  std::size_t heavy = 0;
  for (std::size_t r = 0; r < paths; ++r) {
    const double* row = z.data() + r * nodes;
    double s = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      const double e = lambda * row[j];
      if (e > kExpGuard) ++heavy;
      s += std::exp(e - shift);
    }
    path_sum[r] = s;
  }

  double total = 0.0;
  for (double s : path_sum) total += s;
  PsiEstimate est;
  est.log_psi =
      shift + std::log(total / static_cast<double>(paths * nodes));
  est.heavy_frac = static_cast<double>(heavy) / static_cast<double>(z.size());
  est.integrability_warning = est.heavy_frac > 0.01;

  if (batches >= 2) {
    std::vector<double> bl(batches, 0.0);
    std::vector<std::size_t> bn(batches, 0);
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = paths * b / batches, hi = paths * (b + 1) / batches;
      double s = 0.0;
      for (std::size_t r = lo; r < hi; ++r) s += path_sum[r];
      bl[b] = shift + std::log(s / static_cast<double>((hi - lo) * nodes));
      bn[b] = hi - lo;
    }
    double mean = 0.0;
    for (double v : bl) mean += v;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double v : bl) var += (v - mean) * (v - mean);
    var /= static_cast<double>(batches - 1);
    est.std_err = std::sqrt(var / static_cast<double>(batches));
  }
  return est;
}

std::vector<double> block_values(const PathEnsemble& ens,
                                 const DyadicSequence& seq, int k) {
  if (k < 1 || k + 1 > seq.length())
    throw validation_error("block index out of range", "k");
  const std::size_t N = ens.node_count();
  for (std::size_t j = 0; j < N; ++j)
    if (std::abs(ens.nodes[j] - kTwoPi * static_cast<double>(j) / N) > 1e-9)
      throw validation_error(
          "criterion blocks need an equispaced periodic grid", "ensemble");
  const int n_lo = static_cast<int>(seq.term(k));
  const int n_hi = static_cast<int>(seq.term(k + 1));
  if (2 * n_hi >= static_cast<int>(N))
    throw validation_error("block degree too large for grid", "k");

  // weight of Z_k on frequency m
  std::vector<double> w(n_hi + 1, 0.0);
  const VPOperatorSpec hi = VPOperatorSpec::half_degree_window(n_hi);
  const VPOperatorSpec lo = VPOperatorSpec::half_degree_window(n_lo);
  for (int m = 1; m <= n_hi; ++m)
    w[m] = vp_multiplier(hi, m) - vp_multiplier(lo, m);

  // cos/sin tables on the ensemble's (periodic) nodes
  std::vector<double> ct(static_cast<std::size_t>(n_hi) * N);
  std::vector<double> st(static_cast<std::size_t>(n_hi) * N);
  for (int m = 1; m <= n_hi; ++m)
    for (std::size_t j = 0; j < N; ++j) {
      ct[(m - 1) * N + j] = std::cos(m * ens.nodes[j]);
      st[(m - 1) * N + j] = std::sin(m * ens.nodes[j]);
    }

  std::vector<double> out(ens.path_count * N);
  parallel_chunks(ens.path_count, [&](std::size_t lo_r, std::size_t hi_r) {
    std::vector<double> a(n_hi + 1), b(n_hi + 1);
    for (std::size_t r = lo_r; r < hi_r; ++r) {
      auto p = ens.path(r);
      // real Fourier coefficients a_m = (2/N) sum f cos, b_m = (2/N) sum f sin
      for (int m = 1; m <= n_hi; ++m) {
        if (w[m] == 0.0) {
          a[m] = b[m] = 0.0;
          continue;
        }
        double sa = 0.0, sb = 0.0;
        const double* c = ct.data() + (m - 1) * N;
        const double* s = st.data() + (m - 1) * N;
        for (std::size_t j = 0; j < N; ++j) {
          sa += p[j] * c[j];
          sb += p[j] * s[j];
        }
        a[m] = 2.0 * sa / static_cast<double>(N);
        b[m] = 2.0 * sb / static_cast<double>(N);
      }
      double* dst = out.data() + r * N;
      for (std::size_t j = 0; j < N; ++j) {
        double v = 0.0;
        for (int m = 1; m <= n_hi; ++m) {
          if (w[m] == 0.0) continue;
          v += w[m] * (a[m] * ct[(m - 1) * N + j] + b[m] * st[(m - 1) * N + j]);
        }
        dst[j] = v;
      }
    }
  });
  return out;
}

PsiEstimate psi_estimate(const PathEnsemble& ens, const DyadicSequence& seq,
                         int k, double lambda) {
  return psi_log_estimate(block_values(ens, seq, k), ens.path_count, lambda);
}

namespace {

BlockStatistic u_term_on_values(const std::vector<double>& z,
                                std::size_t paths, int k, long n_lo,
                                long n_hi, const LambdaGrid& grid) {
  if (grid.points < 3 || grid.lo <= 0.0 || grid.hi <= grid.lo)
    throw validation_error("bad lambda grid", "lambda_grid");
  const double log_n_hi = std::log(static_cast<double>(n_hi));

  BlockStatistic bs;
  bs.k = k;
  bs.n_lo = n_lo;
  bs.n_hi = n_hi;

  const std::size_t N = z.size() / paths;
  {
    double acc = 0.0;
    for (std::size_t r = 0; r < paths; ++r) {
      double m = 0.0;
      const double* row = z.data() + r * N;
      for (std::size_t j = 0; j < N; ++j) m = std::max(m, std::abs(row[j]));
      acc += m;
    }
    bs.e_sup_z = acc / static_cast<double>(paths);
  }

  // geometric grid scan
  const double ratio = std::pow(grid.hi / grid.lo, 1.0 / (grid.points - 1));
  std::vector<double> lambdas(grid.points), values(grid.points);
  int best = 0;
  for (int i = 0; i < grid.points; ++i) {
    lambdas[i] = grid.lo * std::pow(ratio, i);
    PsiEstimate pe = psi_log_estimate(z, paths, lambdas[i]);
    bs.psi_curve.emplace_back(lambdas[i], pe.log_psi);
    bs.integrability_warning |= pe.integrability_warning;
    values[i] = objective(log_n_hi, pe.log_psi, lambdas[i]);
    if (values[i] < values[best]) best = i;
  }
  bs.cap_active = best == grid.points - 1;

  // one golden-section pass inside the bracketing grid cells
  double a = lambdas[std::max(0, best - 1)];
  double b = lambdas[std::min(grid.points - 1, best + 1)];
  double lam_star = lambdas[best];
  double val_star = values[best];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = objective(log_n_hi, psi_log_estimate(z, paths, x1).log_psi, x1);
  double f2 = objective(log_n_hi, psi_log_estimate(z, paths, x2).log_psi, x2);
  for (int it = 0; it < 40 && (b - a) > 1e-4 * lam_star; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = objective(log_n_hi, psi_log_estimate(z, paths, x1).log_psi, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = objective(log_n_hi, psi_log_estimate(z, paths, x2).log_psi, x2);
    }
    const double xm = f1 <= f2 ? x1 : x2;
    const double fm = std::min(f1, f2);
    if (fm < val_star) {
      val_star = fm;
      lam_star = xm;
    }
  }

  PsiEstimate at_star = psi_log_estimate(z, paths, lam_star);
  bs.lambda_star = lam_star;
  bs.U_value = objective(log_n_hi, at_star.log_psi, lam_star);
  bs.mc_error = at_star.std_err;
  bs.integrability_warning |= at_star.integrability_warning;
  bs.ratio = bs.U_value > 0.0 ? bs.e_sup_z / bs.U_value : 0.0;
  return bs;
}

}  // namespace

BlockStatistic u_term(const PathEnsemble& ens, const DyadicSequence& seq,
                      int k, const LambdaGrid& grid) {
  return u_term_on_values(block_values(ens, seq, k), ens.path_count, k,
                          seq.term(k), seq.term(k + 1), grid);
}

CriterionReport series_check(const PathEnsemble& ens,
                             const DyadicSequence& seq,
                             const LambdaGrid& grid, const VerdictRule& rule) {
  const int blocks = seq.length() - 1;
  if (blocks < 3)
    throw validation_error("series check needs at least 3 blocks",
                           "sequence");
  CriterionReport rep;
  rep.sequence = seq.terms();
  for (int k = 1; k <= blocks; ++k)
    rep.blocks.push_back(u_term(ens, seq, k, grid));

  // suffix sums of clamped U; clamping keeps the tails nonincreasing when a
  // tiny negative U estimate slips through at the lambda cap
  rep.tail_sums.assign(blocks, 0.0);
  double acc = 0.0;
  for (int i = blocks - 1; i >= 0; --i) {
    const double u = rep.blocks[i].U_value;
    if (u < 0.0) ++rep.clamped_terms;
    acc += std::max(u, 0.0);
    rep.tail_sums[i] = acc;
  }

  const double full = rep.tail_sums.front();
  const double last = rep.tail_sums.back();
  const bool decreasing =
      blocks >= 3 && rep.tail_sums[blocks - 3] > rep.tail_sums[blocks - 2] &&
      rep.tail_sums[blocks - 2] > rep.tail_sums[blocks - 1];
  if (decreasing && full > 0.0 && last < rule.converged_tail_frac * full)
    rep.verdict = "series-converging-trend";
  else if (full > 0.0 && last >= rule.diverging_tail_frac * full)
    rep.verdict = "diverging-trend";
  else
    rep.verdict = "inconclusive";
  return rep;
}

EquiconvergenceReport equiconvergence_check(
    const ProcessSpec& spec, const PeriodicGrid& grid,
    const DyadicSequence& seq, const std::vector<long>& n_list,
    std::size_t count, std::uint64_t master_seed,
    const LambdaGrid& lambda_grid, const VerdictRule& rule) {
  if (n_list.empty())
    throw validation_error("n_list must not be empty", "n_list");
  auto sampler = make_sampler(spec, grid, master_seed);

  EquiconvergenceReport rep;
  rep.n_list = n_list;
  std::vector<std::vector<double>> vars;
  for (long n : n_list) {
    PathEnsemble ens = normalized_sum(*sampler, n, count);
    rep.per_n.push_back(series_check(ens, seq, lambda_grid, rule));
    // per-node variance for the stability diagnostic
    const std::size_t N = ens.node_count();
    std::vector<double> v(N, 0.0), mean(N, 0.0);
    for (std::size_t r = 0; r < count; ++r) {
      auto p = ens.path(r);
      for (std::size_t j = 0; j < N; ++j) mean[j] += p[j];
    }
    for (double& m : mean) m /= static_cast<double>(count);
    for (std::size_t r = 0; r < count; ++r) {
      auto p = ens.path(r);
      for (std::size_t j = 0; j < N; ++j)
        v[j] += (p[j] - mean[j]) * (p[j] - mean[j]);
    }
    for (double& x : v) x /= static_cast<double>(count - 1);
    vars.push_back(std::move(v));
  }

  const std::size_t m_count = rep.per_n.front().tail_sums.size();
  rep.sup_tail_sums.assign(m_count, 0.0);
  for (const auto& r : rep.per_n)
    for (std::size_t m = 0; m < m_count; ++m)
      rep.sup_tail_sums[m] = std::max(rep.sup_tail_sums[m], r.tail_sums[m]);

  const double full = rep.sup_tail_sums.front();
  const double last = rep.sup_tail_sums.back();
  const bool decreasing =
      m_count >= 3 &&
      rep.sup_tail_sums[m_count - 3] > rep.sup_tail_sums[m_count - 2] &&
      rep.sup_tail_sums[m_count - 2] > rep.sup_tail_sums[m_count - 1];
  if (decreasing && full > 0.0 && last < rule.converged_tail_frac * full)
    rep.verdict = "series-converging-trend";
  else if (full > 0.0 && last >= rule.diverging_tail_frac * full)
    rep.verdict = "diverging-trend";
  else
    rep.verdict = "inconclusive";

  // variance stability relative to the first n in the list
  const auto& ref = vars.front();
  double worst = 0.0;
  for (const auto& v : vars)
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const double base = std::max(ref[j], 1e-12);
      worst = std::max(worst, std::abs(v[j] - ref[j]) / base);
    }
  rep.variance_stability = worst;
  return rep;
}

namespace {

DecayCheckResult decay_check_impl(
    const std::function<double(long)>& delta_at_pow2, double m, long r_max) {
  if (m <= 1.0) throw validation_error("decay check needs m > 1", "m");
  if (r_max < 8)
    throw validation_error("decay check needs r_max >= 8", "r_max");
  DecayCheckResult res;
  res.m_tilde = std::min(m, 2.0);
  res.m_prime = res.m_tilde / (res.m_tilde - 1.0);

  std::vector<double> terms(r_max + 1, 0.0);
  double prev_delta = 0.0;
  for (long r = 1; r <= r_max; ++r) {
    const double d = delta_at_pow2(r);
    if (d < 0.0)
      throw validation_error("delta must be nonnegative", "delta");
    if (r > 1 && d > prev_delta * (1.0 + 1e-12))
      throw validation_error("delta must be nonincreasing", "delta");
    prev_delta = d;
    terms[r] = d / std::pow(static_cast<double>(r), 1.0 / res.m_tilde);
    res.sum += terms[r];
  }

  // dyadic index windows (2^{j-1}, 2^j]
  std::vector<double> windows;
  for (long hi = 2; hi <= r_max; hi *= 2) {
    double w = 0.0;
    for (long r = hi / 2 + 1; r <= hi; ++r) w += terms[r];
    windows.push_back(w);
  }
  std::vector<double> ratios;
  for (std::size_t j = 1; j < windows.size(); ++j)
    if (windows[j - 1] > 0.0) ratios.push_back(windows[j] / windows[j - 1]);

  if (res.sum == 0.0 || ratios.empty()) {
    res.window_ratio = 0.0;
    res.verdict = "converging-trend";
  } else {
    const std::size_t take = std::min<std::size_t>(4, ratios.size());
    std::vector<double> tail(ratios.end() - take, ratios.end());
    std::sort(tail.begin(), tail.end());
    res.window_ratio = tail[tail.size() / 2];
    res.verdict =
        res.window_ratio <= 0.97 ? "converging-trend" : "diverging-trend";
  }

  double last_q = 0.0;
  for (long r = 3 * r_max / 4 + 1; r <= r_max; ++r) last_q += terms[r];
  res.last_quarter_fraction = res.sum > 0.0 ? last_q / res.sum : 0.0;
  return res;
}

}  // namespace

DecayCheckResult decay_series_check(
    const std::function<double(long)>& delta_at_pow2, double m, long r_max) {
  return decay_check_impl(delta_at_pow2, m, r_max);
}

DecayCheckResult decay_series_check(std::span<const double> delta_table,
                                    double m) {
  for (std::size_t i = 1; i < delta_table.size(); ++i)
    if (delta_table[i] > delta_table[i - 1] * (1.0 + 1e-12))
      throw validation_error("delta table must be nonincreasing", "delta");
  long r_max = 0;
  while ((2L << r_max) <= static_cast<long>(delta_table.size())) ++r_max;
  return decay_check_impl(
      [&](long r) { return delta_table[(1L << r) - 1]; }, m, r_max);
}

std::function<double(long)> log_power_decay(double q) {
  if (q <= 0.0) throw validation_error("log-power exponent must be > 0", "q");
  return [q](long r) {
    const double ln = static_cast<double>(r) * std::log(2.0) +
                      std::log1p(std::exp2(1.0 - static_cast<double>(r)));
    return std::pow(ln, -q);
  };
}

}  // namespace vpclt
