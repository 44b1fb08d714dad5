#include "vpclt/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vpclt/rng.hpp"

namespace vpclt {

MetricSample::MetricSample(std::size_t n, std::vector<double> dist)
    : n_(n), d_(std::move(dist)) {
  if (n == 0 || d_.size() != n * n)
    throw validation_error("distance matrix must be n x n", "metric");
  std::size_t violations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d_[i * n + i] != 0.0) ++violations;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d_[i * n + j] < 0.0 || d_[i * n + j] != d_[j * n + i]) ++violations;
    }
  }
  const double tol = 1e-9;
  auto check_triple = [&](std::size_t i, std::size_t j, std::size_t k) {
    if (d_[i * n + j] > d_[i * n + k] + d_[k * n + j] + tol) ++violations;
  };
  if (n <= 500) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) check_triple(i, j, k);
  } else {
    StreamRng rng(0x7a61u, n);  // deterministic triple sample
    for (std::size_t t = 0; t < 2000000; ++t) {
      const std::size_t i = rng.next_u64() % n;
      const std::size_t j = rng.next_u64() % n;
      const std::size_t k = rng.next_u64() % n;
      check_triple(i, j, k);
    }
  }
  if (violations > 0)
    throw validation_error("metric validation failed: " +
                               std::to_string(violations) + " violation(s)",
                           "metric");
}

double MetricSample::diameter() const {
  double d = 0.0;
  for (double v : d_) d = std::max(d, v);
  return d;
}

CoverCount covering_number(const MetricSample& ms, double eps) {
  if (eps <= 0.0) throw validation_error("eps must be positive", "eps");
  const std::size_t n = ms.size();
  CoverCount cc;

  // eccentricity for tie-breaking
  std::vector<double> ecc(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ecc[i] = std::max(ecc[i], ms.at(i, j));

  if (n <= 12) {
    // exhaustively solvable: return the true optimum
    std::vector<unsigned> ball(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (ms.at(i, j) <= eps) ball[i] |= 1u << j;
    const unsigned all = n == 32 ? ~0u : (1u << n) - 1;
    std::size_t best = n;
    for (unsigned sub = 1; sub <= all; ++sub) {
      unsigned cov = 0;
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (sub & (1u << i)) {
          cov |= ball[i];
          ++cnt;
        }
      if (cov == all && cnt < best) best = cnt;
    }
    cc.greedy_cover = best;
  } else {
    std::vector<char> covered(n, 0);
    std::size_t remaining = n;
    while (remaining > 0) {
      std::size_t best = n;
      std::size_t best_gain = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t gain = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (!covered[j] && ms.at(i, j) <= eps) ++gain;
        if (gain > best_gain ||
            (gain == best_gain && gain > 0 && best < n && ecc[i] > ecc[best])) {
          best_gain = gain;
          best = i;
        }
      }
      for (std::size_t j = 0; j < n; ++j)
        if (!covered[j] && ms.at(best, j) <= eps) {
          covered[j] = 1;
          --remaining;
        }
      ++cc.greedy_cover;
    }
  }

  // maximal separated sets by descending-eccentricity scan
  auto packing = [&](double sep) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return ecc[a] > ecc[b];
                     });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
      bool ok = true;
      for (std::size_t k : kept)
        if (ms.at(idx, k) <= sep) {
          ok = false;
          break;
        }
      if (ok) kept.push_back(idx);
    }
    return kept.size();
  };
  cc.packing_eps = packing(eps);
  cc.packing_2eps = packing(2.0 * eps);
  return cc;
}

EntropyProfile entropy_profile(const MetricSample& ms,
                               const std::vector<double>& eps_grid) {
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (eps_grid[i] >= eps_grid[i - 1])
      throw validation_error("eps grid must be decreasing", "eps_grid");
  EntropyProfile p;
  std::size_t running = 1;
  for (double e : eps_grid) {
    CoverCount cc = covering_number(ms, e);
    p.eps.push_back(e);
    p.n_greedy.push_back(cc.greedy_cover);
    p.n_packing.push_back(cc.packing_2eps);
    if (cc.greedy_cover < running)
      ++p.monotonicity_fixups;  // counted, profile keeps the running max
    running = std::max(running, cc.greedy_cover);
    p.H.push_back(std::log(static_cast<double>(running)));
  }
  return p;
}

EntropyProfile analytic_profile(std::vector<double> eps,
                                std::vector<double> H) {
  if (eps.size() != H.size() || eps.size() < 2)
    throw validation_error("profile arrays mismatch", "profile");
  EntropyProfile p;
  p.eps = std::move(eps);
  p.H = std::move(H);
  return p;
}

namespace {

struct LinFit {
  double slope = 0, intercept = 0, r2 = 0;
  bool valid = false;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinFit f;
  const std::size_t n = x.size();
  if (n < 3) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double m = static_cast<double>(n);
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double vxy = sxy - sx * sy / m;
  if (vx <= 0) return f;
  f.slope = vxy / vx;
  f.intercept = (sy - f.slope * sx) / m;
  f.r2 = vy > 0 ? vxy * vxy / (vx * vy) : 1.0;
  f.valid = true;
  return f;
}

}  // namespace

DudleyResult dudley_check(const EntropyProfile& profile) {
  const std::size_t n = profile.eps.size();
  if (n < 4) throw validation_error("profile too short", "profile");
  const double eps_max = profile.eps.front(), eps_min = profile.eps.back();
  if (!(eps_max / eps_min >= 100.0))
    throw validation_error("profile must cover at least two decades of eps",
                           "profile");

  DudleyResult res;

  // trapezoid over the sampled range, ascending in z
  for (std::size_t i = n - 1; i > 0; --i) {
    const double z0 = profile.eps[i], z1 = profile.eps[i - 1];
    const double h0 = std::sqrt(std::max(0.0, profile.H[i]));
    const double h1 = std::sqrt(std::max(0.0, profile.H[i - 1]));
    res.integral_estimate += 0.5 * (h0 + h1) * (z1 - z0);
  }

  // fit points: last decade of eps with H > 0 (log H defined)
  std::vector<double> zs, lhs;
  for (std::size_t i = 0; i < n; ++i)
    if (profile.eps[i] <= 10.0 * eps_min && profile.H[i] > 0.0) {
      zs.push_back(profile.eps[i]);
      lhs.push_back(std::log(profile.H[i]));
    }

  // (i) polylog: log H = b log log(1/z) + log K
  {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < zs.size(); ++i)
      if (zs[i] < 1.0 && std::log(1.0 / zs[i]) > 0.0) {
        x.push_back(std::log(std::log(1.0 / zs[i])));
        y.push_back(lhs[i]);
      }
    LinFit f = linear_fit(x, y);
    res.polylog_fit.form = "polylog";
    res.polylog_fit.slope = f.slope;
    res.polylog_fit.intercept = f.intercept;
    res.polylog_fit.r2 = f.r2;
    res.polylog_fit.valid = f.valid && f.slope >= 0.0;
  }

  // (ii) exponential: log H = beta z^-a + alpha, a on a geometric grid
  {
    GrowthFit best;
    best.form = "exp";
    for (int ai = 0; ai < 60; ++ai) {
      const double a = 0.01 * std::pow(300.0, ai / 59.0);  // 0.01 .. 3
      std::vector<double> x(zs.size());
      for (std::size_t i = 0; i < zs.size(); ++i) x[i] = std::pow(zs[i], -a);
      LinFit f = linear_fit(x, lhs);
      if (f.valid && f.slope > 0.0 && (!best.valid || f.r2 > best.r2)) {
        best.valid = true;
        best.slope = f.slope;
        best.intercept = f.intercept;
        best.r2 = f.r2;
        best.a = a;
      }
    }
    res.exp_fit = best;
  }

  // extrapolate the winner below eps_min; 10x rule decides the trend
  const bool exp_wins =
      res.exp_fit.valid &&
      (!res.polylog_fit.valid || res.exp_fit.r2 > res.polylog_fit.r2);
  res.winner = exp_wins ? "exp" : (res.polylog_fit.valid ? "polylog" : "none");

  const double budget = 10.0 * std::max(res.integral_estimate, 1e-300);
  double rem = 0.0;
  if (res.winner != "none") {
    // log-spaced quadrature of sqrt(H_fit) over (eps_min*1e-8, eps_min)
    const int steps = 400;
    double z_hi = eps_min;
    for (int s = 0; s < steps && rem < budget; ++s) {
      const double z_lo = eps_min * std::pow(1e-8, (s + 1.0) / steps);
      auto fit_sqrt_h = [&](double z) {
        double log_h;
        if (exp_wins)
          log_h = res.exp_fit.intercept +
                  res.exp_fit.slope * std::pow(z, -res.exp_fit.a);
        else
          log_h = res.polylog_fit.intercept +
                  res.polylog_fit.slope * std::log(std::log(1.0 / z));
        return std::exp(0.5 * log_h);
      };
      const double v_lo = fit_sqrt_h(z_lo), v_hi = fit_sqrt_h(z_hi);
      if (!std::isfinite(v_lo) || !std::isfinite(v_hi)) {
        rem = std::numeric_limits<double>::infinity();
        break;
      }
      rem += 0.5 * (v_lo + v_hi) * (z_hi - z_lo);
      z_hi = z_lo;
    }
  }
  res.extrapolated_remainder = rem;
  res.trend = rem > budget ? "diverging-trend" : "finite-trend";
  return res;
}

namespace {

// text-form iterated-log exponent: tau_0(t,0) = 2^{-1/2} L^{-(1+delta)},
// L = log|log t|; ball B(0,eps) has mu = exp(-exp(ell(eps))) with
// ell(eps) = (2^{-1/2}/eps)^{1/(1+delta)}
double chain_ell(double eps, double delta) {
  return std::pow(std::sqrt(0.5) / eps, 1.0 / (1.0 + delta));
}

}  // namespace

Probe41Report example41_probe(double delta, std::size_t node_count) {
  if (!(delta > 0.0 && delta < 0.25))
    throw validation_error("probe requires delta in (0, 1/4)", "delta");
  if (node_count < 16)
    throw validation_error("probe needs at least 16 nodes", "node_count");

  Probe41Report rep;
  rep.delta = delta;
  rep.node_count = node_count;
  const double opd = 1.0 + delta;

  // --- sampled node metric over double-representable depths ---
  // depth variable s = |log t|, log-spaced on [4.5, 1e300]; node 0 is t = 0.
  // Var eta0(t) = 1/(2 L^{1+delta}) with L = log s, correlations
  // corr(t_i, t_j) = sqrt(t_j / t_i) = exp(-(s_j - s_i)/2) for t_j < t_i.
  const std::size_t m = node_count;
  std::vector<double> s(m), L(m), v(m), t(m);
  const double s_lo = std::log(4.5), s_hi = std::log(1e300);
  for (std::size_t i = 0; i < m; ++i) {
    s[i] = std::exp(s_lo + (s_hi - s_lo) * i / (m - 1));
    L[i] = std::log(s[i]);
    v[i] = 0.5 / std::pow(L[i], opd);
    t[i] = std::exp(-s[i]);
  }
  const std::size_t n = m + 1;  // + the point t = 0 (index m)
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double corr = std::exp(-0.5 * (s[j] - s[i]));
      const double rad =
          v[i] + v[j] - 2.0 * corr * std::sqrt(v[i] * v[j]);
      const double d = std::sqrt(std::max(0.0, rad));
      dist[i * n + j] = dist[j * n + i] = d;
    }
    dist[i * n + m] = dist[m * n + i] = std::sqrt(v[i]);
  }
  MetricSample ms(n, std::move(dist));

  // variance-exponent check: log tau(t,0) vs log L has slope -(1+delta)/2
  {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < m; i += std::max<std::size_t>(1, m / 48)) {
      xs.push_back(std::log(L[i]));
      ys.push_back(std::log(ms.at(i, m)));
    }
    LinFit f = linear_fit(xs, ys);
    rep.variance_exponent_fit = f.slope;
  }

  // sampled covering profile on the representable range
  {
    const double diam = ms.diameter();
    const double lo = ms.at(m - 1, m) * 0.9;  // deepest node radius
    std::vector<double> grid;
    for (double e = diam * 1.02; e > lo; e *= 0.86) grid.push_back(e);
    rep.sampled = entropy_profile(ms, grid);
  }

  // ball-volume ratio inequality exp(H) >= mu(T)/h_+(eps) on the node set:
  // node cells partition (0, e^-4] at midpoints in t
  {
    std::vector<double> cell(n, 0.0);
    // t is decreasing in i; cell of node i spans the midpoints around it
    for (std::size_t i = 0; i < m; ++i) {
      const double hi_edge = i == 0 ? std::exp(-4.0) : 0.5 * (t[i - 1] + t[i]);
      const double lo_edge = i + 1 < m ? 0.5 * (t[i] + t[i + 1]) : 0.0;
      cell[i] = std::max(0.0, hi_edge - lo_edge);
    }
    double mu_total = 0.0;
    for (double c : cell) mu_total += c;
    rep.ball_ratio_ok = true;
    rep.ball_ratio_margin = std::numeric_limits<double>::infinity();
    for (std::size_t gi = 0; gi < rep.sampled.eps.size(); ++gi) {
      const double e = rep.sampled.eps[gi];
      double h_plus = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double ball = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (ms.at(i, j) <= e) ball += cell[j];
        h_plus = std::max(h_plus, ball);
      }
      if (h_plus <= 0.0) continue;
      const double lhs_ratio =
          std::exp(rep.sampled.H[gi]) * h_plus / mu_total;
      rep.ball_ratio_margin = std::min(rep.ball_ratio_margin, lhs_ratio);
      if (lhs_ratio < 1.0 - 1e-9) rep.ball_ratio_ok = false;
    }
  }

  // --- analytic ball-volume chain: H = log( mu(T) / mu(B(0,eps)) ) = e^ell - 4
  {
    // eps_min keeps exp(ell) within double range
    const double ell_cap = 700.0;
    const double eps_min =
        std::sqrt(0.5) / std::pow(ell_cap, opd);
    const double eps_max = std::sqrt(0.5) / std::pow(std::log(4.5), opd) * 1.1;
    std::vector<double> eps, H;
    const int pts = 121;
    for (int i = 0; i < pts; ++i) {
      const double e =
          eps_max * std::pow(eps_min / eps_max, i / (pts - 1.0));
      eps.push_back(e);
      H.push_back(std::max(0.0, std::exp(chain_ell(e, delta)) - 4.0));
    }
    rep.chain = analytic_profile(std::move(eps), std::move(H));
    rep.dudley = dudley_check(rep.chain);

    // chain growth fit: log H linear in eps^{-1/(1+delta)}
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.chain.eps.size(); ++i)
      if (rep.chain.H[i] > std::exp(1.0)) {
        xs.push_back(std::pow(rep.chain.eps[i], -1.0 / opd));
        ys.push_back(std::log(rep.chain.H[i]));
      }
    LinFit f = linear_fit(xs, ys);
    rep.chain_fit_slope = f.slope;
    rep.chain_fit_r2 = f.r2;
  }

  rep.discrepancy_note =
      "the chain substitutes the origin ball for the supremum h_+, so it is "
      "a heuristic lower-bound route, not the two-sided inequality (which "
      "the node-set check reports honestly); the chain uses the iterated-log "
      "distance tau_0(t,0) ~ 2^{-1/2} (log|log t|)^{-(1+delta)}, while the "
      "sampled variance decays with exponent -(1+delta)/2; both exponents "
      "are reported, the mismatch is not resolved";
  return rep;
}

}  // namespace vpclt
