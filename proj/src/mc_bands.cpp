#include "vpclt/mc_bands.hpp"

#include <algorithm>
#include <cmath>

#include "vpclt/parallel.hpp"
#include "vpclt/rng.hpp"

namespace vpclt {

namespace {

double wilson_halfwidth(double p, std::size_t n) {
  if (n == 0) return 0.0;
  const double z = 1.0, z2 = z * z;
  const double nn = static_cast<double>(n);
  const double denom = 1.0 + z2 / nn;
  const double spread =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return spread / denom;
}

// Per-interval bridge variance from the local roughness r_k, the
// conditional variance Var(x_k | x_{k-1}, x_{k+1}). For Brownian paths the
// conditional midpoint variance is h/2, so summing the two flanking
// roughness values recovers the increment variance h exactly; for smooth
// processes the neighbors determine x_k and the bridge terms vanish.
// Marginal increment variances would not distinguish the two: a smooth path
// moves as much as a rough one, it just does so predictably.
std::vector<double> bridge_variances(const std::vector<double>& roughness) {
  const std::size_t nr = roughness.size();  // interior nodes 1..N-2
  if (nr == 0) return {};
  std::vector<double> h(nr + 1);
  for (std::size_t j = 0; j < nr + 1; ++j) {
    const double left = roughness[j == 0 ? 0 : j - 1];
    const double right = roughness[j >= nr ? nr - 1 : j];
    h[j] = std::max(0.0, left + right);
  }
  return h;
}

// residual variance of x_k regressed on (x_{k-1}, x_{k+1}); c provides the
// second moments: caa = Var x_{k-1}, cbb = Var x_{k+1}, etc.
double schur_residual(double ckk, double cka, double ckb, double caa,
                      double cab, double cbb) {
  const double ridge = 1e-12 * std::max(caa + cbb, 1e-300);
  const double a11 = caa + ridge, a22 = cbb + ridge;
  const double det = a11 * a22 - cab * cab;
  if (det <= 0.0) return std::max(0.0, ckk);
  const double b1 = (a22 * cka - cab * ckb) / det;
  const double b2 = (a11 * ckb - cab * cka) / det;
  return std::max(0.0, ckk - b1 * cka - b2 * ckb);
}

std::vector<double> roughness_from_cov(const CovarianceMatrix& cov) {
  const std::size_t N = cov.size();
  if (N < 3) return {};
  std::vector<double> r(N - 2);
  for (std::size_t k = 1; k + 1 < N; ++k)
    r[k - 1] = schur_residual(cov.at(k, k), cov.at(k, k - 1),
                              cov.at(k, k + 1), cov.at(k - 1, k - 1),
                              cov.at(k - 1, k + 1), cov.at(k + 1, k + 1));
  return r;
}

std::vector<double> roughness_from_ensemble(const PathEnsemble& ens) {
  const std::size_t N = ens.node_count(), R = ens.path_count;
  if (N < 3 || R < 3) return {};
  std::vector<double> r(N - 2);
  std::vector<double> mean(N, 0.0);
  for (std::size_t p = 0; p < R; ++p) {
    auto x = ens.path(p);
    for (std::size_t j = 0; j < N; ++j) mean[j] += x[j];
  }
  for (double& m : mean) m /= static_cast<double>(R);
  for (std::size_t k = 1; k + 1 < N; ++k) {
    double ckk = 0, cka = 0, ckb = 0, caa = 0, cab = 0, cbb = 0;
    for (std::size_t p = 0; p < R; ++p) {
      auto x = ens.path(p);
      const double dk = x[k] - mean[k];
      const double da = x[k - 1] - mean[k - 1];
      const double db = x[k + 1] - mean[k + 1];
      ckk += dk * dk;
      cka += dk * da;
      ckb += dk * db;
      caa += da * da;
      cab += da * db;
      cbb += db * db;
    }
    const double inv = 1.0 / static_cast<double>(R - 1);
    r[k - 1] = schur_residual(ckk * inv, cka * inv, ckb * inv, caa * inv,
                              cab * inv, cbb * inv);
  }
  return r;
}

// P(continuum path crosses +-u inside some interval | node values below),
// product of independent Brownian-bridge crossing bounds per interval
double bridge_exceed_prob(std::span<const double> x,
                          std::span<const double> h, double u,
                          bool two_sided) {
  if (h.size() + 1 < x.size()) return 0.0;  // too few nodes for roughness
  double log_stay = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    if (h[j] <= 0.0) continue;
    const double up = -2.0 * (u - x[j]) * (u - x[j + 1]) / h[j];
    if (up > -40.0) log_stay += std::log1p(-std::exp(up));
    if (two_sided) {
      const double dn = -2.0 * (u + x[j]) * (u + x[j + 1]) / h[j];
      if (dn > -40.0) log_stay += std::log1p(-std::exp(dn));
    }
  }
  return -std::expm1(log_stay);
}

}  // namespace

CholFactor cholesky_psd(const CovarianceMatrix& cov) {
  const std::size_t N = cov.size();
  CholFactor cf;
  cf.n = N;
  cf.lower.assign(N * N, 0.0);
  const double max_diag = cov.max_diag();
  if (max_diag == 0.0) return cf;  // zero covariance: zero factor

  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<double>& L = cf.lower;
    std::fill(L.begin(), L.end(), 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < N && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = cov.at(i, j) + (i == j ? jitter : 0.0);
        for (std::size_t k = 0; k < j; ++k) s -= L[i * N + k] * L[j * N + k];
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          L[i * N + i] = std::sqrt(s);
        } else {
          L[i * N + j] = s / L[j * N + j];
        }
      }
    }
    if (ok) {
      cf.jitter_used = jitter;
      return cf;
    }
    jitter = jitter == 0.0 ? 1e-12 * max_diag : jitter * 10.0;
    if (jitter > 1e-6 * max_diag) break;
  }
  throw numeric_error(
      "covariance is not positive semidefinite within the jitter cap "
      "(1e-6 * max diagonal)");
}

PathEnsemble gaussian_limit_sample(const CovarianceMatrix& cov,
                                   std::size_t count,
                                   std::uint64_t master_seed) {
  const CholFactor cf = cholesky_psd(cov);
  const std::size_t N = cf.n;
  PathEnsemble ens;
  ens.nodes = cov.nodes;
  ens.path_count = count;
  ens.master_seed = master_seed;
  ens.data.assign(count * N, 0.0);
  parallel_chunks(count, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> z(N);
    for (std::size_t r = lo; r < hi; ++r) {
      StreamRng rng(master_seed, r);
      for (std::size_t j = 0; j < N; ++j) z[j] = rng.normal();
      double* out = ens.data.data() + r * N;
      for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        const double* Li = cf.lower.data() + i * N;
        for (std::size_t j = 0; j <= i; ++j) s += Li[j] * z[j];
        out[i] = s;
      }
    }
  });
  return ens;
}

namespace {

void validate_u_grid(const std::vector<double>& u) {
  if (u.empty()) throw validation_error("u grid must not be empty", "u_grid");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0) throw validation_error("u grid must be nonnegative");
    if (i > 0 && u[i] <= u[i - 1])
      throw validation_error("u grid must be increasing", "u_grid");
  }
}

TailCurve curve_from_sums(const std::vector<double>& u,
                          const std::vector<double>& acc, std::size_t count) {
  TailCurve c;
  c.u = u;
  c.replicas = count;
  for (double s : acc) {
    const double p = count ? s / static_cast<double>(count) : 0.0;
    c.gamma.push_back(p);
    c.std_err.push_back(wilson_halfwidth(p, count));
  }
  return c;
}

}  // namespace

TailCurve sup_tail(const PathEnsemble& ens, const std::vector<double>& u_grid,
                   const SupOptions& opts) {
  validate_u_grid(u_grid);
  if (ens.path_count == 0)
    throw validation_error("sup_tail needs a nonempty ensemble");
  std::vector<double> h;
  if (opts.bridge_correction)
    h = bridge_variances(roughness_from_ensemble(ens));

  std::vector<double> acc(u_grid.size(), 0.0);
  for (std::size_t r = 0; r < ens.path_count; ++r) {
    auto p = ens.path(r);
    double sup = 0.0;
    for (double v : p) sup = std::max(sup, opts.two_sided ? std::abs(v) : v);
    for (std::size_t ui = 0; ui < u_grid.size(); ++ui) {
      const double u = u_grid[ui];
      if (sup > u)
        acc[ui] += 1.0;
      else if (opts.bridge_correction && u > 0.0)
        acc[ui] += bridge_exceed_prob(p, h, u, opts.two_sided);
    }
  }
  return curve_from_sums(u_grid, acc, ens.path_count);
}

TailCurve gaussian_sup_tail(const CovarianceMatrix& cov, std::size_t count,
                            std::uint64_t master_seed,
                            const std::vector<double>& u_grid, bool two_sided,
                            bool bridge_correction) {
  validate_u_grid(u_grid);
  const CholFactor cf = cholesky_psd(cov);
  const std::size_t N = cf.n;
  const std::vector<double> h = bridge_variances(roughness_from_cov(cov));

  // per-chunk accumulators combined in fixed order
  const std::size_t chunks = chunk_count(count);
  std::vector<std::vector<double>> partial(chunks);
  parallel_chunks(count, [&](std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    while (count * c / chunks != lo) ++c;
    auto& acc = partial[c];
    acc.assign(u_grid.size(), 0.0);
    std::vector<double> z(N), x(N);
    for (std::size_t r = lo; r < hi; ++r) {
      StreamRng rng(master_seed, r);
      for (std::size_t j = 0; j < N; ++j) z[j] = rng.normal();
      for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        const double* Li = cf.lower.data() + i * N;
        for (std::size_t j = 0; j <= i; ++j) s += Li[j] * z[j];
        x[i] = s;
      }
      double sup = 0.0;
      for (double v : x) sup = std::max(sup, two_sided ? std::abs(v) : v);
      for (std::size_t ui = 0; ui < u_grid.size(); ++ui) {
        const double u = u_grid[ui];
        if (sup > u)
          acc[ui] += 1.0;
        else if (bridge_correction && u > 0.0)
          acc[ui] += bridge_exceed_prob(x, h, u, two_sided);
      }
    }
  });
  std::vector<double> acc(u_grid.size(), 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    if (!partial[c].empty())
      for (std::size_t ui = 0; ui < u_grid.size(); ++ui)
        acc[ui] += partial[c][ui];
  return curve_from_sums(u_grid, acc, count);
}

double quantile_U(const TailCurve& curve, double eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw validation_error("eps must lie in (0,1]", "eps");
  if (eps == 1.0) return 0.0;  // gamma(0) <= 1 always
  if (eps * static_cast<double>(curve.replicas) < 100.0)
    throw validation_error(
        "tail resolution too coarse at this eps: need eps * replicas >= 100; "
        "increase the replica count",
        "replicas");
  const std::size_t n = curve.u.size();
  // maximal root: scan from the largest u downward for the last crossing
  if (curve.gamma.front() <= eps) return curve.u.front();
  for (std::size_t i = n; i-- > 1;) {
    const double g_hi = curve.gamma[i], g_lo = curve.gamma[i - 1];
    if (g_lo >= eps && g_hi <= eps) {
      if (g_lo == g_hi) return curve.u[i];
      const double w = (g_lo - eps) / (g_lo - g_hi);
      return curve.u[i - 1] + w * (curve.u[i] - curve.u[i - 1]);
    }
  }
  return curve.u.back();  // curve never drops below eps: report the cap
}

TailFit tail_fit(const TailCurve& curve, double sigma2) {
  if (sigma2 <= 0.0) throw validation_error("sigma2 must be positive");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.u.size(); ++i) {
    const double g = curve.gamma[i];
    if (g >= 1e-4 && g <= 1e-1 && curve.u[i] > 0.0) {
      xs.push_back(std::log(curve.u[i]));
      ys.push_back(std::log(g) + curve.u[i] * curve.u[i] / (2.0 * sigma2));
    }
  }
  if (xs.size() < 5)
    throw validation_error(
        "tail fit needs at least 5 curve points with gamma in [1e-4, 1e-1]",
        "curve");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double m = static_cast<double>(xs.size());
  const double slope = (sxy - sx * sy / m) / (sxx - sx * sx / m);
  const double icpt = (sy - slope * sx) / m;
  TailFit f;
  f.kappa_minus_1 = slope;
  f.K = std::exp(icpt);
  f.points_used = xs.size();
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (icpt + slope * xs[i]);
    sse += e * e;
  }
  f.rmse = std::sqrt(sse / m);
  return f;
}

double BetaSpec::draw(StreamRng& rng) const {
  return kind == Kind::uniform ? rng.uniform(a, b) : mu + sd * rng.normal();
}

BandResult param_integral_band(
    const std::function<double(double, double)>& integrand,
    const BetaSpec& beta, const BandConfig& cfg, std::uint64_t master_seed) {
  if (cfg.n < 1) throw validation_error("band needs n >= 1", "band.n");
  PeriodicGrid grid(cfg.grid_size);
  const std::vector<double> t = grid.nodes();
  const std::size_t N = t.size();

  // dedicated streams: 0 = I_n draws, 1 = pilot, 2 = reference; Gaussian
  // replicas use per-path streams under a shifted master seed
  BandResult res;
  res.epsilon = cfg.epsilon;
  res.n = cfg.n;
  res.t_nodes = t;

  res.I_n.assign(N, 0.0);
  {
    StreamRng rng(master_seed, 0);
    for (std::size_t j = 0; j < cfg.n; ++j) {
      const double b = beta.draw(rng);
      for (std::size_t i = 0; i < N; ++i) res.I_n[i] += integrand(t[i], b);
    }
    for (double& v : res.I_n) v /= static_cast<double>(cfg.n);
  }

  // pilot ensemble of eta(t) = v(t, beta) - I(t) for the limit covariance
  PathEnsemble pilot;
  pilot.nodes = t;
  pilot.path_count = cfg.pilot;
  pilot.data.resize(cfg.pilot * N);
  {
    StreamRng rng(master_seed, 1);
    for (std::size_t r = 0; r < cfg.pilot; ++r) {
      const double b = beta.draw(rng);
      for (std::size_t i = 0; i < N; ++i)
        pilot.path(r)[i] = integrand(t[i], b);
    }
  }
  CovarianceMatrix cov = empirical_covariance(pilot);
  res.sigma2_hat = cov.max_diag();
  res.chol_jitter = cholesky_psd(cov).jitter_used;

  // variance at roundoff scale relative to the integrand means eta == 0
  double scale2 = 0.0;
  for (std::size_t r = 0; r < cfg.pilot; ++r)
    for (double v : pilot.path(r)) scale2 = std::max(scale2, v * v);
  if (res.sigma2_hat <= 1e-20 * std::max(scale2, 1e-300)) {
    // integrand independent of beta: zero-width band
    res.U_eps = 0.0;
    res.band_halfwidth = 0.0;
  } else {
    const double sd = std::sqrt(res.sigma2_hat);
    std::vector<double> u_grid;
    for (double u = 0.05 * sd; u <= 6.0 * sd; u += 0.05 * sd)
      u_grid.push_back(u);
    res.tail_curve = gaussian_sup_tail(cov, cfg.replicas,
                                       master_seed + 0x9e1, u_grid, true, true);
    res.U_eps = quantile_U(res.tail_curve, cfg.epsilon);
    res.band_halfwidth = res.U_eps / std::sqrt(static_cast<double>(cfg.n));
  }

  // reference truth: high-N Monte-Carlo value of I(t)
  res.I_ref.assign(N, 0.0);
  {
    StreamRng rng(master_seed, 2);
    const std::size_t big = cfg.n * cfg.ref_factor;
    for (std::size_t j = 0; j < big; ++j) {
      const double b = beta.draw(rng);
      for (std::size_t i = 0; i < N; ++i) res.I_ref[i] += integrand(t[i], b);
    }
    for (double& v : res.I_ref) v /= static_cast<double>(big);
  }
  return res;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw validation_error("KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }
  return d;
}

CltTestResult clt_empirical_test(const ProcessSpec& spec,
                                 const PeriodicGrid& grid, long n,
                                 std::size_t replicas,
                                 std::uint64_t master_seed, double threshold) {
  if (n < 1) throw validation_error("clt test needs n >= 1", "n");
  auto sampler = make_sampler(spec, grid, master_seed);
  PathEnsemble zeta = normalized_sum(*sampler, n, replicas);

  std::vector<double> sup_zeta(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    double s = 0.0;
    for (double v : zeta.path(r)) s = std::max(s, std::abs(v));
    sup_zeta[r] = s;
  }

  CovarianceMatrix cov = empirical_covariance(zeta);
  const std::size_t N = cov.size();
  const CholFactor cf = cholesky_psd(cov);
  std::vector<double> sup_gauss(replicas);
  parallel_chunks(replicas, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> z(N);
    for (std::size_t r = lo; r < hi; ++r) {
      StreamRng rng(master_seed + 0x5eedu, r);
      for (std::size_t j = 0; j < N; ++j) z[j] = rng.normal();
      double sup = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        const double* Li = cf.lower.data() + i * N;
        for (std::size_t j = 0; j <= i; ++j) s += Li[j] * z[j];
        sup = std::max(sup, std::abs(s));
      }
      sup_gauss[r] = sup;
    }
  });

  CltTestResult res;
  res.threshold = threshold;
  res.replicas = replicas;
  res.n = n;
  res.ks_distance = ks_two_sample(sup_zeta, sup_gauss);
  res.pass = res.ks_distance < threshold;
  return res;
}

CovarianceMatrix wiener_covariance(std::size_t nodes) {
  if (nodes < 1) throw validation_error("need at least one node");
  CovarianceMatrix cov;
  cov.nodes.resize(nodes);
  cov.entries.assign(nodes * nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    cov.nodes[i] = static_cast<double>(i + 1) / static_cast<double>(nodes);
    for (std::size_t j = 0; j < nodes; ++j)
      cov.entries[i * nodes + j] = std::min(cov.nodes[i],
                                            (j + 1.0) / nodes);
  }
  return cov;
}

}  // namespace vpclt
