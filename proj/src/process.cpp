#include "vpclt/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vpclt/parallel.hpp"
#include "vpclt/rng.hpp"

namespace vpclt {

void ProcessSpec::validate() const {
  switch (kind) {
    case ProcessKind::eta0:
      if (!(delta > 0.0 && delta < 0.25))
        throw validation_error("eta0 requires delta in (0, 1/4)",
                               "process.delta");
      if (eta0_nodes < 2)
        throw validation_error("eta0 needs at least 2 nodes",
                               "process.eta0_nodes");
      if (!(eta0_tmin > 0.0 && eta0_tmin < std::exp(-4.0)))
        throw validation_error("eta0_tmin must lie in (0, e^-4)",
                               "process.eta0_tmin");
      break;
    case ProcessKind::random_trig:
      if (max_degree < 1)
        throw validation_error("random_trig needs max_degree >= 1",
                               "process.max_degree");
      if (!sigmas.empty() &&
          sigmas.size() != static_cast<std::size_t>(max_degree))
        throw validation_error("sigmas must have max_degree entries",
                               "process.sigmas");
      break;
    case ProcessKind::sequence_example: {
      if (!(p0 > 1.0 && p0 < 2.0))
        throw validation_error("sequence example requires p0 in (1,2)",
                               "process.p0");
      const double amax = std::min(1.0, p0 / (2.0 - p0));
      if (!(alpha > 0.0 && alpha < amax))
        throw validation_error(
            "sequence example requires alpha in (0, min(1, p0/(2-p0)))",
            "process.alpha");
      if (n_max < 2)
        throw validation_error("n_max must be >= 2", "process.n_max");
      break;
    }
    case ProcessKind::user_table:
      if (table_nodes.empty() || table_data.empty() ||
          table_data.size() % table_nodes.size() != 0)
        throw validation_error("user table shape mismatch", "process.table");
      break;
    case ProcessKind::wiener:
      break;
  }
}

ProcessSpec ProcessSpec::wiener_spec() {
  ProcessSpec s;
  s.kind = ProcessKind::wiener;
  return s;
}

ProcessSpec ProcessSpec::eta0_spec(double delta, int nodes, double tmin) {
  ProcessSpec s;
  s.kind = ProcessKind::eta0;
  s.delta = delta;
  s.eta0_nodes = nodes;
  s.eta0_tmin = tmin;
  s.validate();
  return s;
}

ProcessSpec ProcessSpec::random_trig_spec(int max_degree, CoefficientLaw law,
                                          std::vector<double> sigmas) {
  ProcessSpec s;
  s.kind = ProcessKind::random_trig;
  s.max_degree = max_degree;
  s.law = law;
  s.sigmas = std::move(sigmas);
  s.validate();
  return s;
}

ProcessSpec ProcessSpec::sequence_spec(double alpha, double p0, int n_max) {
  ProcessSpec s;
  s.kind = ProcessKind::sequence_example;
  s.alpha = alpha;
  s.p0 = p0;
  s.n_max = n_max;
  s.validate();
  return s;
}

void ProcessSampler::accumulate_paths(std::uint64_t first, std::uint64_t count,
                                      double scale,
                                      std::span<double> out) const {
  std::vector<double> tmp(nodes_.size());
  for (std::uint64_t q = 0; q < count; ++q) {
    fill_path(first + q, tmp);
    for (std::size_t j = 0; j < tmp.size(); ++j) out[j] += scale * tmp[j];
  }
}

namespace {

class WienerSampler final : public ProcessSampler {
 public:
  WienerSampler(const PeriodicGrid& grid, std::uint64_t seed)
      : ProcessSampler(grid.nodes(), seed), step_(grid.step()) {}

  void fill_path(std::uint64_t r, std::span<double> out) const override {
    StreamRng rng(master_seed_, r);
    const double sd = std::sqrt(step_);
    double w = 0.0;
    out[0] = 0.0;  // t_0 = 0
    for (std::size_t j = 1; j < out.size(); ++j) {
      w += sd * rng.normal();
      out[j] = w;
    }
  }

 private:
  double step_;
};

class Eta0Sampler final : public ProcessSampler {
 public:
  Eta0Sampler(const ProcessSpec& spec, std::uint64_t seed)
      : ProcessSampler(make_nodes(spec), seed), delta_(spec.delta) {
    // normalizer g(t) = sqrt(2t) * (log|log t|)^{(1+delta)/2}; node 0 excluded
    inv_norm_.resize(nodes_.size(), 0.0);
    for (std::size_t j = 1; j < nodes_.size(); ++j) {
      const double t = nodes_[j];
      const double ll = std::log(std::abs(std::log(t)));
      inv_norm_[j] =
          1.0 / (std::sqrt(2.0 * t) * std::pow(ll, 0.5 * (1.0 + delta_)));
    }
  }

  void fill_path(std::uint64_t r, std::span<double> out) const override {
    StreamRng rng(master_seed_, r);
    out[0] = 0.0;  // eta0(0) := 0
    double w = 0.0, t_prev = 0.0;
    for (std::size_t j = 1; j < out.size(); ++j) {
      const double t = nodes_[j];
      w += std::sqrt(t - t_prev) * rng.normal();
      t_prev = t;
      out[j] = w * inv_norm_[j];
    }
  }

 private:
  static std::vector<double> make_nodes(const ProcessSpec& spec) {
    // {0} followed by log-spaced t in [tmin, e^-4]
    std::vector<double> n;
    n.push_back(0.0);
    const double lo = std::log(spec.eta0_tmin), hi = -4.0;
    for (int i = 0; i < spec.eta0_nodes; ++i)
      n.push_back(std::exp(lo + (hi - lo) * i / (spec.eta0_nodes - 1)));
    return n;
  }

  double delta_;
  std::vector<double> inv_norm_;
};

class RandomTrigSampler final : public ProcessSampler {
 public:
  RandomTrigSampler(const ProcessSpec& spec, const PeriodicGrid& grid,
                    std::uint64_t seed)
      : ProcessSampler(grid.nodes(), seed),
        degree_(spec.max_degree),
        law_(spec.law),
        sigmas_(spec.sigmas) {
    if (sigmas_.empty())
      sigmas_.assign(degree_, 1.0 / std::sqrt(static_cast<double>(degree_)));
    const int N = grid.size();
    cos_table_.resize(static_cast<std::size_t>(degree_) * N);
    sin_table_.resize(static_cast<std::size_t>(degree_) * N);
    for (int k = 1; k <= degree_; ++k)
      for (int j = 0; j < N; ++j) {
        cos_table_[(k - 1) * static_cast<std::size_t>(N) + j] =
            std::cos(k * grid.node(j));
        sin_table_[(k - 1) * static_cast<std::size_t>(N) + j] =
            std::sin(k * grid.node(j));
      }
  }

  void draw_coeffs(std::uint64_t r, std::span<double> a,
                   std::span<double> b) const {
    StreamRng rng(master_seed_, r);
    const double half_width = std::sqrt(3.0);  // unit-variance uniform
    for (int k = 0; k < degree_; ++k) {
      if (law_ == CoefficientLaw::gaussian) {
        a[k] = sigmas_[k] * rng.normal();
        b[k] = sigmas_[k] * rng.normal();
      } else {
        a[k] = sigmas_[k] * rng.uniform(-half_width, half_width);
        b[k] = sigmas_[k] * rng.uniform(-half_width, half_width);
      }
    }
  }

  void fill_path(std::uint64_t r, std::span<double> out) const override {
    std::vector<double> a(degree_), b(degree_);
    draw_coeffs(r, a, b);
    synthesize_into(a, b, 1.0, out, /*overwrite=*/true);
  }

  // coefficient-space accumulation: sum the coefficients, synthesize once
  void accumulate_paths(std::uint64_t first, std::uint64_t count, double scale,
                        std::span<double> out) const override {
    std::vector<double> a(degree_, 0.0), b(degree_, 0.0);
    std::vector<double> ap(degree_), bp(degree_);
    for (std::uint64_t q = 0; q < count; ++q) {
      draw_coeffs(first + q, ap, bp);
      for (int k = 0; k < degree_; ++k) {
        a[k] += ap[k];
        b[k] += bp[k];
      }
    }
    synthesize_into(a, b, scale, out, /*overwrite=*/false);
  }

 private:
  void synthesize_into(std::span<const double> a, std::span<const double> b,
                       double scale, std::span<double> out,
                       bool overwrite) const {
    const std::size_t N = out.size();
    if (overwrite) std::fill(out.begin(), out.end(), 0.0);
    for (int k = 0; k < degree_; ++k) {
      const double* ct = cos_table_.data() + static_cast<std::size_t>(k) * N;
      const double* st = sin_table_.data() + static_cast<std::size_t>(k) * N;
      const double ak = scale * a[k], bk = scale * b[k];
      for (std::size_t j = 0; j < N; ++j) out[j] += ak * ct[j] + bk * st[j];
    }
  }

  int degree_;
  CoefficientLaw law_;
  std::vector<double> sigmas_;
  std::vector<double> cos_table_, sin_table_;
};

class SequenceSampler final : public ProcessSampler {
 public:
  SequenceSampler(const ProcessSpec& spec, std::uint64_t seed)
      : ProcessSampler(make_nodes(spec.n_max), seed),
        alpha_(spec.alpha),
        p0_(spec.p0),
        n_max_(spec.n_max) {
    a_.resize(n_max_ + 2);
    for (long n = 1; n <= n_max_ + 1; ++n)
      a_[n] = 1.0 - 0.5 * std::pow(static_cast<double>(n), -alpha_);
  }

  double a_of(long n) const { return a_[n]; }

  void fill_path(std::uint64_t r, std::span<double> out) const override {
    StreamRng rng(master_seed_, r);
    std::fill(out.begin(), out.end(), 0.0);
    const double x = rng.uniform01();
    // intervals [a(n), a(n+1)) are disjoint; at most one coordinate is hit
    if (x < a_[1] || x >= a_[n_max_ + 1]) return;
    const long n = locate(x);
    const double dn = a_[n + 1] - a_[n];
    const double y = (x - a_[n]) / dn;
    if (y <= 0.0 || y >= 1.0) return;
    const double f = std::sqrt(std::abs(std::log(y)));
    const double c = std::pow(static_cast<double>(n), alpha_ / p0_);
    out[n - 1] = c * rng.rademacher() * f;  // node index n-1 holds coord n
  }

  bool beyond_truncation(std::uint64_t r) const {
    StreamRng rng(master_seed_, r);
    return rng.uniform01() >= a_[n_max_ + 1];
  }

 private:
  static std::vector<double> make_nodes(long n_max) {
    std::vector<double> n(n_max + 1);
    for (long i = 1; i <= n_max; ++i) n[i - 1] = static_cast<double>(i);
    n[n_max] = std::numeric_limits<double>::infinity();  // eta_inf = 0
    return n;
  }

  long locate(double x) const {
    long lo = 1, hi = n_max_;
    while (lo < hi) {  // largest n with a(n) <= x
      const long mid = (lo + hi + 1) / 2;
      if (a_[mid] <= x)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  double alpha_, p0_;
  long n_max_;
  std::vector<double> a_;
};

class TableSampler final : public ProcessSampler {
 public:
  TableSampler(const ProcessSpec& spec, std::uint64_t seed)
      : ProcessSampler(spec.table_nodes, seed),
        data_(spec.table_data),
        rows_(spec.table_data.size() / spec.table_nodes.size()) {}

  void fill_path(std::uint64_t r, std::span<double> out) const override {
    const std::size_t row = r % rows_;  // cycles over supplied realizations
    const double* src = data_.data() + row * nodes_.size();
    std::copy(src, src + nodes_.size(), out.begin());
  }

 private:
  std::vector<double> data_;
  std::size_t rows_;
};

}  // namespace

std::unique_ptr<ProcessSampler> make_sampler(const ProcessSpec& spec,
                                             const PeriodicGrid& grid,
                                             std::uint64_t master_seed) {
  spec.validate();
  switch (spec.kind) {
    case ProcessKind::wiener:
      return std::make_unique<WienerSampler>(grid, master_seed);
    case ProcessKind::eta0:
      return std::make_unique<Eta0Sampler>(spec, master_seed);
    case ProcessKind::random_trig:
      return std::make_unique<RandomTrigSampler>(spec, grid, master_seed);
    case ProcessKind::sequence_example:
      return std::make_unique<SequenceSampler>(spec, master_seed);
    case ProcessKind::user_table:
      return std::make_unique<TableSampler>(spec, master_seed);
  }
  throw validation_error("unknown process kind", "process.kind");
}

PathEnsemble sample(const ProcessSampler& sampler, std::size_t count) {
  PathEnsemble ens;
  ens.nodes = sampler.nodes();
  ens.path_count = count;
  ens.master_seed = sampler.master_seed();
  ens.data.resize(count * ens.nodes.size());
  parallel_chunks(count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) sampler.fill_path(r, ens.path(r));
  });
  return ens;
}

PathEnsemble sample(const ProcessSpec& spec, const PeriodicGrid& grid,
                    std::size_t count, std::uint64_t master_seed) {
  return sample(*make_sampler(spec, grid, master_seed), count);
}

PathEnsemble normalized_sum(const ProcessSampler& base, long n,
                            std::size_t count) {
  if (n < 1) throw validation_error("normalized sum needs n >= 1", "n");
  PathEnsemble ens;
  ens.nodes = base.nodes();
  ens.path_count = count;
  ens.master_seed = base.master_seed();
  ens.data.assign(count * ens.nodes.size(), 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  parallel_chunks(count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r)
      base.accumulate_paths(static_cast<std::uint64_t>(r) * n, n, scale,
                            ens.path(r));
  });
  return ens;
}

double CovarianceMatrix::max_diag() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, at(i, i));
  return m;
}

CovarianceMatrix empirical_covariance(const PathEnsemble& ens) {
  const std::size_t R = ens.path_count, N = ens.node_count();
  if (R < 2)
    throw validation_error("covariance needs at least 2 realizations", "R");
  std::vector<double> mean(N, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    auto p = ens.path(r);
    for (std::size_t j = 0; j < N; ++j) mean[j] += p[j];
  }
  for (double& m : mean) m /= static_cast<double>(R);

  CovarianceMatrix cov;
  cov.nodes = ens.nodes;
  cov.entries.assign(N * N, 0.0);

  // fixed-chunk partials combined in chunk order keep the reduction
  // independent of the worker count
  const std::size_t chunks = chunk_count(R);
  std::vector<std::vector<double>> partial(chunks);
  parallel_chunks(R, [&](std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    while (R * c / chunks != lo) ++c;
    auto& acc = partial[c];
    acc.assign(N * N, 0.0);
    std::vector<double> d(N);
    for (std::size_t r = lo; r < hi; ++r) {
      auto p = ens.path(r);
      for (std::size_t j = 0; j < N; ++j) d[j] = p[j] - mean[j];
      for (std::size_t i = 0; i < N; ++i) {
        const double di = d[i];
        double* row = acc.data() + i * N;
        for (std::size_t j = i; j < N; ++j) row[j] += di * d[j];
      }
    }
  });
  for (std::size_t c = 0; c < chunks; ++c)
    if (!partial[c].empty())
      for (std::size_t x = 0; x < N * N; ++x) cov.entries[x] += partial[c][x];
  const double inv = 1.0 / static_cast<double>(R - 1);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) {
      const double v = cov.entries[i * N + j] * inv;
      cov.entries[i * N + j] = v;
      cov.entries[j * N + i] = v;
    }
  return cov;
}

TauMatrix tau_distance(const CovarianceMatrix& cov) {
  const std::size_t N = cov.size();
  TauMatrix tau;
  tau.nodes = cov.nodes;
  tau.dist.assign(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double rad = cov.at(i, i) + cov.at(j, j) - 2.0 * cov.at(i, j);
      if (rad < 0.0) ++tau.clamped;
      const double d = std::sqrt(std::max(0.0, rad));
      tau.dist[i * N + j] = d;
      tau.dist[j * N + i] = d;
    }
  return tau;
}

FactorizationPair factorization_pair(const PathEnsemble& ens) {
  const std::size_t R = ens.path_count, N = ens.node_count();
  if (R < 1) throw validation_error("factorization needs paths", "R");
  FactorizationPair fp;
  fp.node_count = N;
  fp.path_count = R;
  fp.L_samples.resize(R);
  fp.q.assign(N * N, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    auto p = ens.path(r);
    double lo = p[0], hi = p[0];
    for (double v : p) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double L = hi - lo;
    fp.L_samples[r] = L;
    if (L <= 0.0) continue;
    const double inv = 1.0 / L;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) {
        const double v = std::abs(p[i] - p[j]) * inv;
        if (v > fp.q[i * N + j]) {
          fp.q[i * N + j] = v;
          fp.q[j * N + i] = v;
        }
      }
  }
  fp.trivial = std::all_of(fp.L_samples.begin(), fp.L_samples.end(),
                           [](double l) { return l == 0.0; });
  return fp;
}

SequenceMomentsReport sequence_example_moments(double alpha, double p0,
                                               long n_max, std::size_t count,
                                               std::uint64_t master_seed) {
  ProcessSpec spec = ProcessSpec::sequence_spec(alpha, p0, n_max);
  PeriodicGrid dummy(4);
  auto sampler = make_sampler(spec, dummy, master_seed);
  const auto* seq = static_cast<const SequenceSampler*>(sampler.get());

  SequenceMomentsReport rep;
  rep.alpha = alpha;
  rep.p0 = p0;
  rep.n_max = n_max;
  rep.replicas = count;
  rep.a1 = seq->a_of(1);

  const std::size_t N = sampler->nodes().size();
  std::vector<double> sum(N, 0.0), sum2(N, 0.0);
  std::vector<std::size_t> hits(N, 0);
  std::vector<double> path(N);

  rep.powers.resize(3);
  rep.powers[0].p = 0.8 * p0;
  rep.powers[1].p = p0;
  rep.powers[2].p = 2.0 * p0;
  std::vector<double> psum(3, 0.0), cummax(3, 0.0);
  std::vector<std::vector<double>> checkpoints(3), cummax_cp(3);
  const std::size_t cp[4] = {count / 8, count / 4, count / 2, count};

  std::size_t truncated = 0;
  for (std::size_t r = 0; r < count; ++r) {
    sampler->fill_path(r, path);
    if (seq->beyond_truncation(r)) ++truncated;
    double supv = 0.0;
    for (std::size_t j = 0; j + 1 < N; ++j) {  // last node is eta_inf = 0
      const double v = path[j];
      sum[j] += v;
      sum2[j] += v * v;
      if (v != 0.0) ++hits[j];
      supv = std::max(supv, std::abs(v));
    }
    for (int pi = 0; pi < 3; ++pi) {
      const double x = std::pow(supv, rep.powers[pi].p);
      psum[pi] += x;
      cummax[pi] = std::max(cummax[pi], x);
    }
    for (int pi = 0; pi < 3; ++pi)
      for (int c = 0; c < 4; ++c)
        if (r + 1 == cp[c]) {
          checkpoints[pi].push_back(psum[pi] / static_cast<double>(r + 1));
          cummax_cp[pi].push_back(cummax[pi]);
        }
  }

  rep.truncation_fraction =
      static_cast<double>(truncated) / static_cast<double>(count);
  for (long n = 1; n <= n_max; ++n) {
    rep.n_values.push_back(n);
    rep.e2.push_back(sum2[n - 1] / static_cast<double>(count));
    rep.hits.push_back(hits[n - 1]);
    rep.mean_abs_mean = std::max(
        rep.mean_abs_mean, std::abs(sum[n - 1] / static_cast<double>(count)));
  }

  // log-log fit of E|eta_n|^2 vs n over adequately-sampled coordinates
  {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.n_values.size(); ++i)
      if (rep.hits[i] >= 20 && rep.e2[i] > 0.0) {
        xs.push_back(std::log(static_cast<double>(rep.n_values[i])));
        ys.push_back(std::log(rep.e2[i]));
      }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double m = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
      syy += ys[i] * ys[i];
    }
    if (m >= 3) {
      const double vx = sxx - sx * sx / m, vxy = sxy - sx * sy / m;
      const double vy = syy - sy * sy / m;
      rep.fitted_exponent = vxy / vx;
      rep.fit_r2 = vy > 0 ? vxy * vxy / (vx * vy) : 1.0;
    }
  }

  for (int pi = 0; pi < 3; ++pi) {
    auto& d = rep.powers[pi];
    d.running_mean = checkpoints[pi];
    d.running_cummax = cummax_cp[pi];
    if (d.running_mean.size() == 4 && d.running_mean[3] > 0.0)
      d.rel_change_last =
          std::abs(d.running_mean[3] - d.running_mean[2]) / d.running_mean[3];
    if (d.running_cummax.size() == 4 && d.running_cummax[0] > 0.0)
      d.cummax_growth = d.running_cummax[3] / d.running_cummax[0];
    d.max_share = psum[pi] > 0.0 ? cummax[pi] / psum[pi] : 0.0;
  }
  return rep;
}

}  // namespace vpclt
