// vpclt: Vallee-Poussin approximation toolkit for continuous-process CLT
// diagnostics, Gaussian sup-norm tails and Monte-Carlo confidence bands.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "vpclt/criterion.hpp"
#include "vpclt/entropy.hpp"
#include "vpclt/io.hpp"
#include "vpclt/mc_bands.hpp"
#include "vpclt/parallel.hpp"
#include "vpclt/process.hpp"
#include "vpclt/trig.hpp"

using nlohmann::json;
using namespace vpclt;

namespace {

// ---------------------------------------------------------------- config --

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config: " + path, "config");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw validation_error(std::string("config parse error: ") + e.what(),
                           "config");
  }
  if (!j.is_object())
    throw validation_error("config must be a JSON object", "config");
  return j;
}

void apply_override(json& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw validation_error("override must look like key.path=value: " + kv,
                           "set");
  const std::string path = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const std::exception&) {
    value = raw;  // plain string
  }
  json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty())
      throw validation_error("bad override path: " + path, "set");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

// defaults double as the schema: unknown keys are rejected
void merge_validated(json& defaults, const json& user, std::string prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string where = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key()))
      throw validation_error("unknown config key: " + where, where);
    if (defaults[it.key()].is_object() && it.value().is_object())
      merge_validated(defaults[it.key()], it.value(), where);
    else
      defaults[it.key()] = it.value();
  }
}

double num(const json& j, const std::string& field) {
  if (!j.is_number())
    throw validation_error("expected a number at " + field, field);
  return j.get<double>();
}

// ------------------------------------------------------------- factories --

ProcessSpec process_from_json(const json& p) {
  const std::string kind = p.value("kind", "random_trig");
  if (kind == "wiener") return ProcessSpec::wiener_spec();
  if (kind == "eta0")
    return ProcessSpec::eta0_spec(num(p.at("delta"), "process.delta"),
                                  p.value("nodes", 64),
                                  p.value("tmin", 1e-12));
  if (kind == "random_trig") {
    ProcessSpec s;
    s.kind = ProcessKind::random_trig;
    s.max_degree = p.value("max_degree", 6);
    const std::string law = p.value("law", "gaussian");
    if (law == "gaussian")
      s.law = CoefficientLaw::gaussian;
    else if (law == "uniform")
      s.law = CoefficientLaw::uniform;
    else
      throw validation_error("law must be gaussian or uniform", "process.law");
    if (p.contains("sigmas") && !p.at("sigmas").is_null())
      s.sigmas = p.at("sigmas").get<std::vector<double>>();
    s.validate();
    return s;
  }
  if (kind == "sequence_example")
    return ProcessSpec::sequence_spec(num(p.at("alpha"), "process.alpha"),
                                      num(p.at("p0"), "process.p0"),
                                      p.value("n_max", 64));
  if (kind == "user_table") {
    ProcessSpec s;
    s.kind = ProcessKind::user_table;
    CsvTable t = read_csv(p.at("csv").get<std::string>());
    for (const auto& h : t.header) s.table_nodes.push_back(std::stod(h));
    for (const auto& row : t.rows)
      s.table_data.insert(s.table_data.end(), row.begin(), row.end());
    s.validate();
    return s;
  }
  throw validation_error("unknown process kind: " + kind, "process.kind");
}

DyadicSequence sequence_from_json(const json& s) {
  if (s.contains("terms") && !s.at("terms").is_null())
    return DyadicSequence(s.at("terms").get<std::vector<long>>());
  return DyadicSequence::dyadic(s.value("length", 6));
}

std::function<double(double, double)> integrand_from_json(const json& b) {
  const std::string name = b.value("name", "cos_t_times_x");
  if (name == "cos_t_times_x")
    return [](double t, double x) { return std::cos(t) * x; };
  if (name == "shifted_square")
    return [](double t, double x) { return (x + std::cos(t)) * (x + std::cos(t)); };
  if (name == "exp_damped")
    return [](double t, double x) { return std::exp(-x * x) * std::sin(t) + x; };
  if (name == "table") {
    // rows: first row is ignored (header holds t nodes); each data row is
    // v(t_j, x_i) for one atom x_i of the empirical measure
    CsvTable tab = read_csv(b.at("csv").get<std::string>());
    std::vector<double> tn;
    for (const auto& h : tab.header) tn.push_back(std::stod(h));
    auto rows = std::make_shared<std::vector<std::vector<double>>>(tab.rows);
    auto nodes = std::make_shared<std::vector<double>>(tn);
    return [rows, nodes](double t, double x) {
      const auto& rs = *rows;
      const std::size_t i =
          std::min<std::size_t>(static_cast<std::size_t>(x), rs.size() - 1);
      // nearest t node
      std::size_t jb = 0;
      double best = 1e300;
      for (std::size_t j = 0; j < nodes->size(); ++j) {
        const double d = std::abs((*nodes)[j] - t);
        if (d < best) {
          best = d;
          jb = j;
        }
      }
      return rs[i][jb];
    };
  }
  throw validation_error("unknown integrand: " + name, "integrand.name");
}

BetaSpec beta_from_json(const json& b) {
  BetaSpec spec;
  const std::string kind = b.value("kind", "uniform");
  if (kind == "uniform") {
    spec.kind = BetaSpec::Kind::uniform;
    spec.a = b.value("a", -1.0);
    spec.b = b.value("b", 1.0);
    if (!(spec.a < spec.b))
      throw validation_error("uniform beta needs a < b", "beta");
  } else if (kind == "normal") {
    spec.kind = BetaSpec::Kind::normal;
    spec.mu = b.value("mu", 0.0);
    spec.sd = b.value("sd", 1.0);
    if (!(spec.sd > 0.0))
      throw validation_error("normal beta needs sd > 0", "beta.sd");
  } else if (kind == "index") {
    // uniform over table atoms: draw in [0, count)
    spec.kind = BetaSpec::Kind::uniform;
    spec.a = 0.0;
    spec.b = num(b.at("count"), "beta.count");
  } else {
    throw validation_error("unknown beta kind: " + kind, "beta.kind");
  }
  return spec;
}

// -------------------------------------------------------------- commands --

struct Ctx {
  json cfg;
  std::uint64_t seed = 12345;
  std::string out_dir = ".";
  int threads = 0;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
  void emit_report(const std::string& command, const json& results) const {
    json rep = report_envelope(command, cfg, seed, threads);
    rep["results"] = results;
    write_text(path(command + "_report.json"), rep.dump(2) + "\n");
  }
};

void cmd_approx(Ctx& ctx) {
  const json& c = ctx.cfg;
  PeriodicGrid grid(c.at("grid_size").get<int>());
  const int n = c.at("degree").get<int>();
  const json& fn = c.at("function");
  GridFunction f = GridFunction::zero(grid);
  if (fn.at("kind") == "cosine") {
    const double freq = num(fn.at("freq"), "function.freq");
    for (int j = 0; j < grid.size(); ++j)
      f.values[j] = std::cos(freq * grid.node(j));
  } else if (fn.at("kind") == "table") {
    CsvTable t = read_csv(fn.at("csv").get<std::string>());
    if (t.rows.size() != 1 ||
        t.rows[0].size() != static_cast<std::size_t>(grid.size()))
      throw validation_error("function table must have one row of grid size",
                             "function.csv");
    f.values = t.rows[0];
  } else {
    throw validation_error("unknown function kind", "function.kind");
  }

  GridFunction v = vp_sum(f, n);
  GridFunction s = partial_sum(fourier_analyze(f, n), n, grid);
  std::vector<std::vector<double>> rows;
  for (int j = 0; j < grid.size(); ++j)
    rows.push_back({grid.node(j), f.values[j], s.values[j], v.values[j]});
  write_csv(ctx.path("approx_data.csv"), {"t", "f", "S_n", "V_n"}, rows);

  const int m_max = c.at("m_max").get<int>();
  std::vector<double> prof = best_error_profile(f, m_max);
  std::vector<std::vector<double>> erows;
  for (int m = 0; m <= m_max; ++m)
    erows.push_back({static_cast<double>(m), prof[m]});
  write_csv(ctx.path("best_error.csv"), {"m", "E_ub"}, erows);

  ctx.emit_report("approx",
                  json{{"degree", n},
                       {"vp_error", sup_distance(f, v)},
                       {"partial_sum_error", sup_distance(f, s)},
                       {"modulus_at_1_over_n",
                        modulus_of_continuity(f, 1.0 / n)}});
}

void cmd_simulate(Ctx& ctx) {
  const json& c = ctx.cfg;
  PeriodicGrid grid(c.at("grid_size").get<int>());
  ProcessSpec spec = process_from_json(c.at("process"));
  const std::size_t count = c.at("count").get<std::size_t>();
  PathEnsemble ens = sample(spec, grid, count, ctx.seed);

  std::vector<std::string> header;
  for (double t : ens.nodes) header.push_back(fmt17(t));
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < ens.path_count; ++r)
    rows.emplace_back(ens.path(r).begin(), ens.path(r).end());
  write_csv(ctx.path("paths.csv"), header, rows);

  CovarianceMatrix cov = empirical_covariance(ens);
  double max_abs_mean = 0.0;
  for (std::size_t j = 0; j < ens.node_count(); ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < count; ++r) s += ens.path(r)[j];
    max_abs_mean = std::max(max_abs_mean, std::abs(s / count));
  }
  ctx.emit_report("simulate", json{{"paths", count},
                                   {"nodes", ens.node_count()},
                                   {"max_abs_mean", max_abs_mean},
                                   {"max_variance", cov.max_diag()}});
}

LambdaGrid lambda_from_json(const json& l) {
  LambdaGrid g;
  g.lo = l.value("lo", 1e-3);
  g.hi = l.value("hi", 1e3);
  g.points = l.value("points", 61);
  return g;
}

void cmd_criterion(Ctx& ctx) {
  const json& c = ctx.cfg;
  PeriodicGrid grid(c.at("grid_size").get<int>());
  ProcessSpec spec = process_from_json(c.at("process"));
  DyadicSequence seq = sequence_from_json(c.at("sequence"));
  PathEnsemble ens =
      sample(spec, grid, c.at("count").get<std::size_t>(), ctx.seed);
  CriterionReport rep =
      series_check(ens, seq, lambda_from_json(c.at("lambda")));

  std::vector<std::vector<double>> rows;
  for (const auto& b : rep.blocks)
    for (const auto& [lam, lp] : b.psi_curve)
      rows.push_back({static_cast<double>(b.k), lam, lp});
  write_csv(ctx.path("psi_curves.csv"), {"k", "lambda", "log_psi"}, rows);
  ctx.emit_report("criterion", to_json(rep));
}

void cmd_equiconv(Ctx& ctx) {
  const json& c = ctx.cfg;
  PeriodicGrid grid(c.at("grid_size").get<int>());
  ProcessSpec spec = process_from_json(c.at("process"));
  DyadicSequence seq = sequence_from_json(c.at("sequence"));
  EquiconvergenceReport rep = equiconvergence_check(
      spec, grid, seq, c.at("n_list").get<std::vector<long>>(),
      c.at("count").get<std::size_t>(), ctx.seed,
      lambda_from_json(c.at("lambda")));
  ctx.emit_report("equiconv", to_json(rep));
}

void cmd_entropy(Ctx& ctx) {
  const json& c = ctx.cfg;
  CsvTable t = read_csv(c.at("metric_csv").get<std::string>());
  const std::size_t n = t.rows.size();
  if (n == 0 || t.header.size() != n)
    throw validation_error("metric CSV must be a square matrix with header",
                           "metric_csv");
  std::vector<double> d;
  for (const auto& row : t.rows) d.insert(d.end(), row.begin(), row.end());
  MetricSample ms(n, std::move(d));

  const json& e = c.at("eps");
  const double emax = e.contains("max") && !e.at("max").is_null()
                          ? num(e.at("max"), "eps.max")
                          : ms.diameter() * 1.05;
  const double emin = num(e.at("min"), "eps.min");
  const int per_decade = e.value("per_decade", 12);
  if (!(emin > 0 && emin < emax))
    throw validation_error("need 0 < eps.min < eps.max", "eps");
  std::vector<double> grid;
  const double factor = std::pow(10.0, -1.0 / per_decade);
  for (double x = emax; x > emin; x *= factor) grid.push_back(x);
  grid.push_back(emin);

  EntropyProfile prof = entropy_profile(ms, grid);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < prof.eps.size(); ++i)
    rows.push_back({prof.eps[i], prof.H[i],
                    static_cast<double>(prof.n_greedy[i]),
                    static_cast<double>(prof.n_packing[i])});
  write_csv(ctx.path("entropy_profile.csv"),
            {"epsilon", "H", "N_greedy", "N_packing"}, rows);

  json results = {{"profile", to_json(prof)}};
  if (prof.eps.front() / prof.eps.back() >= 100.0)
    results["dudley"] = to_json(dudley_check(prof));
  else
    results["dudley"] = "skipped: profile narrower than two decades";
  ctx.emit_report("entropy", results);
}

void emit_probe41(Ctx& ctx, const Probe41Report& rep) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rep.chain.eps.size(); ++i)
    rows.push_back({rep.chain.eps[i], rep.chain.H[i]});
  write_csv(ctx.path("probe41_chain_profile.csv"), {"epsilon", "H"}, rows);
  rows.clear();
  for (std::size_t i = 0; i < rep.sampled.eps.size(); ++i)
    rows.push_back({rep.sampled.eps[i], rep.sampled.H[i],
                    static_cast<double>(rep.sampled.n_greedy[i]),
                    static_cast<double>(rep.sampled.n_packing[i])});
  write_csv(ctx.path("probe41_sampled_profile.csv"),
            {"epsilon", "H", "N_greedy", "N_packing"}, rows);
}

void cmd_probe41(Ctx& ctx) {
  const json& c = ctx.cfg;
  Probe41Report rep = example41_probe(num(c.at("delta"), "delta"),
                                      c.at("node_count").get<std::size_t>());
  emit_probe41(ctx, rep);
  ctx.emit_report("probe41", to_json(rep));
}

void cmd_band(Ctx& ctx) {
  const json& c = ctx.cfg;
  BandConfig cfg;
  cfg.n = c.at("n").get<std::size_t>();
  cfg.epsilon = num(c.at("epsilon"), "epsilon");
  cfg.replicas = c.at("replicas").get<std::size_t>();
  cfg.pilot = c.at("pilot").get<std::size_t>();
  cfg.ref_factor = c.at("ref_factor").get<std::size_t>();
  cfg.grid_size = c.at("grid_size").get<int>();
  BandResult br =
      param_integral_band(integrand_from_json(c.at("integrand")),
                          beta_from_json(c.at("beta")), cfg, ctx.seed);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < br.t_nodes.size(); ++i)
    rows.push_back({br.t_nodes[i], br.I_n[i], br.I_n[i] - br.band_halfwidth,
                    br.I_n[i] + br.band_halfwidth, br.I_ref[i]});
  write_csv(ctx.path("band.csv"), {"t", "I_n", "lower", "upper", "I_ref"},
            rows);
  rows.clear();
  for (std::size_t i = 0; i < br.tail_curve.u.size(); ++i)
    rows.push_back({br.tail_curve.u[i], br.tail_curve.gamma[i],
                    br.tail_curve.std_err[i]});
  write_csv(ctx.path("tail_curve.csv"), {"u", "gamma", "stderr"}, rows);
  ctx.emit_report("band", to_json(br));
}

void cmd_clt_test(Ctx& ctx) {
  const json& c = ctx.cfg;
  PeriodicGrid grid(c.at("grid_size").get<int>());
  CltTestResult res = clt_empirical_test(
      process_from_json(c.at("process")), grid, c.at("n").get<long>(),
      c.at("replicas").get<std::size_t>(), ctx.seed,
      num(c.at("threshold"), "threshold"));
  ctx.emit_report("clt-test", to_json(res));
}

void cmd_decay_check(Ctx& ctx) {
  const json& c = ctx.cfg;
  const double m = num(c.at("m"), "m");
  DecayCheckResult res;
  if (c.contains("csv") && !c.at("csv").is_null()) {
    CsvTable t = read_csv(c.at("csv").get<std::string>());
    std::vector<double> table;
    for (const auto& row : t.rows)
      table.insert(table.end(), row.begin(), row.end());
    res = decay_series_check(table, m);
  } else {
    const double m_tilde = std::min(m, 2.0);
    const double m_prime = m_tilde / (m_tilde - 1.0);
    const double q = 1.0 / m_prime + num(c.at("Delta"), "Delta");
    res = decay_series_check(log_power_decay(q), m,
                             c.at("r_max").get<long>());
  }
  ctx.emit_report("decay-check", to_json(res));
}

void cmd_demo(Ctx& ctx, const std::string& which) {
  if (which == "example1") {
    // the normalized-Brownian example: entropy probe and dudley verdict
    Probe41Report rep =
        example41_probe(num(ctx.cfg.at("delta"), "delta"),
                        ctx.cfg.at("node_count").get<std::size_t>());
    emit_probe41(ctx, rep);
    json results = to_json(rep);
    ctx.emit_report("demo", results);
  } else if (which == "example2") {
    // Monte-Carlo parametric integral with a uniform confidence band
    BandConfig cfg;
    cfg.n = ctx.cfg.at("n").get<std::size_t>();
    cfg.epsilon = num(ctx.cfg.at("epsilon"), "epsilon");
    cfg.replicas = ctx.cfg.at("replicas").get<std::size_t>();
    cfg.pilot = ctx.cfg.at("pilot").get<std::size_t>();
    BandResult br = param_integral_band(
        [](double t, double x) { return std::cos(t) * x; }, BetaSpec{}, cfg,
        ctx.seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < br.t_nodes.size(); ++i)
      rows.push_back({br.t_nodes[i], br.I_n[i], br.I_n[i] - br.band_halfwidth,
                      br.I_n[i] + br.band_halfwidth, br.I_ref[i]});
    write_csv(ctx.path("band.csv"), {"t", "I_n", "lower", "upper", "I_ref"},
              rows);
    ctx.emit_report("demo", to_json(br));
  } else if (which == "example3") {
    SequenceMomentsReport rep = sequence_example_moments(
        num(ctx.cfg.at("alpha"), "alpha"), num(ctx.cfg.at("p0"), "p0"),
        ctx.cfg.at("n_max").get<long>(),
        ctx.cfg.at("count").get<std::size_t>(), ctx.seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.n_values.size(); ++i)
      rows.push_back({static_cast<double>(rep.n_values[i]), rep.e2[i],
                      static_cast<double>(rep.hits[i])});
    write_csv(ctx.path("sequence_moments.csv"), {"n", "E2", "hits"}, rows);
    ctx.emit_report("demo", to_json(rep));
  } else {
    throw validation_error("unknown demo: " + which +
                               " (expected example1|example2|example3)",
                           "demo");
  }
}

json default_config(const std::string& cmd) {
  // defaults double as the key schema; unknown keys are rejected
  const json process_defaults = {
      {"kind", "random_trig"}, {"delta", 0.1},     {"nodes", 64},
      {"tmin", 1e-12},         {"max_degree", 6},  {"law", "gaussian"},
      {"sigmas", nullptr},     {"alpha", 0.5},     {"p0", 1.5},
      {"n_max", 64},           {"csv", nullptr}};
  const json lambda_defaults = {{"lo", 1e-3}, {"hi", 1e3}, {"points", 61}};
  const json sequence_defaults = {
      {"kind", "dyadic"}, {"length", 6}, {"terms", nullptr}};

  if (cmd == "approx")
    return {{"grid_size", 1024},
            {"degree", 16},
            {"m_max", 32},
            {"function", {{"kind", "cosine"}, {"freq", 3.0}, {"csv", nullptr}}}};
  if (cmd == "simulate")
    return {{"grid_size", 256}, {"count", 1000}, {"process", process_defaults}};
  if (cmd == "criterion")
    return {{"grid_size", 256},
            {"count", 4000},
            {"process", process_defaults},
            {"sequence", sequence_defaults},
            {"lambda", lambda_defaults}};
  if (cmd == "equiconv")
    return {{"grid_size", 128},
            {"count", 2000},
            {"n_list", json::array({1, 4, 16, 64})},
            {"process", process_defaults},
            {"sequence", sequence_defaults},
            {"lambda", lambda_defaults}};
  if (cmd == "entropy")
    return {{"metric_csv", ""},
            {"eps", {{"max", nullptr}, {"min", 0.01}, {"per_decade", 12}}}};
  if (cmd == "probe41") return {{"delta", 0.1}, {"node_count", 400}};
  if (cmd == "band")
    return {{"n", 10000},
            {"epsilon", 0.05},
            {"replicas", 20000},
            {"pilot", 4000},
            {"ref_factor", 50},
            {"grid_size", 64},
            {"integrand", {{"name", "cos_t_times_x"}, {"csv", nullptr}}},
            {"beta",
             {{"kind", "uniform"},
              {"a", -1.0},
              {"b", 1.0},
              {"mu", 0.0},
              {"sd", 1.0},
              {"count", 0}}}};
  if (cmd == "clt-test")
    return {{"grid_size", 128},
            {"n", 2000},
            {"replicas", 5000},
            {"threshold", 0.05},
            {"process", process_defaults}};
  if (cmd == "decay-check")
    return {{"m", 2.0}, {"Delta", 0.1}, {"r_max", 16384}, {"csv", nullptr}};
  if (cmd == "demo")
    return {{"delta", 0.1},   {"node_count", 400}, {"n", 10000},
            {"epsilon", 0.05}, {"replicas", 20000}, {"pilot", 4000},
            {"alpha", 0.5},   {"p0", 1.5},         {"n_max", 64},
            {"count", 200000}};
  throw validation_error("unknown command: " + cmd, "command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vallee-Poussin CLT criterion toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::vector<std::string> overrides;
  std::int64_t seed_flag = -1;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", overrides, "dot-path config overrides (k.ey=value)");
  app.add_option("--seed", seed_flag, "master seed (overrides config and env)");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--out-dir", out_dir, "output directory");

  const char* names[] = {"approx",  "simulate", "criterion",   "equiconv",
                         "entropy", "probe41",  "band",        "clt-test",
                         "decay-check", "demo"};
  std::string demo_which;
  for (const char* n : names) {
    auto* sub = app.add_subcommand(n);
    sub->fallthrough();  // global flags may follow the subcommand
    if (std::string(n) == "demo")
      sub->add_option("example", demo_which, "example1|example2|example3")
          ->required();
  }

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    Ctx ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    set_worker_threads(threads);
    std::filesystem::create_directories(out_dir);

    json cfg = default_config(cmd);
    json user = load_config(config_path);
    // seed: flag > environment > config > default
    std::uint64_t seed = 12345;
    if (user.contains("seed")) {
      seed = user.at("seed").get<std::uint64_t>();
      user.erase("seed");
    }
    if (const char* env = std::getenv("VPCLT_SEED"))
      seed = std::strtoull(env, nullptr, 10);
    if (seed_flag >= 0) seed = static_cast<std::uint64_t>(seed_flag);

    json with_overrides = user;
    for (const auto& kv : overrides) apply_override(with_overrides, kv);
    merge_validated(cfg, with_overrides, "");
    ctx.cfg = cfg;
    ctx.cfg["seed"] = seed;
    ctx.seed = seed;

    if (cmd == "approx")
      cmd_approx(ctx);
    else if (cmd == "simulate")
      cmd_simulate(ctx);
    else if (cmd == "criterion")
      cmd_criterion(ctx);
    else if (cmd == "equiconv")
      cmd_equiconv(ctx);
    else if (cmd == "entropy")
      cmd_entropy(ctx);
    else if (cmd == "probe41")
      cmd_probe41(ctx);
    else if (cmd == "band")
      cmd_band(ctx);
    else if (cmd == "clt-test")
      cmd_clt_test(ctx);
    else if (cmd == "decay-check")
      cmd_decay_check(ctx);
    else if (cmd == "demo")
      cmd_demo(ctx, demo_which);
    return 0;
  } catch (const validation_error& e) {
    std::cerr << json{{"error",
                       {{"code", 1}, {"field", e.field}, {"message", e.what()}}}}
                     .dump()
              << std::endl;
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", 1}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 1;
  }
}
