#include "vpclt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace vpclt {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // \n line endings everywhere
  if (!out) throw validation_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt17(row[i]);
    out << '\n';
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open: " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      first = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw validation_error("non-numeric CSV cell: " + cell);
      }
    }
    if (row.size() != t.header.size())
      throw validation_error("ragged CSV row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open for writing: " + path);
  out << text;
}

nlohmann::json report_envelope(const std::string& command,
                               const nlohmann::json& resolved_config,
                               std::uint64_t seed, int threads) {
  return nlohmann::json{{"artifact", "vpclt"},
                        {"version", kArtifactVersion},
                        {"command", command},
                        {"seed", seed},
                        {"threads", threads},
                        {"config", resolved_config}};
}

nlohmann::json to_json(const BlockStatistic& b) {
  nlohmann::json warnings = nlohmann::json::array();
  if (b.cap_active) warnings.push_back("cap-active");
  if (b.integrability_warning) warnings.push_back("integrability");
  return nlohmann::json{
      {"k", b.k},           {"n_lo", b.n_lo},
      {"n_hi", b.n_hi},     {"lambda_star", b.lambda_star},
      {"U", b.U_value},     {"E_sup_Zk", b.e_sup_z},
      {"ratio", b.ratio},   {"mc_error", b.mc_error},
      {"warnings", warnings}};
}

nlohmann::json to_json(const CriterionReport& r) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.blocks) blocks.push_back(to_json(b));
  return nlohmann::json{{"sequence", r.sequence},
                        {"blocks", blocks},
                        {"tail_sums", r.tail_sums},
                        {"verdict", r.verdict},
                        {"clamped_terms", r.clamped_terms}};
}

nlohmann::json to_json(const EquiconvergenceReport& r) {
  nlohmann::json per_n = nlohmann::json::array();
  for (const auto& c : r.per_n) per_n.push_back(to_json(c));
  return nlohmann::json{{"n_list", r.n_list},
                        {"per_n", per_n},
                        {"sup_tail_sums", r.sup_tail_sums},
                        {"verdict", r.verdict},
                        {"variance_stability", r.variance_stability}};
}

nlohmann::json to_json(const DecayCheckResult& r) {
  return nlohmann::json{{"sum", r.sum},
                        {"verdict", r.verdict},
                        {"window_ratio", r.window_ratio},
                        {"last_quarter_fraction", r.last_quarter_fraction},
                        {"m_tilde", r.m_tilde},
                        {"m_prime", r.m_prime}};
}

nlohmann::json to_json(const EntropyProfile& p) {
  return nlohmann::json{{"eps", p.eps},
                        {"H", p.H},
                        {"n_greedy", p.n_greedy},
                        {"n_packing", p.n_packing},
                        {"monotonicity_fixups", p.monotonicity_fixups}};
}

nlohmann::json to_json(const GrowthFit& f) {
  return nlohmann::json{{"form", f.form},   {"slope", f.slope},
                        {"intercept", f.intercept}, {"r2", f.r2},
                        {"a", f.a},         {"valid", f.valid}};
}

nlohmann::json to_json(const DudleyResult& r) {
  return nlohmann::json{{"integral_estimate", r.integral_estimate},
                        {"extrapolated_remainder", r.extrapolated_remainder},
                        {"trend", r.trend},
                        {"winner", r.winner},
                        {"polylog_fit", to_json(r.polylog_fit)},
                        {"exp_fit", to_json(r.exp_fit)}};
}

nlohmann::json to_json(const Probe41Report& r) {
  return nlohmann::json{{"delta", r.delta},
                        {"node_count", r.node_count},
                        {"verdict", r.dudley.trend},
                        {"dudley", to_json(r.dudley)},
                        {"chain_fit_slope", r.chain_fit_slope},
                        {"chain_fit_r2", r.chain_fit_r2},
                        {"sampled_profile", to_json(r.sampled)},
                        {"chain_profile", to_json(r.chain)},
                        {"variance_exponent_fit", r.variance_exponent_fit},
                        {"ball_ratio_ok", r.ball_ratio_ok},
                        {"ball_ratio_margin", r.ball_ratio_margin},
                        {"discrepancy_note", r.discrepancy_note}};
}

nlohmann::json to_json(const TailCurve& c) {
  return nlohmann::json{{"u", c.u},
                        {"gamma", c.gamma},
                        {"std_err", c.std_err},
                        {"replicas", c.replicas}};
}

nlohmann::json to_json(const BandResult& r) {
  return nlohmann::json{{"epsilon", r.epsilon},
                        {"U_eps", r.U_eps},
                        {"n", r.n},
                        {"band_halfwidth", r.band_halfwidth},
                        {"sigma2_hat", r.sigma2_hat},
                        {"chol_jitter", r.chol_jitter}};
}

nlohmann::json to_json(const CltTestResult& r) {
  return nlohmann::json{{"ks_distance", r.ks_distance},
                        {"pass", r.pass},
                        {"threshold", r.threshold},
                        {"replicas", r.replicas},
                        {"n", r.n}};
}

nlohmann::json to_json(const SequenceMomentsReport& r) {
  nlohmann::json powers = nlohmann::json::array();
  for (const auto& p : r.powers)
    powers.push_back(nlohmann::json{{"p", p.p},
                                    {"running_mean", p.running_mean},
                                    {"running_cummax", p.running_cummax},
                                    {"rel_change_last", p.rel_change_last},
                                    {"cummax_growth", p.cummax_growth},
                                    {"max_share", p.max_share}});
  return nlohmann::json{{"alpha", r.alpha},
                        {"p0", r.p0},
                        {"n_max", r.n_max},
                        {"replicas", r.replicas},
                        {"a1", r.a1},
                        {"n", r.n_values},
                        {"e2", r.e2},
                        {"hits", r.hits},
                        {"fitted_exponent", r.fitted_exponent},
                        {"fit_r2", r.fit_r2},
                        {"mean_abs_mean", r.mean_abs_mean},
                        {"truncation_fraction", r.truncation_fraction},
                        {"powers", powers}};
}

}  // namespace vpclt
