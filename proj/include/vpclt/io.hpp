#ifndef VPCLT_IO_HPP
#define VPCLT_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "vpclt/criterion.hpp"
#include "vpclt/entropy.hpp"
#include "vpclt/mc_bands.hpp"
#include "vpclt/process.hpp"

namespace vpclt {

inline constexpr const char* kArtifactVersion = "0.1.0";

// 17 significant digits: doubles survive a CSV round trip bit-exactly.
std::string fmt17(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);

// Report envelope: every emitted report embeds the fully resolved config and
// the artifact version so a run can be reproduced from its own output.
nlohmann::json report_envelope(const std::string& command,
                               const nlohmann::json& resolved_config,
                               std::uint64_t seed, int threads);

nlohmann::json to_json(const BlockStatistic& b);
nlohmann::json to_json(const CriterionReport& r);
nlohmann::json to_json(const EquiconvergenceReport& r);
nlohmann::json to_json(const DecayCheckResult& r);
nlohmann::json to_json(const EntropyProfile& p);
nlohmann::json to_json(const GrowthFit& f);
nlohmann::json to_json(const DudleyResult& r);
nlohmann::json to_json(const Probe41Report& r);
nlohmann::json to_json(const TailCurve& c);
nlohmann::json to_json(const BandResult& r);
nlohmann::json to_json(const CltTestResult& r);
nlohmann::json to_json(const SequenceMomentsReport& r);

}  // namespace vpclt

#endif  // VPCLT_IO_HPP
