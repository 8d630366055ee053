#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxfollow/path_follow.hpp"

namespace boxfollow {

// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved_config);
std::string utc_timestamp();

// Append-only JSON-lines file; every record is flushed when written so the
// file stays parseable after an interruption.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::filesystem::path& path);
  void write(const nlohmann::json& record);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

nlohmann::json header_record(const std::string& command, const std::string& hash, bool resumed);
nlohmann::json family_record(const StepDiagnostics& step, const CoveringFamily& family,
                             const std::string& file);
nlohmann::json end_record(const std::string& status, const std::string& message,
                          std::optional<double> last_good_lambda);

// All complete records; a torn last line is ignored.
std::vector<nlohmann::json> read_manifest(const std::filesystem::path& path);

}  // namespace boxfollow
