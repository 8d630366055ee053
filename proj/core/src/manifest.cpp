#include "boxfollow/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>

namespace boxfollow {

std::string config_hash(const nlohmann::json& resolved_config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : resolved_config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Drops an unterminated last line left by an interrupted write, so new
// records start on a line of their own.
void drop_torn_tail(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (text.back() == '\n') return;
  const auto nl = text.find_last_of('\n');
  std::filesystem::resize_file(path, nl == std::string::npos ? 0 : nl + 1);
}

}  // namespace

ManifestWriter::ManifestWriter(const std::filesystem::path& path) : path_(path) {
  drop_torn_tail(path);
  out_.open(path, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open manifest " + path.string());
}

void ManifestWriter::write(const nlohmann::json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for manifest " + path_.string());
}

nlohmann::json header_record(const std::string& command, const std::string& hash, bool resumed) {
  return {{"record", "header"}, {"tool", "boxfollow"},    {"version", BOXFOLLOW_VERSION},
          {"command", command}, {"config_hash", hash}, {"resumed", resumed},
          {"started", utc_timestamp()}};
}

nlohmann::json family_record(const StepDiagnostics& step, const CoveringFamily& family,
                             const std::string& file) {
  nlohmann::json selection = nlohmann::json::array();
  for (const auto& r : family.reports) {
    selection.push_back({{"depth", r.depth},
                         {"boxes_before", r.boxes_before},
                         {"boxes_after", r.boxes_after},
                         {"map_evaluations", r.map_evaluations},
                         {"escaped_points", r.escaped_points},
                         {"left_domain", r.left_domain},
                         {"failed_points", r.failed_points},
                         {"reintroduced", r.reintroduced},
                         {"wall_time", r.wall_time}});
  }
  nlohmann::json j = {{"record", "family"},
                      {"index", step.index},
                      {"lambda", step.lambda},
                      {"K", step.K ? nlohmann::json(*step.K) : nlohmann::json(nullptr)},
                      {"box_counts", step.box_counts},
                      {"escape_fraction", step.escape_fraction},
                      {"reintroduced", step.reintroduced},
                      {"map_evaluations", step.map_evaluations},
                      {"retries", step.retries},
                      {"wall_time", step.wall_time},
                      {"file", file},
                      {"selection", selection}};
  return j;
}

nlohmann::json end_record(const std::string& status, const std::string& message,
                          std::optional<double> last_good_lambda) {
  nlohmann::json j = {{"record", "end"}, {"status", status}, {"finished", utc_timestamp()}};
  if (!message.empty()) j["message"] = message;
  j["last_good_lambda"] = last_good_lambda ? nlohmann::json(*last_good_lambda) : nlohmann::json(nullptr);
  return j;
}

std::vector<nlohmann::json> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error&) {
      if (in.peek() == EOF) break;
      throw ValidationError("manifest " + path.string() + ": malformed record");
    }
  }
  return out;
}

}  // namespace boxfollow
