#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "persona/perception.hpp"

namespace persona {

// Telemetry is JSON Lines: one flat object per line, keys in a fixed order,
// every record starting with "t" and "kind". The field lists for each kind
// are documented in docs/telemetry.md.
enum class RecordKind { UserTurn, RobotTurn, Comfort, Episode };

std::string_view to_string(RecordKind k);

using Json = nlohmann::ordered_json;

struct TelemetryRecord {
  TimestampMs t = 0;
  RecordKind kind = RecordKind::Comfort;
  Json payload;  // the whole line, including t and kind
};

class TelemetrySink {
 public:
  virtual ~TelemetrySink() = default;
  virtual void write_line(const std::string& line) = 0;
  virtual void close() {}
};

class FileSink final : public TelemetrySink {
 public:
  explicit FileSink(const std::filesystem::path& path);
  ~FileSink() override;
  void write_line(const std::string& line) override;
  void close() override;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Keeps lines in memory; used by the service and by tests.
class MemorySink final : public TelemetrySink {
 public:
  void write_line(const std::string& line) override { lines_.push_back(line); }
  const std::vector<std::string>& lines() const { return lines_; }
  std::string text() const;

 private:
  std::vector<std::string> lines_;
};

// Serializes a record object (t and kind must be its first two keys).
std::string dump_record(const Json& record);

// Throws ParseError(file, line) on malformed lines or unknown kinds.
std::vector<TelemetryRecord> parse_telemetry(std::string_view text, const std::string& source = "<memory>");
std::vector<TelemetryRecord> read_telemetry(const std::filesystem::path& path);

}  // namespace persona
