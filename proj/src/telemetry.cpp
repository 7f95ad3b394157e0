#include "persona/telemetry.hpp"

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::UserTurn: return "UserTurn";
    case RecordKind::RobotTurn: return "RobotTurn";
    case RecordKind::Comfort: return "Comfort";
    case RecordKind::Episode: return "Episode";
  }
  return "Comfort";
}

FileSink::FileSink(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw ConfigError("cannot open telemetry file " + path.string());
}

FileSink::~FileSink() { close(); }

void FileSink::write_line(const std::string& line) { out_ << line << '\n'; }

void FileSink::close() {
  if (out_.is_open()) out_.close();
}

std::string MemorySink::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string dump_record(const Json& record) {
  // Invalid UTF-8 from user text is replaced rather than aborting a session.
  return record.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::vector<TelemetryRecord> parse_telemetry(std::string_view text, const std::string& source) {
  std::vector<TelemetryRecord> out;
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    if (detail::trim(raw).empty()) continue;
    Json j;
    try {
      j = Json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_number_integer() || !j.contains("kind") ||
        !j["kind"].is_string())
      throw ParseError(source, lineno, "record lacks integer 't' or string 'kind'");
    const auto kind_name = j["kind"].get<std::string>();
    TelemetryRecord r;
    r.t = j["t"].get<TimestampMs>();
    if (kind_name == "UserTurn") r.kind = RecordKind::UserTurn;
    else if (kind_name == "RobotTurn") r.kind = RecordKind::RobotTurn;
    else if (kind_name == "Comfort") r.kind = RecordKind::Comfort;
    else if (kind_name == "Episode") r.kind = RecordKind::Episode;
    else throw ParseError(source, lineno, "unknown record kind '" + kind_name + "'");
    if (!out.empty() && r.t < out.back().t) throw ParseError(source, lineno, "records out of time order");
    r.payload = std::move(j);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TelemetryRecord> read_telemetry(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path.string());
  } catch (const ConfigError&) {
    throw ParseError(path.string(), 0, "cannot open file");
  }
  return parse_telemetry(text, path.string());
}

}  // namespace persona
