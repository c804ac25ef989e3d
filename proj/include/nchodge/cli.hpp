#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nchodge/models.hpp"

namespace nchodge::cli {

inline constexpr const char* engine_name = "nchodge";
inline constexpr const char* engine_version = "0.1.0";
inline constexpr int schema_version = 1;

enum class Format { Json, Csv, Text };

Format parse_format(const std::string& s);

/// Parses and validates a model description. `origin` names the source in error messages.
ModelSpec parse_model_text(const std::string& text, const std::string& origin = "<input>");
ModelSpec parse_model(const std::filesystem::path& path);

/// Canonical JSON form of a spec (the input echo).
nlohmann::json model_to_json(const ModelSpec& spec);

/// "a..b" ranges as used by --weight-window and --loop-window.
std::pair<int, int> parse_range(const std::string& text);

enum class Op { HH, HP, HN, Degeneration, SsPages, Hodge, MfHH, OracleCompare, HkrCheck };

std::string to_string(Op op);
Op parse_op(const std::string& s);

struct JobSpec {
  ModelSpec model;
  Op op = Op::HH;
  Format format = Format::Json;
  std::optional<std::filesystem::path> cache_dir;
  unsigned threads = 1;
};

/// Throws InputError when the operation cannot run on the model kind.
void check_compatible(const JobSpec& job);

struct RunResult {
  /// Envelope without the wall-clock field; deterministic for identical jobs.
  nlohmann::json body;
  long long wall_clock_ms = 0;
  bool cache_hit = false;
  std::vector<std::string> diagnostics;  // cache problems and similar, not part of the envelope
};

/// Key of the job in the result cache (SHA-256 hex of the canonical job).
std::string cache_key(const JobSpec& job);
std::string sha256_hex(const std::string& data);

RunResult run(const JobSpec& job);

/// Full envelope: body plus wall_clock_ms.
nlohmann::json envelope(const RunResult& r);
std::string render(const nlohmann::json& envelope, Format format);

/// Exit codes of the compute tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_invariant = 3;

}  // namespace nchodge::cli
