#pragma once

// Run manifests: what was run, with which parameters and where each value
// came from, checkpoint cursors, and a digest of the produced output.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qpl {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct Checkpoint {
  std::uint64_t cursor = 0;
  nlohmann::ordered_json partial;  ///< accumulated totals before `cursor`
};

struct RunManifest {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json sources = nlohmann::ordered_json::object();  ///< flag / env / default per setting
  std::uint64_t seed = 0;
  std::string version{kVersion};
  std::string started;  ///< ISO-8601 UTC
  std::string finished;
  std::vector<Checkpoint> checkpoints;
  nlohmann::ordered_json totals;
  std::vector<std::string> outputs;
  std::string result_digest;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::ordered_json& j);
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace qpl
