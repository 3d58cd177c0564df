#include "qpl/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace qpl {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version;
  j["seed"] = seed;
  j["params"] = params;
  j["sources"] = sources;
  j["started"] = started;
  j["finished"] = finished;
  auto cps = nlohmann::ordered_json::array();
  for (const auto& c : checkpoints) cps.push_back({{"cursor", c.cursor}, {"partial", c.partial}});
  j["checkpoints"] = cps;
  j["totals"] = totals;
  j["outputs"] = outputs;
  j["result_digest"] = result_digest;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::ordered_json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.version = j.value("version", std::string(kVersion));
  m.seed = j.value("seed", std::uint64_t{0});
  m.params = j.value("params", nlohmann::ordered_json::object());
  m.sources = j.value("sources", nlohmann::ordered_json::object());
  m.started = j.value("started", "");
  m.finished = j.value("finished", "");
  if (j.contains("checkpoints"))
    for (const auto& c : j.at("checkpoints"))
      m.checkpoints.push_back({c.at("cursor").get<std::uint64_t>(), c.at("partial")});
  m.totals = j.value("totals", nlohmann::ordered_json());
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.result_digest = j.value("result_digest", "");
  return m;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qpl
