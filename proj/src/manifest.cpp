#include "reaction_lens/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "reaction_lens/errors.hpp"
#include "reaction_lens/lexicon_io.hpp"

namespace reaction_lens {

std::filesystem::path manifest_path_for(const std::filesystem::path& artifact) {
  auto p = artifact;
  p += ".manifest.json";
  return p;
}

std::string file_checksum(const std::filesystem::path& path, std::uint64_t* bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableSource("cannot open " + path.string());
  Fnv1a64 hash;
  std::uint64_t total = 0;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto n = static_cast<std::size_t>(in.gcount());
    hash.update(std::string_view(buf.data(), n));
    total += n;
  }
  if (bytes) *bytes = total;
  return "fnv1a64:" + hash.hex();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  Input in;
  in.path = path.string();
  in.checksum = file_checksum(path, &in.bytes);
  inputs.push_back(std::move(in));
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) j["config"][k] = v;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : inputs) {
    j["inputs"].push_back({{"path", in.path}, {"checksum", in.checksum}, {"bytes", in.bytes}});
  }
  j["outputs"] = outputs;
  j["row_drops"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : row_drops) j["row_drops"][k] = v;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteFailure("cannot create " + path.string());
  out << to_json();
  if (!out) throw WriteFailure("failed writing " + path.string());
}

}  // namespace reaction_lens
