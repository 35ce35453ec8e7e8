#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace reaction_lens {

inline constexpr std::string_view kToolName = "reaction-lens";
inline constexpr std::string_view kToolVersion = "1.0.0";

// Provenance record written next to every file a command produces, as
// `<artifact>.manifest.json`.
struct RunManifest {
  struct Input {
    std::string path;
    std::string checksum;  // fnv1a64:<hex>
    std::uint64_t bytes = 0;
  };

  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Input> inputs;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::uint64_t>> row_drops;
  std::string started_at;
  std::string finished_at;

  void add_input(const std::filesystem::path& path);
  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

// Streams the file through FNV-1a 64. Throws UnreadableSource.
std::string file_checksum(const std::filesystem::path& path, std::uint64_t* bytes = nullptr);

// Current UTC time as ISO-8601 with a trailing Z.
std::string utc_timestamp();

}  // namespace reaction_lens
