#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace homopart {

inline constexpr const char* kToolkitVersion = "0.1.0";

std::string sha256_hex(std::string_view data);

struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::string mode;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;   // file name -> sha256
  std::map<std::string, std::string> outputs;  // file name -> sha256
  nlohmann::json results = nlohmann::json::object();
  double timing_ms = 0.0;

  /// Digest over command, parameters, mode, seed, version and inputs; timing, results and
  /// outputs are excluded so reruns with equal manifests stamp equal digests.
  std::string digest() const;
  nlohmann::json to_json() const;
};

/// Appends the "# manifest <digest>" trailer that readers skip.
std::string stamp(std::string content, const std::string& digest);

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace homopart
