#include "homopart/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "homopart/error.hpp"

namespace homopart {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string RunManifest::digest() const {
  const nlohmann::json core = {{"command", command}, {"parameters", parameters}, {"mode", mode},
                               {"seed", seed},       {"version", kToolkitVersion}, {"inputs", inputs}};
  return sha256_hex(core.dump());
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"parameters", parameters}, {"mode", mode},       {"seed", seed},
          {"version", kToolkitVersion}, {"inputs", inputs}, {"outputs", outputs}, {"results", results},
          {"timing_ms", timing_ms}, {"digest", digest()}};
}

std::string stamp(std::string content, const std::string& digest) {
  if (!content.empty() && content.back() != '\n') content += '\n';
  return content + "# manifest " + digest + '\n';
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace homopart
