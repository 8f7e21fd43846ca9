#pragma once

#include "parameters.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace plm_enet::cli {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

struct FileDigest {
  std::string role;
  std::string path;
  std::string sha256;
};

struct Manifest {
  std::string command;
  Parameters parameters;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string tool_version = PLM_ENET_VERSION;

  /// Digest over the input digests, in order.
  [[nodiscard]] std::string input_digest() const;
  void add_input(std::string role, const std::filesystem::path& path);
};

nlohmann::json to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& j);
Manifest read_manifest(const std::filesystem::path& path);

/// Collects the files of one run. Each write records the file's digest in
/// the manifest; `finish` writes manifest.json last.
class OutputDirectory {
 public:
  OutputDirectory(std::filesystem::path dir, Manifest& manifest);

  void write(const std::string& name, const std::string& content);
  void finish();
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  Manifest& manifest_;
};

}  // namespace plm_enet::cli
