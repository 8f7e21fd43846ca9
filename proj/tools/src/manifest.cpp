#include "manifest.hpp"

#include <plm_enet/error.hpp>

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

namespace plm_enet::cli {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ingestion, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

std::string Manifest::input_digest() const {
  std::string joined;
  for (const auto& in : inputs) joined += in.role + ":" + in.sha256 + "\n";
  return sha256_hex(joined);
}

void Manifest::add_input(std::string role, const fs::path& path) {
  inputs.push_back({std::move(role), path.string(), file_sha256(path)});
}

namespace {

nlohmann::json digests_to_json(const std::vector<FileDigest>& files) {
  auto arr = nlohmann::json::array();
  for (const auto& f : files) arr.push_back({{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}});
  return arr;
}

std::vector<FileDigest> digests_from_json(const nlohmann::json& arr) {
  std::vector<FileDigest> out;
  for (const auto& f : arr) {
    out.push_back({f.value("role", ""), f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const Manifest& manifest) {
  return {
      {"command", manifest.command},
      {"parameters", manifest.parameters},
      {"seed", manifest.parameters.seed},
      {"inputs", digests_to_json(manifest.inputs)},
      {"input_digest", manifest.input_digest()},
      {"outputs", digests_to_json(manifest.outputs)},
      {"tool_version", manifest.tool_version},
  };
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters").get<Parameters>();
    if (j.contains("inputs")) m.inputs = digests_from_json(j.at("inputs"));
    if (j.contains("outputs")) m.outputs = digests_from_json(j.at("outputs"));
    m.tool_version = j.value("tool_version", std::string(PLM_ENET_VERSION));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ingestion, "cannot open manifest " + path.string());
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::schema, "malformed manifest " + path.string() + ": " + e.what());
  }
}

OutputDirectory::OutputDirectory(fs::path dir, Manifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
  fs::create_directories(dir_);
  manifest_.outputs.clear();
}

void OutputDirectory::write(const std::string& name, const std::string& content) {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write " + (dir_ / name).string());
  out << content;
  manifest_.outputs.push_back({"output", name, sha256_hex(content)});
}

void OutputDirectory::finish() {
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write manifest.json");
  out << to_json(manifest_).dump(2) << '\n';
}

}  // namespace plm_enet::cli
