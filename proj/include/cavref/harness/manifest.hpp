#pragma once
/** @file manifest.hpp
 *  @brief Output files, SHA-256 checksums and the per-run manifest.
 */

#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "config.hpp"

namespace cavref::harness {

inline std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

struct OutputFile {
  std::string name;     ///< file name inside the output directory
  std::string content;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<OutputFile> files;
  std::vector<Verdict> verdicts;
  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

struct ResultManifest {
  std::string experiment;
  std::string config_hash;
  struct Entry {
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;
  };
  std::vector<Entry> files;
  double wall_seconds = 0.0;
  std::vector<Verdict> verdicts;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["units"] = "rates and frequencies in the reference-rate unit (kappa by default), hbar = 1";
    j["wall_seconds"] = wall_seconds;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    return j;
  }
};

inline std::string config_hash(const RunConfig& c) { return sha256_hex(c.canonical()); }

/// File stem shared by every output of one configuration.
inline std::string output_stem(const RunConfig& c) { return c.experiment + "-" + config_hash(c).substr(0, 12); }

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + p.string());
  out << content;
  out.close();
  if (!out) throw IoError("failed writing output file: " + p.string());
}

/// Writes the outputs and the manifest; returns the manifest.
inline ResultManifest write_outputs(const RunConfig& c, const ExperimentResult& r, const std::filesystem::path& dir,
                                    double wall_seconds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  ResultManifest m;
  m.experiment = c.experiment;
  m.config_hash = config_hash(c);
  m.wall_seconds = wall_seconds;
  m.verdicts = r.verdicts;
  for (const auto& f : r.files) {
    write_file(dir / f.name, f.content);
    m.files.push_back({f.name, sha256_hex(f.content), f.content.size()});
  }
  write_file(dir / ("manifest-" + output_stem(c) + ".json"), m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace cavref::harness
