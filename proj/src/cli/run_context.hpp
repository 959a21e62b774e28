#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"

namespace ccqm::cli {

enum class Format { Csv, Jsonl, Snapshot };

/// Output directory, seed and bookkeeping shared by every subcommand.
class RunContext {
 public:
  RunContext(std::string command, std::filesystem::path out_dir, std::uint64_t seed, std::uint64_t config_hash,
             std::set<Format> formats);

  const std::string& command() const noexcept { return command_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t config_hash() const noexcept { return config_hash_; }
  const std::filesystem::path& out_dir() const noexcept { return out_dir_; }
  bool emits(Format f) const { return formats_.count(f) > 0; }

  /// Opens a file in the output directory and registers it for the manifest.
  std::ofstream open(const std::string& name);

  /// Writes run_manifest.json with FNV-1a checksums of every registered file.
  void write_manifest() const;

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  std::uint64_t seed_;
  std::uint64_t config_hash_;
  std::set<Format> formats_;
  std::vector<std::string> files_;
  std::string started_;
};

std::string utc_timestamp();
std::uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace ccqm::cli
