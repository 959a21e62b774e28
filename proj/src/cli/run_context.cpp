#include "run_context.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

#include "ccqm/error.hpp"
#include "ccqm/version.hpp"

namespace ccqm::cli {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidFormat, "cannot read " + path.string() + " for checksumming");
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

RunContext::RunContext(std::string command, std::filesystem::path out_dir, std::uint64_t seed,
                       std::uint64_t config_hash, std::set<Format> formats)
    : command_(std::move(command)),
      out_dir_(std::move(out_dir)),
      seed_(seed),
      config_hash_(config_hash),
      formats_(std::move(formats)),
      started_(utc_timestamp()) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw_config("cannot create output directory " + out_dir_.string() + ": " + ec.message());
}

std::ofstream RunContext::open(const std::string& name) {
  std::ofstream out(out_dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw_config("cannot write " + (out_dir_ / name).string());
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return out;
}

void RunContext::write_manifest() const {
  nlohmann::ordered_json j;
  j["tool"] = "ccqm";
  j["version"] = kVersion;
  j["command"] = command_;
  j["config_hash"] = hex64(config_hash_);
  j["seed"] = seed_;
  j["started_at"] = started_;
  j["finished_at"] = utc_timestamp();
  auto files = nlohmann::ordered_json::array();
  for (const auto& name : files_)
    files.push_back({{"path", name}, {"fnv1a64", hex64(file_checksum(out_dir_ / name))}});
  j["files"] = std::move(files);
  std::ofstream out(out_dir_ / "run_manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw_config("cannot write the run manifest");
  out << j.dump(2) << '\n';
}

}  // namespace ccqm::cli
