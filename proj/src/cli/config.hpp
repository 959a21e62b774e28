#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ccqm::cli {

using json = nlohmann::json;

// Physical quantities in config files carry their unit in the key suffix,
// e.g. "distance_ly" or "dt_nat". Dynamics blocks use natural units (_nat);
// astro blocks use SI with a few convenience multiples.
enum class Dimension { Natural, Length, Time, Frequency, Temperature, Angle, Volume };

/// A view of one JSON object in the config. Every key that is read is
/// recorded, so Config::finish() can reject unknown or misspelt keys.
class Block {
 public:
  Block(const json* node, std::string path, std::shared_ptr<std::set<std::string>> used);

  bool has(std::string_view key) const;
  /// True if any "<base>_<unit>" key is present.
  bool has_quantity(std::string_view base) const;

  double number(std::string_view key, double fallback) const;
  std::size_t count(std::string_view key, std::size_t fallback) const;
  std::uint64_t integer(std::string_view key, std::uint64_t fallback) const;
  bool flag(std::string_view key, bool fallback) const;
  std::string text(std::string_view key, std::string fallback) const;
  std::vector<double> numbers(std::string_view key, std::vector<double> fallback) const;

  /// Value of "<base>_<unit>" converted to the base unit of `dim` (metres,
  /// seconds, hertz, kelvin, radians, cubic metres, or natural units).
  double quantity(std::string_view base, Dimension dim, double fallback) const;
  std::vector<double> quantities(std::string_view base, Dimension dim, std::vector<double> fallback) const;

  Block child(std::string_view key) const;
  std::vector<Block> children(std::string_view key) const;

  const std::string& path() const noexcept { return path_; }

 private:
  const json* find(std::string_view key) const;
  std::string key_path(std::string_view key) const;
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;
  std::vector<std::string> quantity_keys(std::string_view base) const;

  const json* node_;
  std::string path_;
  std::shared_ptr<std::set<std::string>> used_;
};

/// Parsed config file (or an empty one when no path is given).
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config empty();
  static Config parse(std::string_view text);

  Block root() const;
  /// Throws Error(InvalidConfig) naming the first key that was never read.
  void finish() const;
  /// FNV-1a 64 of the canonical (sorted-key) JSON text plus the seed.
  std::uint64_t hash(std::uint64_t seed) const;
  const json& raw() const noexcept { return *doc_; }

 private:
  std::shared_ptr<json> doc_;
  std::shared_ptr<std::set<std::string>> used_;
};

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t x);

}  // namespace ccqm::cli
