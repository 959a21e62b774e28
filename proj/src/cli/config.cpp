#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include "ccqm/astro.hpp"
#include "ccqm/error.hpp"

namespace ccqm::cli {

namespace {

struct Unit {
  std::string_view suffix;
  Dimension dim;
  double factor;
};

constexpr double kMilliArcSecond = std::numbers::pi / (180.0 * 3600.0 * 1000.0);

constexpr Unit kUnits[] = {
    {"nat", Dimension::Natural, 1.0},
    {"m", Dimension::Length, 1.0},
    {"km", Dimension::Length, 1e3},
    {"mm", Dimension::Length, 1e-3},
    {"um", Dimension::Length, 1e-6},
    {"nm", Dimension::Length, 1e-9},
    {"ly", Dimension::Length, astro::kLightYear},
    {"s", Dimension::Time, 1.0},
    {"Hz", Dimension::Frequency, 1.0},
    {"GHz", Dimension::Frequency, 1e9},
    {"per_s", Dimension::Frequency, 1.0},
    {"K", Dimension::Temperature, 1.0},
    {"rad", Dimension::Angle, 1.0},
    {"urad", Dimension::Angle, 1e-6},
    {"mas", Dimension::Angle, kMilliArcSecond},
    {"m3", Dimension::Volume, 1.0},
};

}  // namespace

Block::Block(const json* node, std::string path, std::shared_ptr<std::set<std::string>> used)
    : node_(node), path_(std::move(path)), used_(std::move(used)) {
  if (node_ && !node_->is_object()) throw_config("config block '" + path_ + "' must be a JSON object");
}

std::string Block::key_path(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

void Block::fail(std::string_view key, const std::string& what) const {
  throw_config("config key '" + key_path(key) + "': " + what);
}

const json* Block::find(std::string_view key) const {
  if (!node_) return nullptr;
  const auto it = node_->find(std::string(key));
  if (it == node_->end()) return nullptr;
  used_->insert(key_path(key));
  return &*it;
}

bool Block::has(std::string_view key) const { return node_ && node_->contains(std::string(key)); }

bool Block::has_quantity(std::string_view base) const { return !quantity_keys(base).empty(); }

double Block::number(std::string_view key, double fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_number()) fail(key, "expected a number");
  return v->get<double>();
}

std::uint64_t Block::integer(std::string_view key, std::uint64_t fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v->get<std::int64_t>());
  fail(key, "expected a non-negative integer");
}

std::size_t Block::count(std::string_view key, std::size_t fallback) const {
  return static_cast<std::size_t>(integer(key, fallback));
}

bool Block::flag(std::string_view key, bool fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(key, "expected true or false");
  return v->get<bool>();
}

std::string Block::text(std::string_view key, std::string fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_string()) fail(key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> Block::numbers(std::string_view key, std::vector<double> fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (v->is_number()) return {v->get<double>()};
  if (!v->is_array()) fail(key, "expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& x : *v) {
    if (!x.is_number()) fail(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> Block::quantity_keys(std::string_view base) const {
  std::vector<std::string> keys;
  if (!node_) return keys;
  for (const auto& u : kUnits) {
    const std::string k = std::string(base) + "_" + std::string(u.suffix);
    if (node_->contains(k)) keys.push_back(k);
  }
  return keys;
}

std::vector<double> Block::quantities(std::string_view base, Dimension dim, std::vector<double> fallback) const {
  if (has(base)) {
    std::string_view hint = "nat";
    for (const auto& u : kUnits)
      if (u.dim == dim) {
        hint = u.suffix;
        break;
      }
    fail(base, "physical quantities need an explicit unit suffix, e.g. '" + std::string(base) + "_" + std::string(hint) + "'");
  }
  const auto keys = quantity_keys(base);
  if (keys.empty()) return fallback;
  if (keys.size() > 1) fail(keys[1], "given twice with different units");
  const std::string unit = keys[0].substr(base.size() + 1);
  for (const auto& u : kUnits)
    if (u.suffix == unit) {
      if (u.dim != dim) fail(keys[0], "unit '" + unit + "' has the wrong dimension here");
      std::vector<double> v = numbers(keys[0], {});
      for (double& x : v) x *= u.factor;
      return v;
    }
  fail(keys[0], "unknown unit");
}

double Block::quantity(std::string_view base, Dimension dim, double fallback) const {
  const auto v = quantities(base, dim, {fallback});
  if (v.size() != 1) fail(base, "expected a single value");
  return v[0];
}

Block Block::child(std::string_view key) const {
  const json* v = find(key);
  return Block(v, key_path(key), used_);
}

std::vector<Block> Block::children(std::string_view key) const {
  const json* v = find(key);
  std::vector<Block> out;
  if (!v) return out;
  if (!v->is_array()) fail(key, "expected an array of objects");
  for (std::size_t i = 0; i < v->size(); ++i)
    out.emplace_back(&(*v)[i], key_path(key) + "[" + std::to_string(i) + "]", used_);
  return out;
}

Config Config::parse(std::string_view text) {
  Config c;
  try {
    c.doc_ = std::make_shared<json>(json::parse(text));
  } catch (const json::parse_error& e) {
    throw_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!c.doc_->is_object()) throw_config("config must be a JSON object");
  c.used_ = std::make_shared<std::set<std::string>>();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Config Config::empty() { return parse("{}"); }

Block Config::root() const { return Block(doc_.get(), "", used_); }

namespace {

void check_used(const json& node, const std::string& path, const std::set<std::string>& used) {
  if (!node.is_object()) {
    if (node.is_array())
      for (std::size_t i = 0; i < node.size(); ++i)
        if (node[i].is_object()) check_used(node[i], path + "[" + std::to_string(i) + "]", used);
    return;
  }
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string p = path.empty() ? it.key() : path + "." + it.key();
    if (!used.count(p)) throw_config("unknown config key '" + p + "'");
    check_used(it.value(), p, used);
  }
}

}  // namespace

void Config::finish() const { check_used(*doc_, "", *used_); }

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::uint64_t Config::hash(std::uint64_t seed) const {
  return fnv1a64(doc_->dump() + "\nseed=" + std::to_string(seed));
}

}  // namespace ccqm::cli
