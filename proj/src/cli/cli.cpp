#include "ccqm/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "ccqm/error.hpp"
#include "ccqm/version.hpp"
#include "commands.hpp"

namespace ccqm {

namespace {

using Command = std::function<void(const cli::Config&, cli::RunContext&)>;

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "ccqm_out";
  std::vector<std::string> formats;
};

std::set<cli::Format> parse_formats(const std::vector<std::string>& names) {
  if (names.empty()) return {cli::Format::Csv, cli::Format::Jsonl, cli::Format::Snapshot};
  std::set<cli::Format> out;
  for (const auto& n : names) {
    if (n == "csv") out.insert(cli::Format::Csv);
    else if (n == "jsonl") out.insert(cli::Format::Jsonl);
    else if (n == "snapshot") out.insert(cli::Format::Snapshot);
    else throw_config("--format must be csv, jsonl or snapshot (got '" + n + "')");
  }
  return out;
}

nlohmann::ordered_json error_record(std::string_view code, std::string_view category, const std::string& message,
                                    int exit_code) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["category"] = category;
  j["message"] = message;
  j["exit_code"] = exit_code;
  return j;
}

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Numerical: return "numerical";
    case ErrorCategory::PhysicsDomain: return "physics_domain";
  }
  return "unknown";
}

int report_error(const nlohmann::ordered_json& record, const std::string& out_dir) {
  std::cerr << record.dump() << '\n';
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!ec) {
    std::ofstream out(std::filesystem::path(out_dir) / "error.json", std::ios::binary | std::ios::trunc);
    if (out) out << record.dump(2) << '\n';
  }
  return record["exit_code"].get<int>();
}

int run(const std::string& name, const Command& command, const Options& opt) {
  const cli::Config config = opt.config_path.empty() ? cli::Config::empty() : cli::Config::load(opt.config_path);
  cli::RunContext ctx(name, opt.out_dir, opt.seed, config.hash(opt.seed), parse_formats(opt.formats));
  command(config, ctx);
  ctx.write_manifest();
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Spontaneous-collapse simulations and photon-collapse constraint calculators"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON config file (defaults apply when omitted)");
  app.add_option("--seed", opt.seed, "Base random seed")->capture_default_str();
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", opt.formats, "Output formats: csv, jsonl, snapshot (repeatable; default all)")
      ->delimiter(',');

  const std::map<std::string, std::pair<Command, std::string>> commands = {
      {"simulate", {cli::cmd_simulate, "Spread/collapse cycles or a two-packet collapse ensemble"}},
      {"collapse-stats", {cli::cmd_collapse_stats, "Born-rule centre sampling and GRW schedule statistics"}},
      {"starlight", {cli::cmd_starlight, "Critical-volume bound from stellar image sharpness"}},
      {"cmb", {cli::cmd_cmb, "Critical-volume bound and perturbed spectrum from the CMB"}},
      {"world", {cli::cmd_world, "Several wavefunctions that merge, split and collapse"}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) subs[name] = app.add_subcommand(name, entry.second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report_error(error_record("invalid_arguments", "config", e.what(), 2), opt.out_dir);
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return run(name, commands.at(name).first, opt);
    } catch (const Error& e) {
      const int code = exit_code_for(e.category());
      return report_error(error_record(e.code_name(), category_name(e.category()), e.what(), code), opt.out_dir);
    } catch (const std::exception& e) {
      return report_error(error_record("internal", "numerical", e.what(), 3), opt.out_dir);
    }
  }
  return 2;
}

}  // namespace ccqm
