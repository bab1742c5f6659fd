// Command-line front end over the C interface of libmonowrap.
//
//   monowrap-cli curve          --config exp.json [--seed N] [--out f] [--format csv|json] [--jobs n]
//   monowrap-cli verify         --config sweep.json ...
//   monowrap-cli schedule-audit [--config audit.json | --begin 9 --end 1000000] ...
//
// Exit codes: 0 success, 1 a check failed (or the run itself failed), 2 usage error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "monowrap/monowrap.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  unsigned jobs = 0;
  std::uint64_t begin = 9;
  std::uint64_t end = 1000000;
};

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  return true;
}

int emit(const char* text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f || !(f << text)) {
    std::cerr << "error: cannot write '" << out << "'\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int report_status(mw_status status) {
  std::cerr << "error (" << mw_status_name(status) << "): " << mw_last_error() << "\n";
  const bool usage = status == MW_INVALID_CONFIG || status == MW_INVALID_ARGUMENT;
  return usage ? kExitUsage : kExitCheckFailed;
}

int run(const std::string& kind, const Options& opt) {
  const bool json = opt.format == "json";
  char* output = nullptr;
  int passed = 0;
  mw_status status;

  if (kind == "schedule-audit" && opt.config.empty()) {
    status = mw_schedule_audit(opt.begin, opt.end, json ? 1 : 0, &output, &passed);
  } else {
    std::string text;
    if (!read_file(opt.config, text)) {
      std::cerr << "error: cannot read config '" << opt.config << "'\n";
      return kExitUsage;
    }
    const std::string dir = std::filesystem::path(opt.config).parent_path().string();
    mw_run_options ro{};
    ro.has_seed = opt.seed.has_value() ? 1 : 0;
    ro.seed = opt.seed.value_or(0);
    ro.jobs = opt.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.jobs;
    ro.json = json ? 1 : 0;
    status = mw_run_config(text.c_str(), dir.empty() ? "." : dir.c_str(), kind.c_str(), &ro,
                           &output, &passed);
  }
  if (status != MW_OK) return report_status(status);

  const int written = emit(output, opt.out);
  mw_string_free(output);
  if (written != kExitOk) return written;
  if (!passed) {
    std::cerr << kind << ": at least one check failed\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& opt, bool config_required) {
  auto* config = cmd->add_option("--config", opt.config, "experiment config (JSON)");
  if (config_required) config->required();
  cmd->add_option("--seed", opt.seed, "root seed; overrides the config");
  cmd->add_option("--out", opt.out, "output file (default: stdout)");
  cmd->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", opt.jobs, "worker threads (default: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotonizing wrapper: learning curves and exact verification sweeps"};
  app.require_subcommand(1);
  Options opt;

  auto* curve = app.add_subcommand("curve", "Monte Carlo learning curves, base vs wrapped");
  add_common(curve, opt, true);
  auto* verify = app.add_subcommand("verify", "exact oracle verification sweep");
  add_common(verify, opt, true);
  auto* audit = app.add_subcommand("schedule-audit", "check the block schedule over a range");
  add_common(audit, opt, false);
  audit->add_option("--begin", opt.begin, "first sample size (>= 9)");
  audit->add_option("--end", opt.end, "last sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (curve->parsed()) return run("curve", opt);
  if (verify->parsed()) return run("verify", opt);
  return run("schedule-audit", opt);
}
