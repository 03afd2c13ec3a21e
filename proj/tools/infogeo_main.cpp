// infogeo: Fisher information, singular-rank diagnostics and Cramer-Rao gap
// certification driven by JSON job specs.
//
//   infogeo run --spec job.json [--out report.json] [--format json|csv]
//   infogeo validate --spec job.json
//
// Flags may also be set through INFOGEO_* environment variables; explicit
// flags win.  Exit codes: 0 success, 1 error, 2 = a verify job found an
// uncertified gap.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "infogeo/job.hpp"

namespace {

using nlohmann::json;

std::optional<std::string> env_string(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

json load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file '" + path + "'");
  json spec;
  in >> spec;
  return spec;
}

int emit_error(const std::string& message) {
  json err;
  err["error"] = {{"message", message}};
  std::cout << err.dump(2) << "\n";
  return 1;
}

struct Flags {
  std::string spec_path;
  std::string out_path;
  std::string format;
  std::string seed;
  std::string threads;
  std::string rank_threshold;
  std::string psd_tol;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--spec", flags.spec_path, "job spec JSON file")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information-geometry toolkit: Fisher matrices, singular ranks, Cramer-Rao gaps"};
  app.require_subcommand(1);

  Flags flags;
  CLI::App* run = app.add_subcommand("run", "validate and execute a job spec");
  add_common(run, flags);
  run->add_option("--out", flags.out_path, "report output path (default: stdout)");
  run->add_option("--format", flags.format, "report format: json or csv");
  run->add_option("--seed", flags.seed, "seed override (u64)");
  run->add_option("--threads", flags.threads, "worker threads for point sweeps");
  run->add_option("--rank-threshold", flags.rank_threshold, "relative eigenvalue threshold for rank");
  run->add_option("--psd-tol", flags.psd_tol, "PSD certification tolerance override");

  CLI::App* validate = app.add_subcommand("validate", "schema-check a job spec without running it");
  add_common(validate, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const json spec = load_spec(flags.spec_path);

    if (validate->parsed()) {
      try {
        infogeo::validate_job(spec);
      } catch (const std::invalid_argument& e) {
        return emit_error(e.what());
      }
      json ok;
      ok["valid"] = true;
      ok["command"] = spec.value("command", "");
      std::cout << ok.dump(2) << "\n";
      return 0;
    }

    // Precedence: flag > environment > spec file.
    infogeo::JobOverrides ov;
    const auto pick = [](const std::string& flag, const char* env) {
      return flag.empty() ? env_string(env) : std::optional<std::string>(flag);
    };
    if (auto v = pick(flags.out_path, "INFOGEO_OUT")) ov.out_path = *v;
    if (auto v = pick(flags.format, "INFOGEO_FORMAT")) ov.format = *v;
    if (auto v = pick(flags.seed, "INFOGEO_SEED")) ov.seed = std::stoull(*v);
    if (auto v = pick(flags.threads, "INFOGEO_THREADS")) ov.threads = static_cast<unsigned>(std::stoul(*v));
    if (auto v = pick(flags.rank_threshold, "INFOGEO_RANK_THRESHOLD")) ov.rank_threshold = std::stod(*v);
    if (auto v = pick(flags.psd_tol, "INFOGEO_PSD_TOL")) ov.psd_tol = std::stod(*v);

    const infogeo::JobOutcome outcome = infogeo::run_job(spec, ov);

    std::string format = "json";
    if (spec.contains("output") && spec["output"].contains("format")) {
      format = spec["output"]["format"].get<std::string>();
    }
    if (ov.format) format = *ov.format;

    std::string out_path;
    if (spec.contains("output") && spec["output"].contains("path")) {
      out_path = spec["output"]["path"].get<std::string>();
    }
    if (ov.out_path) out_path = *ov.out_path;

    const std::string rendered = infogeo::render_report(outcome.report, format);
    if (out_path.empty()) {
      std::cout << rendered;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write report to '" + out_path + "'");
      out << rendered;
    }
    return outcome.exit_code;
  } catch (const std::exception& e) {
    return emit_error(e.what());
  }
}
