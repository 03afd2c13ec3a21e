#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

namespace infogeo {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1.0";

/// Flag/environment overrides applied on top of a job spec file.
struct JobOverrides {
  std::optional<std::string> out_path;
  std::optional<std::string> format;  // "json" | "csv"
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> rank_threshold;
  std::optional<double> psd_tol;
};

struct JobOutcome {
  nlohmann::json report;
  int exit_code = 0;  // 0 ok, 2 = verify found an uncertified gap
};

/// Validates a job spec; throws std::invalid_argument with a field-path
/// message ("$.field: ...") on the first violation.
void validate_job(const nlohmann::json& spec);

/// Validates, runs and assembles the machine-readable report.  Per-point
/// numerical failures are recorded in the report instead of aborting the
/// sweep; only spec-level errors throw.
JobOutcome run_job(const nlohmann::json& spec, const JobOverrides& overrides = {});

/// Report rendered in the requested format ("json" or "csv").
std::string render_report(const nlohmann::json& report, const std::string& format);

}  // namespace infogeo
