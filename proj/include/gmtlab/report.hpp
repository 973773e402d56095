#pragma once

#include "gmtlab/parallel.hpp"
#include "gmtlab/quadrature.hpp"
#include "gmtlab/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gmtlab {

inline constexpr const char* kToolName = "gmtlab";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

/// Suites understood by `run`; "all" expands to the first six.
inline const std::vector<std::string> kSuiteNames = {
    "uniformity", "distributed", "identities", "sucp", "wucp", "dimension", "quadrature"};

/// Everything a run needs. Empty centres/radii mean per-suite defaults.
struct RunConfig {
  std::string measure = "plane";
  double density = 1.0;
  std::vector<std::string> suites = {"all"};
  std::vector<Vec> centers;
  std::vector<double> radii;
  double tol = 1e-6;
  double identity_tol = 1e-7;
  double dimension_tol = 1e-3;
  double rel_tol = 1e-10;
  std::uint64_t seed = kDefaultSeed;
  int directions = 8;
  int chain_length = 3;
  double r0 = 1.0;
  int k_guess = 0;
  std::size_t mc_samples = 200000;
  ExecPolicy policy = ExecPolicy::parallel;
  std::string format = "json";
  std::string out;  // empty: standard output
  bool timing = false;
};

/// Applies one `key = value` setting; unknown keys and malformed values throw
/// a config error.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Reads `key = value` lines; '#' starts a comment.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});
/// Throws a config error on out-of-range values.
void validate(const RunConfig& config);
/// Suite list with "all" expanded, duplicates removed, order kept.
std::vector<std::string> expanded_suites(const RunConfig& config);

/// One number of a report together with its error and provenance.
struct Record {
  std::string quantity;
  std::optional<Vec> center;
  std::optional<double> radius;
  double value = 0.0;
  double error = 0.0;
  std::string verdict;  // pass, fail, info, inconclusive or a probe status
  std::string method;
  std::size_t evaluations = 0;
  std::optional<std::uint64_t> seed;
};

enum class SuiteStatus { pass, fail, error };
const char* to_string(SuiteStatus s) noexcept;

struct SuiteResult {
  std::string name;
  SuiteStatus status = SuiteStatus::pass;
  std::string message;  // error text when status == error
  std::vector<Record> records;
};

struct ReportEnvelope {
  std::string schema_version = kSchemaVersion;
  std::string tool = kToolName;
  std::string version = kToolVersion;
  RunConfig config;
  std::vector<SuiteResult> suites;
  std::optional<double> wall_time_seconds;
  SuiteStatus overall = SuiteStatus::pass;
};

/// Executes the configured suites in order. Library errors inside a suite mark
/// that suite as `error` and the remaining suites still run.
ReportEnvelope run(const RunConfig& config);

/// 0 when every suite passes, 1 when some suite fails, 2 on execution errors.
int exit_code(const ReportEnvelope& report);

std::string emit_json(const ReportEnvelope& report);
std::string emit_csv(const ReportEnvelope& report);
/// Writes to `path` (standard output when empty) in `format` (json or csv).
void emit(const ReportEnvelope& report, const std::string& format,
          const std::string& path);
/// Inverse of emit_json.
ReportEnvelope parse_json_report(const std::string& text);

}  // namespace gmtlab
