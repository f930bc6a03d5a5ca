#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpbt/gp_model.hpp"

namespace gpbt {

/// Malformed or inconsistent experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SeedKind { ClosedForm, Integrate };

struct ExperimentConfig {
  GPParams params;
  struct {
    double x_min = 0.5;
    double x_max = 5.0;
    std::size_t points = 401;
  } grid;
  std::vector<double> k_schedule;
  struct {
    SeedKind kind = SeedKind::ClosedForm;
    double x0 = 1.0;
    double r0 = 1.0;
    double rp0 = 0.0;
  } seed;
  struct {
    double ode_abs = 1e-10;
    double ode_rel = 1e-10;
    double ode_max_step = 0.0;  // 0: unbounded
    double residual_pass = 1e-5;
    double fixed_point = 1e-10;
  } tolerances;
  struct {
    std::string solution_csv = "solution.csv";
    std::string wave_csv = "wave.csv";
    std::string report_json = "report.json";
  } outputs;
  double x_ref = 0.0;
  std::vector<double> t_samples{0.0};
  std::uint64_t verify_seed = 1;

  /// Throws ConfigError.
  void validate() const;
  std::vector<double> abscissae() const;
};

/// Flat "dotted.key = value" text, one entry per line, '#' starts a comment.
/// Unknown keys, duplicates and unparsable values throw ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<double> parse_real_list(const std::string& text);

/// Header row plus one row per point, every number printed with 17
/// significant digits.
void write_solution_csv(const std::filesystem::path& path, const SolutionGrid& grid);
SolutionGrid read_solution_csv(const std::filesystem::path& path);

struct CommandResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> written;
  std::string summary;
};

/// Each command writes its files under out_dir. Configuration problems
/// surface as ConfigError; numerical failures as gpbt::Error with the stage
/// prefixed to the message.
CommandResult cmd_solve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_transform(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Exit code 0 iff every check passes, 1 otherwise, 3 after writing a partial
/// report when a check throws.
CommandResult cmd_verify(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_wavefunction(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace gpbt
