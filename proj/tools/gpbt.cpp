#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gpbt/error.hpp"
#include "gpbt/experiment.hpp"

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kConfig = 2, kNumerical = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auto-Backlund transformations of the stationary Gross-Pitaevskii equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string t_samples;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment configuration file")->required();
    sub->add_option("--out-dir", out_dir, "directory for output files");
  };
  CLI::App* solve = app.add_subcommand("solve", "sample the seed amplitude and its residual");
  CLI::App* transform = app.add_subcommand("transform", "apply the transformation along K_schedule");
  CLI::App* verify = app.add_subcommand("verify", "run the identity checks");
  CLI::App* wave = app.add_subcommand("wavefunction", "tabulate psi(x, t)");
  for (CLI::App* sub : {solve, transform, verify, wave}) add_common(sub);
  wave->add_option("--t-samples", t_samples, "comma-separated times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    gpbt::ExperimentConfig cfg = gpbt::load_config(config_path);
    if (!t_samples.empty()) cfg.t_samples = gpbt::parse_real_list(t_samples);
    gpbt::CommandResult res;
    if (solve->parsed()) {
      res = gpbt::cmd_solve(cfg, out_dir);
    } else if (transform->parsed()) {
      res = gpbt::cmd_transform(cfg, out_dir);
    } else if (verify->parsed()) {
      res = gpbt::cmd_verify(cfg, out_dir);
    } else {
      res = gpbt::cmd_wavefunction(cfg, out_dir);
    }
    std::cout << res.summary;
    if (!res.summary.empty() && res.summary.back() != '\n') std::cout << '\n';
    for (const auto& p : res.written) std::cout << "wrote " << p.string() << '\n';
    return res.exit_code;
  } catch (const gpbt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const gpbt::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  }
}
