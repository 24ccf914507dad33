#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "augmc/errors.hpp"
#include "augmc/experiment/config.hpp"
#include "augmc/experiment/runner.hpp"
#include "augmc/experiment/verify.hpp"

namespace {

struct cli_args {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
};

void add_common(CLI::App* sub, cli_args& args) {
  sub->add_option("--config", args.config_path, "experiment config file")
      ->required();
  sub->add_option("--out", args.out_dir, "output directory (default .)");
  sub->add_option("--seed-override", args.seed_override,
                  "run only this seed, replacing the config's seed list");
  sub->add_flag("--quiet", args.quiet, "suppress progress output");
}

int run_experiment(const std::string& name, const cli_args& args) {
  augmc::config_map cfg =
      augmc::config_map::parse_file(args.config_path);
  if (cfg.has("experiment")) {
    const std::string declared = cfg.get_string("experiment");
    if (declared != name)
      throw augmc::config_error("config declares experiment '" + declared +
                                "' but subcommand is '" + name + "'");
  } else {
    cfg.override_value("experiment", name);
  }
  augmc::experiment::options opt;
  opt.out_dir = args.out_dir;
  opt.seed_override = args.seed_override;
  opt.quiet = args.quiet;
  augmc::experiment::run(std::move(cfg), opt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data-augmentation sampling experiments"};
  app.require_subcommand(0, 1);
  bool verify = false;
  app.add_flag("--verify", verify,
               "run the built-in oracle invariant suite and exit");

  const std::vector<std::string> names{"morris", "treg", "ising", "potts",
                                       "compare-baselines"};
  const std::vector<std::string> blurbs{
      "hierarchical-means posterior via data augmentation",
      "robust regression with latent weights",
      "two-state lattice model kernels",
      "multi-state lattice model kernels",
      "deterministic approximations vs the augmentation sampler"};
  std::vector<cli_args> args(names.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    add_common(sub, args[i]);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify) {
      const int failures = augmc::experiment::run_verify(std::cout);
      if (failures > 0) {
        std::cout << failures << " check(s) failed\n";
        return 4;
      }
      std::cout << "all checks passed\n";
      return 0;
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      if (subs[i]->parsed()) return run_experiment(names[i], args[i]);
    std::cerr << "error: no subcommand given (see --help)\n";
    return 2;
  } catch (const augmc::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
