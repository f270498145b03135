#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "fbns/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral Lagrangian solver for vacuum free-boundary compressible Navier-Stokes"};
  app.require_subcommand(1);
  std::string config;
  std::optional<std::string> out;
  std::string horizons;
  std::optional<unsigned> seed;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", config, "Run configuration (key = value)");
    c->add_option("--out", out, "Output directory (overrides output.directory)");
  };
  CLI::App* verify = app.add_subcommand("verify", "Run the verification checks");
  CLI::App* run = app.add_subcommand("run", "Fixed-point run with energy and monitor output");
  CLI::App* study = app.add_subcommand("contraction-study", "Contraction ratio of Xi against the horizon");
  add_common(verify);
  add_common(run);
  add_common(study);
  study->add_option("--horizons", horizons, "Comma-separated horizons (overrides study.horizons)");
  study->add_option("--seed", seed, "Perturbation seed (overrides study.seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fbns::kExitConfig;
  }

  fbns::RunConfig cfg;
  std::vector<double> hs;
  try {
    if (!config.empty()) cfg = fbns::load_config(config);
    hs = cfg.horizons;
    if (study->count("--horizons")) hs = fbns::parse_list(horizons);
  } catch (const fbns::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fbns::exit_code_for(e);
  }
  if (seed) cfg.study.seed = *seed;
  const std::string dir = out ? *out : cfg.output_dir;

  if (verify->parsed()) return fbns::cmd_verify(cfg, dir, std::cout);
  if (run->parsed()) return fbns::cmd_run(cfg, dir, std::cout);
  return fbns::cmd_contraction_study(cfg, hs, dir, std::cout);
}
