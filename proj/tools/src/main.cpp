#include <CLI11.hpp>
#include <iostream>

#include "semihyp_cli/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace semihyp::cli;
  CLI::App app{"Classification and verification of semi-hyperbolic germs"};
  app.require_subcommand(1);

  std::string input, out = ".";
  ClassifySettings cs;
  auto* classify = app.add_subcommand("classify", "Normalize and classify a germ document");
  classify->add_option("file", input, "Germ document (JSON)")->required()->check(CLI::ExistingFile);
  classify->add_option("--degree", cs.degree, "Truncation degree N");
  classify->add_option("--qmax", cs.q_max, "Largest root-of-unity order tried");
  classify->add_option("--tol", cs.tol, "Coefficient tolerance");
  classify->add_option("--seed", cs.seed, "Seed of the quadratic shear");
  classify->add_option("--out", out, "Output directory");

  std::string experiment;
  VerifySettings vs;
  auto* verify = app.add_subcommand("verify", "Run a verification experiment");
  verify->add_option("file", input, "Germ document (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("--experiment", experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"sector", "splitting", "bundle", "center"}));
  verify->add_option("--grid", vs.grid, "Grid size per axis (sector)");
  verify->add_option("--eta", vs.eta, "Bump radius");
  verify->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFormat;
  }

  if (*classify) return run_classify_command(input, cs, out, std::cout, std::cerr);
  vs.experiment = parse_experiment(experiment);
  return run_verify_command(input, vs, out, std::cout, std::cerr);
}
