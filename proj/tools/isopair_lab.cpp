#include <iostream>

#include <CLI11.hpp>

#include "isopair_lab/cli.hpp"

int main(int argc, char **argv) {
  using isopair_lab::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Isopair lab: inner-toral curves, colligations, ranks, kernels and ideals"};
  app.require_subcommand(1);

  std::optional<double> tol;
  for (const auto &name : isopair_lab::cli::commands()) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--poly", cfg.polys, "polynomial JSON (twice for ideal)");
    sub->add_option("--colligation", cfg.colligation, "colligation JSON");
    sub->add_option("--factors", cfg.factors, "irreducible factors JSON");
    sub->add_option("--bundle", cfg.bundle, "input bundle for report");
    sub->add_option("--tol", tol, "main tolerance of the command");
    sub->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    sub->add_option("--truncation", cfg.truncation, "shift model truncation degree")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "regular points per component")->capture_default_str();
    sub->add_option("--order", cfg.order, "term order: lex_zw or degrevlex")->capture_default_str();
    sub->add_option("--generators", cfg.generators, "defect: number of generators to use");
    sub->add_flag("--exterior", cfg.exterior, "also check the exterior of the bidisk");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : isopair_lab::cli::kExitInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.tol = tol;
  return isopair_lab::cli::run(cfg, std::cout, std::cerr);
}
