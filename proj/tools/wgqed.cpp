#include <CLI11.hpp>

#include <iostream>

#include "wgqed/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = wgqed::cli;
  CLI::App app{"Waveguide two-level emitter scattering: simulate, fit, reconstruct, predict"};
  app.require_subcommand(1);

  std::string config, data, out, params, toggles = "all", combination = "exact";
  std::uint64_t seed = 1;

  auto* sim = app.add_subcommand("simulate", "generate synthetic intensity scans and g2 traces");
  sim->add_option("--config", config, "experiment config (INI)")->required();
  sim->add_option("--seed", seed, "shot-noise seed");
  sim->add_option("--out", out, "output directory")->required();

  auto* fit = app.add_subcommand("fit", "least-squares fit of emitter and noise parameters");
  fit->add_option("--data", data, "directory with intensity.csv and g2*.csv")->required();
  fit->add_option("--config", config, "experiment config (INI)")->required();
  fit->add_option("--out", out, "output directory")->required();

  auto* rec = app.add_subcommand("reconstruct", "single- and two-photon scattering from measured data");
  rec->add_option("--data", data, "directory with intensity.csv and g2*.csv")->required();
  rec->add_option("--params", params, "fit_result.json or truth.json")->required();
  rec->add_option("--out", out, "output directory")->required();
  rec->add_option("--combination", combination, "exact or printed")->check(CLI::IsMember({"exact", "printed"}));

  auto* pred = app.add_subcommand("predict", "model curves with selectable imperfections");
  pred->add_option("--config", config, "experiment config (INI)")->required();
  pred->add_option("--toggles", toggles, "comma list of sd, bg, irf, or all / none / ideal");
  pred->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }

  return cli::guarded(
      [&] {
        if (*sim) return cli::cmd_simulate(config, seed, out, std::cout);
        if (*fit) return cli::cmd_fit(data, config, out, std::cout);
        if (*rec)
          return cli::cmd_reconstruct(data, params, out, std::cout,
                                      combination == "printed" ? wgqed::reconstruct::Combination::as_printed
                                                               : wgqed::reconstruct::Combination::exact);
        return cli::cmd_predict(config, toggles, out, std::cout);
      },
      std::cerr);
}
