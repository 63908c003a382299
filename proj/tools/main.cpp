#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "psifde/psifde.hpp"

int main(int argc, char** argv) {
  CLI::App app{"psifde: monotone-iterative solver for psi-Hilfer fractional boundary value problems"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "run a solver from a JSON config file");
  std::string config_path;
  solve->add_option("config", config_path, "path to the config JSON")->required();
  std::optional<std::size_t> mesh_n;
  solve->add_option("--mesh-n", mesh_n, "override mesh.N");
  std::optional<std::string> mode;
  solve->add_option("--mode", mode, "override solver.mode");
  std::optional<std::string> out_dir;
  solve->add_option("--out", out_dir, "override output.path");
  std::optional<std::uint64_t> seed;
  solve->add_option("--seed", seed, "override the sampling seed");

  auto* presets = app.add_subcommand("presets", "built-in problem presets");
  auto* plist = presets->add_subcommand("list", "list preset names");
  auto* pshow = presets->add_subcommand("show", "print a preset config as JSON");
  std::string preset_name;
  pshow->add_option("name", preset_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      psifde::cli::RunConfig cfg = psifde::cli::load_config(config_path);
      if (mesh_n) cfg.N = *mesh_n;
      if (mode) cfg.mode = *mode;
      if (out_dir) cfg.out_path = *out_dir;
      if (seed) cfg.seed = *seed;
      psifde::cli::validate(cfg);
      const int status = psifde::cli::run(cfg);
      std::cout << "wrote " << cfg.out_path << "/summary.json\n";
      return status;
    }
    if (plist->parsed()) {
      for (const auto& n : psifde::cli::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (pshow->parsed()) {
      std::cout << psifde::cli::preset_json(preset_name);
      return 0;
    }
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
