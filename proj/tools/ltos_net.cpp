#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ltos/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Networked reward-sharing MARL: training runs, oracles and matrix-game analysis"};

  std::string command;
  std::string seeds = "1";
  std::uint64_t episodes = 0;
  ltos::RunManifest manifest;

  app.add_option("command", command, "train, oracle or matrix")
      ->required()
      ->check(CLI::IsMember({"train", "oracle", "matrix"}));
  app.add_option("--config", manifest.config_path, "key=value run configuration")->required();
  app.add_option("--method", manifest.method, "ltos, fixed, independent, oracle or matrix");
  app.add_option("--seeds", seeds, "comma-separated seed list");
  app.add_option("--out", manifest.out_dir, "output directory")->required();
  auto* episodes_opt = app.add_option("--episodes", episodes, "override the episode count");

  CLI11_PARSE(app, argc, argv);

  try {
    manifest.command = ltos::command_from_string(command);
    manifest.seeds = ltos::parse_seeds(seeds);
    if (episodes_opt->count() > 0) manifest.episodes = episodes;
    return ltos::run(manifest, std::cout);
  } catch (const ltos::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
