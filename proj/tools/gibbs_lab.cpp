#include <iostream>

#include <CLI11.hpp>

#include "gibbs/common.hpp"
#include "experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Truncated Gibbs measure experiments"};
  std::string sub, path;
  app.add_option("subcommand", sub, "sample | flow | invariance | rate | oracle | zladder | appendix")
      ->required()
      ->check(CLI::IsMember(lab::kSubcommands));
  app.add_option("config", path, "INI config file")->required();
  app.footer("Worker threads: GIBBS_WORKERS (default: hardware concurrency).");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lab::kConfigError;
  }

  try {
    const auto cfg = lab::Config::load(path);
    const int code = lab::run(sub, cfg);
    std::cout << sub << ": " << (code == lab::kPass ? "pass" : "FAIL") << '\n';
    return code;
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return lab::kConfigError;
  } catch (const gibbs::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return lab::kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return lab::kNumericalFailure;
  }
}
