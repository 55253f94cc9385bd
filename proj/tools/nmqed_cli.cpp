// nmqed: command-line front end for the two-level atom solvers.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "nmqed/cli/commands.hpp"

namespace {

using namespace nmqed::cli;

struct Options {
  std::string config;
  std::string out;
  std::string format;
  int threads = 0;
};

int run(const std::string& command, const Options& opt) {
  RunConfig cfg;
  try {
    cfg = load_config(opt.config);
    if (!opt.format.empty()) cfg.format = parse_format(opt.format);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& note : cfg.notices) std::cerr << note << '\n';

  CommandResult res;
  try {
    if (command == "evolve") {
      res = cmd_evolve(cfg);
    } else if (command == "scan") {
      res = cmd_scan(cfg, opt.threads);
    } else if (command == "poles") {
      res = cmd_poles(cfg);
    } else {
      res = cmd_oracle_check(cfg);
    }
  } catch (const nmqed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
  for (const auto& msg : res.messages) std::cerr << msg << '\n';

  if (opt.out.empty()) {
    write_table(std::cout, res.table, cfg.format);
  } else {
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) {
      std::cerr << "cannot write '" << opt.out << "'\n";
      return kConfigError;
    }
    write_table(file, res.table, cfg.format);
  }
  return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian two-level atom dynamics: u(t), poles and oracle checks"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"evolve", "scan", "poles", "oracle-check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output file (default: standard output)");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opt.threads, "Worker threads for sweeps (default: all)")
        ->check(CLI::NonNegativeNumber);
  }
  app.get_subcommand("evolve")->description("Time series of u(t), the emitted probability, the state and the rates");
  app.get_subcommand("scan")->description("Pole position over a sweep of the atomic frequency");
  app.get_subcommand("poles")->description("Dominant pole for the configured atom");
  app.get_subcommand("oracle-check")->description("Solvers against exact diagonalization of discrete modes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}
