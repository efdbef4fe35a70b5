// purcell <subcommand> --config <path> [--out <path>] [--override section.key=value ...]

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "purcell/cli.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Spontaneous emission near dielectric bodies: spectra, rates, decay and audits"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string("purcell ") + purcell::version);

  std::string config_path, out_path;
  std::vector<std::string> overrides;
  const std::map<std::string, std::string> help = {
      {"eps", "tabulate eps', eps'' and Kramers-Kronig reconstructions"},
      {"spectrum", "tabulate the normalized local density of states S(omega)"},
      {"rate", "print Gamma/Gamma0 and the Markov line shift"},
      {"decay", "tabulate C_u(t) from the memory-kernel equation and its Markov reference"},
      {"audit", "run the invariant suite and report pass/fail per check"}};
  for (const auto &name : purcell::subcommands()) {
    CLI::App *sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "CSV output path (default: [output] path, else stdout)");
    sub->add_option("--override", overrides, "section.key=value, applied before validation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? purcell::exit_ok : purcell::exit_usage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    const purcell::RunConfig cfg = purcell::parse_config(text.str(), overrides);
    if (out_path.empty())
      out_path = cfg.output;

    std::ofstream file;
    std::ostream *table = nullptr;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot open output file '" << out_path << "'\n";
        return purcell::exit_usage;
      }
      table = &file;
    } else if (command != "rate" && command != "audit") {
      table = &std::cout;
    }
    return purcell::run_command(command, cfg, std::cout, table);
  } catch (const purcell::ConfigError &e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return purcell::exit_usage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return purcell::exit_code_for(e);
  }
}
