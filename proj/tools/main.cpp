#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "patchdyn/io.hpp"

using patchdyn::CliOptions;
using patchdyn::OutFormat;

int main(int argc, char** argv) {
  CLI::App app{"Two-patch prey-predator dynamics toolkit"};
  app.require_subcommand(1);

  struct SubState {
    CliOptions opts;
    std::string format = "csv";
    bool schema = false;
  };

  const std::vector<std::string> names = {"classify", "equilibria", "simulate",
                                          "sweep1d", "sweep2d"};
  const std::vector<std::string> descriptions = {
      "single-patch regimes, persistence and boundary stability predicates",
      "all equilibrium families at the configured parameters",
      "integrate one trajectory and summarize its attractor",
      "one-parameter bifurcation sweep over s",
      "two-parameter interior-equilibrium count map"};

  std::map<std::string, SubState> state;
  for (size_t i = 0; i < names.size(); ++i) {
    SubState& st = state[names[i]];
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", st.opts.config_path, "path to the run config");
    sub->add_option("--out", st.opts.out_path, "machine-readable output path");
    sub->add_option("--format", st.format, "output format: csv or ndjson")
        ->check(CLI::IsMember({"csv", "ndjson"}));
    if (names[i] == "sweep1d" || names[i] == "sweep2d")
      sub->add_option("--jobs", st.opts.jobs, "worker thread count")
          ->check(CLI::PositiveNumber);
    sub->add_flag("--schema", st.schema,
                  "print the config keys and output columns, then exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad flags are config errors
  }

  for (const std::string& name : names) {
    if (!app.get_subcommand(name)->parsed()) continue;
    SubState& st = state[name];
    if (st.schema) {
      std::cout << patchdyn::schema_text(name);
      return 0;
    }
    if (st.opts.config_path.empty()) {
      std::cerr << "config error: --config is required\n";
      return 2;
    }
    st.opts.format = st.format == "ndjson" ? OutFormat::ndjson : OutFormat::csv;
    if (name == "classify") return patchdyn::cmd_classify(st.opts, std::cout);
    if (name == "equilibria") return patchdyn::cmd_equilibria(st.opts, std::cout);
    if (name == "simulate") return patchdyn::cmd_simulate(st.opts, std::cout);
    if (name == "sweep1d") return patchdyn::cmd_sweep1d(st.opts, std::cout);
    if (name == "sweep2d") return patchdyn::cmd_sweep2d(st.opts, std::cout);
  }
  return 2;
}
