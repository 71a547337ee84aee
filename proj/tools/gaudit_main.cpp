#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gaudit/config.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/pipeline.hpp"

namespace {

struct CliState {
  std::string config_path;
  gaudit::config::Overrides overrides;
  std::vector<std::string> run_ids;
};

void add_common_flags(CLI::App* cmd, CliState& state) {
  cmd->add_option("--config", state.config_path, "Audit config file (JSON)")
      ->required();
  cmd->add_option("--model", state.overrides.models,
                  "Restrict to these model ids (repeatable)");
  cmd->add_option("--suite", state.overrides.suites,
                  "Replace the suite list (repeatable)");
  cmd->add_option("--cache-dir", state.overrides.cache_dir,
                  "Override the score cache directory");
  cmd->add_option("--out", state.overrides.out_dir, "Override the output directory");
  cmd->add_option("--masked-mode", state.overrides.masked_mode,
                  "single_pass or iterative");
  cmd->add_option("--identifier-subset", state.overrides.identifier_subset,
                  "Restrict the folk-subversive view to these gender identifiers");
}

gaudit::config::AuditConfig load(const CliState& state) {
  auto cfg = gaudit::config::load_config_file(state.config_path);
  gaudit::config::apply_overrides(cfg, state.overrides);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaudit: probes how language models associate gender, sex "
               "characteristics, and illness"};
  app.require_subcommand(1);

  CliState state;
  auto* validate = app.add_subcommand(
      "validate", "Check lexicon invariants, suite sizes, and backend bindings");
  add_common_flags(validate, state);

  auto* run = app.add_subcommand(
      "run", "Score the configured suites (cache-aware) and seal run manifests");
  add_common_flags(run, state);

  auto* analyze = app.add_subcommand(
      "analyze", "Compute metrics from sealed runs and render tables and figures");
  add_common_flags(analyze, state);
  analyze->add_option("--run", state.run_ids,
                      "Analyze only these run ids (repeatable; default: all)");

  auto* exp = app.add_subcommand("export", "Export sealed runs as CSV and JSONL");
  add_common_flags(exp, state);
  exp->add_option("--run", state.run_ids,
                  "Export only these run ids (repeatable; default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(state);
    if (validate->parsed())
      return gaudit::pipeline::cmd_validate(cfg, std::cout, std::cerr);
    if (run->parsed()) return gaudit::pipeline::cmd_run(cfg, std::cout, std::cerr);
    if (analyze->parsed())
      return gaudit::pipeline::cmd_analyze(cfg, state.run_ids, std::cout, std::cerr);
    if (exp->parsed())
      return gaudit::pipeline::cmd_export(cfg, state.run_ids, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gaudit::pipeline::exit_code_for(e);
  }
  return gaudit::pipeline::kExitUnexpected;
}
