#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gaudit/config.hpp"
#include "gaudit/lexicon.hpp"

namespace gaudit::pipeline {

// Exit code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitMissingData = 4;

int exit_code_for(const std::exception& e);

// Hash of everything that determines the scored record set: the model (id,
// cache-key label, tokenizer), the lexicon content, and the suite list. No
// timestamps, so reruns of the same command reuse the same run id and
// sealing stays idempotent.
std::string make_run_id(const std::string& model_id, const std::string& kind_label,
                        const std::string& tokenizer_fingerprint,
                        const std::string& lexicon_digest,
                        const std::vector<probes::Suite>& suites);

// Subcommand bodies. They write the results summary to `out`, progress and
// notices to `err`, and return a process exit code instead of throwing.
int cmd_validate(const config::AuditConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const config::AuditConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_analyze(const config::AuditConfig& cfg, const std::vector<std::string>& run_ids,
                std::ostream& out, std::ostream& err);
int cmd_export(const config::AuditConfig& cfg, const std::vector<std::string>& run_ids,
               std::ostream& out, std::ostream& err);

}  // namespace gaudit::pipeline
