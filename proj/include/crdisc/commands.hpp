#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crdisc/config.hpp"
#include "crdisc/report.hpp"

namespace crd {

/// Files are (name, content) pairs for the caller to write; status is 0 iff every gating row
/// passes.
struct CommandOutput {
  int status = 0;
  std::vector<std::pair<std::string, std::string>> files;
  std::string text;
};

/// Subcommands: seed certify | bishop solve|sweep | family build|verify | interp kfun|negnorm|verify |
/// psh verify <id>|all | trace verify <id>|all | exponent run | verify all.
CommandOutput run_command(const std::vector<std::string>& words, const RunConfig& cfg);

/// The verdict rows behind each acceptance stage.
std::vector<VerdictRow> spectral_rows(const RunConfig& cfg);
std::vector<VerdictRow> seed_rows(const RunConfig& cfg);
std::vector<VerdictRow> bishop_rows(const RunConfig& cfg);
std::vector<VerdictRow> family_rows(const RunConfig& cfg);
std::vector<VerdictRow> interp_rows(const RunConfig& cfg);
std::vector<VerdictRow> psh_rows(const RunConfig& cfg, const std::string& lemma = "all");
std::vector<VerdictRow> trace_rows(const RunConfig& cfg, const std::string& id = "all");
struct ExponentTables {
  std::vector<VerdictRow> rows;
  std::string measurements, summary;
};
ExponentTables exponent_rows(const RunConfig& cfg, bool acceptance_checks);

/// Stage names of `verify all`, in order, one per acceptance criterion.
extern const std::vector<std::string> kVerifyStages;

}  // namespace crd
