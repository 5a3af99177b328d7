#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "crdisc/crdisc.h"

namespace {

int exit_code(crd_status s) {
  switch (s) {
    case CRD_OK: return 0;
    case CRD_FAIL: return 1;
    case CRD_CONFIG:
    case CRD_INPUT: return 2;
    case CRD_NUMERICAL:
    case CRD_INVARIANT: return 3;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crdisc: analytic discs, trace inequalities and Hoelder exponents of surface measures"};
  std::vector<std::string> words;
  std::string config, out_dir = ".";
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;

  app.add_option("command", words,
                 "seed certify | bishop solve|sweep | family build|verify [jacobian|distance|coverage|attach] | "
                 "interp kfun|negnorm|verify | psh verify <id>|all | trace verify lemma53|prop54|all | "
                 "exponent run | verify all")
      ->required();
  app.add_option("--config", config, "key = value config file");
  app.add_option("--out-dir", out_dir, "directory for the CSV artifacts");
  app.add_option("--set", sets, "override one key, key=value (repeatable)");

  // shorthands for the keys each subcommand cares about
  struct Alias {
    const char* flag;
    std::vector<const char*> keys;
    const char* help;
  };
  const std::vector<Alias> aliases{
      {"--seed", {"seed"}, "base seed"},
      {"--manifold", {"manifold"}, "zero | quadratic | trig | poly"},
      {"--d", {"d", "exponent.dims"}, "dimension"},
      {"--t", {"bishop.t"}, "disc size t (0 = t_max / 2)"},
      {"--modes", {"bishop.modes"}, "Bishop solver modes"},
      {"--tol", {"bishop.tol"}, "Picard tolerance"},
      {"--tau-nodes", {"family.tau_nodes"}, "tau nodes per axis"},
      {"--dictionary", {"interp.dictionary", "trace.dictionary"}, "bump-L<k>"},
      {"--beta", {"trace.beta"}, "negative order beta"},
      {"--beta0", {"trace.beta0"}, "negative order beta0"},
      {"--family", {"exponent.families"}, "exponent pair families, comma separated"},
      {"--sweep", {"exponent.sweep"}, "truncation levels a:b:step or a list"},
  };
  std::vector<std::string> alias_values(aliases.size());
  for (std::size_t i = 0; i < aliases.size(); ++i) app.add_option(aliases[i].flag, alias_values[i], aliases[i].help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  crd_session* s = crd_session_create();
  if (!s) {
    std::fprintf(stderr, "%s\n", crd_last_error());
    return 4;
  }
  crd_status st = CRD_OK;
  if (!config.empty()) st = crd_session_load_config(s, config.c_str());
  for (std::size_t i = 0; st == CRD_OK && i < aliases.size(); ++i)
    if (!alias_values[i].empty())
      for (const char* key : aliases[i].keys)
        if (st == CRD_OK) st = crd_session_set(s, key, alias_values[i].c_str());
  for (const auto& kv : sets) {
    if (st != CRD_OK) break;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "cli: --set expects key=value, got '%s'\n", kv.c_str());
      crd_session_destroy(s);
      return 2;
    }
    st = crd_session_set(s, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
  }
  if (st == CRD_OK || st == CRD_FAIL) {
    std::string cmd;
    for (const auto& w : words) cmd += (cmd.empty() ? "" : " ") + w;
    st = crd_session_run(s, cmd.c_str(), out_dir.c_str());
    std::fputs(crd_session_output(s), stdout);
  }
  if (st != CRD_OK && st != CRD_FAIL) std::fprintf(stderr, "%s\n", crd_last_error());
  crd_session_destroy(s);
  return exit_code(st);
}
