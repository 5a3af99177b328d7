// Runs `verify all` twice (1 and 3 workers), then prints one verdict line per acceptance criterion.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Stage {
  const char* name;
  double budget;  // seconds
  const char* what;
};

// criterion 3 runs two dyadic sweeps (d = 1, 2), each under a minute
const std::vector<Stage> kStages{
    {"spectral", 1, "Hilbert/Poisson exactness at N = 256"},
    {"seed", 10, "seed certification"},
    {"bishop", 120, "Bishop solver and c1 t fit"},
    {"family", 300, "disc family attachment, Jacobian, distance, degeneration"},
    {"interp", 120, "reflection, jet mollification, interpolation ratio"},
    {"psh", 600, "psh lemma suite at n = 1, 2"},
    {"trace", 300, "trace suite"},
    {"exponent", 900, "Hoelder exponent experiment"},
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

struct Run {
  int exit_code = -1;
  double seconds = 0.0;
  fs::path dir;
};

Run run_cli(const std::string& cli, const fs::path& dir, int workers) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmd = "CRDISC_WORKERS=" + std::to_string(workers) + " '" + cli + "' verify all --out-dir '" +
                          dir.string() + "' > '" + (dir / "stdout.log").string() + "' 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int st = std::system(cmd.c_str());
  Run r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.dir = dir;
  return r;
}

struct StageResult {
  bool found = false, schema = false;
  int rows = 0, fails = 0;
  std::string first_fail;
};

StageResult read_stage(const fs::path& file) {
  StageResult s;
  if (!fs::exists(file)) return s;
  s.found = true;
  std::istringstream in(slurp(file));
  std::string line;
  std::getline(in, line);
  s.schema = line == "# schema=1";
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    ++s.rows;
    // metric,value,threshold,verdict,grid,seed
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (cells.size() != 6 || cells[3] == "FAIL") {
      ++s.fails;
      if (s.first_fail.empty()) s.first_fail = cells.empty() ? line : cells[0];
    }
  }
  return s;
}

std::map<std::string, double> read_timing(const fs::path& file) {
  std::map<std::string, double> t;
  std::istringstream in(slurp(file));
  std::string name;
  double secs;
  while (in >> name >> secs) t[name] = secs;
  return t;
}

// names of files that differ or exist in only one run
std::vector<std::string> csv_mismatches(const fs::path& a, const fs::path& b) {
  std::map<std::string, int> seen;
  for (const auto* d : {&a, &b})
    for (const auto& e : fs::directory_iterator(*d))
      if (e.path().extension() == ".csv") ++seen[e.path().filename().string()];
  std::vector<std::string> bad;
  for (const auto& [name, count] : seen)
    if (count != 2 || slurp(a / name) != slurp(b / name)) bad.push_back(name);
  return bad;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: crdisc_acceptance <cli> <work-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  const Run r1 = run_cli(cli, work / "run1", 1);
  const Run r2 = run_cli(cli, work / "run2", 3);
  const auto timing = read_timing(r1.dir / "timing.log");
  const auto mismatch = csv_mismatches(r1.dir, r2.dir);

  bool all = true;
  for (std::size_t k = 0; k < kStages.size(); ++k) {
    const Stage& st = kStages[k];
    const StageResult s = read_stage(r1.dir / ("c" + std::to_string(k + 1) + "_" + st.name + ".csv"));
    const auto it = timing.find(st.name);
    const double secs = it == timing.end() ? -1.0 : it->second;
    bool ok = s.found && s.schema && s.rows > 0 && s.fails == 0 && secs >= 0.0 && secs < st.budget;
    std::ostringstream why;
    why << s.rows << " rows, " << s.fails << " FAIL";
    if (!s.first_fail.empty()) why << " (first: " << s.first_fail << ")";
    if (!s.found) why << ", no CSV";
    if (s.found && !s.schema) why << ", schema line missing";
    char tbuf[64];
    std::snprintf(tbuf, sizeof tbuf, ", %.2f s of %.0f s", secs, st.budget);
    why << tbuf;
    if (k + 1 == kStages.size()) {
      // the whole pipeline: exit status, determinism across worker counts, end-to-end runtime
      const bool exits = r1.exit_code == 0 && r2.exit_code == 0;
      const bool e2e = r1.seconds < st.budget;
      ok = ok && exits && mismatch.empty() && e2e;
      std::snprintf(tbuf, sizeof tbuf, "%.1f s", r1.seconds);
      why << "; verify all exit " << r1.exit_code << "/" << r2.exit_code << ", " << tbuf << " end to end, ";
      if (mismatch.empty())
        why << "reruns byte-identical";
      else
        why << mismatch.size() << " CSVs differ (first: " << mismatch.front() << ")";
    }
    std::printf("%s criterion %zu %s: %s\n", ok ? "PASS" : "FAIL", k + 1, st.what, why.str().c_str());
    all = all && ok;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
