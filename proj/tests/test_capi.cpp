#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "crdisc/crdisc.h"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

struct Session {
  crd_session* s = crd_session_create();
  ~Session() { crd_session_destroy(s); }
};

}  // namespace

TEST_CASE("unknown keys and bad values come back as config errors") {
  Session h;
  REQUIRE(h.s);
  CHECK(crd_session_set(h.s, "no.such.key", "1") == CRD_CONFIG);
  CHECK(std::string(crd_last_error()).find("no.such.key") != std::string::npos);
  CHECK(crd_session_set(h.s, "d", "7") == CRD_CONFIG);
  CHECK(crd_session_set(h.s, "d", "2") == CRD_OK);
  CHECK(std::string(crd_last_error()).empty());
  CHECK(std::string(crd_session_config_text(h.s)).find("d = 2\n") != std::string::npos);
}

TEST_CASE("config files") {
  Session h;
  CHECK(crd_session_load_config(h.s, "/nonexistent/x.cfg") == CRD_CONFIG);
  const fs::path dir = fs::temp_directory_path() / "crdisc_capi_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.cfg") << "seed = 3\nthis line is wrong\n";
    std::ofstream(dir / "good.cfg") << "seed = 3\n";
  }
  CHECK(crd_session_load_config(h.s, (dir / "bad.cfg").c_str()) == CRD_CONFIG);
  CHECK(std::string(crd_last_error()).find("line 2") != std::string::npos);
  CHECK(crd_session_load_config(h.s, (dir / "good.cfg").c_str()) == CRD_OK);
  CHECK(std::string(crd_session_config_text(h.s)).find("seed = 3\n") != std::string::npos);
}

TEST_CASE("bad commands are input errors") {
  Session h;
  CHECK(crd_session_run(h.s, "frobnicate", "/tmp") == CRD_INPUT);
  CHECK(std::string(crd_last_error()).find("frobnicate") != std::string::npos);
  CHECK(crd_session_run(h.s, "psh verify nope", "/tmp") == CRD_INPUT);
  CHECK(crd_session_run(nullptr, "seed certify", "/tmp") == CRD_INPUT);
}

TEST_CASE("seed certify writes versioned CSVs and reruns identically") {
  Session h;
  const fs::path a = fs::temp_directory_path() / "crdisc_capi_a", b = fs::temp_directory_path() / "crdisc_capi_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(crd_session_run(h.s, "seed certify", a.c_str()) == CRD_OK);
  REQUIRE(crd_session_run(h.s, "seed certify", b.c_str()) == CRD_OK);
  for (const char* name : {"seed.csv", "seed_certificate.csv"}) {
    const std::string x = slurp(a / name);
    CHECK(x.rfind("# schema=1\n", 0) == 0);
    CHECK(x == slurp(b / name));
  }
  CHECK(slurp(a / "seed_certificate.csv").find("theta_u0,c_u0,derivative_residual,min_ratio,grid") !=
        std::string::npos);
  CHECK(std::string(crd_session_output(h.s)).find("seed.csv") != std::string::npos);
}

TEST_CASE("unwritable output directory is an io error") {
  Session h;
  CHECK(crd_session_run(h.s, "seed certify", "/proc/crdisc_cannot_exist") == CRD_IO);
}
