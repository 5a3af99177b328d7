#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "crdisc/parallel.hpp"

using namespace crd;

TEST_CASE("indexed slots give the same result for any worker count") {
  std::vector<std::vector<double>> runs;
  for (const char* w : {"1", "2", "5"}) {
    setenv("CRDISC_WORKERS", w, 1);
    CHECK(worker_count() == std::atoi(w));
    std::vector<double> out(97);
    parallel_for(97, [&](int i) {
      double s = 0.0;
      for (int k = 1; k <= 1000 + i; ++k) s += 1.0 / (k * static_cast<double>(k));
      out[i] = s;
    });
    runs.push_back(out);
  }
  unsetenv("CRDISC_WORKERS");
  CHECK(runs[0] == runs[1]);
  CHECK(runs[0] == runs[2]);
}

TEST_CASE("the first failure by index is rethrown") {
  setenv("CRDISC_WORKERS", "4", 1);
  try {
    parallel_for(40, [](int i) {
      if (i == 7 || i == 30) throw std::runtime_error("task " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "task 7");
  }
  unsetenv("CRDISC_WORKERS");
}

TEST_CASE("bad worker counts fall back") {
  setenv("CRDISC_WORKERS", "zero", 1);
  CHECK(worker_count() >= 1);
  unsetenv("CRDISC_WORKERS");
}
