#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "crdisc/config.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/report.hpp"

using namespace crd;

namespace {

// message of the Config error thrown by f, "" if none
std::string config_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == ErrorKind::Config ? e.what() : "";
  }
  return "";
}

}  // namespace

TEST_CASE("defaults round-trip through serialization") {
  const RunConfig a;
  const RunConfig b = RunConfig::parse(a.serialize());
  CHECK(a == b);
  CHECK(b.serialize() == a.serialize());
}

TEST_CASE("edited values round-trip exactly") {
  RunConfig a;
  a.set("bishop.tol", "3.3e-13");
  a.set("seed", "42");
  a.set("exponent.chain", "no");
  a.set("manifold", "trig");
  a.set("family.r0", "0.1");
  const RunConfig b = RunConfig::parse(a.serialize());
  CHECK(a == b);
  CHECK(b.get_double("bishop.tol") == 3.3e-13);
  CHECK(b.get_double("family.r0") == 0.1);
  CHECK_FALSE(b.get_bool("exponent.chain"));
  CHECK(b.get_uint("seed") == 42u);
}

TEST_CASE("unknown keys are named in the error") {
  RunConfig c;
  CHECK(config_error([&] { c.set("bishop.tolerance", "1"); }).find("bishop.tolerance") != std::string::npos);
  CHECK(config_error([] { RunConfig::parse("nope = 3\n"); }).find("nope") != std::string::npos);
}

TEST_CASE("range and type errors name the key") {
  RunConfig c;
  CHECK(config_error([&] { c.set("d", "3"); }).find("'d'") != std::string::npos);
  CHECK(config_error([&] { c.set("bishop.t", "x"); }).find("bishop.t") != std::string::npos);
  CHECK(config_error([&] { c.set("manifold", "sphere"); }).find("manifold") != std::string::npos);
  CHECK(config_error([&] { c.set("interp.dictionary", "bump-L9"); }).find("interp.dictionary") != std::string::npos);
  CHECK(config_error([&] { c.set("seed.modes", "12.5"); }) != "");
}

TEST_CASE("comments, blanks and malformed lines") {
  const RunConfig c = RunConfig::parse("# header\n\nseed = 7   # trailing\n  d=2\n");
  CHECK(c.get_int("seed") == 7);
  CHECK(c.get_int("d") == 2);
  CHECK(config_error([] { RunConfig::parse("seed 7\n"); }).find("line 1") != std::string::npos);
}

TEST_CASE("missing config file is a config error") {
  CHECK(config_error([] { RunConfig::load("/nonexistent/crdisc.cfg"); }) != "");
}

TEST_CASE("dictionary ids") {
  CHECK(dictionary_level("bump-L4") == 4);
  CHECK_THROWS_AS(dictionary_level("bump-L"), Error);
  CHECK_THROWS_AS(dictionary_level("gauss-L4"), Error);
}

TEST_CASE("every documented key has a valid default") {
  RunConfig c;
  for (const auto& k : config_keys()) {
    CHECK(c.has(k.name));
    CHECK_FALSE(k.doc.empty());
    CHECK_NOTHROW(c.set(k.name, k.value));
  }
}

TEST_CASE("csv tables carry the schema line") {
  CsvTable t({"a", "b"});
  t.add({"1", "x"});
  CHECK(t.str() == "# schema=1\na,b\n1,x\n");
  CHECK_THROWS_AS(t.add({"1,2", "x"}), Error);
  CHECK_THROWS_AS(t.add({"1"}), Error);
}

TEST_CASE("verdict rows") {
  const auto p = pass_if(true, "m", 1.0, 2.0, "g", 3);
  const auto f = pass_if(false, "m", 1.0, 2.0, "g", 3);
  const auto i = info_row("m", 1.0, "g", 3);
  CHECK(p.verdict == "PASS");
  CHECK(i.verdict == "INFO");
  CHECK(all_pass({p, i}));
  CHECK(failures({p, f, i}) == 1);
  CHECK(verdict_table({p}).str() == "# schema=1\nmetric,value,threshold,verdict,grid,seed\nm,1,2,PASS,g,3\n");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-HUGE_VAL) == "-inf");
  CHECK(format_number(0.1) == "0.1");
}
