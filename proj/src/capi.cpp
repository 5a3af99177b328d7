#include "crdisc/crdisc.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crdisc/commands.hpp"
#include "crdisc/errors.hpp"

struct crd_session {
  crd::RunConfig cfg;
  std::string config_text, output;
};

namespace {

thread_local std::string g_last_error;

crd_status code_of(crd::ErrorKind k) {
  using K = crd::ErrorKind;
  switch (k) {
    case K::Config: return CRD_CONFIG;
    case K::Input: return CRD_INPUT;
    case K::Invariant: return CRD_INVARIANT;
    default: return CRD_NUMERICAL;
  }
}

template <class F>
crd_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const crd::Error& e) {
    g_last_error = e.what();
    return code_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = std::string("internal: ") + e.what();
    return CRD_INTERNAL;
  }
}

crd_status null_arg(const char* what) {
  g_last_error = std::string("api: null ") + what;
  return CRD_INPUT;
}

}  // namespace

extern "C" {

crd_session* crd_session_create(void) {
  try {
    return new crd_session{};
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

void crd_session_destroy(crd_session* s) { delete s; }

crd_status crd_session_load_config(crd_session* s, const char* path) {
  if (!s || !path) return null_arg("argument");
  return guarded([&] {
    std::ifstream f(path);
    if (!f) crd::fail(crd::ErrorKind::Config, "config", std::string("cannot read config file '") + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    s->cfg = crd::RunConfig::parse(ss.str());
    return CRD_OK;
  });
}

crd_status crd_session_set(crd_session* s, const char* key, const char* value) {
  if (!s || !key || !value) return null_arg("argument");
  return guarded([&] {
    s->cfg.set(key, value);
    return CRD_OK;
  });
}

const char* crd_session_config_text(crd_session* s) {
  if (!s) return "";
  s->config_text = s->cfg.serialize();
  return s->config_text.c_str();
}

crd_status crd_session_run(crd_session* s, const char* command, const char* out_dir) {
  if (!s || !command || !out_dir) return null_arg("argument");
  s->output.clear();
  return guarded([&] {
    std::vector<std::string> words;
    std::istringstream in(command);
    for (std::string w; in >> w;) words.push_back(w);
    const crd::CommandOutput out = crd::run_command(words, s->cfg);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      g_last_error = std::string("io: cannot create '") + out_dir + "': " + ec.message();
      return CRD_IO;
    }
    for (const auto& [name, content] : out.files) {
      std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
      f << content;
      if (!f) {
        g_last_error = "io: cannot write '" + (fs::path(out_dir) / name).string() + "'";
        return CRD_IO;
      }
    }
    s->output = out.text;
    return out.status == 0 ? CRD_OK : CRD_FAIL;
  });
}

const char* crd_session_output(crd_session* s) { return s ? s->output.c_str() : ""; }

const char* crd_last_error(void) { return g_last_error.c_str(); }
}
