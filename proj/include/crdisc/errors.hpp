#pragma once

#include <stdexcept>
#include <string>

namespace crd {

enum class ErrorKind {
  Input = 1,
  Domain,
  Contraction,
  DomainEscape,
  Construction,
  Numerical,
  Coverage,
  Config,
  Experimental,
  Invariant,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), kind_(kind), module_(module) {}
  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& module, const std::string& what) {
  throw Error(kind, module, what);
}

inline void require(bool cond, const std::string& module, const std::string& what) {
  if (!cond) fail(ErrorKind::Input, module, what);
}

}  // namespace crd
