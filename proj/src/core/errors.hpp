#ifndef TFLOW_ERRORS_HPP
#define TFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tflow {

enum class Err {
  InvalidArgument,
  Antisymmetry,
  Jacobi,
  NotContact,
  Normalization,
  MissingField,
  Domain,
  Constraint,
  UnknownPreset,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw Error(code, what);
}

} // namespace tflow

#endif
