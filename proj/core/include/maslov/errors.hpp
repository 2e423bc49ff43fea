#pragma once

#include <stdexcept>
#include <string>

namespace maslov {

enum class ErrorKind {
  invalid_argument,  // malformed input: wrong shape, non-finite, bad range
  structure,         // input violates an algebraic invariant (sp(2n), Lagrangian, unitary)
  numerical,         // a numerical precondition failed (singular factor, step too large)
  model,             // far-field or model-level failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace maslov
