#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cajal/semval.hpp"
#include "cajal/typecheck.hpp"

namespace cajal {

class NotASubcontext : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedSignature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A compiled context: one value per binder of `ctx`. The empty tuple is the
/// unit environment.
struct Env {
  Ctx ctx;
  std::vector<SemValue> values;
};

inline Env unit_env() { return {}; }

/// Throws ShapeMismatch if lengths or types disagree, NonFiniteError on NaN/Inf
/// in a base-type entry.
void check_env(const Env& env);

/// Entry i of the result is env's entry at index_of(target[i].name).
Env restrict(const Env& env, const Ctx& target);

using RunFn = std::function<SemValue(const std::vector<SemValue>&)>;

struct CompiledProgram {
  Ctx signature;
  SemTy result = SemTy::vbool();
  RunFn run;
  /// captured[i]: slot i occurs free in the step of some iterator, so the map
  /// is polynomial rather than linear in it.
  std::vector<bool> captured;
  /// Some iterator step closes over a lambda or loop binder; no slot is known
  /// to be linear.
  bool nested_capture = false;

  bool slot_is_linear(std::size_t i) const { return !nested_capture && !captured.at(i); }
};

CompiledProgram compile(const Derivation& d);

/// p.run(env) after checking env against p.signature.
SemValue link(const CompiledProgram& p, const Env& env);

/// Columns are p applied to the basis of its single base-type slot, truncated
/// to `trunc` entries on Nat sides. A closed program whose value is a map
/// between base types is probed the same way.
Matrix matrix_of(const CompiledProgram& p, std::size_t trunc);
/// OpenMP version; identical result.
Matrix matrix_of_parallel(const CompiledProgram& p, std::size_t trunc);

}  // namespace cajal
