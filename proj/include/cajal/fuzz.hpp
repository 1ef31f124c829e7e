#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cajal/compiler.hpp"
#include "cajal/eval.hpp"

namespace cajal {

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t max_depth = 6;
  std::size_t max_numeral = 5;
  /// Bool, Nat, function: used for argument types and top-level result types.
  std::array<double, 3> type_weights{1.0, 1.0, 0.6};
  /// Indexed by Rule.
  std::array<double, kRuleCount> rule_weights{1.0, 0.6, 0.6, 0.6, 0.8, 1.0, 1.2, 1.2, 1.4};
  /// No lambda or loop binder may occur free in an iteration count, and a
  /// count at function type is a numeral or a slot. Without this, nested
  /// iterations reach towers of exponentials within the depth bound.
  bool bounded_counts = true;
  /// Iterator steps may close over top-level slots only. Closing over a
  /// lambda or loop binder makes the enclosing step polynomial, and iterating
  /// it overflows on non-basis environments.
  bool slot_only_captures = false;
  /// Node attempts before giving up on one program.
  std::size_t max_attempts = 4000;
};

/// Random program e with ctx |- e : ty. Deterministic in cfg.seed.
Expr gen_typed(const GenConfig& cfg, const Ctx& ctx, const Ty& ty);

/// Stateful generator for streams of programs.
class Generator {
 public:
  explicit Generator(GenConfig cfg);
  Expr next(const Ctx& ctx, const Ty& ty);
  std::mt19937_64& rng() { return rng_; }
  const GenConfig& config() const { return cfg_; }

 private:
  GenConfig cfg_;
  std::mt19937_64 rng_;
};

/// Seed of trial i under a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i);

struct Verdict {
  bool pass = false;
  std::string reason;
  Expr program;
  /// Smallest failing closed subterm found by shrinking; empty on Pass.
  Expr counterexample;
  std::optional<Expr> value;
  std::optional<SemValue> denotation;
  std::uint64_t eval_steps = 0;
  std::optional<EvalError::Kind> eval_error;
};

/// Eval-then-compile against compile, plus adequacy against other base values.
Verdict differential_trial(const Expr& e, EvalBudget budget = {});

struct TrialReport {
  std::vector<Verdict> verdicts;
  /// Derivations containing each rule at least once.
  std::array<std::size_t, kRuleCount> rule_presence{};
  std::size_t budget_exceeded = 0;
  std::size_t stuck = 0;
  std::size_t failures = 0;
};

/// Trials at base result types, trial i seeded with derive_seed(cfg.seed, i).
TrialReport run_trials(const GenConfig& cfg, std::size_t trials);
/// OpenMP version; verdicts identical and in the same order.
TrialReport run_trials_parallel(const GenConfig& cfg, std::size_t trials);

/// Random element of a compiled type. Sequences have support below 6.
SemValue random_value(const SemTy& t, std::mt19937_64& rng);

/// An open program together with a random environment for it.
struct OpenCase {
  Ctx ctx;
  Expr program;
  Derivation derivation;
  std::vector<SemValue> env;
};

/// Random context of one to three slots and a base-typed program over it,
/// generated under gen's config.
OpenCase gen_open_case(Generator& gen);

struct SlotCheck {
  std::string binder;
  bool linear_by_construction = false;
  bool additive = false;
  bool homogeneous = false;
};

struct MultilinearityResult {
  std::vector<SlotCheck> slots;
};

/// run(.., a x1 + b x2, ..) against a run(.., x1, ..) + b run(.., x2, ..) and
/// run(.., a x1, ..) against a run(.., x1, ..) in each slot.
MultilinearityResult check_multilinearity(const OpenCase& c, std::mt19937_64& rng);

/// [[{x := v} e]](s) against [[e]](s, [[v]]) for a generated closed value v
/// substituted for a random slot, moved last.
bool check_substitution(const OpenCase& c, Generator& gen);

/// A random permutation of context and environment leaves link unchanged.
bool check_exchange(const OpenCase& c, std::mt19937_64& rng);

/// Closes `c` by substituting generated closed values for every slot.
Expr close_case(const OpenCase& c, Generator& gen);

}  // namespace cajal
