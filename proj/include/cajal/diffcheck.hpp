#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cajal/compiler.hpp"

namespace cajal {

class UnsupportedBinder : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(0) = init, f(n+1) = transition * f(n).
struct DynSystem {
  Vec2 init{1, 0};
  Matrix transition = Matrix(2, 2);
};

/// The two-neuron system with M = [[0,2],[3,0]].
DynSystem two_neuron_system();

/// [f(0), ..., f(steps)]
std::vector<Vec2> unfold(const DynSystem& sys, std::size_t steps);

/// sum_i x_i f(i)
Vec2 g_restricted(const DynSystem& sys, const std::vector<Scalar>& x);

/// Gradient with respect to one binder. Bool slots give 2 entries, Nat
/// slots `trunc` entries, base-to-base map slots a rows x cols matrix stored
/// row-major in `values`.
struct Gradient {
  std::string binder;
  SemTy shape = SemTy::vbool();
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Scalar> values;
};

/// d/d(binder) of <cotangent, p.run(env)>, by probing the slot with basis
/// vectors. The slot must not be captured by an iterator step.
Gradient grad(const CompiledProgram& p, const Env& env, const std::string& binder,
              const SemValue& cotangent, std::size_t trunc = 10);
/// OpenMP version; identical result.
Gradient grad_parallel(const CompiledProgram& p, const Env& env, const std::string& binder,
                       const SemValue& cotangent, std::size_t trunc = 10);

/// Max over probed coordinates of |analytic - central difference| / max(1, |analytic|).
Scalar fd_check(const CompiledProgram& p, const Env& env, const std::string& binder,
                const SemValue& cotangent, std::size_t trunc = 10, Scalar h = 1e-5);

struct TrainConfig {
  DynSystem system = two_neuron_system();
  std::size_t target_step = 2;
  std::size_t trunc = 10;
  std::size_t steps = 5000;
  Scalar lr = 0.1;
  /// Starting count vector; zero when empty.
  std::vector<Scalar> init;
};

struct TrainResult {
  std::vector<Scalar> losses;  // loss before each step, then the final loss
  std::vector<Scalar> counts;  // learned count vector
  std::size_t argmax = 0;
  Scalar final_loss() const { return losses.back(); }
};

/// Plain gradient descent on the count vector of the compiled program
/// m:Bool -o Bool, b:Bool, n:Nat |- iter b {y -> m y} n, with m and b linked to the
/// system's transition, so that its output matches f(target_step).
TrainResult toy_train(const TrainConfig& cfg);

}  // namespace cajal
