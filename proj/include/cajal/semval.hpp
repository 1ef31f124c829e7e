#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cajal/ast.hpp"

namespace cajal {

using Scalar = double;

class ShapeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws NonFiniteError for NaN or infinities.
Scalar check_finite(Scalar x, const char* what = "scalar");

/// |a - b| <= 1e-9 relative, or 1e-12 absolute near zero.
bool approx_equal(Scalar a, Scalar b, Scalar rel = 1e-9, Scalar abs = 1e-12);

/// Vector-space shapes: R^2 for Bool, finite-support sequences for Nat,
/// linear maps for `-o`.
class SemTy {
 public:
  enum class Kind { VBool, VNat, VFn };

  static SemTy vbool() { return SemTy(Kind::VBool, nullptr, nullptr); }
  static SemTy vnat() { return SemTy(Kind::VNat, nullptr, nullptr); }
  static SemTy vfn(SemTy domain, SemTy codomain);

  Kind kind() const { return kind_; }
  bool is_fn() const { return kind_ == Kind::VFn; }
  bool is_base() const { return kind_ != Kind::VFn; }
  const SemTy& domain() const { return *domain_; }
  const SemTy& codomain() const { return *codomain_; }

  friend bool operator==(const SemTy& a, const SemTy& b);

 private:
  SemTy(Kind k, std::shared_ptr<const SemTy> d, std::shared_ptr<const SemTy> c)
      : kind_(k), domain_(std::move(d)), codomain_(std::move(c)) {}
  Kind kind_;
  std::shared_ptr<const SemTy> domain_;
  std::shared_ptr<const SemTy> codomain_;
};

std::string to_string(const SemTy& t);
SemTy compile_type(const Ty& t);

struct Vec2 {
  Scalar a = 0;
  Scalar b = 0;
};

/// Finite-support real sequence, stored sparsely with strictly increasing
/// indices and no zero coefficients.
class Seq {
 public:
  using Term = std::pair<std::size_t, Scalar>;

  Seq() = default;
  /// Sorts, merges repeated indices and drops zeros.
  static Seq from_terms(std::vector<Term> terms);
  static Seq one_hot(std::size_t n, Scalar c = 1.0);
  /// Entries 0..values.size()-1.
  static Seq dense(const std::vector<Scalar>& values);

  Scalar at(std::size_t n) const;
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  /// Largest index in the support; only meaningful when !empty().
  std::size_t max_index() const { return terms_.back().first; }
  /// Entries 0..n-1 as a dense vector.
  std::vector<Scalar> truncated(std::size_t n) const;
  /// Right shift: result(0) = 0, result(n+1) = this(n).
  Seq shifted() const;

 private:
  std::vector<Term> terms_;
};

class SemValue;
using MapFn = std::function<SemValue(const SemValue&)>;

/// An opaque linear map between two compiled spaces.
class LinearMap {
 public:
  LinearMap(SemTy domain, SemTy codomain, MapFn fn);

  const SemTy& domain() const { return domain_; }
  const SemTy& codomain() const { return codomain_; }
  SemValue operator()(const SemValue& x) const;

 private:
  SemTy domain_;
  SemTy codomain_;
  std::shared_ptr<const MapFn> fn_;
};

class SemValue {
 public:
  SemValue(Vec2 v) : v_(v) {}
  SemValue(Seq s) : v_(std::move(s)) {}
  SemValue(LinearMap m) : v_(std::move(m)) {}

  const Vec2* vec2() const { return std::get_if<Vec2>(&v_); }
  const Seq* seq() const { return std::get_if<Seq>(&v_); }
  const LinearMap* map() const { return std::get_if<LinearMap>(&v_); }

  const Vec2& as_vec2() const;
  const Seq& as_seq() const;
  const LinearMap& as_map() const;

  SemTy type() const;

 private:
  std::variant<Vec2, Seq, LinearMap> v_;
};

bool has_type(const SemValue& v, const SemTy& t);
std::string to_string(const SemValue& v);

SemValue zero(const SemTy& t);
SemValue add(const SemValue& u, const SemValue& v);
SemValue scale(Scalar a, const SemValue& v);
/// a*u + b*v
SemValue axpby(Scalar a, const SemValue& u, Scalar b, const SemValue& v);

/// i in {1, 2}.
Scalar proj(int i, const SemValue& v);
Scalar seq_at(const SemValue& s, std::size_t n);

/// f applied n times; f^0 is the identity.
SemValue power_apply(const LinearMap& f, std::size_t n, const SemValue& v);

/// Euclidean pairing at base types (dot product; sparse dot for sequences).
Scalar inner(const SemValue& u, const SemValue& v);

/// Equality within tolerance at base types. Throws ShapeMismatch for maps,
/// whose equality is extensional.
bool approx_equal(const SemValue& u, const SemValue& v, Scalar rel = 1e-9, Scalar abs = 1e-12);
/// Coordinate-wise exact equality at base types.
bool exactly_equal(const SemValue& u, const SemValue& v);

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Scalar> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Scalar& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  Scalar operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// The linear map between base spaces given by `m`. A Bool side has
/// dimension 2; a Nat side uses the first rows/cols sequence entries (input
/// entries past `cols` are ignored).
LinearMap map_from_matrix(const SemTy& domain, const SemTy& codomain, Matrix m);

/// Base-type value as a dense vector of length 2 (Bool) or `trunc` (Nat).
std::vector<Scalar> to_dense(const SemValue& v, std::size_t trunc);
/// Inverse of to_dense for the given base type.
SemValue from_dense(const SemTy& t, const std::vector<Scalar>& x);
/// Dimension of a base type under truncation.
std::size_t dense_dim(const SemTy& t, std::size_t trunc);

}  // namespace cajal
