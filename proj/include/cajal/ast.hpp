#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cajal {

/// Source types: booleans, naturals and linear maps `T1 -o T2`.
class Ty {
 public:
  enum class Kind { Bool, Nat, Fn };

  static Ty boolean() { return Ty(Kind::Bool, nullptr, nullptr); }
  static Ty nat() { return Ty(Kind::Nat, nullptr, nullptr); }
  static Ty fn(Ty domain, Ty codomain);

  Kind kind() const { return kind_; }
  bool is_base() const { return kind_ != Kind::Fn; }
  bool is_fn() const { return kind_ == Kind::Fn; }

  // Only valid when is_fn().
  const Ty& domain() const { return *domain_; }
  const Ty& codomain() const { return *codomain_; }

  /// Nesting depth of arrows to the left, e.g. (Bool -o Bool) -o Bool has order 2.
  int order() const;

  friend bool operator==(const Ty& a, const Ty& b);

 private:
  Ty(Kind k, std::shared_ptr<const Ty> d, std::shared_ptr<const Ty> c)
      : kind_(k), domain_(std::move(d)), codomain_(std::move(c)) {}

  Kind kind_;
  std::shared_ptr<const Ty> domain_;
  std::shared_ptr<const Ty> codomain_;
};

std::string to_string(const Ty& t);

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct ExprNode;

/// Immutable, cheaply copyable handle to an expression tree.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  const ExprNode* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  template <class T>
  const T* as() const;

  template <class T>
  bool is() const { return as<T>() != nullptr; }

  SourcePos pos() const;

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct Var {
  std::string name;
};
struct True {};
struct False {};
struct Zero {};
struct Succ {
  Expr body;
};
struct Iter {
  Expr base;
  std::string binder;
  Expr step;
  Expr count;
};
struct Lam {
  std::string binder;
  Ty annotation;
  Expr body;
};
struct App {
  Expr fun;
  Expr arg;
};
struct If {
  Expr cond;
  Expr then_branch;
  Expr else_branch;
};

using ExprVariant = std::variant<Var, True, False, Zero, Succ, Iter, Lam, App, If>;

struct ExprNode {
  ExprVariant v;
  SourcePos pos;
};

template <class T>
const T* Expr::as() const {
  return node_ ? std::get_if<T>(&node_->v) : nullptr;
}

inline SourcePos Expr::pos() const { return node_ ? node_->pos : SourcePos{}; }

// Constructors.
Expr make_var(std::string name, SourcePos pos = {});
Expr make_true(SourcePos pos = {});
Expr make_false(SourcePos pos = {});
Expr make_zero(SourcePos pos = {});
Expr make_succ(Expr body, SourcePos pos = {});
Expr make_iter(Expr base, std::string binder, Expr step, Expr count, SourcePos pos = {});
Expr make_lam(std::string binder, Ty annotation, Expr body, SourcePos pos = {});
Expr make_app(Expr fun, Expr arg, SourcePos pos = {});
Expr make_if(Expr cond, Expr then_branch, Expr else_branch, SourcePos pos = {});

/// succ^n 0
Expr numeral(std::size_t n);
/// n when e is succ^n 0, nothing otherwise.
std::optional<std::size_t> as_numeral(const Expr& e);

/// Values: tt, ff, numerals and lambdas.
bool is_value(const Expr& e);

/// Structural equality, binder names included.
bool structurally_equal(const Expr& a, const Expr& b);
/// Equality up to consistent renaming of bound variables.
bool alpha_equivalent(const Expr& a, const Expr& b);

std::set<std::string> free_vars(const Expr& e);
/// Multiplicity of free occurrences of `name`.
std::size_t count_free(const Expr& e, std::string_view name);
/// Every binder name introduced anywhere in `e`.
std::vector<std::string> binders(const Expr& e);
/// Number of nodes; numerals count one node per succ.
std::size_t size(const Expr& e);
/// Height of the tree; numerals are leaves of depth 1.
std::size_t depth(const Expr& e);

/// Renames binders so that every binder is distinct from every other binder,
/// from the free variables of `e`, and from `reserved`.
Expr alpha_rename(const Expr& e, const std::set<std::string>& reserved = {});

struct Binding {
  std::string name;
  Ty type;
  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Ordered typing context without duplicate names. Positions are 1-based
/// when exposed through index_of, matching the usual context-indexing rules.
class Ctx {
 public:
  Ctx() = default;
  Ctx(std::initializer_list<Binding> bs);
  explicit Ctx(std::vector<Binding> bs);

  std::size_t length() const { return binders_.size(); }
  bool empty() const { return binders_.empty(); }
  const std::vector<Binding>& binders() const { return binders_; }
  const Binding& operator[](std::size_t i) const { return binders_[i]; }

  /// Position (1-based) of the rightmost binder named `name`, 0 if absent.
  std::size_t index_of(std::string_view name) const;
  /// {1, ..., length()}
  std::vector<std::size_t> index_set() const;
  bool contains(std::string_view name) const { return index_of(name) != 0; }
  const Ty* lookup(std::string_view name) const;
  std::set<std::string> names() const;

  /// This context followed by `other` (appends on the right).
  Ctx concat(const Ctx& other) const;
  Ctx extended(std::string name, Ty type) const;
  /// Binders whose names are in `keep`, original order preserved.
  Ctx filtered(const std::set<std::string>& keep) const;

  friend bool operator==(const Ctx&, const Ctx&) = default;

 private:
  std::vector<Binding> binders_;
};

std::string to_string(const Ctx& c);

}  // namespace cajal
