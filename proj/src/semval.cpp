#include "cajal/semval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cajal {

Scalar check_finite(Scalar x, const char* what) {
  if (!std::isfinite(x)) throw NonFiniteError(std::string("non-finite ") + what);
  return x;
}

bool approx_equal(Scalar a, Scalar b, Scalar rel, Scalar abs) {
  const Scalar diff = std::abs(a - b);
  return diff <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

SemTy SemTy::vfn(SemTy domain, SemTy codomain) {
  return SemTy(Kind::VFn, std::make_shared<const SemTy>(std::move(domain)),
               std::make_shared<const SemTy>(std::move(codomain)));
}

bool operator==(const SemTy& a, const SemTy& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != SemTy::Kind::VFn) return true;
  return *a.domain_ == *b.domain_ && *a.codomain_ == *b.codomain_;
}

std::string to_string(const SemTy& t) {
  switch (t.kind()) {
    case SemTy::Kind::VBool: return "R^2";
    case SemTy::Kind::VNat: return "Seq";
    case SemTy::Kind::VFn:
      return "Lin(" + to_string(t.domain()) + ", " + to_string(t.codomain()) + ")";
  }
  return "?";
}

SemTy compile_type(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Bool: return SemTy::vbool();
    case Ty::Kind::Nat: return SemTy::vnat();
    case Ty::Kind::Fn: return SemTy::vfn(compile_type(t.domain()), compile_type(t.codomain()));
  }
  return SemTy::vbool();
}

Seq Seq::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.first < y.first; });
  Seq s;
  for (const auto& [i, c] : terms) {
    if (!s.terms_.empty() && s.terms_.back().first == i)
      s.terms_.back().second += c;
    else
      s.terms_.push_back({i, c});
  }
  std::erase_if(s.terms_, [](const Term& t) { return t.second == 0.0; });
  return s;
}

Seq Seq::one_hot(std::size_t n, Scalar c) {
  Seq s;
  if (c != 0.0) s.terms_.push_back({n, c});
  return s;
}

Seq Seq::dense(const std::vector<Scalar>& values) {
  Seq s;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) s.terms_.push_back({i, values[i]});
  return s;
}

Scalar Seq::at(std::size_t n) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), n,
                             [](const Term& t, std::size_t k) { return t.first < k; });
  return it != terms_.end() && it->first == n ? it->second : 0.0;
}

std::vector<Scalar> Seq::truncated(std::size_t n) const {
  std::vector<Scalar> out(n, 0.0);
  for (const auto& [i, c] : terms_)
    if (i < n) out[i] = c;
  return out;
}

Seq Seq::shifted() const {
  Seq s;
  s.terms_.reserve(terms_.size());
  for (const auto& [i, c] : terms_) s.terms_.push_back({i + 1, c});
  return s;
}

LinearMap::LinearMap(SemTy domain, SemTy codomain, MapFn fn)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      fn_(std::make_shared<const MapFn>(std::move(fn))) {}

SemValue LinearMap::operator()(const SemValue& x) const {
  if (!has_type(x, domain_))
    throw ShapeMismatch("linear map expects " + to_string(domain_) + ", got " +
                        to_string(x.type()));
  return (*fn_)(x);
}

const Vec2& SemValue::as_vec2() const {
  if (const auto* v = vec2()) return *v;
  throw ShapeMismatch("expected R^2, got " + to_string(type()));
}

const Seq& SemValue::as_seq() const {
  if (const auto* v = seq()) return *v;
  throw ShapeMismatch("expected Seq, got " + to_string(type()));
}

const LinearMap& SemValue::as_map() const {
  if (const auto* v = map()) return *v;
  throw ShapeMismatch("expected a linear map, got " + to_string(type()));
}

SemTy SemValue::type() const {
  if (vec2()) return SemTy::vbool();
  if (seq()) return SemTy::vnat();
  const LinearMap& m = *map();
  return SemTy::vfn(m.domain(), m.codomain());
}

bool has_type(const SemValue& v, const SemTy& t) {
  switch (t.kind()) {
    case SemTy::Kind::VBool: return v.vec2() != nullptr;
    case SemTy::Kind::VNat: return v.seq() != nullptr;
    case SemTy::Kind::VFn: {
      const LinearMap* m = v.map();
      return m != nullptr && m->domain() == t.domain() && m->codomain() == t.codomain();
    }
  }
  return false;
}

std::string to_string(const SemValue& v) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* x = v.vec2()) {
    os << "(" << x->a << ", " << x->b << ")";
  } else if (const auto* s = v.seq()) {
    os << "[";
    bool first = true;
    for (const auto& [i, c] : s->terms()) {
      os << (first ? "" : ", ") << i << ":" << c;
      first = false;
    }
    os << "]";
  } else {
    os << "<map " << to_string(v.type()) << ">";
  }
  return os.str();
}

SemValue zero(const SemTy& t) {
  switch (t.kind()) {
    case SemTy::Kind::VBool: return Vec2{};
    case SemTy::Kind::VNat: return Seq{};
    case SemTy::Kind::VFn: {
      SemTy cod = t.codomain();
      return LinearMap(t.domain(), cod, [cod](const SemValue&) { return zero(cod); });
    }
  }
  return Vec2{};
}

SemValue axpby(Scalar a, const SemValue& u, Scalar b, const SemValue& v) {
  check_finite(a, "scale factor");
  check_finite(b, "scale factor");
  if (const auto* x = u.vec2()) {
    const Vec2& y = v.as_vec2();
    return Vec2{a * x->a + b * y.a, a * x->b + b * y.b};
  }
  if (const auto* x = u.seq()) {
    const Seq& y = v.as_seq();
    std::vector<Seq::Term> out;
    out.reserve(x->terms().size() + y.terms().size());
    auto i = x->terms().begin(), ie = x->terms().end();
    auto j = y.terms().begin(), je = y.terms().end();
    while (i != ie || j != je) {
      if (j == je || (i != ie && i->first < j->first)) {
        out.push_back({i->first, a * i->second});
        ++i;
      } else if (i == ie || j->first < i->first) {
        out.push_back({j->first, b * j->second});
        ++j;
      } else {
        out.push_back({i->first, a * i->second + b * j->second});
        ++i;
        ++j;
      }
    }
    std::erase_if(out, [](const Seq::Term& t) { return t.second == 0.0; });
    return Seq::from_terms(std::move(out));
  }
  const LinearMap& f = u.as_map();
  const LinearMap& g = v.as_map();
  if (!(f.domain() == g.domain()) || !(f.codomain() == g.codomain()))
    throw ShapeMismatch("adding maps of different types");
  if (b == 0.0 && a == 1.0) return u;
  if (a == 0.0 && b == 1.0) return v;
  return LinearMap(f.domain(), f.codomain(),
                   [a, f, b, g](const SemValue& x) { return axpby(a, f(x), b, g(x)); });
}

SemValue add(const SemValue& u, const SemValue& v) {
  if (!(u.type() == v.type()))
    throw ShapeMismatch("cannot add " + to_string(u.type()) + " and " + to_string(v.type()));
  return axpby(1.0, u, 1.0, v);
}

SemValue scale(Scalar a, const SemValue& v) {
  check_finite(a, "scale factor");
  if (const auto* x = v.vec2()) return Vec2{a * x->a, a * x->b};
  if (const auto* s = v.seq()) {
    if (a == 0.0) return Seq{};
    std::vector<Seq::Term> out = s->terms();
    for (auto& t : out) t.second *= a;
    return Seq::from_terms(std::move(out));
  }
  const LinearMap& f = v.as_map();
  if (a == 1.0) return v;
  return LinearMap(f.domain(), f.codomain(), [a, f](const SemValue& x) { return scale(a, f(x)); });
}

Scalar proj(int i, const SemValue& v) {
  const Vec2& x = v.as_vec2();
  if (i == 1) return x.a;
  if (i == 2) return x.b;
  throw ShapeMismatch("projection index must be 1 or 2");
}

Scalar seq_at(const SemValue& s, std::size_t n) { return s.as_seq().at(n); }

SemValue power_apply(const LinearMap& f, std::size_t n, const SemValue& v) {
  if (!(f.domain() == f.codomain()))
    throw ShapeMismatch("power of a map whose domain and codomain differ");
  SemValue cur = v;
  for (std::size_t i = 0; i < n; ++i) cur = f(cur);
  return cur;
}

Scalar inner(const SemValue& u, const SemValue& v) {
  if (const auto* x = u.vec2()) {
    const Vec2& y = v.as_vec2();
    return x->a * y.a + x->b * y.b;
  }
  if (const auto* x = u.seq()) {
    const Seq& y = v.as_seq();
    Scalar acc = 0;
    auto i = x->terms().begin(), ie = x->terms().end();
    auto j = y.terms().begin(), je = y.terms().end();
    while (i != ie && j != je) {
      if (i->first < j->first) {
        ++i;
      } else if (j->first < i->first) {
        ++j;
      } else {
        acc += i->second * j->second;
        ++i;
        ++j;
      }
    }
    return acc;
  }
  throw ShapeMismatch("inner product is only defined at base types");
}

bool approx_equal(const SemValue& u, const SemValue& v, Scalar rel, Scalar abs) {
  if (const auto* x = u.vec2()) {
    const auto* y = v.vec2();
    if (!y) throw ShapeMismatch("comparing values of different types");
    return approx_equal(x->a, y->a, rel, abs) && approx_equal(x->b, y->b, rel, abs);
  }
  if (const auto* x = u.seq()) {
    const auto* y = v.seq();
    if (!y) throw ShapeMismatch("comparing values of different types");
    for (const auto& [i, c] : x->terms())
      if (!approx_equal(c, y->at(i), rel, abs)) return false;
    for (const auto& [i, c] : y->terms())
      if (!approx_equal(c, x->at(i), rel, abs)) return false;
    return true;
  }
  throw ShapeMismatch("equality of linear maps is extensional; compare at base types");
}

bool exactly_equal(const SemValue& u, const SemValue& v) {
  if (const auto* x = u.vec2()) {
    const auto* y = v.vec2();
    return y && x->a == y->a && x->b == y->b;
  }
  if (const auto* x = u.seq()) {
    const auto* y = v.seq();
    return y && x->terms() == y->terms();
  }
  throw ShapeMismatch("equality of linear maps is extensional; compare at base types");
}

std::size_t dense_dim(const SemTy& t, std::size_t trunc) {
  if (t.kind() == SemTy::Kind::VBool) return 2;
  if (t.kind() == SemTy::Kind::VNat) return trunc;
  throw ShapeMismatch("dense form only exists for base types");
}

std::vector<Scalar> to_dense(const SemValue& v, std::size_t trunc) {
  if (const auto* x = v.vec2()) return {x->a, x->b};
  if (const auto* s = v.seq()) return s->truncated(trunc);
  throw ShapeMismatch("dense form only exists for base types");
}

SemValue from_dense(const SemTy& t, const std::vector<Scalar>& x) {
  for (Scalar c : x) check_finite(c, "vector entry");
  if (t.kind() == SemTy::Kind::VBool) {
    if (x.size() != 2) throw ShapeMismatch("R^2 vector needs exactly 2 entries");
    return Vec2{x[0], x[1]};
  }
  if (t.kind() == SemTy::Kind::VNat) return Seq::dense(x);
  throw ShapeMismatch("dense form only exists for base types");
}

LinearMap map_from_matrix(const SemTy& domain, const SemTy& codomain, Matrix m) {
  if (!domain.is_base() || !codomain.is_base())
    throw ShapeMismatch("matrices only represent maps between base types");
  if (domain.kind() == SemTy::Kind::VBool && m.cols != 2)
    throw ShapeMismatch("a map out of R^2 needs 2 columns");
  if (codomain.kind() == SemTy::Kind::VBool && m.rows != 2)
    throw ShapeMismatch("a map into R^2 needs 2 rows");
  if (m.data.size() != m.rows * m.cols) throw ShapeMismatch("matrix data has the wrong length");
  for (Scalar c : m.data) check_finite(c, "matrix entry");
  auto mat = std::make_shared<const Matrix>(std::move(m));
  SemTy cod = codomain;
  return LinearMap(domain, codomain, [mat, cod](const SemValue& x) {
    std::vector<Scalar> in = to_dense(x, mat->cols);
    std::vector<Scalar> out(mat->rows, 0.0);
    for (std::size_t i = 0; i < mat->rows; ++i) {
      Scalar acc = 0;
      for (std::size_t j = 0; j < mat->cols; ++j) acc += (*mat)(i, j) * in[j];
      out[i] = acc;
    }
    return from_dense(cod, out);
  });
}

}  // namespace cajal
