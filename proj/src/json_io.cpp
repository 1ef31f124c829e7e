#include "cajal/json_io.hpp"

#include <cmath>
#include <string>

#include "cajal/parser.hpp"

namespace cajal {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw JsonFormatError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw JsonFormatError(std::string("missing field \"") + key + "\"");
  return *it;
}

Scalar number(const Json& j, const char* what) {
  if (!j.is_number()) throw JsonFormatError(std::string(what) + " must be a number");
  return check_finite(j.get<Scalar>(), what);
}

std::size_t count(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) throw JsonFormatError(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  return {{"kind", "matrix"}, {"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const Json& j) {
  if (field(j, "kind") != "matrix") throw JsonFormatError("expected kind \"matrix\"");
  Matrix m(count(field(j, "rows"), "rows"), count(field(j, "cols"), "cols"));
  const Json& data = field(j, "data");
  if (!data.is_array() || data.size() != m.rows * m.cols)
    throw JsonFormatError("matrix data must hold rows*cols = " + std::to_string(m.rows * m.cols) +
                          " numbers");
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = number(data[i], "matrix entry");
  return m;
}

Matrix matrix_of_map(const LinearMap& f, std::size_t trunc) {
  const SemTy& dom = f.domain();
  const SemTy& cod = f.codomain();
  if (!dom.is_base() || !cod.is_base())
    throw UnsupportedSignature("no matrix form for " + to_string(SemTy::vfn(dom, cod)));
  if (trunc == 0) throw std::invalid_argument("trunc must be at least 1");
  Matrix m(dense_dim(cod, trunc), dense_dim(dom, trunc));
  for (std::size_t c = 0; c < m.cols; ++c) {
    std::vector<Scalar> e(m.cols, 0.0);
    e[c] = 1.0;
    std::vector<Scalar> col = to_dense(f(from_dense(dom, e)), trunc);
    for (std::size_t r = 0; r < m.rows; ++r) m(r, c) = col[r];
  }
  return m;
}

Json value_to_json(const SemValue& v, std::size_t trunc) {
  if (const Vec2* b = v.vec2()) return {{"kind", "bool"}, {"vec", {b->a, b->b}}};
  if (const Seq* s = v.seq()) {
    Json support = Json::array();
    for (const auto& [n, c] : s->terms()) support.push_back({n, c});
    return {{"kind", "nat"}, {"support", support}};
  }
  return matrix_to_json(matrix_of_map(v.as_map(), trunc));
}

SemValue value_from_json(const Json& j, const std::optional<SemTy>& expected) {
  const Json& kind = field(j, "kind");
  std::optional<SemValue> out;
  if (kind == "bool") {
    const Json& vec = field(j, "vec");
    if (!vec.is_array() || vec.size() != 2) throw JsonFormatError("bool vec must have 2 entries");
    out = Vec2{number(vec[0], "bool entry"), number(vec[1], "bool entry")};
  } else if (kind == "nat") {
    const Json& support = field(j, "support");
    if (!support.is_array()) throw JsonFormatError("nat support must be an array");
    std::vector<Seq::Term> terms;
    for (const Json& t : support) {
      if (!t.is_array() || t.size() != 2) throw JsonFormatError("nat support entries are [n, c] pairs");
      terms.emplace_back(count(t[0], "support index"), number(t[1], "support coefficient"));
    }
    out = Seq::from_terms(std::move(terms));
  } else if (kind == "matrix") {
    if (!expected || !expected->is_fn() || !expected->domain().is_base() ||
        !expected->codomain().is_base())
      throw JsonFormatError("matrix values are only accepted for maps between base types");
    Matrix m = matrix_from_json(j);
    std::size_t want_rows = expected->codomain().kind() == SemTy::Kind::VBool ? 2 : m.rows;
    std::size_t want_cols = expected->domain().kind() == SemTy::Kind::VBool ? 2 : m.cols;
    if (m.rows != want_rows || m.cols != want_cols || m.rows == 0 || m.cols == 0)
      throw JsonFormatError("matrix shape " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                            " does not fit " + to_string(*expected));
    return map_from_matrix(expected->domain(), expected->codomain(), std::move(m));
  } else {
    throw JsonFormatError("unknown value kind " + kind.dump());
  }
  if (expected && !has_type(*out, *expected))
    throw JsonFormatError("value of type " + to_string(out->type()) + " where " + to_string(*expected) +
                          " was expected");
  return *out;
}

Env env_from_json(const Json& j) {
  if (!j.is_array()) throw JsonFormatError("environment must be an array of bindings");
  std::vector<Binding> bs;
  std::vector<SemValue> values;
  for (const Json& b : j) {
    const Json& name = field(b, "name");
    if (!name.is_string()) throw JsonFormatError("binding name must be a string");
    const Json& value = field(b, "value");
    std::optional<Ty> ty;
    if (auto it = b.find("type"); it != b.end()) {
      if (!it->is_string()) throw JsonFormatError("binding type must be a string");
      try {
        ty = parse_type(it->get<std::string>());
      } catch (const ParseError& e) {
        throw JsonFormatError("type of " + name.get<std::string>() + ": " + e.what());
      }
    }
    SemValue v = value_from_json(value, ty ? std::optional<SemTy>(compile_type(*ty)) : std::nullopt);
    if (!ty) ty = v.vec2() ? Ty::boolean() : Ty::nat();
    bs.push_back({name.get<std::string>(), *ty});
    values.push_back(std::move(v));
  }
  Ctx ctx;
  try {
    ctx = Ctx(std::move(bs));
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(e.what());
  }
  return {std::move(ctx), std::move(values)};
}

Json env_to_json(const Env& env, std::size_t trunc) {
  Json out = Json::array();
  for (std::size_t i = 0; i < env.ctx.length(); ++i)
    out.push_back({{"name", env.ctx[i].name},
                   {"type", to_string(env.ctx[i].type)},
                   {"value", value_to_json(env.values.at(i), trunc)}});
  return out;
}

}  // namespace cajal
