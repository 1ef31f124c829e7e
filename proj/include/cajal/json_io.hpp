#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "cajal/compiler.hpp"
#include "json.hpp"

namespace cajal {

using Json = nlohmann::json;

class JsonFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"kind":"matrix","rows":R,"cols":C,"data":[...]}, row-major.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Base values as {"kind":"bool","vec":[a,b]} or {"kind":"nat","support":[[n,c],...]}.
/// Maps between base types are written in matrix form, truncated on Nat sides.
Json value_to_json(const SemValue& v, std::size_t trunc = 10);

/// The matrix form needs `expected` to be a map type between base types.
/// When `expected` is given the result is checked against it.
SemValue value_from_json(const Json& j, const std::optional<SemTy>& expected = std::nullopt);

/// Dense matrix of a map between base types, probing basis vectors.
Matrix matrix_of_map(const LinearMap& f, std::size_t trunc);

/// An array of {"name": x, "type": "Bool -o Bool", "value": {...}}. "type"
/// may be left out for bool and nat values.
Env env_from_json(const Json& j);
Json env_to_json(const Env& env, std::size_t trunc = 10);

}  // namespace cajal
