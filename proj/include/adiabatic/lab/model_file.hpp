#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "adiabatic/errors.hpp"
#include "adiabatic/nstate.hpp"
#include "adiabatic/twostate.hpp"

// JSON model files.
//
//   {"kind": "two-state", "mu": 0, "delta": 1, "x": 0.5, "eps": 0.25}
//   {"kind": "n-state", "energies": [...], "v_real": [...], "v_imag": [...],
//    "x": 0.05, "eps": 0.1, "ground_index": 0}
//
// v_real / v_imag are row-major N x N. v_imag may be omitted for a real V.
namespace adiabatic::lab {

/// Malformed model file; the message names the line/column or the field.
class ModelFileError : public DomainError {
public:
  using DomainError::DomainError;
};

struct TwoStateParams {
  double mu = 0.0;
  double delta = 1.0;
  double x = 0.5;
  double eps = 0.25;

  twostate::TwoStateModel model() const { return {mu, delta, x, eps}; }
  friend bool operator==(const TwoStateParams&, const TwoStateParams&) = default;
};

struct NStateParams {
  std::vector<double> energies;
  std::vector<double> v_real;
  std::vector<double> v_imag;
  double x = 0.05;
  double eps = 0.1;
  std::size_t ground_index = 0;

  nstate::NStateModel model() const {
    const std::size_t n = energies.size();
    return {energies, numkit::HermitianMatrix::from_parts(n, v_real, v_imag), x, eps, ground_index};
  }
  friend bool operator==(const NStateParams&, const NStateParams&) = default;
};

using ModelFile = std::variant<TwoStateParams, NStateParams>;

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline double number_field(const nlohmann::json& j, const char* name, std::optional<double> fallback = {}) {
  if (!j.contains(name)) {
    if (fallback) return *fallback;
    throw ModelFileError(std::string("model file: missing field '") + name + "'");
  }
  const auto& v = j.at(name);
  if (!v.is_number()) throw ModelFileError(std::string("model file: field '") + name + "' must be a number");
  return v.get<double>();
}

inline std::vector<double> array_field(const nlohmann::json& j, const char* name, std::size_t expected,
                                       bool optional = false) {
  if (!j.contains(name)) {
    if (optional) return std::vector<double>(expected, 0.0);
    throw ModelFileError(std::string("model file: missing field '") + name + "'");
  }
  const auto& v = j.at(name);
  if (!v.is_array()) throw ModelFileError(std::string("model file: field '") + name + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ModelFileError(std::string("model file: field '") + name + "[" + std::to_string(i) +
                           "]' must be a number");
    }
    out.push_back(v[i].get<double>());
  }
  if (expected != 0 && out.size() != expected) {
    throw ModelFileError(std::string("model file: field '") + name + "' has " + std::to_string(out.size()) +
                         " entries, expected " + std::to_string(expected));
  }
  return out;
}

}  // namespace detail

/// Parses and validates a model. Syntax errors carry line/column; model
/// invariants are checked by constructing the model, so a degenerate
/// spectrum surfaces as DegeneracyError.
inline ModelFile parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelFileError("model file: JSON syntax error at " + detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) +
                         ": " + e.what());
  }
  if (!j.is_object()) throw ModelFileError("model file: top level must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ModelFileError("model file: field 'kind' must be \"two-state\" or \"n-state\"");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "two-state") {
    TwoStateParams p{detail::number_field(j, "mu", 0.0), detail::number_field(j, "delta"),
                     detail::number_field(j, "x"), detail::number_field(j, "eps")};
    (void)p.model();
    return p;
  }
  if (kind == "n-state") {
    NStateParams p;
    p.energies = detail::array_field(j, "energies", 0);
    const std::size_t n = p.energies.size();
    if (n == 0) throw ModelFileError("model file: field 'energies' must not be empty");
    p.v_real = detail::array_field(j, "v_real", n * n);
    p.v_imag = detail::array_field(j, "v_imag", n * n, true);
    p.x = detail::number_field(j, "x");
    p.eps = detail::number_field(j, "eps");
    const double gi = detail::number_field(j, "ground_index", 0.0);
    if (gi < 0 || gi != static_cast<double>(static_cast<std::size_t>(gi))) {
      throw ModelFileError("model file: field 'ground_index' must be a non-negative integer");
    }
    p.ground_index = static_cast<std::size_t>(gi);
    try {
      (void)p.model();
    } catch (const ContractError& e) {
      throw ModelFileError(std::string("model file: field 'v_real'/'v_imag': ") + e.what());
    }
    return p;
  }
  throw ModelFileError("model file: unknown kind '" + kind + "'");
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ModelFileError& e) {
    throw ModelFileError(path + ": " + e.what());
  }
}

inline nlohmann::ordered_json to_json(const ModelFile& mf) {
  nlohmann::ordered_json j;
  if (const auto* t = std::get_if<TwoStateParams>(&mf)) {
    j["kind"] = "two-state";
    j["mu"] = t->mu;
    j["delta"] = t->delta;
    j["x"] = t->x;
    j["eps"] = t->eps;
  } else {
    const auto& n = std::get<NStateParams>(mf);
    j["kind"] = "n-state";
    j["energies"] = n.energies;
    j["v_real"] = n.v_real;
    j["v_imag"] = n.v_imag;
    j["x"] = n.x;
    j["eps"] = n.eps;
    j["ground_index"] = n.ground_index;
  }
  return j;
}

}  // namespace adiabatic::lab
