#pragma once

#include <map>
#include <string>
#include <vector>

#include "tsdsae/tensor.hpp"

namespace tsdsae {

// Named parameter tensors, ordered by name. Map order is the canonical
// serialization order.
using ParamMap = std::map<std::string, Tensor>;

inline void zero_grads(ParamMap& params) {
  for (auto& [name, t] : params) t.zero_grad();
}

inline ParamMap clone_params(const ParamMap& params) {
  ParamMap out;
  for (const auto& [name, t] : params) out.emplace(name, t.clone());
  return out;
}

inline std::vector<std::string> param_names(const ParamMap& params) {
  std::vector<std::string> names;
  names.reserve(params.size());
  for (const auto& [name, t] : params) names.push_back(name);
  return names;
}

// True when both maps hold identical names, shapes, and bitwise-equal values.
bool params_identical(const ParamMap& a, const ParamMap& b);

// Names whose dotted prefix is in `prefixes` (e.g. "enc_l", "trans").
std::vector<std::string> names_with_prefixes(
    const ParamMap& params, const std::vector<std::string>& prefixes);

// Complement of names_with_prefixes.
std::vector<std::string> names_without_prefixes(
    const ParamMap& params, const std::vector<std::string>& prefixes);

}  // namespace tsdsae
