#include "tsdsae/params.hpp"

#include <algorithm>
#include <cstring>

namespace tsdsae {

namespace {

bool has_prefix(const std::string& name,
                const std::vector<std::string>& prefixes) {
  for (const std::string& p : prefixes) {
    if (name.size() > p.size() && name.compare(0, p.size(), p) == 0 &&
        name[p.size()] == '.') {
      return true;
    }
  }
  return false;
}

}  // namespace

bool params_identical(const ParamMap& a, const ParamMap& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (ia->second.shape() != ib->second.shape()) return false;
    const auto da = ia->second.data();
    const auto db = ib->second.data();
    if (std::memcmp(da.data(), db.data(), da.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> names_with_prefixes(
    const ParamMap& params, const std::vector<std::string>& prefixes) {
  std::vector<std::string> out;
  for (const auto& [name, t] : params) {
    if (has_prefix(name, prefixes)) out.push_back(name);
  }
  return out;
}

std::vector<std::string> names_without_prefixes(
    const ParamMap& params, const std::vector<std::string>& prefixes) {
  std::vector<std::string> out;
  for (const auto& [name, t] : params) {
    if (!has_prefix(name, prefixes)) out.push_back(name);
  }
  return out;
}

}  // namespace tsdsae
