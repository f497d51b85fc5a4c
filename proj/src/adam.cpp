#include "tsdsae/adam.hpp"

#include <cmath>

namespace tsdsae {

void AdamState::step(ParamMap& params, const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    auto it = params.find(name);
    if (it == params.end()) {
      throw ContractError("adam step: unknown parameter '" + name + "'");
    }
    Tensor& p = it->second;
    if (!p.has_grad()) {
      throw ContractError("adam step: parameter '" + name +
                          "' has no gradient");
    }
    AdamSlot& slot = slots_[name];
    const std::size_t n = p.data().size();
    if (slot.m.empty()) {
      slot.m.assign(n, 0.0);
      slot.v.assign(n, 0.0);
    }
    slot.t += 1;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(slot.t));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(slot.t));
    double* x = p.data().data();
    const double* g = p.grad().data();
    for (std::size_t i = 0; i < n; ++i) {
      slot.m[i] = cfg_.beta1 * slot.m[i] + (1.0 - cfg_.beta1) * g[i];
      slot.v[i] = cfg_.beta2 * slot.v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = slot.m[i] / c1;
      const double vhat = slot.v[i] / c2;
      x[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace tsdsae
