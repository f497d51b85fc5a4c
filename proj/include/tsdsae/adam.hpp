#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsdsae/params.hpp"

namespace tsdsae {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter moments. The step count is tracked per slot so a parameter
// that starts training late (after a freeze) still gets proper bias
// correction from its own first step.
struct AdamSlot {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }

  // Bias-corrected update applied in place to each named parameter. Every
  // listed parameter must carry a gradient. Unlisted parameters and their
  // moments are untouched.
  void step(ParamMap& params, const std::vector<std::string>& names);

  std::map<std::string, AdamSlot>& slots() { return slots_; }
  const std::map<std::string, AdamSlot>& slots() const { return slots_; }

 private:
  AdamConfig cfg_;
  std::map<std::string, AdamSlot> slots_;
};

}  // namespace tsdsae
