#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tsdsae/tensor.hpp"

namespace tsdsae {

// Central finite-difference verification of reverse-mode gradients.
//
// The loss builder must rebuild the graph from the current contents of the
// input tensors on every call (define-by-run); any randomness inside must be
// frozen so repeated builds see identical noise.

struct GradCheckResult {
  std::string op;
  double max_rel_err = 0.0;
  bool pass = false;
  int trials = 0;
};

// rel_err = |g - fd| / max(1, |g|, |fd|); the unit floor keeps near-zero
// gradients from inflating the ratio past finite-difference noise.
double gradcheck_max_err(const std::function<Tensor()>& build_loss,
                         const std::vector<Tensor>& inputs, double h = 1e-4);

// A named check: builds its own inputs from the given rng each trial.
struct GradCheckCase {
  std::string name;
  double tol = 1e-6;
  // Returns (loss builder, inputs to differentiate against).
  std::function<std::pair<std::function<Tensor()>, std::vector<Tensor>>(Rng&)>
      make;
};

// Every differentiable operation plus composite network cases.
std::vector<GradCheckCase> standard_gradcheck_cases();

// Runs each case `trials` times; a case passes when every trial stays within
// its tolerance.
std::vector<GradCheckResult> run_gradcheck_suite(
    const std::vector<GradCheckCase>& cases, int trials, std::uint64_t seed);

}  // namespace tsdsae
