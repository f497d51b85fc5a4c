#include "tsdsae/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace tsdsae {

double gradcheck_max_err(const std::function<Tensor()>& build_loss,
                         const std::vector<Tensor>& inputs, double h) {
  Tape& tape = Tape::active();
  tape.clear();
  for (const Tensor& t : inputs) {
    Tensor mut = t;
    mut.zero_grad();
  }
  Tensor loss = build_loss();
  backward(loss);

  std::vector<std::vector<double>> grads;
  for (const Tensor& t : inputs) {
    grads.emplace_back(t.grad().begin(), t.grad().end());
  }
  tape.clear();

  const auto eval = [&]() {
    NoGradGuard ng;
    return build_loss().value();
  };

  double max_err = 0.0;
  for (std::size_t ti = 0; ti < inputs.size(); ++ti) {
    Tensor t = inputs[ti];
    auto vals = t.data();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double saved = vals[i];
      vals[i] = saved + h;
      const double fp = eval();
      vals[i] = saved - h;
      const double fm = eval();
      vals[i] = saved;
      const double fd = (fp - fm) / (2.0 * h);
      const double g = grads[ti][i];
      const double denom = std::max({1.0, std::fabs(g), std::fabs(fd)});
      max_err = std::max(max_err, std::fabs(g - fd) / denom);
    }
  }
  return max_err;
}

std::vector<GradCheckResult> run_gradcheck_suite(
    const std::vector<GradCheckCase>& cases, int trials, std::uint64_t seed) {
  std::vector<GradCheckResult> results;
  for (const GradCheckCase& c : cases) {
    Rng rng(seed);
    GradCheckResult r;
    r.op = c.name;
    r.trials = trials;
    for (int t = 0; t < trials; ++t) {
      auto [builder, inputs] = c.make(rng);
      r.max_rel_err = std::max(r.max_rel_err,
                               gradcheck_max_err(builder, inputs));
    }
    r.pass = r.max_rel_err <= c.tol;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace tsdsae
