// Copyright 2026 The Bertrand Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Finite-difference oracles shared by the unit and acceptance suites.

#ifndef BERTRAND_TESTS_SUPPORT_GRADCHECK_HPP_
#define BERTRAND_TESTS_SUPPORT_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bertrand/nn.hpp"
#include "bertrand/ppo.hpp"

namespace bertrand::testing {

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose +-h probe crosses a kink
};

inline double relative_error(double analytic, double numeric,
                             double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// Which hidden units are on; a probe that flips any of them straddles a ReLU
// kink and finite differences are meaningless there.
inline std::vector<bool> relu_pattern(const nn::Mlp& net,
                                      std::span<const double> input) {
  nn::Mlp::Cache cache;
  net.forward(input, cache);
  std::vector<bool> on;
  for (std::size_t l = 1; l + 1 < cache.inputs.size(); ++l) {
    for (double v : cache.inputs[l]) on.push_back(v > 0.0);
  }
  return on;
}

// Checks backward() on L(theta) = <w, f(x; theta)>.
inline GradCheck check_mlp_gradient(nn::Mlp net, std::span<const double> x,
                                    std::span<const double> w,
                                    double h = 1e-5) {
  nn::Mlp::Cache cache;
  net.forward(x, cache);
  std::vector<double> grad(net.parameter_count(), 0.0);
  net.backward(cache, w, grad);
  auto loss = [&] {
    const auto y = net.forward(x);
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) s += w[j] * y[j];
    return s;
  };
  const auto base = relu_pattern(net, x);
  GradCheck out;
  auto params = net.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double keep = params[k];
    params[k] = keep + h;
    const double up = loss();
    const bool same_up = relu_pattern(net, x) == base;
    params[k] = keep - h;
    const double down = loss();
    const bool same_down = relu_pattern(net, x) == base;
    params[k] = keep;
    if (!same_up || !same_down) {
      ++out.skipped;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    out.max_rel_error =
        std::max(out.max_rel_error, relative_error(grad[k], numeric));
    ++out.checked;
  }
  return out;
}

// Region of the clipped term: 0 below 1 - clip, 1 inside, 2 above 1 + clip.
inline std::vector<int> clip_regions(const nn::Mlp& actor,
                                     const ppo::RolloutBuffer& buffer,
                                     std::span<const std::size_t> batch,
                                     double clip) {
  std::vector<int> out;
  for (std::size_t idx : batch) {
    const nn::Categorical dist(actor.forward(buffer.states[idx]));
    const double ratio =
        std::exp(dist.log_probs()[buffer.actions[idx]] - buffer.log_probs[idx]);
    out.push_back(ratio < 1.0 - clip ? 0 : (ratio > 1.0 + clip ? 2 : 1));
  }
  return out;
}

// Checks the analytic ascent gradient of the PPO surrogate (clipped term
// plus entropy bonus) with respect to the actor parameters.
inline GradCheck check_surrogate_gradient(
    nn::Mlp actor, const ppo::RolloutBuffer& buffer,
    std::span<const double> adv, std::span<const std::size_t> batch,
    double clip, double entropy_coef, double h = 1e-5) {
  std::vector<double> grad(actor.parameter_count(), 0.0);
  ppo::surrogate_objective(actor, buffer, adv, batch, clip, entropy_coef, grad);
  auto patterns = [&] {
    std::vector<std::vector<bool>> relu;
    for (std::size_t idx : batch) relu.push_back(relu_pattern(actor, buffer.states[idx]));
    return std::make_pair(relu, clip_regions(actor, buffer, batch, clip));
  };
  const auto base = patterns();
  GradCheck out;
  auto params = actor.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double keep = params[k];
    params[k] = keep + h;
    const double up = ppo::surrogate_objective(actor, buffer, adv, batch, clip,
                                               entropy_coef);
    const bool same_up = patterns() == base;
    params[k] = keep - h;
    const double down = ppo::surrogate_objective(actor, buffer, adv, batch,
                                                 clip, entropy_coef);
    const bool same_down = patterns() == base;
    params[k] = keep;
    if (!same_up || !same_down) {
      ++out.skipped;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    out.max_rel_error =
        std::max(out.max_rel_error, relative_error(grad[k], numeric));
    ++out.checked;
  }
  return out;
}

}  // namespace bertrand::testing

#endif  // BERTRAND_TESTS_SUPPORT_GRADCHECK_HPP_
