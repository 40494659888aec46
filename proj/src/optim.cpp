//------------------------------------------------------------------------------
//
//   Copyright 2026 The unicom Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "unicom/optim.hpp"

#include <cmath>

#include "unicom/error.hpp"

namespace unicom::ad {

AdamState::AdamState(std::span<Tensor const> params, AdamOptions options)
  : options_(options)
{
  for (auto const &p : params)
  {
    first_.emplace_back(p.numel(), 0.0f);
    second_.emplace_back(p.numel(), 0.0f);
  }
}

void AdamState::step(std::span<Tensor> params)
{
  if (params.size() != first_.size())
  {
    throw InvalidArgument("AdamState::step: parameter count changed");
  }
  ++step_;
  double const b1   = options_.beta1;
  double const b2   = options_.beta2;
  double const c1   = 1.0 - std::pow(b1, static_cast<double>(step_));
  double const c2   = 1.0 - std::pow(b2, static_cast<double>(step_));
  double const lr   = options_.learning_rate;
  double const eps  = options_.epsilon;
  for (std::size_t p = 0; p < params.size(); ++p)
  {
    auto &m = first_[p];
    auto &v = second_[p];
    if (params[p].numel() != m.size())
    {
      throw InvalidArgument("AdamState::step: parameter shape changed");
    }
    auto w = params[p].data();
    auto g = params[p].grad();
    if (g.empty())
    {
      continue;
    }
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      m[i] = static_cast<float>(b1 * m[i] + (1.0 - b1) * g[i]);
      v[i] = static_cast<float>(b2 * v[i] + (1.0 - b2) * static_cast<double>(g[i]) * g[i]);
      double const mhat = m[i] / c1;
      double const vhat = v[i] / c2;
      w[i] = static_cast<float>(w[i] - lr * mhat / (std::sqrt(vhat) + eps));
    }
  }
}

void zero_grads(std::span<Tensor> params)
{
  for (auto &p : params)
  {
    p.zero_grad();
  }
}

}  // namespace unicom::ad
