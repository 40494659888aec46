#pragma once
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

#include <cstddef>
#include <span>
#include <vector>

#include "unicom/autodiff.hpp"

namespace unicom::ad {

struct AdamOptions
{
  float learning_rate = 1e-3f;
  float beta1         = 0.9f;
  float beta2         = 0.999f;
  float epsilon       = 1e-8f;
};

/// Bias-corrected Adam moments for a fixed list of parameters.
class AdamState
{
public:
  AdamState() = default;
  AdamState(std::span<Tensor const> params, AdamOptions options);

  AdamOptions const &options() const noexcept
  {
    return options_;
  }
  std::size_t step_count() const noexcept
  {
    return step_;
  }

  // Applies one update from the gradients currently held by `params`. The
  // parameter list must match the one the state was built with.
  void step(std::span<Tensor> params);

private:
  AdamOptions                     options_;
  std::size_t                     step_ = 0;
  std::vector<std::vector<float>> first_;
  std::vector<std::vector<float>> second_;
};

void zero_grads(std::span<Tensor> params);

}  // namespace unicom::ad
