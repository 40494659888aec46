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

// Dense float tensors with tape-based reverse-mode differentiation.
//
// A Tensor is a shared handle; copying it aliases the same storage. Every
// primitive takes the Tape it records onto as its first argument and only
// records when at least one operand requires a gradient, so inference code
// pays nothing for the tape. Reductions accumulate in double.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace unicom::ad {

using Shape = std::vector<std::size_t>;

/// Row-major N x m validity mask (1 = valid token).
using Mask = std::vector<std::uint8_t>;

class Tensor
{
public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<float> data, bool requires_grad = false);

  bool defined() const noexcept
  {
    return node_ != nullptr;
  }

  Shape const &shape() const;
  std::size_t rank() const;
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;
  // Product of all leading dims; the last dim is cols().
  std::size_t rows() const;
  std::size_t cols() const;

  // Handles share storage, so access through a const handle is still mutable.
  std::span<float> data() const;
  std::span<float> grad() const;

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  void zero_grad();

  float item() const;
  float at(std::size_t row, std::size_t col) const;

  // Value copy with no gradient tracking.
  Tensor detach() const;

  bool aliases(Tensor const &other) const noexcept
  {
    return node_ == other.node_;
  }

private:
  struct Node
  {
    Shape              shape;
    std::vector<float> value;
    std::vector<float> grad;
    bool               requires_grad = false;
  };

  explicit Tensor(std::shared_ptr<Node> node)
    : node_(std::move(node))
  {}

  std::shared_ptr<Node> node_;
};

class Tape
{
public:
  explicit Tape(bool training = false)
    : training_(training)
  {}

  Tape(Tape const &)            = delete;
  Tape &operator=(Tape const &) = delete;

  bool training() const noexcept
  {
    return training_;
  }

  void record(Tensor output, std::function<void()> backward_fn);

  // Seeds d(loss)/d(loss) = 1 and replays every entry once in reverse order.
  // A tape can be replayed only once; a second call throws InvalidArgument.
  void backward(Tensor const &loss);

  std::size_t size() const noexcept
  {
    return entries_.size();
  }

private:
  struct Entry
  {
    Tensor                output;
    std::function<void()> backward_fn;
  };

  std::vector<Entry> entries_;
  bool               training_;
  bool               consumed_ = false;
};

// ---- linear algebra -------------------------------------------------------
Tensor matmul(Tape &tape, Tensor const &a, Tensor const &b);     // [n,k] x [k,m]
Tensor matmul_nt(Tape &tape, Tensor const &a, Tensor const &b);  // [n,k] x [m,k]^T
Tensor bmm(Tape &tape, Tensor const &a, Tensor const &b, bool transpose_b);  // [B,n,k] x [B,k,m]
Tensor transpose(Tape &tape, Tensor const &a);
Tensor reshape(Tape &tape, Tensor const &a, Shape shape);

// ---- elementwise ----------------------------------------------------------
Tensor add(Tape &tape, Tensor const &a, Tensor const &b);
Tensor sub(Tape &tape, Tensor const &a, Tensor const &b);
Tensor mul(Tape &tape, Tensor const &a, Tensor const &b);
Tensor add_rowvec(Tape &tape, Tensor const &x, Tensor const &bias);  // bias: [cols]
Tensor scale(Tape &tape, Tensor const &x, float factor);
Tensor add_scalar(Tape &tape, Tensor const &x, float value);
Tensor exp(Tape &tape, Tensor const &x);
Tensor log(Tape &tape, Tensor const &x);
Tensor sigmoid(Tape &tape, Tensor const &x);
Tensor gelu(Tape &tape, Tensor const &x);
Tensor relu(Tape &tape, Tensor const &x);
Tensor softplus(Tape &tape, Tensor const &x);
// -log(1 - exp(-x)) for x > 0, evaluated through expm1.
Tensor neg_log1mexp(Tape &tape, Tensor const &x);
// Gradient passes only where lo <= x <= hi.
Tensor clamp(Tape &tape, Tensor const &x, float lo, float hi);
// Inverted dropout; identity unless tape.training().
Tensor dropout(Tape &tape, Tensor const &x, float rate, std::mt19937_64 &rng);

// ---- reductions -----------------------------------------------------------
Tensor sum(Tape &tape, Tensor const &x);
Tensor mean(Tape &tape, Tensor const &x);
Tensor rowdot(Tape &tape, Tensor const &a, Tensor const &b);             // [n,1]
Tensor cosine_similarity(Tape &tape, Tensor const &a, Tensor const &b);  // [n,1]
Tensor l2_normalize_rows(Tape &tape, Tensor const &x);
Tensor pairwise_sqdist(Tape &tape, Tensor const &a, Tensor const &b);  // [n,m]
Tensor segment_mean(Tape &tape, Tensor const &x, std::span<std::size_t const> labels, std::size_t k);

// ---- row / token plumbing -------------------------------------------------
Tensor concat_cols(Tape &tape, std::span<Tensor const> parts);
Tensor gather_rows(Tape &tape, Tensor const &x, std::span<std::size_t const> index);
// Zeroes rows whose mask entry is 0.
Tensor mask_rows(Tape &tape, Tensor const &x, std::span<std::uint8_t const> row_mask);
// x holds N groups of `tokens` rows. Row `pos` of every group -> [N, cols].
Tensor select_token(Tape &tape, Tensor const &x, std::size_t tokens, std::size_t pos);
// Mean over valid rows first..tokens-1 of every group; all-masked groups give 0.
Tensor masked_token_mean(Tape &tape, Tensor const &x, Mask const &mask, std::size_t tokens,
                         std::size_t first);

// ---- normalisation --------------------------------------------------------
Tensor softmax_rows(Tape &tape, Tensor const &x);
// scores: [N*heads, m, m]; key_mask: N x m. Masked keys get zero weight; a row
// with no valid key is all zero.
Tensor masked_softmax(Tape &tape, Tensor const &scores, Mask const &key_mask, std::size_t heads);
Tensor layer_norm(Tape &tape, Tensor const &x, Tensor const &gamma, Tensor const &beta,
                  float eps = 1e-5f);

// ---- attention layout -----------------------------------------------------
// [N*m, heads*dh] -> [N*heads, m, dh] and back.
Tensor split_heads(Tape &tape, Tensor const &x, std::size_t tokens, std::size_t heads);
Tensor merge_heads(Tape &tape, Tensor const &x, std::size_t tokens, std::size_t heads);

}  // namespace unicom::ad
