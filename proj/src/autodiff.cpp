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

#include "unicom/autodiff.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "unicom/error.hpp"

namespace unicom::ad {

namespace {

using RowMat   = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat   = Eigen::Map<RowMat>;
using ConstMat = Eigen::Map<RowMat const>;

std::size_t product(Shape const &shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(Shape const &s)
{
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i)
  {
    out += (i ? "," : "") + std::to_string(s[i]);
  }
  return out + "]";
}

void require(bool cond, char const *op, std::string const &what)
{
  if (!cond)
  {
    throw InvalidArgument(std::string(op) + ": " + what);
  }
}

void require_same(Tensor const &a, Tensor const &b, char const *op)
{
  require(a.defined() && b.defined(), op, "undefined operand");
  require(a.shape() == b.shape(), op, "shape mismatch " + shape_str(a.shape()) + " vs " +
                                          shape_str(b.shape()));
}

bool any_grad(std::initializer_list<Tensor const *> xs)
{
  return std::any_of(xs.begin(), xs.end(), [](Tensor const *t) { return t->requires_grad(); });
}

ConstMat cmat(Tensor const &t)
{
  return ConstMat(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}

ConstMat cgrad(Tensor const &t)
{
  return ConstMat(t.grad().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}

MapMat mgrad(Tensor const &t)
{
  return MapMat(t.grad().data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

// Elementwise unary op: forward f(x), backward dy * df(x, y).
template <typename F, typename DF>
Tensor unary(Tape &tape, Tensor const &x, F f, DF df)
{
  require(x.defined(), "unary", "undefined operand");
  bool const need = x.requires_grad();
  Tensor     out  = Tensor::zeros(x.shape(), need);
  auto       xs   = x.data();
  auto       ys   = out.data();
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    ys[i] = f(xs[i]);
  }
  if (need)
  {
    tape.record(out, [x, out, df]() mutable {
      auto xs = x.data();
      auto ys = out.data();
      auto gy = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < xs.size(); ++i)
      {
        gx[i] += gy[i] * df(xs[i], ys[i]);
      }
    });
  }
  return out;
}

}  // namespace

// ---- Tensor ---------------------------------------------------------------

Tensor Tensor::zeros(Shape shape, bool requires_grad)
{
  return full(std::move(shape), 0.0f, requires_grad);
}

Tensor Tensor::full(Shape shape, float value, bool requires_grad)
{
  std::size_t const n = product(shape);
  return from_data(std::move(shape), std::vector<float>(n, value), requires_grad);
}

Tensor Tensor::from_data(Shape shape, std::vector<float> data, bool requires_grad)
{
  if (shape.empty())
  {
    shape = {1};
  }
  if (product(shape) != data.size())
  {
    throw InvalidArgument("Tensor: data length " + std::to_string(data.size()) +
                          " does not match shape " + shape_str(shape));
  }
  auto node   = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  Tensor t(std::move(node));
  t.set_requires_grad(requires_grad);
  return t;
}

Shape const &Tensor::shape() const
{
  return node_->shape;
}

std::size_t Tensor::rank() const
{
  return node_->shape.size();
}

std::size_t Tensor::dim(std::size_t axis) const
{
  return node_->shape.at(axis);
}

std::size_t Tensor::numel() const
{
  return node_->value.size();
}

std::size_t Tensor::rows() const
{
  return node_->value.empty() ? 0 : numel() / cols();
}

std::size_t Tensor::cols() const
{
  return node_->shape.back();
}

std::span<float> Tensor::data() const
{
  return node_->value;
}

std::span<float> Tensor::grad() const
{
  return node_->grad;
}

bool Tensor::requires_grad() const
{
  return node_ && node_->requires_grad;
}

void Tensor::set_requires_grad(bool flag)
{
  node_->requires_grad = flag;
  if (flag)
  {
    node_->grad.assign(node_->value.size(), 0.0f);
  }
  else
  {
    node_->grad.clear();
  }
}

void Tensor::zero_grad()
{
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0f);
}

float Tensor::item() const
{
  if (numel() != 1)
  {
    throw InvalidArgument("Tensor::item on a tensor with " + std::to_string(numel()) +
                          " elements");
  }
  return node_->value[0];
}

float Tensor::at(std::size_t row, std::size_t col) const
{
  return node_->value.at(row * cols() + col);
}

Tensor Tensor::detach() const
{
  return from_data(node_->shape, node_->value, false);
}

// ---- Tape -----------------------------------------------------------------

void Tape::record(Tensor output, std::function<void()> backward_fn)
{
  entries_.push_back({std::move(output), std::move(backward_fn)});
}

void Tape::backward(Tensor const &loss)
{
  if (consumed_)
  {
    throw InvalidArgument("Tape::backward: tape already replayed; run a fresh forward pass");
  }
  if (!loss.defined() || loss.numel() != 1)
  {
    throw InvalidArgument("Tape::backward: loss must be a scalar");
  }
  if (!loss.requires_grad())
  {
    throw InvalidArgument("Tape::backward: loss does not depend on any trainable tensor");
  }
  consumed_ = true;
  Tensor seed = loss;
  seed.grad()[0] += 1.0f;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
  {
    it->backward_fn();
  }
}

// ---- linear algebra -------------------------------------------------------

Tensor matmul(Tape &tape, Tensor const &a, Tensor const &b)
{
  require(a.rank() == 2 && b.rank() == 2, "matmul", "operands must be 2-D");
  require(a.cols() == b.rows(), "matmul",
          "inner dims " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  bool const need = any_grad({&a, &b});
  Tensor     out  = Tensor::zeros({a.rows(), b.cols()}, need);
  MapMat(out.data().data(), a.rows(), b.cols()).noalias() = cmat(a) * cmat(b);
  if (need)
  {
    tape.record(out, [a, b, out]() mutable {
      if (a.requires_grad())
      {
        mgrad(a).noalias() += cgrad(out) * cmat(b).transpose();
      }
      if (b.requires_grad())
      {
        mgrad(b).noalias() += cmat(a).transpose() * cgrad(out);
      }
    });
  }
  return out;
}

Tensor matmul_nt(Tape &tape, Tensor const &a, Tensor const &b)
{
  require(a.rank() == 2 && b.rank() == 2, "matmul_nt", "operands must be 2-D");
  require(a.cols() == b.cols(), "matmul_nt",
          "inner dims " + shape_str(a.shape()) + " x " + shape_str(b.shape()) + "^T");
  bool const need = any_grad({&a, &b});
  Tensor     out  = Tensor::zeros({a.rows(), b.rows()}, need);
  MapMat(out.data().data(), a.rows(), b.rows()).noalias() = cmat(a) * cmat(b).transpose();
  if (need)
  {
    tape.record(out, [a, b, out]() mutable {
      if (a.requires_grad())
      {
        mgrad(a).noalias() += cgrad(out) * cmat(b);
      }
      if (b.requires_grad())
      {
        mgrad(b).noalias() += cgrad(out).transpose() * cmat(a);
      }
    });
  }
  return out;
}

Tensor bmm(Tape &tape, Tensor const &a, Tensor const &b, bool transpose_b)
{
  require(a.rank() == 3 && b.rank() == 3, "bmm", "operands must be 3-D");
  require(a.dim(0) == b.dim(0), "bmm", "batch mismatch");
  std::size_t const batch = a.dim(0);
  std::size_t const n     = a.dim(1);
  std::size_t const k     = a.dim(2);
  std::size_t const m     = transpose_b ? b.dim(1) : b.dim(2);
  require((transpose_b ? b.dim(2) : b.dim(1)) == k, "bmm",
          "inner dims " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  bool const need = any_grad({&a, &b});
  Tensor     out  = Tensor::zeros({batch, n, m}, need);

  auto const b_rows = static_cast<Eigen::Index>(b.dim(1));
  auto const b_cols = static_cast<Eigen::Index>(b.dim(2));
  auto       slice  = [](auto *base, std::size_t idx, Eigen::Index r, Eigen::Index c) {
    return base + idx * static_cast<std::size_t>(r * c);
  };

  for (std::size_t s = 0; s < batch; ++s)
  {
    ConstMat A(slice(a.data().data(), s, n, k), n, k);
    ConstMat B(slice(b.data().data(), s, b_rows, b_cols), b_rows, b_cols);
    MapMat   C(slice(out.data().data(), s, n, m), n, m);
    if (transpose_b)
    {
      C.noalias() = A * B.transpose();
    }
    else
    {
      C.noalias() = A * B;
    }
  }
  if (need)
  {
    tape.record(out, [a, b, out, batch, n, k, m, b_rows, b_cols, transpose_b, slice]() mutable {
      for (std::size_t s = 0; s < batch; ++s)
      {
        ConstMat A(slice(a.data().data(), s, n, k), n, k);
        ConstMat B(slice(b.data().data(), s, b_rows, b_cols), b_rows, b_cols);
        ConstMat G(slice(out.grad().data(), s, n, m), n, m);
        if (a.requires_grad())
        {
          MapMat GA(slice(a.grad().data(), s, n, k), n, k);
          if (transpose_b)
          {
            GA.noalias() += G * B;
          }
          else
          {
            GA.noalias() += G * B.transpose();
          }
        }
        if (b.requires_grad())
        {
          MapMat GB(slice(b.grad().data(), s, b_rows, b_cols), b_rows, b_cols);
          if (transpose_b)
          {
            GB.noalias() += G.transpose() * A;
          }
          else
          {
            GB.noalias() += A.transpose() * G;
          }
        }
      }
    });
  }
  return out;
}

Tensor transpose(Tape &tape, Tensor const &a)
{
  require(a.rank() == 2, "transpose", "operand must be 2-D");
  bool const need = a.requires_grad();
  Tensor     out  = Tensor::zeros({a.cols(), a.rows()}, need);
  MapMat(out.data().data(), a.cols(), a.rows()) = cmat(a).transpose();
  if (need)
  {
    tape.record(out, [a, out]() mutable { mgrad(a) += cgrad(out).transpose(); });
  }
  return out;
}

Tensor reshape(Tape &tape, Tensor const &a, Shape shape)
{
  require(product(shape) == a.numel(), "reshape",
          shape_str(a.shape()) + " -> " + shape_str(shape));
  bool const need = a.requires_grad();
  Tensor out = Tensor::from_data(std::move(shape), std::vector<float>(a.data().begin(), a.data().end()),
                                 need);
  if (need)
  {
    tape.record(out, [a, out]() mutable {
      auto ga = a.grad();
      auto go = out.grad();
      for (std::size_t i = 0; i < ga.size(); ++i)
      {
        ga[i] += go[i];
      }
    });
  }
  return out;
}

// ---- elementwise ----------------------------------------------------------

namespace {

template <typename F, typename DA, typename DB>
Tensor binary(Tape &tape, Tensor const &a, Tensor const &b, char const *op, F f, DA da, DB db)
{
  require_same(a, b, op);
  bool const need = any_grad({&a, &b});
  Tensor     out  = Tensor::zeros(a.shape(), need);
  auto       as   = a.data();
  auto       bs   = b.data();
  auto       ys   = out.data();
  for (std::size_t i = 0; i < ys.size(); ++i)
  {
    ys[i] = f(as[i], bs[i]);
  }
  if (need)
  {
    tape.record(out, [a, b, out, da, db]() mutable {
      auto as = a.data();
      auto bs = b.data();
      auto gy = out.grad();
      if (a.requires_grad())
      {
        auto ga = a.grad();
        for (std::size_t i = 0; i < gy.size(); ++i)
        {
          ga[i] += gy[i] * da(as[i], bs[i]);
        }
      }
      if (b.requires_grad())
      {
        auto gb = b.grad();
        for (std::size_t i = 0; i < gy.size(); ++i)
        {
          gb[i] += gy[i] * db(as[i], bs[i]);
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor add(Tape &tape, Tensor const &a, Tensor const &b)
{
  return binary(
      tape, a, b, "add", [](float x, float y) { return x + y; }, [](float, float) { return 1.0f; },
      [](float, float) { return 1.0f; });
}

Tensor sub(Tape &tape, Tensor const &a, Tensor const &b)
{
  return binary(
      tape, a, b, "sub", [](float x, float y) { return x - y; }, [](float, float) { return 1.0f; },
      [](float, float) { return -1.0f; });
}

Tensor mul(Tape &tape, Tensor const &a, Tensor const &b)
{
  return binary(
      tape, a, b, "mul", [](float x, float y) { return x * y; }, [](float, float y) { return y; },
      [](float x, float) { return x; });
}

Tensor add_rowvec(Tape &tape, Tensor const &x, Tensor const &bias)
{
  require(bias.numel() == x.cols(), "add_rowvec",
          "bias " + shape_str(bias.shape()) + " vs input " + shape_str(x.shape()));
  bool const need = any_grad({&x, &bias});
  Tensor     out  = Tensor::zeros(x.shape(), need);
  std::size_t const r = x.rows();
  std::size_t const c = x.cols();
  auto xs = x.data();
  auto bs = bias.data();
  auto ys = out.data();
  for (std::size_t i = 0; i < r; ++i)
  {
    for (std::size_t j = 0; j < c; ++j)
    {
      ys[i * c + j] = xs[i * c + j] + bs[j];
    }
  }
  if (need)
  {
    tape.record(out, [x, bias, out, r, c]() mutable {
      auto gy = out.grad();
      if (x.requires_grad())
      {
        auto gx = x.grad();
        for (std::size_t i = 0; i < gy.size(); ++i)
        {
          gx[i] += gy[i];
        }
      }
      if (bias.requires_grad())
      {
        auto gb = bias.grad();
        for (std::size_t j = 0; j < c; ++j)
        {
          double acc = 0.0;
          for (std::size_t i = 0; i < r; ++i)
          {
            acc += gy[i * c + j];
          }
          gb[j] += static_cast<float>(acc);
        }
      }
    });
  }
  return out;
}

Tensor scale(Tape &tape, Tensor const &x, float factor)
{
  return unary(
      tape, x, [factor](float v) { return v * factor; },
      [factor](float, float) { return factor; });
}

Tensor add_scalar(Tape &tape, Tensor const &x, float value)
{
  return unary(
      tape, x, [value](float v) { return v + value; }, [](float, float) { return 1.0f; });
}

Tensor exp(Tape &tape, Tensor const &x)
{
  return unary(
      tape, x, [](float v) { return std::exp(v); }, [](float, float y) { return y; });
}

Tensor log(Tape &tape, Tensor const &x)
{
  return unary(
      tape, x, [](float v) { return std::log(v); }, [](float v, float) { return 1.0f / v; });
}

Tensor sigmoid(Tape &tape, Tensor const &x)
{
  return unary(
      tape, x,
      [](float v) {
        return v >= 0.0f ? 1.0f / (1.0f + std::exp(-v)) : std::exp(v) / (1.0f + std::exp(v));
      },
      [](float, float y) { return y * (1.0f - y); });
}

Tensor gelu(Tape &tape, Tensor const &x)
{
  constexpr double inv_sqrt2     = 0.70710678118654752440;
  constexpr double inv_sqrt_2pi  = 0.39894228040143267794;
  return unary(
      tape, x,
      [](float v) {
        double const d = v;
        return static_cast<float>(0.5 * d * (1.0 + std::erf(d * inv_sqrt2)));
      },
      [](float v, float) {
        double const d = v;
        return static_cast<float>(0.5 * (1.0 + std::erf(d * inv_sqrt2)) +
                                  d * inv_sqrt_2pi * std::exp(-0.5 * d * d));
      });
}

Tensor relu(Tape &tape, Tensor const &x)
{
  return unary(
      tape, x, [](float v) { return v > 0.0f ? v : 0.0f; },
      [](float v, float) { return v > 0.0f ? 1.0f : 0.0f; });
}

Tensor softplus(Tape &tape, Tensor const &x)
{
  return unary(
      tape, x,
      [](float v) {
        double const d = v;
        return static_cast<float>(d > 0.0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d)));
      },
      [](float v, float) {
        double const d = v;
        return static_cast<float>(d >= 0.0 ? 1.0 / (1.0 + std::exp(-d))
                                           : std::exp(d) / (1.0 + std::exp(d)));
      });
}

Tensor neg_log1mexp(Tape &tape, Tensor const &x)
{
  return unary(
      tape, x,
      [](float v) {
        double const d = v;
        return static_cast<float>(-std::log(-std::expm1(-d)));
      },
      [](float v, float) {
        double const d = v;
        return static_cast<float>(-1.0 / std::expm1(d));
      });
}

Tensor clamp(Tape &tape, Tensor const &x, float lo, float hi)
{
  return unary(
      tape, x, [lo, hi](float v) { return std::clamp(v, lo, hi); },
      [lo, hi](float v, float) { return (v >= lo && v <= hi) ? 1.0f : 0.0f; });
}

Tensor dropout(Tape &tape, Tensor const &x, float rate, std::mt19937_64 &rng)
{
  require(rate >= 0.0f && rate < 1.0f, "dropout", "rate must lie in [0, 1)");
  if (!tape.training() || rate == 0.0f)
  {
    return x;
  }
  std::bernoulli_distribution keep(1.0 - rate);
  float const                 inv = 1.0f / (1.0f - rate);
  auto mask = std::make_shared<std::vector<float>>(x.numel());
  for (auto &m : *mask)
  {
    m = keep(rng) ? inv : 0.0f;
  }
  bool const need = x.requires_grad();
  Tensor     out  = Tensor::zeros(x.shape(), need);
  auto       xs   = x.data();
  auto       ys   = out.data();
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    ys[i] = xs[i] * (*mask)[i];
  }
  if (need)
  {
    tape.record(out, [x, out, mask]() mutable {
      auto gx = x.grad();
      auto gy = out.grad();
      for (std::size_t i = 0; i < gx.size(); ++i)
      {
        gx[i] += gy[i] * (*mask)[i];
      }
    });
  }
  return out;
}

// ---- reductions -----------------------------------------------------------

Tensor sum(Tape &tape, Tensor const &x)
{
  bool const need = x.requires_grad();
  double     acc  = 0.0;
  for (float v : x.data())
  {
    acc += v;
  }
  Tensor out = Tensor::full({1}, static_cast<float>(acc), need);
  if (need)
  {
    tape.record(out, [x, out]() mutable {
      float const g = out.grad()[0];
      for (float &gx : x.grad())
      {
        gx += g;
      }
    });
  }
  return out;
}

Tensor mean(Tape &tape, Tensor const &x)
{
  require(x.numel() > 0, "mean", "empty tensor");
  return scale(tape, sum(tape, x), 1.0f / static_cast<float>(x.numel()));
}

Tensor rowdot(Tape &tape, Tensor const &a, Tensor const &b)
{
  require_same(a, b, "rowdot");
  std::size_t const r    = a.rows();
  std::size_t const c    = a.cols();
  bool const        need = any_grad({&a, &b});
  Tensor            out  = Tensor::zeros({r, 1}, need);
  auto as = a.data();
  auto bs = b.data();
  for (std::size_t i = 0; i < r; ++i)
  {
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j)
    {
      acc += static_cast<double>(as[i * c + j]) * bs[i * c + j];
    }
    out.data()[i] = static_cast<float>(acc);
  }
  if (need)
  {
    tape.record(out, [a, b, out, r, c]() mutable {
      auto as = a.data();
      auto bs = b.data();
      auto gy = out.grad();
      for (std::size_t i = 0; i < r; ++i)
      {
        for (std::size_t j = 0; j < c; ++j)
        {
          if (a.requires_grad())
          {
            a.grad()[i * c + j] += gy[i] * bs[i * c + j];
          }
          if (b.requires_grad())
          {
            b.grad()[i * c + j] += gy[i] * as[i * c + j];
          }
        }
      }
    });
  }
  return out;
}

Tensor l2_normalize_rows(Tape &tape, Tensor const &x)
{
  constexpr double  floor_norm = 1e-12;
  std::size_t const r          = x.rows();
  std::size_t const c          = x.cols();
  bool const        need       = x.requires_grad();
  Tensor            out        = Tensor::zeros(x.shape(), need);
  auto norms = std::make_shared<std::vector<double>>(r);
  auto xs    = x.data();
  auto ys    = out.data();
  for (std::size_t i = 0; i < r; ++i)
  {
    double sq = 0.0;
    for (std::size_t j = 0; j < c; ++j)
    {
      sq += static_cast<double>(xs[i * c + j]) * xs[i * c + j];
    }
    double const n = std::max(std::sqrt(sq), floor_norm);
    (*norms)[i]    = n;
    for (std::size_t j = 0; j < c; ++j)
    {
      ys[i * c + j] = static_cast<float>(xs[i * c + j] / n);
    }
  }
  if (need)
  {
    tape.record(out, [x, out, norms, r, c]() mutable {
      auto ys = out.data();
      auto gy = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < r; ++i)
      {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j)
        {
          dot += static_cast<double>(gy[i * c + j]) * ys[i * c + j];
        }
        double const n = (*norms)[i];
        for (std::size_t j = 0; j < c; ++j)
        {
          gx[i * c + j] += static_cast<float>((gy[i * c + j] - dot * ys[i * c + j]) / n);
        }
      }
    });
  }
  return out;
}

Tensor cosine_similarity(Tape &tape, Tensor const &a, Tensor const &b)
{
  require_same(a, b, "cosine_similarity");
  return rowdot(tape, l2_normalize_rows(tape, a), l2_normalize_rows(tape, b));
}

Tensor pairwise_sqdist(Tape &tape, Tensor const &a, Tensor const &b)
{
  require(a.cols() == b.cols(), "pairwise_sqdist",
          "width mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  std::size_t const n    = a.rows();
  std::size_t const m    = b.rows();
  std::size_t const c    = a.cols();
  bool const        need = any_grad({&a, &b});
  Tensor            out  = Tensor::zeros({n, m}, need);
  auto as = a.data();
  auto bs = b.data();
  auto ys = out.data();
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = 0; j < m; ++j)
    {
      double acc = 0.0;
      for (std::size_t t = 0; t < c; ++t)
      {
        double const d = static_cast<double>(as[i * c + t]) - bs[j * c + t];
        acc += d * d;
      }
      ys[i * m + j] = static_cast<float>(acc);
    }
  }
  if (need)
  {
    tape.record(out, [a, b, out, n, m, c]() mutable {
      auto as = a.data();
      auto bs = b.data();
      auto gy = out.grad();
      for (std::size_t i = 0; i < n; ++i)
      {
        for (std::size_t j = 0; j < m; ++j)
        {
          float const g = gy[i * m + j];
          if (g == 0.0f)
          {
            continue;
          }
          for (std::size_t t = 0; t < c; ++t)
          {
            float const d = 2.0f * (as[i * c + t] - bs[j * c + t]) * g;
            if (a.requires_grad())
            {
              a.grad()[i * c + t] += d;
            }
            if (b.requires_grad())
            {
              b.grad()[j * c + t] -= d;
            }
          }
        }
      }
    });
  }
  return out;
}

Tensor segment_mean(Tape &tape, Tensor const &x, std::span<std::size_t const> labels, std::size_t k)
{
  require(labels.size() == x.rows(), "segment_mean", "one label per row required");
  std::size_t const c      = x.cols();
  auto              counts = std::make_shared<std::vector<std::size_t>>(k, 0);
  for (std::size_t l : labels)
  {
    require(l < k, "segment_mean", "label out of range");
    ++(*counts)[l];
  }
  bool const          need = x.requires_grad();
  std::vector<double> acc(k * c, 0.0);
  auto                xs = x.data();
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    for (std::size_t j = 0; j < c; ++j)
    {
      acc[labels[i] * c + j] += xs[i * c + j];
    }
  }
  Tensor out = Tensor::zeros({k, c}, need);
  for (std::size_t s = 0; s < k; ++s)
  {
    if ((*counts)[s] == 0)
    {
      continue;
    }
    for (std::size_t j = 0; j < c; ++j)
    {
      out.data()[s * c + j] = static_cast<float>(acc[s * c + j] / static_cast<double>((*counts)[s]));
    }
  }
  if (need)
  {
    auto lab = std::make_shared<std::vector<std::size_t>>(labels.begin(), labels.end());
    tape.record(out, [x, out, lab, counts, c]() mutable {
      auto gy = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < lab->size(); ++i)
      {
        std::size_t const s   = (*lab)[i];
        float const       inv = 1.0f / static_cast<float>((*counts)[s]);
        for (std::size_t j = 0; j < c; ++j)
        {
          gx[i * c + j] += gy[s * c + j] * inv;
        }
      }
    });
  }
  return out;
}

// ---- row / token plumbing -------------------------------------------------

Tensor concat_cols(Tape &tape, std::span<Tensor const> parts)
{
  require(!parts.empty(), "concat_cols", "no operands");
  std::size_t const r     = parts.front().rows();
  std::size_t       total = 0;
  bool              need  = false;
  for (auto const &p : parts)
  {
    require(p.rank() == 2 && p.rows() == r, "concat_cols", "row count mismatch");
    total += p.cols();
    need = need || p.requires_grad();
  }
  Tensor      out    = Tensor::zeros({r, total}, need);
  std::size_t offset = 0;
  for (auto const &p : parts)
  {
    std::size_t const c  = p.cols();
    auto              ps = p.data();
    for (std::size_t i = 0; i < r; ++i)
    {
      std::copy_n(ps.begin() + static_cast<std::ptrdiff_t>(i * c), c,
                  out.data().begin() + static_cast<std::ptrdiff_t>(i * total + offset));
    }
    offset += c;
  }
  if (need)
  {
    std::vector<Tensor> held(parts.begin(), parts.end());
    tape.record(out, [held, out, r, total]() mutable {
      auto        gy     = out.grad();
      std::size_t offset = 0;
      for (auto &p : held)
      {
        std::size_t const c = p.cols();
        if (p.requires_grad())
        {
          auto gp = p.grad();
          for (std::size_t i = 0; i < r; ++i)
          {
            for (std::size_t j = 0; j < c; ++j)
            {
              gp[i * c + j] += gy[i * total + offset + j];
            }
          }
        }
        offset += c;
      }
    });
  }
  return out;
}

Tensor gather_rows(Tape &tape, Tensor const &x, std::span<std::size_t const> index)
{
  std::size_t const c    = x.cols();
  std::size_t const r    = x.rows();
  bool const        need = x.requires_grad();
  Tensor            out  = Tensor::zeros({index.size(), c}, need);
  for (std::size_t i = 0; i < index.size(); ++i)
  {
    require(index[i] < r, "gather_rows", "row index out of range");
    std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(index[i] * c), c,
                out.data().begin() + static_cast<std::ptrdiff_t>(i * c));
  }
  if (need)
  {
    auto idx = std::make_shared<std::vector<std::size_t>>(index.begin(), index.end());
    tape.record(out, [x, out, idx, c]() mutable {
      auto gy = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < idx->size(); ++i)
      {
        for (std::size_t j = 0; j < c; ++j)
        {
          gx[(*idx)[i] * c + j] += gy[i * c + j];
        }
      }
    });
  }
  return out;
}

Tensor mask_rows(Tape &tape, Tensor const &x, std::span<std::uint8_t const> row_mask)
{
  require(row_mask.size() == x.rows(), "mask_rows", "one mask entry per row required");
  std::size_t const c    = x.cols();
  bool const        need = x.requires_grad();
  Tensor            out  = Tensor::zeros(x.shape(), need);
  for (std::size_t i = 0; i < row_mask.size(); ++i)
  {
    if (row_mask[i])
    {
      std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(i * c), c,
                  out.data().begin() + static_cast<std::ptrdiff_t>(i * c));
    }
  }
  if (need)
  {
    auto m = std::make_shared<Mask>(row_mask.begin(), row_mask.end());
    tape.record(out, [x, out, m, c]() mutable {
      auto gy = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < m->size(); ++i)
      {
        if ((*m)[i])
        {
          for (std::size_t j = 0; j < c; ++j)
          {
            gx[i * c + j] += gy[i * c + j];
          }
        }
      }
    });
  }
  return out;
}

Tensor select_token(Tape &tape, Tensor const &x, std::size_t tokens, std::size_t pos)
{
  require(tokens > 0 && x.rows() % tokens == 0, "select_token", "rows not a multiple of tokens");
  require(pos < tokens, "select_token", "position out of range");
  std::size_t const n = x.rows() / tokens;
  std::vector<std::size_t> idx(n);
  for (std::size_t v = 0; v < n; ++v)
  {
    idx[v] = v * tokens + pos;
  }
  return gather_rows(tape, x, idx);
}

Tensor masked_token_mean(Tape &tape, Tensor const &x, Mask const &mask, std::size_t tokens,
                         std::size_t first)
{
  require(tokens > 0 && x.rows() % tokens == 0, "masked_token_mean",
          "rows not a multiple of tokens");
  require(mask.size() == x.rows(), "masked_token_mean", "mask size mismatch");
  std::size_t const n    = x.rows() / tokens;
  std::size_t const c    = x.cols();
  bool const        need = x.requires_grad();
  Tensor            out  = Tensor::zeros({n, c}, need);
  auto              inv  = std::make_shared<std::vector<float>>(n, 0.0f);
  auto              xs   = x.data();
  std::vector<double> acc(c);
  for (std::size_t v = 0; v < n; ++v)
  {
    std::size_t count = 0;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t t = first; t < tokens; ++t)
    {
      std::size_t const row = v * tokens + t;
      if (!mask[row])
      {
        continue;
      }
      ++count;
      for (std::size_t j = 0; j < c; ++j)
      {
        acc[j] += xs[row * c + j];
      }
    }
    if (count == 0)
    {
      continue;
    }
    (*inv)[v] = 1.0f / static_cast<float>(count);
    for (std::size_t j = 0; j < c; ++j)
    {
      out.data()[v * c + j] = static_cast<float>(acc[j] / static_cast<double>(count));
    }
  }
  if (need)
  {
    auto m = std::make_shared<Mask>(mask);
    tape.record(out, [x, out, m, inv, tokens, first, n, c]() mutable {
      auto gy = out.grad();
      auto gx = x.grad();
      for (std::size_t v = 0; v < n; ++v)
      {
        for (std::size_t t = first; t < tokens; ++t)
        {
          std::size_t const row = v * tokens + t;
          if (!(*m)[row])
          {
            continue;
          }
          for (std::size_t j = 0; j < c; ++j)
          {
            gx[row * c + j] += gy[v * c + j] * (*inv)[v];
          }
        }
      }
    });
  }
  return out;
}

// ---- normalisation --------------------------------------------------------

namespace {

void softmax_inplace(float *row, std::size_t len, std::uint8_t const *valid)
{
  float max_v     = -std::numeric_limits<float>::infinity();
  bool  any_valid = false;
  for (std::size_t j = 0; j < len; ++j)
  {
    if (!valid || valid[j])
    {
      max_v     = std::max(max_v, row[j]);
      any_valid = true;
    }
  }
  if (!any_valid)
  {
    std::fill_n(row, len, 0.0f);
    return;
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < len; ++j)
  {
    if (!valid || valid[j])
    {
      denom += std::exp(static_cast<double>(row[j]) - max_v);
    }
  }
  for (std::size_t j = 0; j < len; ++j)
  {
    row[j] = (!valid || valid[j])
                 ? static_cast<float>(std::exp(static_cast<double>(row[j]) - max_v) / denom)
                 : 0.0f;
  }
}

void softmax_backward(float const *y, float const *gy, float *gx, std::size_t len)
{
  double dot = 0.0;
  for (std::size_t j = 0; j < len; ++j)
  {
    dot += static_cast<double>(gy[j]) * y[j];
  }
  for (std::size_t j = 0; j < len; ++j)
  {
    gx[j] += static_cast<float>(y[j] * (gy[j] - dot));
  }
}

}  // namespace

Tensor softmax_rows(Tape &tape, Tensor const &x)
{
  std::size_t const r    = x.rows();
  std::size_t const c    = x.cols();
  bool const        need = x.requires_grad();
  Tensor out = Tensor::from_data(x.shape(), std::vector<float>(x.data().begin(), x.data().end()),
                                 need);
  for (std::size_t i = 0; i < r; ++i)
  {
    softmax_inplace(out.data().data() + i * c, c, nullptr);
  }
  if (need)
  {
    tape.record(out, [x, out, r, c]() mutable {
      for (std::size_t i = 0; i < r; ++i)
      {
        softmax_backward(out.data().data() + i * c, out.grad().data() + i * c,
                         x.grad().data() + i * c, c);
      }
    });
  }
  return out;
}

Tensor masked_softmax(Tape &tape, Tensor const &scores, Mask const &key_mask, std::size_t heads)
{
  require(scores.rank() == 3 && scores.dim(1) == scores.dim(2), "masked_softmax",
          "scores must be [B, m, m]");
  std::size_t const m = scores.dim(2);
  require(heads > 0 && scores.dim(0) % heads == 0, "masked_softmax", "batch not divisible by heads");
  std::size_t const n = scores.dim(0) / heads;
  require(key_mask.size() == n * m, "masked_softmax", "mask size mismatch");
  bool const need = scores.requires_grad();
  Tensor     out  = Tensor::from_data(scores.shape(),
                                      std::vector<float>(scores.data().begin(), scores.data().end()), need);
  for (std::size_t b = 0; b < scores.dim(0); ++b)
  {
    std::uint8_t const *valid = key_mask.data() + (b / heads) * m;
    for (std::size_t i = 0; i < m; ++i)
    {
      softmax_inplace(out.data().data() + (b * m + i) * m, m, valid);
    }
  }
  if (need)
  {
    tape.record(out, [scores, out, m]() mutable {
      std::size_t const rows = scores.numel() / m;
      for (std::size_t i = 0; i < rows; ++i)
      {
        // masked entries have y == 0 and receive zero gradient.
        softmax_backward(out.data().data() + i * m, out.grad().data() + i * m,
                         scores.grad().data() + i * m, m);
      }
    });
  }
  return out;
}

Tensor layer_norm(Tape &tape, Tensor const &x, Tensor const &gamma, Tensor const &beta, float eps)
{
  std::size_t const r = x.rows();
  std::size_t const c = x.cols();
  require(gamma.numel() == c && beta.numel() == c, "layer_norm", "affine width mismatch");
  bool const need = any_grad({&x, &gamma, &beta});
  Tensor     out  = Tensor::zeros(x.shape(), need);
  auto       xhat = std::make_shared<std::vector<float>>(x.numel());
  auto       rstd = std::make_shared<std::vector<double>>(r);
  auto       xs   = x.data();
  auto       gs   = gamma.data();
  auto       bs   = beta.data();
  for (std::size_t i = 0; i < r; ++i)
  {
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j)
    {
      mu += xs[i * c + j];
    }
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j)
    {
      double const d = xs[i * c + j] - mu;
      var += d * d;
    }
    var /= static_cast<double>(c);
    double const rs = 1.0 / std::sqrt(var + eps);
    (*rstd)[i]      = rs;
    for (std::size_t j = 0; j < c; ++j)
    {
      float const h          = static_cast<float>((xs[i * c + j] - mu) * rs);
      (*xhat)[i * c + j]     = h;
      out.data()[i * c + j]  = h * gs[j] + bs[j];
    }
  }
  if (need)
  {
    tape.record(out, [x, gamma, beta, out, xhat, rstd, r, c]() mutable {
      auto gy = out.grad();
      auto gs = gamma.data();
      if (gamma.requires_grad() || beta.requires_grad())
      {
        for (std::size_t j = 0; j < c; ++j)
        {
          double gg = 0.0;
          double gb = 0.0;
          for (std::size_t i = 0; i < r; ++i)
          {
            gg += static_cast<double>(gy[i * c + j]) * (*xhat)[i * c + j];
            gb += gy[i * c + j];
          }
          if (gamma.requires_grad())
          {
            gamma.grad()[j] += static_cast<float>(gg);
          }
          if (beta.requires_grad())
          {
            beta.grad()[j] += static_cast<float>(gb);
          }
        }
      }
      if (x.requires_grad())
      {
        auto gx = x.grad();
        for (std::size_t i = 0; i < r; ++i)
        {
          double sum_g  = 0.0;
          double sum_gh = 0.0;
          for (std::size_t j = 0; j < c; ++j)
          {
            double const g = static_cast<double>(gy[i * c + j]) * gs[j];
            sum_g += g;
            sum_gh += g * (*xhat)[i * c + j];
          }
          double const inv_c = 1.0 / static_cast<double>(c);
          for (std::size_t j = 0; j < c; ++j)
          {
            double const g = static_cast<double>(gy[i * c + j]) * gs[j];
            gx[i * c + j] += static_cast<float>(
                (*rstd)[i] * (g - sum_g * inv_c - (*xhat)[i * c + j] * sum_gh * inv_c));
          }
        }
      }
    });
  }
  return out;
}

// ---- attention layout -----------------------------------------------------

namespace {

// Index of element (node v, token t, head h, lane j) in the merged [N*m, H*dh]
// layout and in the split [N*H, m, dh] layout.
struct HeadLayout
{
  std::size_t n, m, heads, dh;
  std::size_t merged(std::size_t v, std::size_t t, std::size_t h, std::size_t j) const
  {
    return ((v * m + t) * heads + h) * dh + j;
  }
  std::size_t split(std::size_t v, std::size_t t, std::size_t h, std::size_t j) const
  {
    return ((v * heads + h) * m + t) * dh + j;
  }
};

template <bool ToSplit>
void permute_heads(HeadLayout const &L, float const *src, float *dst, bool accumulate)
{
  for (std::size_t v = 0; v < L.n; ++v)
  {
    for (std::size_t t = 0; t < L.m; ++t)
    {
      for (std::size_t h = 0; h < L.heads; ++h)
      {
        for (std::size_t j = 0; j < L.dh; ++j)
        {
          std::size_t const from = ToSplit ? L.merged(v, t, h, j) : L.split(v, t, h, j);
          std::size_t const to   = ToSplit ? L.split(v, t, h, j) : L.merged(v, t, h, j);
          if (accumulate)
          {
            dst[to] += src[from];
          }
          else
          {
            dst[to] = src[from];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor split_heads(Tape &tape, Tensor const &x, std::size_t tokens, std::size_t heads)
{
  require(x.rank() == 2 && tokens > 0 && x.rows() % tokens == 0, "split_heads",
          "rows not a multiple of tokens");
  require(heads > 0 && x.cols() % heads == 0, "split_heads", "width not divisible by heads");
  HeadLayout const L{x.rows() / tokens, tokens, heads, x.cols() / heads};
  bool const       need = x.requires_grad();
  Tensor           out  = Tensor::zeros({L.n * heads, tokens, L.dh}, need);
  permute_heads<true>(L, x.data().data(), out.data().data(), false);
  if (need)
  {
    tape.record(out, [x, out, L]() mutable {
      permute_heads<false>(L, out.grad().data(), x.grad().data(), true);
    });
  }
  return out;
}

Tensor merge_heads(Tape &tape, Tensor const &x, std::size_t tokens, std::size_t heads)
{
  require(x.rank() == 3 && x.dim(1) == tokens && heads > 0 && x.dim(0) % heads == 0,
          "merge_heads", "expected [N*heads, tokens, dh]");
  HeadLayout const L{x.dim(0) / heads, tokens, heads, x.dim(2)};
  bool const       need = x.requires_grad();
  Tensor           out  = Tensor::zeros({L.n * tokens, heads * L.dh}, need);
  permute_heads<false>(L, x.data().data(), out.data().data(), false);
  if (need)
  {
    tape.record(out, [x, out, L]() mutable {
      permute_heads<true>(L, out.grad().data(), x.grad().data(), true);
    });
  }
  return out;
}

}  // namespace unicom::ad
