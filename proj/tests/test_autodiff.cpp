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

#include "doctest.h"

#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "unicom/autodiff.hpp"
#include "unicom/error.hpp"
#include "unicom/optim.hpp"

using namespace unicom;
using unicom::testing::gradcheck;
using unicom::testing::random_tensor;
using unicom::testing::weighted_sum;

namespace {

constexpr double kGradTol = 1e-3;

// Checks d/dx sum(w * op(x)) for a unary op on an r x c input.
template <typename Op>
void check_unary(Op op, std::size_t r, std::size_t c, float lo, float hi, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  auto x = random_tensor({r, c}, rng, lo, hi);
  auto w = random_tensor({r, c}, rng, -1.0f, 1.0f, false);
  auto res = gradcheck({x}, [&](ad::Tape &t) { return weighted_sum(t, op(t, x), w); });
  CHECK(res.relative_error < kGradTol);
}

}  // namespace

TEST_CASE("sum and square have closed-form gradients")
{
  auto x = ad::Tensor::from_data({2, 3}, {1, -2, 3, 0.5f, 4, -1}, true);
  {
    ad::Tape tape;
    tape.backward(ad::sum(tape, x));
    for (float g : x.grad())
    {
      CHECK(g == 1.0f);
    }
  }
  x.zero_grad();
  {
    ad::Tape tape;
    tape.backward(ad::sum(tape, ad::mul(tape, x, x)));
    for (std::size_t i = 0; i < x.numel(); ++i)
    {
      CHECK(x.grad()[i] == doctest::Approx(2.0f * x.data()[i]));
    }
  }
}

TEST_CASE("backward contract")
{
  auto x      = ad::Tensor::from_data({3}, {1, 2, 3}, true);
  auto unused = ad::Tensor::from_data({2}, {5, 6}, true);

  SUBCASE("leaves off the path get zero")
  {
    ad::Tape tape;
    tape.backward(ad::sum(tape, x));
    CHECK(unused.grad()[0] == 0.0f);
    CHECK(unused.grad()[1] == 0.0f);
  }
  SUBCASE("second replay is an error")
  {
    ad::Tape tape;
    auto     loss = ad::sum(tape, x);
    tape.backward(loss);
    CHECK_THROWS_AS(tape.backward(loss), InvalidArgument);
  }
  SUBCASE("non-scalar loss rejected")
  {
    ad::Tape tape;
    auto     y = ad::scale(tape, x, 2.0f);
    CHECK_THROWS_AS(tape.backward(y), InvalidArgument);
  }
  SUBCASE("each entry replayed once")
  {
    ad::Tape tape;
    auto     y = ad::mul(tape, x, x);
    auto     z = ad::add(tape, y, y);
    tape.backward(ad::sum(tape, z));
    CHECK(tape.size() == 3);
    CHECK(x.grad()[2] == doctest::Approx(12.0f));
  }
}

TEST_CASE("shape mismatches throw")
{
  ad::Tape tape;
  auto     a = ad::Tensor::zeros({2, 3});
  auto     b = ad::Tensor::zeros({3, 2});
  CHECK_THROWS_AS(ad::add(tape, a, b), InvalidArgument);
  CHECK_THROWS_AS(ad::matmul(tape, a, a), InvalidArgument);
  CHECK_THROWS_AS(ad::rowdot(tape, a, b), InvalidArgument);
  CHECK_THROWS_AS(ad::layer_norm(tape, a, ad::Tensor::zeros({2}), ad::Tensor::zeros({2})),
                  InvalidArgument);
  CHECK_THROWS_AS(ad::Tensor::from_data({2, 2}, {1, 2, 3}), InvalidArgument);
}

TEST_CASE("forward identities")
{
  std::mt19937_64 rng(7);
  ad::Tape        tape;

  SUBCASE("matmul by identity is bitwise exact")
  {
    auto m  = random_tensor({5, 4}, rng, -3, 3, false);
    auto id = ad::Tensor::zeros({5, 5});
    for (std::size_t i = 0; i < 5; ++i)
    {
      id.data()[i * 5 + i] = 1.0f;
    }
    auto out = ad::matmul(tape, id, m);
    CHECK(std::equal(out.data().begin(), out.data().end(), m.data().begin()));
  }
  SUBCASE("softmax rows sum to one")
  {
    auto s = ad::softmax_rows(tape, random_tensor({6, 7}, rng, -20, 20, false));
    for (std::size_t i = 0; i < 6; ++i)
    {
      double acc = 0.0;
      for (std::size_t j = 0; j < 7; ++j)
      {
        acc += s.at(i, j);
      }
      CHECK(std::abs(acc - 1.0) < 1e-6);
    }
  }
  SUBCASE("layer norm standardises rows before the affine")
  {
    auto x = random_tensor({4, 16}, rng, -50, 50, false);
    auto y = ad::layer_norm(tape, x, ad::Tensor::full({16}, 1.0f), ad::Tensor::zeros({16}));
    for (std::size_t i = 0; i < 4; ++i)
    {
      double mu = 0.0;
      double sq = 0.0;
      for (std::size_t j = 0; j < 16; ++j)
      {
        mu += y.at(i, j);
        sq += static_cast<double>(y.at(i, j)) * y.at(i, j);
      }
      mu /= 16.0;
      CHECK(std::abs(mu) < 1e-5);
      CHECK(std::abs(sq / 16.0 - mu * mu - 1.0) < 1e-5);
    }
  }
  SUBCASE("masked softmax zeroes masked keys and all-masked rows")
  {
    auto     scores = random_tensor({2, 3, 3}, rng, -1, 1, false);
    ad::Mask mask{1, 0, 1, 0, 0, 0};
    auto     p = ad::masked_softmax(tape, scores, mask, 1);
    for (std::size_t i = 0; i < 3; ++i)
    {
      CHECK(p.data()[i * 3 + 1] == 0.0f);
      CHECK(std::abs(p.data()[i * 3] + p.data()[i * 3 + 2] - 1.0f) < 1e-6);
      for (std::size_t j = 0; j < 3; ++j)
      {
        CHECK(p.data()[9 + i * 3 + j] == 0.0f);
      }
    }
  }
  SUBCASE("split then merge heads is the identity")
  {
    auto x  = random_tensor({12, 8}, rng, -1, 1, false);
    auto rt = ad::merge_heads(tape, ad::split_heads(tape, x, 4, 2), 4, 2);
    CHECK(std::equal(rt.data().begin(), rt.data().end(), x.data().begin()));
  }
  SUBCASE("dropout is the identity outside training")
  {
    std::mt19937_64 r2(1);
    auto            x = random_tensor({3, 3}, rng, -1, 1, false);
    auto            y = ad::dropout(tape, x, 0.5f, r2);
    CHECK(std::equal(y.data().begin(), y.data().end(), x.data().begin()));
  }
}

TEST_CASE("primitive gradients match central differences")
{
  std::mt19937_64 rng(11);

  SUBCASE("matmul / matmul_nt / transpose")
  {
    auto a = random_tensor({5, 4}, rng);
    auto b = random_tensor({4, 6}, rng);
    auto c = random_tensor({6, 4}, rng);
    auto w = random_tensor({5, 6}, rng, -1, 1, false);
    CHECK(gradcheck({a, b}, [&](ad::Tape &t) { return weighted_sum(t, ad::matmul(t, a, b), w); })
              .relative_error < kGradTol);
    CHECK(gradcheck({a, c}, [&](ad::Tape &t) { return weighted_sum(t, ad::matmul_nt(t, a, c), w); })
              .relative_error < kGradTol);
    auto wt = random_tensor({4, 5}, rng, -1, 1, false);
    CHECK(gradcheck({a}, [&](ad::Tape &t) { return weighted_sum(t, ad::transpose(t, a), wt); })
              .relative_error < kGradTol);
  }
  SUBCASE("bmm both layouts")
  {
    auto a  = random_tensor({3, 2, 4}, rng);
    auto b  = random_tensor({3, 4, 5}, rng);
    auto bt = random_tensor({3, 5, 4}, rng);
    auto w  = random_tensor({3, 2, 5}, rng, -1, 1, false);
    CHECK(gradcheck({a, b}, [&](ad::Tape &t) { return weighted_sum(t, ad::bmm(t, a, b, false), w); })
              .relative_error < kGradTol);
    CHECK(gradcheck({a, bt}, [&](ad::Tape &t) { return weighted_sum(t, ad::bmm(t, a, bt, true), w); })
              .relative_error < kGradTol);
  }
  SUBCASE("binary elementwise and bias")
  {
    auto a    = random_tensor({4, 3}, rng);
    auto b    = random_tensor({4, 3}, rng);
    auto bias = random_tensor({3}, rng);
    auto w    = random_tensor({4, 3}, rng, -1, 1, false);
    for (auto op : {&ad::add, &ad::sub, &ad::mul})
    {
      CHECK(gradcheck({a, b}, [&](ad::Tape &t) { return weighted_sum(t, op(t, a, b), w); })
                .relative_error < kGradTol);
    }
    CHECK(gradcheck({a, bias},
                    [&](ad::Tape &t) { return weighted_sum(t, ad::add_rowvec(t, a, bias), w); })
              .relative_error < kGradTol);
  }
  SUBCASE("unary ops")
  {
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::exp(t, x); }, 4, 4, -2, 2, 1);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::log(t, x); }, 4, 4, 0.5f, 3, 2);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::sigmoid(t, x); }, 4, 4, -4, 4, 3);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::gelu(t, x); }, 4, 4, -3, 3, 4);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::softplus(t, x); }, 4, 4, -5, 5, 5);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::relu(t, x); }, 4, 4, 0.1f, 2, 6);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::neg_log1mexp(t, x); }, 4, 4, 0.2f, 4, 7);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::clamp(t, x, -0.5f, 0.5f); }, 3, 3, -0.4f, 0.4f, 8);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::scale(t, x, -2.5f); }, 3, 3, -1, 1, 9);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::add_scalar(t, x, 3.0f); }, 3, 3, -1, 1, 10);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::softmax_rows(t, x); }, 5, 6, -2, 2, 11);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::l2_normalize_rows(t, x); }, 5, 6, -2, 2, 12);
    check_unary([](ad::Tape &t, ad::Tensor const &x) { return ad::reshape(t, ad::mul(t, ad::reshape(t, x, {2, 3, 2}), ad::reshape(t, x, {2, 3, 2})), {2, 6}); }, 2, 6, -2, 2, 13);
  }
  SUBCASE("reductions")
  {
    auto a = random_tensor({5, 4}, rng);
    auto b = random_tensor({5, 4}, rng);
    auto c = random_tensor({3, 4}, rng);
    auto w1 = random_tensor({5, 1}, rng, -1, 1, false);
    auto w2 = random_tensor({5, 3}, rng, -1, 1, false);
    CHECK(gradcheck({a}, [&](ad::Tape &t) { return ad::mean(t, a); }).relative_error < kGradTol);
    CHECK(gradcheck({a, b}, [&](ad::Tape &t) { return weighted_sum(t, ad::rowdot(t, a, b), w1); })
              .relative_error < kGradTol);
    CHECK(gradcheck({a, b},
                    [&](ad::Tape &t) { return weighted_sum(t, ad::cosine_similarity(t, a, b), w1); })
              .relative_error < kGradTol);
    CHECK(gradcheck({a, c},
                    [&](ad::Tape &t) { return weighted_sum(t, ad::pairwise_sqdist(t, a, c), w2); })
              .relative_error < kGradTol);
    std::vector<std::size_t> labels{0, 2, 1, 0, 2};
    auto w3 = random_tensor({3, 4}, rng, -1, 1, false);
    CHECK(gradcheck({a}, [&](ad::Tape &t) {
            return weighted_sum(t, ad::segment_mean(t, a, labels, 3), w3);
          }).relative_error < kGradTol);
  }
  SUBCASE("row and token plumbing")
  {
    auto a = random_tensor({6, 3}, rng);
    auto b = random_tensor({6, 2}, rng);
    auto w = random_tensor({6, 5}, rng, -1, 1, false);
    std::vector<ad::Tensor> parts{a, b};
    CHECK(gradcheck({a, b}, [&](ad::Tape &t) { return weighted_sum(t, ad::concat_cols(t, parts), w); })
              .relative_error < kGradTol);
    std::vector<std::size_t> idx{5, 0, 5, 2};
    auto wg = random_tensor({4, 3}, rng, -1, 1, false);
    CHECK(gradcheck({a}, [&](ad::Tape &t) { return weighted_sum(t, ad::gather_rows(t, a, idx), wg); })
              .relative_error < kGradTol);
    ad::Mask rows{1, 0, 1, 1, 0, 1};
    auto     wm = random_tensor({6, 3}, rng, -1, 1, false);
    CHECK(gradcheck({a}, [&](ad::Tape &t) { return weighted_sum(t, ad::mask_rows(t, a, rows), wm); })
              .relative_error < kGradTol);
    auto ws = random_tensor({2, 3}, rng, -1, 1, false);
    CHECK(gradcheck({a}, [&](ad::Tape &t) { return weighted_sum(t, ad::select_token(t, a, 3, 1), ws); })
              .relative_error < kGradTol);
    ad::Mask tok{1, 1, 0, 1, 0, 1};
    CHECK(gradcheck({a}, [&](ad::Tape &t) {
            return weighted_sum(t, ad::masked_token_mean(t, a, tok, 3, 1), ws);
          }).relative_error < kGradTol);
  }
  SUBCASE("layer norm and attention plumbing")
  {
    auto x     = random_tensor({4, 8}, rng, -2, 2);
    auto gamma = random_tensor({8}, rng, 0.5f, 1.5f);
    auto beta  = random_tensor({8}, rng);
    auto w     = random_tensor({4, 8}, rng, -1, 1, false);
    CHECK(gradcheck({x, gamma, beta},
                    [&](ad::Tape &t) { return weighted_sum(t, ad::layer_norm(t, x, gamma, beta), w); })
              .relative_error < kGradTol);

    auto     s  = random_tensor({4, 3, 3}, rng, -2, 2);
    ad::Mask km{1, 1, 0, 0, 1, 1};
    auto     ws = random_tensor({4, 3, 3}, rng, -1, 1, false);
    CHECK(gradcheck({s}, [&](ad::Tape &t) { return weighted_sum(t, ad::masked_softmax(t, s, km, 2), ws); })
              .relative_error < kGradTol);

    auto h  = random_tensor({6, 4}, rng);
    auto wh = random_tensor({4, 3, 2}, rng, -1, 1, false);
    CHECK(gradcheck({h}, [&](ad::Tape &t) { return weighted_sum(t, ad::split_heads(t, h, 3, 2), wh); })
              .relative_error < kGradTol);
    auto sh = random_tensor({4, 3, 2}, rng);
    auto wm = random_tensor({6, 4}, rng, -1, 1, false);
    CHECK(gradcheck({sh}, [&](ad::Tape &t) { return weighted_sum(t, ad::merge_heads(t, sh, 3, 2), wm); })
              .relative_error < kGradTol);
  }
}

TEST_CASE("dropout in training mode scales kept entries and routes gradient through them")
{
  std::mt19937_64 rng(3);
  auto            x = ad::Tensor::full({10, 10}, 1.0f, true);
  ad::Tape        tape(true);
  auto            y = ad::dropout(tape, x, 0.5f, rng);
  tape.backward(ad::sum(tape, y));
  for (std::size_t i = 0; i < x.numel(); ++i)
  {
    CHECK((y.data()[i] == 0.0f || y.data()[i] == 2.0f));
    CHECK(x.grad()[i] == y.data()[i]);
  }
}

TEST_CASE("adam")
{
  ad::AdamOptions opt;
  opt.learning_rate = 0.01f;

  SUBCASE("zero gradient leaves parameters alone")
  {
    std::vector<ad::Tensor> params{ad::Tensor::from_data({3}, {1, 2, 3}, true)};
    ad::AdamState           state(params, opt);
    state.step(params);
    CHECK(state.step_count() == 1);
    CHECK(params[0].data()[0] == 1.0f);
    CHECK(params[0].data()[2] == 3.0f);
  }
  SUBCASE("first step with constant gradient moves by the learning rate")
  {
    std::vector<ad::Tensor> params{ad::Tensor::from_data({2}, {0.0f, 1.0f}, true)};
    params[0].grad()[0] = 3.0f;
    params[0].grad()[1] = -0.25f;
    ad::AdamState state(params, opt);
    state.step(params);
    // m_hat = g, v_hat = g^2 after bias correction, so the step is lr * sign(g).
    CHECK(params[0].data()[0] == doctest::Approx(-0.01f).epsilon(1e-5));
    CHECK(params[0].data()[1] == doctest::Approx(1.01f).epsilon(1e-5));
  }
  SUBCASE("identical runs give identical trajectories")
  {
    auto run = []() {
      std::mt19937_64         rng(5);
      std::vector<ad::Tensor> params{random_tensor({4, 4}, rng)};
      auto                    target = random_tensor({4, 4}, rng, -1, 1, false);
      ad::AdamState           state(params, {});
      for (int i = 0; i < 20; ++i)
      {
        ad::zero_grads(params);
        ad::Tape tape;
        auto     d = ad::sub(tape, params[0], target);
        tape.backward(ad::sum(tape, ad::mul(tape, d, d)));
        state.step(params);
      }
      return std::vector<float>(params[0].data().begin(), params[0].data().end());
    };
    CHECK(run() == run());
  }
}
