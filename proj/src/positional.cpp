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

#include "unicom/positional.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

#include "unicom/error.hpp"
#include "unicom/tokenize.hpp"

namespace unicom {

namespace {

using Dense = Eigen::MatrixXd;
using Vec   = Eigen::VectorXd;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Unit vector along D^{1/2} 1; zero if the graph has no edges.
Vec trivial_direction(Graph const &g)
{
  Vec u(static_cast<Eigen::Index>(g.num_nodes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v)
  {
    u[static_cast<Eigen::Index>(v)] = std::sqrt(static_cast<double>(g.degree(v)));
  }
  double const norm = u.norm();
  return norm > 0.0 ? Vec(u / norm) : Vec(u);
}

void fix_signs(Dense &vecs)
{
  for (Eigen::Index c = 0; c < vecs.cols(); ++c)
  {
    Eigen::Index arg  = 0;
    double       best = -1.0;
    for (Eigen::Index r = 0; r < vecs.rows(); ++r)
    {
      // Ties within rounding noise resolve to the first index.
      if (std::abs(vecs(r, c)) > best + 1e-9)
      {
        best = std::abs(vecs(r, c));
        arg  = r;
      }
    }
    if (vecs(arg, c) < 0.0)
    {
      vecs.col(c) *= -1.0;
    }
  }
}

Dense dense_pe(Graph const &g, std::size_t k, Vec const &u)
{
  auto const n   = static_cast<Eigen::Index>(g.num_nodes());
  Matrix const a = NormalizedAdjacency(g).to_dense();
  Dense        lap(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = 0; j < n; ++j)
    {
      lap(i, j) = (i == j ? 1.0 : 0.0) - static_cast<double>(a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    }
  }
  // Spectrum of L lies in [0, 2]; lifting u to 3 moves it past every other eigenvalue.
  lap += 3.0 * u * u.transpose();
  Eigen::SelfAdjointEigenSolver<Dense> solver(lap);
  return solver.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
}

// Deflated (I + Â)/2 - u u^T applied to a block.
class ShiftedOperator
{
public:
  ShiftedOperator(Graph const &g, Vec u)
    : adj_(g)
    , u_(std::move(u))
  {}

  Dense apply(Dense const &q) const
  {
    // Row-major copies keep the neighbour gathers contiguous.
    RowMajor const in  = q;
    RowMajor       out = 0.5 * in;
    auto           off = adj_.offsets();
    auto           tgt = adj_.targets();
    auto           wts = adj_.weights();
    for (std::size_t v = 0; v < adj_.size(); ++v)
    {
      for (std::size_t e = off[v]; e < off[v + 1]; ++e)
      {
        out.row(static_cast<Eigen::Index>(v)) += 0.5 * wts[e] * in.row(static_cast<Eigen::Index>(tgt[e]));
      }
    }
    Dense result = out;
    result -= u_ * (u_.transpose() * q);
    return result;
  }

private:
  NormalizedAdjacency adj_;
  Vec                 u_;
};

Dense householder_orthonormalize(Dense const &y)
{
  Eigen::HouseholderQR<Dense> qr(y);
  return qr.householderQ() * Dense::Identity(y.rows(), y.cols());
}

// Two Cholesky-QR passes; Householder when the Gram matrix is not definite.
Dense orthonormalize(Dense const &y)
{
  Dense q = y;
  for (int pass = 0; pass < 2; ++pass)
  {
    Eigen::LLT<Dense> llt(q.transpose() * q);
    if (llt.info() != Eigen::Success)
    {
      return householder_orthonormalize(y);
    }
    q = llt.matrixU().solve<Eigen::OnTheRight>(q);
  }
  if (!q.allFinite())
  {
    return householder_orthonormalize(y);
  }
  return q;
}

Dense iterative_pe(Graph const &g, std::size_t k, Vec const &u)
{
  constexpr int    kMaxIters     = 100;
  constexpr int    kFilterDegree = 8;
  constexpr double kTolerance    = 1e-7;
  constexpr double kMinCutoff    = 1e-3;

  auto const n     = static_cast<Eigen::Index>(g.num_nodes());
  auto const kk    = static_cast<Eigen::Index>(k);
  auto const block = std::min<Eigen::Index>(n, kk + 8);
  ShiftedOperator const op(g, u);

  std::mt19937_64                  rng(0x5eed);
  std::normal_distribution<double> normal;
  Dense                            q(n, block);
  for (Eigen::Index i = 0; i < q.size(); ++i)
  {
    q.data()[i] = normal(rng);
  }
  q = orthonormalize(q - u * (u.transpose() * q));

  // Chebyshev-filtered subspace iteration: the filter damps [0, cutoff] and
  // amplifies the wanted pairs near the top of the spectrum.
  Dense ritz_vectors;
  for (int iter = 1; iter <= kMaxIters; ++iter)
  {
    Dense const t = q.transpose() * op.apply(q);
    Eigen::SelfAdjointEigenSolver<Dense> small(0.5 * (t + t.transpose()));
    q                = q * small.eigenvectors();
    Dense const y    = op.apply(q);
    Vec const   all  = small.eigenvalues();
    // Ascending order: the wanted pairs are the last k columns.
    ritz_vectors        = q.rightCols(kk).rowwise().reverse();
    Vec const   theta   = all.tail(kk).reverse();
    Dense const resid   = y.rightCols(kk).rowwise().reverse() - ritz_vectors * theta.asDiagonal();
    if (resid.colwise().norm().maxCoeff() < kTolerance || iter == kMaxIters)
    {
      break;
    }

    double const cutoff = std::max(all[0], kMinCutoff);
    if (!(cutoff < theta[kk - 1]))
    {
      q = orthonormalize(y);
      continue;
    }
    double const half   = 0.5 * cutoff;
    Dense        prev   = q;
    Dense        cur    = (y - half * q) / half;
    for (int d = 2; d <= kFilterDegree; ++d)
    {
      Dense next = 2.0 * (op.apply(cur) - half * cur) / half - prev;
      prev       = std::move(cur);
      cur        = std::move(next);
    }
    q = orthonormalize(cur);
  }
  return ritz_vectors;
}

}  // namespace

Matrix laplacian_pe(Graph const &g, std::size_t k, EigenMethod method)
{
  std::size_t const n = g.num_nodes();
  if (k >= n && k > 0)
  {
    throw InvalidArgument("laplacian_pe: k = " + std::to_string(k) + " needs more than " +
                          std::to_string(n) + " nodes");
  }
  Matrix out(n, k);
  if (k == 0 || g.num_edges() == 0)
  {
    return out;
  }
  Vec const u = trivial_direction(g);
  if (method == EigenMethod::automatic)
  {
    method = n <= kDenseEigenLimit ? EigenMethod::dense : EigenMethod::iterative;
  }
  Dense vecs = method == EigenMethod::dense ? dense_pe(g, k, u) : iterative_pe(g, k, u);
  fix_signs(vecs);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = 0; j < k; ++j)
    {
      out(i, j) = static_cast<float>(vecs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return out;
}

}  // namespace unicom
