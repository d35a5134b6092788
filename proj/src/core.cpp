// Copyright 2026 The quditkit developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quditkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qudit {

namespace {

// Gap below which eigenvalues of the cosine part are treated as one cluster.
// Must sit well below any tolerance promised to callers, and well above the
// eigensolver's own backward error for norm-1 matrices.
constexpr double kClusterGap = 1e-11;

// Scale each column so its largest-modulus entry is real positive.  Removes
// the solver's arbitrary per-vector phase, which keeps downstream gate
// emission deterministic (and maps standard basis vectors to themselves).
void canonicalize_columns(ComplexMatrix& v) {
  for (Index c = 0; c < v.cols(); ++c) {
    Index imax = 0;
    double best = -1.0;
    for (Index r = 0; r < v.rows(); ++r) {
      double m = std::abs(v(r, c));
      if (m > best + 1e-15) {
        best = m;
        imax = r;
      }
    }
    if (best > 0.0) {
      Cx u = std::conj(v(imax, c)) / std::abs(v(imax, c));
      v.col(c) *= u;
    }
  }
}

}  // namespace

std::vector<int> base_d_digits(Index index, int d, int n) {
  if (d < 2 || n < 1) throw std::invalid_argument("base_d_digits: bad d or n");
  Index N = QuditSystem(d, n).dim();
  if (index < 0 || index >= N)
    throw std::out_of_range("base_d_digits: index out of range");
  std::vector<int> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(index % d);
    index /= d;
  }
  return digits;
}

Index index_from_digits(const std::vector<int>& digits, int d) {
  if (d < 2 || digits.empty())
    throw std::invalid_argument("index_from_digits: bad d or empty digits");
  Index k = 0;
  for (int dig : digits) {
    if (dig < 0 || dig >= d)
      throw std::out_of_range("index_from_digits: digit out of range");
    k = k * d + dig;
  }
  return k;
}

double unitarity_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  ComplexMatrix g = m.adjoint() * m;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

SpectralDecomposition spectral_decompose(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0)
    throw std::invalid_argument("spectral_decompose: matrix must be square");
  double dev = unitarity_deviation(u);
  if (!(dev <= tol)) {
    throw std::invalid_argument(
        "spectral_decompose: matrix is not unitary (max deviation " +
        std::to_string(dev) + ")");
  }

  const Index N = u.rows();
  // Commuting Hermitian pair: A carries cos(psi), B carries sin(psi).
  ComplexMatrix a = (u + u.adjoint()) / 2.0;
  ComplexMatrix b = (u - u.adjoint()) / Cx(0.0, 2.0);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> esa(a);
  if (esa.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver failed");
  ComplexMatrix vecs = esa.eigenvectors();
  Eigen::VectorXd avals = esa.eigenvalues();

  // Within each (near-)degenerate cluster of A, rotate the basis so it also
  // diagonalises B.  This resolves e^{+i psi} vs e^{-i psi} pairs, which share
  // a cosine, and keeps the basis orthonormal.
  Index lo = 0;
  while (lo < N) {
    Index hi = lo + 1;
    while (hi < N && avals(hi) - avals(hi - 1) <= kClusterGap) ++hi;
    if (hi - lo > 1) {
      ComplexMatrix sub = vecs.middleCols(lo, hi - lo);
      ComplexMatrix bsub = sub.adjoint() * b * sub;
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> esb(bsub);
      vecs.middleCols(lo, hi - lo) = sub * esb.eigenvectors();
    }
    lo = hi;
  }

  canonicalize_columns(vecs);

  Eigen::VectorXd phases(N);
  for (Index k = 0; k < N; ++k) {
    double ca = (vecs.col(k).adjoint() * a * vecs.col(k))(0).real();
    double sb = (vecs.col(k).adjoint() * b * vecs.col(k))(0).real();
    double p = std::atan2(sb, ca);
    if (p <= -M_PI) p = M_PI;  // principal branch (-pi, pi]
    phases(k) = p;
  }

  std::vector<Index> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return phases(x) < phases(y); });

  SpectralDecomposition out;
  out.phases.resize(N);
  out.vectors.resize(N, N);
  for (Index k = 0; k < N; ++k) {
    out.phases(k) = phases(order[k]);
    out.vectors.col(k) = vecs.col(order[k]);
  }
  return out;
}

PhaseComparison equal_up_to_global_phase(const ComplexMatrix& a,
                                         const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("equal_up_to_global_phase: shape mismatch");

  Index ri = 0, ci = 0;
  double best = -1.0;
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      double m = std::abs(a(r, c)) + std::abs(b(r, c));
      if (m > best) {
        best = m;
        ri = r;
        ci = c;
      }
    }
  }

  double theta = 0.0;
  if (a.size() > 0 && std::abs(a(ri, ci)) > 0.0 && std::abs(b(ri, ci)) > 0.0)
    theta = std::arg(b(ri, ci)) - std::arg(a(ri, ci));

  double dev = a.size() == 0
                   ? 0.0
                   : (std::polar(1.0, theta) * a - b).cwiseAbs().maxCoeff();
  return PhaseComparison{dev <= tol, theta, dev};
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_unitary: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(dim, dim);
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) {
      double re = gauss(rng);
      double im = gauss(rng);
      g(r, c) = Cx(re, im);
    }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index c = 0; c < dim; ++c) {
    Cx rd = r(c, c);
    q.col(c) *= std::abs(rd) > 0.0 ? rd / std::abs(rd) : Cx(1.0, 0.0);
  }
  return q;
}

StateVector random_state(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_state: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector v(dim);
  for (Index k = 0; k < dim; ++k) {
    double re = gauss(rng);
    double im = gauss(rng);
    v(k) = Cx(re, im);
  }
  v.normalize();
  return v;
}

}  // namespace qudit
