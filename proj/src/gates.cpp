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

#include "quditkit/gates.hpp"

#include <cmath>

namespace qudit {

namespace {

constexpr double kNormTol = 1e-8;
constexpr double kDependentTol = 1e-8;

double arg0(Cx z) { return std::abs(z) == 0.0 ? 0.0 : std::arg(z); }

// Orthonormal complement of psi, built by modified Gram-Schmidt over the
// standard basis in the order given.  Exactly one candidate drops out as
// linearly dependent (the earliest, if several are borderline).
std::vector<Eigen::VectorXcd> complement_basis(const Eigen::VectorXcd& psi,
                                               const std::vector<int>& order) {
  const Index d = psi.size();
  std::vector<Eigen::VectorXcd> basis;
  std::vector<int> skipped;
  for (int j : order) {
    if (static_cast<Index>(basis.size()) == d - 1) break;
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(d);
    r(j) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      r -= psi * psi.dot(r);
      for (const auto& v : basis) r -= v * v.dot(r);
    }
    double nrm = r.norm();
    if (nrm > kDependentTol) {
      basis.push_back(r / nrm);
    } else {
      skipped.push_back(j);
    }
  }
  // Starvation can only arise from borderline skips; retry those with the
  // enlarged accepted set, best residual first.
  while (static_cast<Index>(basis.size()) < d - 1 && !skipped.empty()) {
    double best = -1.0;
    size_t bi = 0;
    Eigen::VectorXcd bestv;
    for (size_t s = 0; s < skipped.size(); ++s) {
      Eigen::VectorXcd r = Eigen::VectorXcd::Zero(d);
      r(skipped[s]) = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        r -= psi * psi.dot(r);
        for (const auto& v : basis) r -= v * v.dot(r);
      }
      if (r.norm() > best) {
        best = r.norm();
        bi = s;
        bestv = r;
      }
    }
    if (best <= 0.0) throw std::runtime_error("zd_matrix: completion failed");
    basis.push_back(bestv / best);
    skipped.erase(skipped.begin() + static_cast<long>(bi));
  }
  return basis;
}

}  // namespace

ComplexMatrix y2_matrix(double la, double nu, double phi) {
  ComplexMatrix y(2, 2);
  double c = std::cos(la), s = std::sin(la);
  y(0, 0) = c;
  y(0, 1) = -std::polar(1.0, nu) * s;
  y(1, 0) = std::polar(1.0, phi - nu) * s;
  y(1, 1) = std::polar(1.0, phi) * c;
  return y;
}

Z2Params z2_params(Cx c0, Cx c1) {
  double norm = std::sqrt(std::norm(c0) + std::norm(c1));
  if (std::abs(norm - 1.0) > kNormTol)
    throw std::invalid_argument("z2_params: coefficients not normalised");
  double m1 = std::min(1.0, std::abs(c1));
  return Z2Params{std::acos(m1), arg0(c0 * std::conj(c1)), arg0(std::conj(c1))};
}

ComplexMatrix xd_matrix(int d, double phase) {
  if (d < 2) throw std::invalid_argument("xd_matrix: d must be >= 2");
  ComplexMatrix x = ComplexMatrix::Identity(d, d);
  x(d - 1, d - 1) = std::polar(1.0, phase);
  return x;
}

ComplexMatrix zd_matrix(const Eigen::VectorXcd& coeffs,
                        ZdCompletion completion) {
  const Index d = coeffs.size();
  if (d < 2) throw std::invalid_argument("zd_matrix: need at least 2 levels");
  if (std::abs(coeffs.norm() - 1.0) > kNormTol)
    throw std::invalid_argument("zd_matrix: coefficients not normalised");

  std::vector<int> order(static_cast<size_t>(d));
  for (Index j = 0; j < d; ++j)
    order[static_cast<size_t>(j)] = static_cast<int>(
        completion == ZdCompletion::ForwardBasis ? j : d - 1 - j);

  Eigen::VectorXcd psi = coeffs / coeffs.norm();
  auto basis = complement_basis(psi, order);

  ComplexMatrix z(d, d);
  for (Index i = 0; i + 1 < d; ++i)
    z.row(i) = basis[static_cast<size_t>(i)].adjoint();
  z.row(d - 1) = psi.adjoint();
  return z;
}

ComplexMatrix pd_matrix(int d, int p, int q, ZdCompletion completion) {
  if (d < 2) throw std::invalid_argument("pd_matrix: d must be >= 2");
  if (p < 0 || q < 0 || p >= d || q >= d || p == q)
    throw std::invalid_argument("pd_matrix: p, q must be distinct levels");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(d);
  c(p) = 1.0 / std::sqrt(2.0);
  c(q) = -1.0 / std::sqrt(2.0);
  ComplexMatrix z = zd_matrix(c, completion);
  return z.adjoint() * xd_matrix(d, M_PI) * z;
}

ComplexMatrix gamma2_matrix(int d, const ComplexMatrix& y) {
  if (d < 2) throw std::invalid_argument("gamma2_matrix: d must be >= 2");
  if (y.rows() != d || y.cols() != d)
    throw std::invalid_argument("gamma2_matrix: y must be d x d");
  Index D = static_cast<Index>(d) * d;
  ComplexMatrix g = ComplexMatrix::Identity(D, D);
  g.block(D - d, D - d, d, d) = y;
  return g;
}

ComplexMatrix gamman_matrix(const QuditSystem& sys,
                            const std::vector<int>& controls, int target,
                            const ComplexMatrix& y) {
  const int d = sys.d;
  if (y.rows() != d || y.cols() != d)
    throw std::invalid_argument("gamman_matrix: y must be d x d");
  if (target < 0 || target >= sys.n)
    throw std::invalid_argument("gamman_matrix: target out of range");
  std::vector<bool> used(static_cast<size_t>(sys.n), false);
  used[static_cast<size_t>(target)] = true;
  for (int c : controls) {
    if (c < 0 || c >= sys.n)
      throw std::invalid_argument("gamman_matrix: control out of range");
    if (used[static_cast<size_t>(c)])
      throw std::invalid_argument(
          "gamman_matrix: controls and target must be distinct");
    used[static_cast<size_t>(c)] = true;
  }

  const Index N = sys.dim();
  ComplexMatrix g = ComplexMatrix::Zero(N, N);
  for (Index col = 0; col < N; ++col) {
    std::vector<int> digits = base_d_digits(col, d, sys.n);
    bool active = true;
    for (int c : controls)
      if (digits[static_cast<size_t>(c)] != d - 1) active = false;
    if (!active) {
      g(col, col) = 1.0;
      continue;
    }
    int jt = digits[static_cast<size_t>(target)];
    for (int l = 0; l < d; ++l) {
      digits[static_cast<size_t>(target)] = l;
      g(index_from_digits(digits, d), col) = y(l, jt);
    }
  }
  return g;
}

}  // namespace qudit
