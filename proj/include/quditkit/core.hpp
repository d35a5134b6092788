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

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qudit {

using Cx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-10;

/// Input documents that cannot be interpreted (bad JSON, missing fields,
/// dimension mismatches).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Valid request that this implementation cannot serve (e.g. binary qudits
/// with three or more qudits and two-qudit lowering, ancilla capacity).
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solve that failed to reach its target quality.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A register of `n` qudits with `d` levels each.  Basis states are indexed
/// lexicographically: index k corresponds to digits (k_1, ..., k_n) in base d
/// with qudit 0 the most significant digit.
struct QuditSystem {
  int d;
  int n;

  QuditSystem(int d_, int n_) : d(d_), n(n_) {
    if (d < 2) throw std::invalid_argument("QuditSystem: d must be >= 2");
    if (n < 1) throw std::invalid_argument("QuditSystem: n must be >= 1");
  }

  Index dim() const {
    Index N = 1;
    for (int i = 0; i < n; ++i) N *= d;
    return N;
  }
};

/// Base-d digits of `index`, most significant first, exactly `n` digits.
std::vector<int> base_d_digits(Index index, int d, int n);

/// Inverse of base_d_digits.
Index index_from_digits(const std::vector<int>& digits, int d);

/// Eigenphase/eigenvector pairs of a unitary: u = sum_m e^{i phase_m} v_m v_m^dag.
/// Phases lie on the principal branch (-pi, pi] and are sorted ascending
/// (ties keep solver order).  Eigenvectors are orthonormal columns; each is
/// scaled so its largest-modulus component is real and positive.  Degenerate
/// eigenvalues yield an arbitrary orthonormal basis of the eigenspace.
struct SpectralDecomposition {
  Eigen::VectorXd phases;
  ComplexMatrix vectors;
};

/// Decompose a unitary into eigenphases and eigenvectors.  The matrix is a
/// normal operator, so the decomposition runs on the commuting Hermitian pair
/// ((U + U^dag)/2, (U - U^dag)/2i), which keeps eigenvectors orthonormal even
/// across degeneracies.  Throws std::invalid_argument if the input deviates
/// from unitarity by more than `tol` (the deviation is quoted in the message).
SpectralDecomposition spectral_decompose(const ComplexMatrix& u,
                                         double tol = kDefaultTol);

struct PhaseComparison {
  bool matches;
  double phase;    // theta minimising e^{i theta} A - B, from the largest entry
  double max_dev;  // max entrywise |e^{i theta} A - B|
};

/// Compare two equally sized matrices up to one global phase.  theta is fixed
/// from the largest-modulus entry pair, then the residual is measured
/// entrywise against `tol`.
PhaseComparison equal_up_to_global_phase(const ComplexMatrix& a,
                                         const ComplexMatrix& b,
                                         double tol = kDefaultTol);

/// Kronecker product, row-major convention: (A ox B)[i*p+k][j*q+l] = A_ij B_kl.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// max entrywise deviation of M^dag M from the identity.
double unitarity_deviation(const ComplexMatrix& m);

/// Haar-like random unitary: QR of a seeded complex Gaussian matrix with the
/// R-diagonal phases absorbed.  Deterministic for a given seed.
ComplexMatrix random_unitary(Index dim, std::uint64_t seed);

/// Normalised random state with seeded complex Gaussian entries.
StateVector random_state(Index dim, std::uint64_t seed);

}  // namespace qudit
