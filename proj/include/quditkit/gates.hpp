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

#include "quditkit/core.hpp"

namespace qudit {

// The elementary single-qudit families.
//
//   Z_d(c): any unitary taking the superposition sum_k c_k |k> to |d-1>
//           (modulo a phase).  The family is defined by that action alone;
//           a concrete matrix requires a completion convention (below).
//   X_d(phi): diag(1, ..., 1, e^{i phi}).
//   P_d(p,q): transposition of levels p and q, realised as
//             Z_d^dag X_d(pi) Z_d with c_p = -c_q = 1/sqrt(2).

struct ZdSpec {
  Eigen::VectorXcd coeffs;  // normalised, length d
};

struct XdSpec {
  double phase = 0.0;
};

struct PdSpec {
  int p = 0;
  int q = 0;
};

/// How the unconstrained rows of a Z_d matrix are filled in.  ForwardBasis
/// orthonormalises the standard basis in index order against the target
/// superposition (the canonical choice); ReverseBasis works from the highest
/// index down.  Both yield valid members of the same gate family.
enum class ZdCompletion { ForwardBasis, ReverseBasis };

/// General two-level unitary
///   [ cos(la)               -e^{i nu} sin(la)   ]
///   [ e^{i(phi-nu)} sin(la)  e^{i phi} cos(la)  ]
ComplexMatrix y2_matrix(double la, double nu, double phi);

/// Parameters (la, nu, phi) such that y2_matrix maps c0|0> + c1|1> to |1>:
/// la = acos|c1|, nu = arg(c0 c1*), phi = arg(c1*), with arg(0) := 0.
struct Z2Params {
  double la, nu, phi;
};
Z2Params z2_params(Cx c0, Cx c1);

ComplexMatrix xd_matrix(int d, double phase);

/// Member of the Z_d(c) family: the last row is the conjugated coefficient
/// vector, so zd * psi = |d-1> exactly; remaining rows follow `completion`.
/// Rejects non-normalised coefficients.
ComplexMatrix zd_matrix(const Eigen::VectorXcd& coeffs,
                        ZdCompletion completion = ZdCompletion::ForwardBasis);

/// Transposition of levels p and q (p != q), built as Z^dag X(pi) Z.
ComplexMatrix pd_matrix(int d, int p, int q,
                        ZdCompletion completion = ZdCompletion::ForwardBasis);

/// Two-qudit controlled gate on C^{d^2}: identity on the first d^2 - d basis
/// states, y on the last d (i.e. y applied to the target iff the control
/// sits in |d-1>).
ComplexMatrix gamma2_matrix(int d, const ComplexMatrix& y);

/// n-qudit controlled gate: y acts on `target` iff every qudit in `controls`
/// is in |d-1>.  `controls` may be empty (plain embedding of y) and need not
/// be contiguous; it must not contain `target` or duplicates.
ComplexMatrix gamman_matrix(const QuditSystem& sys,
                            const std::vector<int>& controls, int target,
                            const ComplexMatrix& y);

}  // namespace qudit
