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

#include "quditkit/gates.hpp"

#include <map>

namespace qudit {

enum class GateFamily { Z, X, P };

/// One circuit element.  `controls` empty means a local gate; any control
/// fires on |d-1>.  A single control is the two-qudit controlled gate; two or
/// more controls form the n-qudit controlled gate, which only appears before
/// lowering.  `dagger` marks the inverse of a Z-family gate (X and P inverses
/// are expressible directly: negated phase, and P is an involution).
struct Gate {
  GateFamily family = GateFamily::X;
  int target = 0;
  std::vector<int> controls;
  bool dagger = false;

  Eigen::VectorXcd coeffs;  // Z family
  double phase = 0.0;       // X family
  int p = 0, q = 0;         // P family

  static Gate z(int target, Eigen::VectorXcd coeffs,
                std::vector<int> controls = {}, bool dagger = false);
  static Gate x(int target, double phase, std::vector<int> controls = {});
  static Gate transposition(int target, int p, int q,
                            std::vector<int> controls = {});

  Gate inverse() const;

  /// Serialisation label: Z/X/P, C2Z/C2X/C2P, CNZ/CNX/CNP.
  std::string kind_label() const;
};

/// A gate list over n computational qudits plus `aux` trailing ancillas
/// (ancillas occupy the least significant digits).  Gates apply in sequence
/// order: gates.front() acts on states first.
struct Circuit {
  int d = 2;
  int n = 1;
  int aux = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  Circuit(int d_, int n_, int aux_ = 0);

  QuditSystem reg() const { return QuditSystem(d, n + aux); }
  Index dim() const { return reg().dim(); }

  /// Validates index ranges and payload shape before appending.
  void append(Gate g);
  void extend(const Circuit& other);

  /// Reversed gate order with per-gate inverses; exact matrix inverse.
  Circuit inverted() const;

  int max_controls() const;
  /// Count per kind_label, for reporting.
  std::map<std::string, Index> kind_counts() const;
};

/// Execution choices shared by both simulation paths.  The completion
/// convention picks which member of the Z_d family a Z gate record denotes;
/// everything downstream of synthesis is invariant to it by construction.
struct ExecOptions {
  ZdCompletion completion = ZdCompletion::ForwardBasis;
};

/// The d x d matrix a gate applies to its target (dagger folded in).
ComplexMatrix gate_inner_matrix(const Gate& g, int d,
                                const ExecOptions& opt = {});

/// Full register-sized matrix of one gate, via the controlled-embedding
/// construction.  Reference path; O(d^2n) memory.
ComplexMatrix gate_matrix(const Gate& g, const QuditSystem& reg,
                          const ExecOptions& opt = {});

/// In-place strided application of one gate to a state vector.
void apply_gate(const Gate& g, const QuditSystem& reg, StateVector& state,
                const ExecOptions& opt = {});

void apply_circuit(const Circuit& c, StateVector& state,
                   const ExecOptions& opt = {});

/// Product of the circuit's gates as one matrix (strided kernel applied to
/// identity columns; agrees with the gate_matrix product).
ComplexMatrix circuit_to_matrix(const Circuit& c, const ExecOptions& opt = {});

struct VerifyReport {
  bool ok = false;
  double phase = 0.0;    // u ~= e^{i phase} * (circuit restricted to anc |0>)
  double max_dev = 0.0;  // entrywise, after phase alignment
  double ancilla_residual = 0.0;  // max leaked ancilla population over inputs
};

/// Check that the circuit, restricted to ancillas in |0...0>, equals u up to
/// one global phase within tol, and that ancillas are returned to |0...0>.
VerifyReport verify_synthesis(const ComplexMatrix& u, const Circuit& c,
                              double tol = kDefaultTol,
                              const ExecOptions& opt = {});

}  // namespace qudit
