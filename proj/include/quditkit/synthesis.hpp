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

#include "quditkit/circuit.hpp"

namespace qudit {

struct SynthesisOptions {
  bool lower_to_two_qudit = true;  // replace multi-controlled gates by chains
  bool prune_identity = true;      // drop gates that act as the identity
  bool verify = true;              // reconstruct and compare at `tol`
  double tol = kDefaultTol;
  double eigenphase_prune = 1e-12;  // |psi_m| below this skips the factor
};

struct SynthesisReport {
  bool verified = false;
  double global_phase = 0.0;
  double max_deviation = 0.0;
  double ancilla_residual = 0.0;
  int ancillas = 0;
  std::map<std::string, Index> gate_counts;
  Index total_gates = 0;
  Index two_qudit_gates = 0;  // C2-kind count after lowering
};

/// Circuit mapping `state` to the top basis state |N-1> up to a phase.
/// Works block-by-block: a multi-controlled Z_d folds the top d amplitudes
/// into |N-1>, then the next d-1 still-unabsorbed basis states are permuted
/// into the freed slots and the fold repeats.  Gate coefficients come from
/// simulating the partial circuit on `state`, so every emitted gate acts on
/// the amplitudes actually present.  No ancillas; multi-controlled gates
/// appear un-lowered.
Circuit synthesize_zm(const QuditSystem& sys, const StateVector& state);

/// Circuit applying e^{i psi} to `state` and the identity to its orthogonal
/// complement: the reduction stage, a phase on |N-1> conditioned on all other
/// qudits, then the exact inverse of the reduction stage.  The conjugation
/// cancels every completion and permutation side effect, so any valid
/// reduction stage yields the same operator.
Circuit synthesize_wm(const QuditSystem& sys, double psi,
                      const StateVector& state);

/// Circuit exchanging basis states |j> and |k> (digit vectors) exactly,
/// fixing every other basis state.  Realised one qudit at a time: side qudits
/// are converted to |d-1>, a controlled transposition retargets the active
/// digit, the conversions are undone; the per-qudit steps are then unwound in
/// reverse so the net effect is a single two-state transposition.
Circuit synthesize_basis_permutation(const QuditSystem& sys,
                                     const std::vector<int>& j,
                                     const std::vector<int>& k);

/// Ancillas needed to lower a gate with `num_controls` controls to two-qudit
/// form: 0 for <= 1 control, else ceil((m-1)/(d-2)) arranged as a carry
/// chain.  Throws UnsupportedError for d == 2 with 2+ controls.
int gamman_ancillas(int num_controls, int d);

/// Lower one multi-controlled gate to a two-qudit circuit: a chain of
/// controlled level-increments walks each ancilla towards |d-1> only when
/// every control it watches holds |d-1>; the last ancilla then fires the
/// payload gate on `target`, and the chain is unwound to restore all
/// ancillas to |0>.  When a chain segment consumes fewer than its full share
/// of controls, its final increment jumps directly to level d-1 so the fire
/// condition stays uniform.  Ancillas sit at register indices comp.n ...
/// comp.n + r - 1.  `aux_capacity` < 0 means "exactly as many as needed";
/// otherwise exceeding it throws UnsupportedError.
Circuit synthesize_gamman(const QuditSystem& comp,
                          const std::vector<int>& controls, int target,
                          const Gate& payload, int aux_capacity = -1);

/// Full synthesis: spectral decomposition, one commuting factor per
/// eigenphase, optional lowering to two-qudit gates, optional verification.
std::pair<Circuit, SynthesisReport> synthesize_unitary(
    const ComplexMatrix& u, const QuditSystem& sys,
    const SynthesisOptions& opts = {});

struct ResourceEstimate {
  double n;           // qudits needed for an N-state space: log2(N)/log2(d)
  double n2;          // binary digit count log2(N)
  double time_ratio;  // gate-time ratio versus binary: (log2 d)^2
};

/// Space/time comparison of a d-level register against binary for the same
/// state-space size N.  Exact integers fall out when N is a power of d (and
/// of 2); otherwise the real-valued logs are reported as-is.
ResourceEstimate estimate_resources(double N, int d);

}  // namespace qudit
