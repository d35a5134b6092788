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

#include <optional>

namespace qudit {

// Pulse-level model of a linear ion trap, hbar = 1, all frequencies angular,
// everything in the interaction picture of the bare levels.  Each ion offers
// d computational levels |0..d-1>, d auxiliary partner levels |d..2d-1> used
// to park populations during the two-ion protocol, and one spare level |2d>
// reserved for the phase-gate pulse (driving a parking partner instead would
// imprint the phase on parked amplitudes as well).

struct LevelScheme {
  int d = 3;
  Eigen::VectorXd frequencies;  // ladder transition frequencies, distinct

  static LevelScheme standard(int d);
  void validate() const;
  int levels() const { return 2 * d + 1; }  // per ion, incl. spare
  int aux(int j) const { return d + j; }
  int spare() const { return 2 * d; }
};

struct TrapConfig {
  double nu_x = 0.2;     // axial trap frequency
  int q = 2;             // ion count
  Eigen::VectorXd eta;   // Lamb-Dicke parameter per ion
  int n_max = 3;         // phonon cutoff (levels 0..n_max)

  static TrapConfig standard(int q);
  void validate() const;
};

enum class Interaction { V, Uplus, Uminus, AuxPhase };

/// One piecewise-constant drive.  `pairs` names the driven level pairs
/// (lower, upper) of the addressed ion; empty means the computational ladder
/// (j, j+1), j = 0..d-2.  V and AuxPhase leave the trap alone (standing-wave
/// phase 0, antinode); Uplus/Uminus exchange one phonon (phase pi/2, node).
/// `detuning` is only meaningful for AuxPhase.
struct PulseSegment {
  Interaction interaction = Interaction::V;
  int ion = 0;
  std::vector<Cx> rabi;
  double t = 0.0;
  double sw_phase = 0.0;
  double detuning = 0.0;
  std::vector<std::pair<int, int>> pairs;
};

struct PulseProgram {
  int d = 3;
  LevelScheme scheme;
  TrapConfig trap;
  std::vector<PulseSegment> segments;
};

/// Resonant internal mixing of the computational ladder (antinode):
///   H = -sum_j [ Omega_j |j+1><j| + Omega_j* |j><j+1| ],  d x d.
ComplexMatrix hamiltonian_v(int d, const std::vector<Cx>& rabi);

/// Sideband coupling of the ladder to the shared phonon mode (node),
/// detuned by +/- nu_x; on C^d tensor C^{n_max+1}:
///   H = sum_j (eta/sqrt(q)) [ Omega_j sigma^dag_{j,j+1} (a^dag | a) + h.c. ].
ComplexMatrix hamiltonian_u(int d, const TrapConfig& trap,
                            const std::vector<Cx>& rabi, int sign,
                            int ion = 0);

/// exp(-i h t); h must be Hermitian.
ComplexMatrix evolve(const ComplexMatrix& h, double t);

struct ZdControls {
  std::vector<Cx> rabi;     // Omega_{j,j+1}
  double t = 0.0;
  double infidelity = 0.0;  // 1 - |<d-1| V psi |^2, recomputed by evolution
  double phase = 0.0;       // arg <d-1| V psi>
  bool converged = true;
};

/// Closed-form controls mapping c0|0> + c1|1> to |1> under V:
/// Omega_01/Omega = c0* c1 / (i |c0 c1|), cos(Omega t) = |c1|.
/// Returns nullopt for degenerate amplitudes (|c1| <= eps: fall back to the
/// optimiser).  |c0| <= eps yields a zero-duration segment.
std::optional<ZdControls> solve_z2_controls(Cx c0, Cx c1);

/// Closed-form three-level controls: cos(Omega t) = |c1|^2/(1-|c2|) - 1 is
/// fixed first, the sine branch is +sqrt(1-C^2), then
/// Omega_01/Omega = (c0* c1 / (i|c1|^2)) S/(1-C), Omega_12/Omega =
/// c1* c2 / (i S |c2|).  nullopt on degenerate amplitudes.
std::optional<ZdControls> solve_z3_controls(Cx c0, Cx c1, Cx c2);

struct ZdSolveOptions {
  std::uint64_t seed = 0;
  int starts = 8;
  int max_iter = 400;          // optimiser iterations per start
  double omega_max = 10.0;     // |Omega| bound, enforced by time rescaling
  double t_max = 10.0;
  double threshold = 1e-6;     // convergence criterion on infidelity
};

/// General-d controls by seeded multi-start quasi-Newton minimisation of the
/// infidelity over the complex Rabi vector (the duration is a gauge freedom
/// of constant drives and is split off afterwards).  Deterministic for a
/// given seed.  `converged` reports whether the threshold was met; the best
/// controls found are returned either way.
ZdControls solve_zd_controls(const Eigen::VectorXcd& coeffs,
                             const ZdSolveOptions& opts = {});

/// Dispatch: closed forms for d = 2, 3 (optimiser fallback on degenerate
/// amplitudes), optimiser for d >= 4.
ZdControls solve_z_controls(const Eigen::VectorXcd& coeffs,
                            const ZdSolveOptions& opts = {});

struct PhasePulse {
  double phase = 0.0;     // imprinted on |d-1> relative to undriven levels
  double t = 0.0;         // duration: Omega' t = pi
  double residual = 0.0;  // leftover transfer amplitude, ~1e-16
};

/// Generalised 2 pi pulse on the pair (|d-1>, spare) with constant detuning:
/// population returns exactly (Omega' = sqrt(|Omega|^2 + delta^2/4),
/// Omega' t = pi) while |d-1> picks up a detuning-controlled phase.
/// Computed from the exact two-level evolution.
PhasePulse two_pi_phase_pulse(Cx omega, double delta);

/// Invert phase -> detuning for a fixed |Omega| by bisection on the monotone
/// phase curve.  `phase` must lie strictly inside (0, 2 pi).
double detuning_for_phase(double phase, double omega_mag);

/// Unitary implemented by one segment on the full q-ion (x) phonon space,
/// dimension (2d+1)^q (n_max+1).
ComplexMatrix segment_operator(const PulseSegment& seg, const LevelScheme& scheme,
                               const TrapConfig& trap);

/// Product over all segments, applied in order.
ComplexMatrix simulate_program(const PulseProgram& prog);

struct LocalPulse {
  PulseProgram program;
  ComplexMatrix realized;   // d x d unitary on the computational manifold
  double infidelity = 0.0;  // drive-solution infidelity (Z and P payloads)
  double phase = 0.0;       // reduction phase (Z) or imprinted phase (X)
  bool converged = true;    // best-effort results are still returned
};

/// Program realising a local Z/X/P gate on one ion's computational manifold:
/// a V-driven ladder segment for Z, the detuned phase pulse for X, and the
/// conjugated pi-phase sequence for transpositions.
LocalPulse single_qudit_pulse(const LevelScheme& scheme, const TrapConfig& trap,
                              const Gate& payload,
                              const ZdSolveOptions& zopts = {});

struct ProtocolResult {
  PulseProgram program;
  ComplexMatrix full_op;     // (2d+1)^2 (n_max+1) dimensional
  ComplexMatrix restricted;  // d^2 x d^2: comp (x) comp, phonon |0>
  ComplexMatrix realized_y;  // the d x d payload actually implemented
  double subspace_leakage = 0.0;  // escaped mass, comp (x) comp (x) |0> in
  double cutoff_leakage = 0.0;    // top phonon level population, any stage
  double control_infidelity = 0.0;  // payload drive-solution infidelity
  bool converged = true;
};

/// Five-stage two-ion controlled gate through the phonon bus:
///  (1) pi-pulse, trap-exciting, moving control levels 0..d-2 to partners,
///  (2) trap-preserving pi-pulse restoring the control's internal labels,
///  (3) trap-de-exciting pi-pulse parking all target levels on partners,
///  (4) the payload on the target's computational manifold (V-realised Z_d,
///      or the detuned phase pulse for X_d), inert on parked amplitudes,
///  (5) exact reversal of (3), (2), (1).
/// Restricted to computational (x) computational (x) |0 phonon>, the result
/// is the two-qudit controlled gate applying realized_y.  `payload` must be
/// a local Z- or X-family gate record.
ProtocolResult gamma2_protocol(const LevelScheme& scheme,
                               const TrapConfig& trap, const Gate& payload,
                               const ZdSolveOptions& zopts = {});

}  // namespace qudit
