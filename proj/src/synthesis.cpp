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

#include "quditkit/synthesis.hpp"

#include <cmath>

namespace qudit {

namespace {

// Amplitudes below this are treated as absent when deciding whether a
// permutation or fold gate is worth emitting.  The skipped mass is bounded by
// N * kSkipAmp^2, far inside every verification tolerance.
constexpr double kSkipAmp = 1e-13;

constexpr double kIdentityPrune = 1e-13;

std::vector<int> range_except(int n, int skip) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n) - 1);
  for (int i = 0; i < n; ++i)
    if (i != skip) out.push_back(i);
  return out;
}

// One per-qudit step of the two-state exchange: convert the side digits of
// the walking state to |d-1>, transpose the active digit under their
// control, convert back.  Exchanges exactly |walk> and |walk with digit i
// replaced by `to`>.  Afterwards `walk[i]` is updated.
void emit_permutation_stage(Circuit& c, int d, std::vector<int>& walk, int i,
                            int to) {
  std::vector<Gate> converts;
  for (size_t l = 0; l < walk.size(); ++l) {
    if (static_cast<int>(l) == i) continue;
    if (walk[l] != d - 1)
      converts.push_back(
          Gate::transposition(static_cast<int>(l), walk[l], d - 1));
  }
  for (const Gate& g : converts) c.append(g);
  c.append(Gate::transposition(i, walk[i], to,
                               range_except(static_cast<int>(walk.size()), i)));
  for (const Gate& g : converts) c.append(g);
  walk[static_cast<size_t>(i)] = to;
}

}  // namespace

Circuit synthesize_basis_permutation(const QuditSystem& sys,
                                     const std::vector<int>& j,
                                     const std::vector<int>& k) {
  const int d = sys.d, n = sys.n;
  if (static_cast<int>(j.size()) != n || static_cast<int>(k.size()) != n)
    throw std::invalid_argument(
        "synthesize_basis_permutation: digit vectors must have length n");
  for (int i = 0; i < n; ++i)
    if (j[i] < 0 || j[i] >= d || k[i] < 0 || k[i] >= d)
      throw std::invalid_argument(
          "synthesize_basis_permutation: digit out of range");

  Circuit c(d, n);
  if (n == 1) {
    if (j[0] != k[0]) c.append(Gate::transposition(0, j[0], k[0]));
    return c;
  }

  std::vector<int> diffs;
  for (int i = 0; i < n; ++i)
    if (j[i] != k[i]) diffs.push_back(i);
  if (diffs.empty()) return c;

  // Walk |j> to |k> one digit at a time, then unwind all but the last step.
  // Each step is an exact two-state exchange and an involution, so the
  // mirrored sequence composes to the single transposition |j> <-> |k|.
  std::vector<int> walk = j;
  std::vector<std::pair<size_t, size_t>> spans;  // gate ranges per step
  for (int i : diffs) {
    size_t begin = c.gates.size();
    emit_permutation_stage(c, d, walk, i, k[static_cast<size_t>(i)]);
    spans.emplace_back(begin, c.gates.size());
  }
  for (size_t s = spans.size() - 1; s-- > 0;) {
    for (size_t g = spans[s].first; g < spans[s].second; ++g)
      c.append(c.gates[g]);
  }
  return c;
}

Circuit synthesize_zm(const QuditSystem& sys, const StateVector& state) {
  const int d = sys.d, n = sys.n;
  const Index N = sys.dim();
  if (state.size() != N)
    throw std::invalid_argument("synthesize_zm: state dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("synthesize_zm: state not normalised");

  Circuit c(d, n);
  if (n == 1) {
    c.append(Gate::z(0, state / state.norm()));
    return c;
  }

  StateVector cur = state;
  auto emit = [&](const Gate& g) {
    c.append(g);
    apply_gate(g, sys, cur);
  };
  auto emit_all = [&](const Circuit& sub) {
    for (const Gate& g : sub.gates) emit(g);
  };

  const std::vector<int> fold_controls = range_except(n, n - 1);
  // Folds the top d amplitudes into |N-1>; skipped when there is nothing to
  // move (the freed slots stay empty until the next permutation).
  auto fold = [&]() {
    if (cur.segment(N - d, d - 1).norm() <= kSkipAmp) return;
    Eigen::VectorXcd v = cur.segment(N - d, d);
    emit(Gate::z(n - 1, v / v.norm(), fold_controls));
  };

  fold();
  Index hi = N - d - 1;
  while (hi >= 0) {
    const Index cnt = std::min<Index>(d - 1, hi + 1);
    for (Index u = 0; u < cnt; ++u) {
      const Index src = hi - u, dst = N - 2 - u;
      if (std::max(std::abs(cur(src)), std::abs(cur(dst))) <= kSkipAmp)
        continue;
      emit_all(synthesize_basis_permutation(sys, base_d_digits(src, d, n),
                                            base_d_digits(dst, d, n)));
    }
    fold();
    hi -= cnt;
  }
  return c;
}

Circuit synthesize_wm(const QuditSystem& sys, double psi,
                      const StateVector& state) {
  Circuit reduce = synthesize_zm(sys, state);
  Circuit w(sys.d, sys.n);
  w.extend(reduce);
  if (sys.n == 1) {
    w.append(Gate::x(0, psi));
  } else {
    w.append(Gate::x(sys.n - 1, psi, range_except(sys.n, sys.n - 1)));
  }
  w.extend(reduce.inverted());
  return w;
}

int gamman_ancillas(int num_controls, int d) {
  if (num_controls <= 1) return 0;
  if (d < 3)
    throw UnsupportedError(
        "lowering a gate with 2+ controls requires d >= 3 (no carry levels "
        "for d = 2)");
  if (num_controls <= d - 1) return 1;
  return 1 + (num_controls - (d - 1) + (d - 3)) / (d - 2);
}

Circuit synthesize_gamman(const QuditSystem& comp,
                          const std::vector<int>& controls, int target,
                          const Gate& payload, int aux_capacity) {
  const int d = comp.d;
  const int m = static_cast<int>(controls.size());
  const int r = gamman_ancillas(m, d);
  if (aux_capacity >= 0 && r > aux_capacity)
    throw UnsupportedError("synthesize_gamman: needs " + std::to_string(r) +
                           " ancillas, capacity is " +
                           std::to_string(aux_capacity));

  Circuit c(d, comp.n, r);
  Gate fire = payload;
  fire.target = target;

  if (m <= 1) {
    fire.controls = controls;
    c.append(fire);
    return c;
  }

  // Carry chain: ancilla a walks 0 -> 1 -> ... -> d-1, one increment per
  // watched control (plus a handoff from the previous ancilla), advancing
  // only while every earlier increment fired.  A short final segment jumps
  // its last increment straight to d-1.
  std::vector<Gate> ups;
  int ci = 0;
  for (int a = 0; a < r; ++a) {
    const int anc = comp.n + a;
    const int fresh = std::min(m - ci, a == 0 ? d - 1 : d - 2);
    const int total = a == 0 ? fresh : fresh + 1;
    for (int t = 1; t <= total; ++t) {
      const int from = t - 1;
      const int to = t == total ? d - 1 : t;
      const int ctrl = (a > 0 && t == 1) ? anc - 1 : controls[ci++];
      ups.push_back(Gate::transposition(anc, from, to, {ctrl}));
    }
  }
  if (ci != m)
    throw std::logic_error("synthesize_gamman: control assignment mismatch");

  for (const Gate& g : ups) c.append(g);
  fire.controls = {comp.n + r - 1};
  c.append(fire);
  for (auto it = ups.rbegin(); it != ups.rend(); ++it) c.append(*it);
  return c;
}

std::pair<Circuit, SynthesisReport> synthesize_unitary(
    const ComplexMatrix& u, const QuditSystem& sys,
    const SynthesisOptions& opts) {
  const Index N = sys.dim();
  if (u.rows() != N || u.cols() != N)
    throw std::invalid_argument(
        "synthesize_unitary: matrix does not match system dimension");
  if (opts.lower_to_two_qudit && sys.d == 2 && sys.n >= 3)
    throw UnsupportedError(
        "synthesize_unitary: two-qudit lowering is unavailable for d = 2 "
        "with n >= 3; use d >= 3 or disable lowering");

  SpectralDecomposition spec = spectral_decompose(u, opts.tol);

  Circuit pre(sys.d, sys.n);
  for (Index mIdx = 0; mIdx < N; ++mIdx) {
    if (std::abs(spec.phases(mIdx)) < opts.eigenphase_prune) continue;
    pre.extend(synthesize_wm(sys, spec.phases(mIdx), spec.vectors.col(mIdx)));
  }

  if (opts.prune_identity) {
    std::vector<Gate> kept;
    kept.reserve(pre.gates.size());
    for (const Gate& g : pre.gates) {
      ComplexMatrix y = gate_inner_matrix(g, sys.d);
      y.diagonal().array() -= 1.0;
      if (y.cwiseAbs().maxCoeff() > kIdentityPrune) kept.push_back(g);
    }
    pre.gates = std::move(kept);
  }

  Circuit out = pre;
  if (opts.lower_to_two_qudit) {
    int r_max = 0;
    for (const Gate& g : pre.gates)
      if (g.controls.size() >= 2)
        r_max = std::max(
            r_max, gamman_ancillas(static_cast<int>(g.controls.size()), sys.d));
    out = Circuit(sys.d, sys.n, r_max);
    for (const Gate& g : pre.gates) {
      if (g.controls.size() <= 1) {
        out.append(g);
      } else {
        out.extend(
            synthesize_gamman(sys, g.controls, g.target, g, r_max));
      }
    }
  }

  SynthesisReport rep;
  rep.ancillas = out.aux;
  rep.gate_counts = out.kind_counts();
  rep.total_gates = static_cast<Index>(out.gates.size());
  for (const auto& [kind, cnt] : rep.gate_counts)
    if (kind.rfind("C2", 0) == 0) rep.two_qudit_gates += cnt;

  if (opts.verify) {
    VerifyReport v = verify_synthesis(u, out, opts.tol);
    rep.verified = v.ok;
    rep.global_phase = v.phase;
    rep.max_deviation = v.max_dev;
    rep.ancilla_residual = v.ancilla_residual;
  }
  return {std::move(out), rep};
}

namespace {

// log_b(N), with the result snapped to an integer whenever N is exactly an
// integer power of b; the floating-point log ratio alone misses this by one
// ulp on inputs like N = 243, b = 3.
double log_base(double N, double b) {
  const double raw = std::log2(N) / std::log2(b);
  const double k = std::nearbyint(raw);
  if (k >= 0.0 && k < 64.0 && std::abs(raw - k) < 1e-9) {
    double power = 1.0;
    for (int i = 0; i < static_cast<int>(k); ++i) power *= b;
    if (power == N) return k;
  }
  return raw;
}

}  // namespace

ResourceEstimate estimate_resources(double N, int d) {
  if (d < 2) throw std::domain_error("estimate_resources: d must be >= 2");
  if (!(N >= 2.0))
    throw std::domain_error("estimate_resources: N must be >= 2");
  const double l2d = std::log2(static_cast<double>(d));
  return ResourceEstimate{log_base(N, static_cast<double>(d)), log_base(N, 2.0),
                          l2d * l2d};
}

}  // namespace qudit
