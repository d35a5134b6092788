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

#include "quditkit/circuit.hpp"

#include <algorithm>

namespace qudit {

namespace {

Index pow_index(int d, int e) {
  Index r = 1;
  for (int i = 0; i < e; ++i) r *= d;
  return r;
}

// Applies one gate to every column of `m` with strided index arithmetic.
// Rows of `m` are register basis states; this is the workhorse behind both
// apply_gate and circuit_to_matrix.
void apply_gate_block(const Gate& g, const QuditSystem& reg,
                      Eigen::Ref<ComplexMatrix> m, const ExecOptions& opt) {
  const int d = reg.d;
  const Index D = reg.dim();
  const Index tstride = pow_index(d, reg.n - 1 - g.target);

  std::vector<Index> cstrides;
  cstrides.reserve(g.controls.size());
  for (int c : g.controls) cstrides.push_back(pow_index(d, reg.n - 1 - c));

  const bool plain_swap = g.family == GateFamily::P;
  ComplexMatrix y;
  if (!plain_swap) y = gate_inner_matrix(g, d, opt);

  std::vector<Cx> buf(static_cast<size_t>(d));
  for (Index col = 0; col < m.cols(); ++col) {
    for (Index base = 0; base < D; ++base) {
      if ((base / tstride) % d != 0) continue;
      bool active = true;
      for (Index cs : cstrides)
        if ((base / cs) % d != d - 1) {
          active = false;
          break;
        }
      if (!active) continue;

      if (plain_swap) {
        std::swap(m(base + g.p * tstride, col), m(base + g.q * tstride, col));
        continue;
      }
      for (int l = 0; l < d; ++l) buf[static_cast<size_t>(l)] = m(base + l * tstride, col);
      for (int r = 0; r < d; ++r) {
        Cx acc = 0.0;
        for (int l = 0; l < d; ++l) acc += y(r, l) * buf[static_cast<size_t>(l)];
        m(base + r * tstride, col) = acc;
      }
    }
  }
}

}  // namespace

Gate Gate::z(int target, Eigen::VectorXcd coeffs, std::vector<int> controls,
             bool dagger) {
  Gate g;
  g.family = GateFamily::Z;
  g.target = target;
  g.controls = std::move(controls);
  g.coeffs = std::move(coeffs);
  g.dagger = dagger;
  return g;
}

Gate Gate::x(int target, double phase, std::vector<int> controls) {
  Gate g;
  g.family = GateFamily::X;
  g.target = target;
  g.controls = std::move(controls);
  g.phase = phase;
  return g;
}

Gate Gate::transposition(int target, int p, int q, std::vector<int> controls) {
  Gate g;
  g.family = GateFamily::P;
  g.target = target;
  g.controls = std::move(controls);
  g.p = p;
  g.q = q;
  return g;
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (family) {
    case GateFamily::Z:
      g.dagger = !dagger;
      break;
    case GateFamily::X:
      g.phase = -phase;
      break;
    case GateFamily::P:
      break;  // involution
  }
  return g;
}

std::string Gate::kind_label() const {
  std::string suffix = family == GateFamily::Z   ? "Z"
                       : family == GateFamily::X ? "X"
                                                 : "P";
  if (controls.empty()) return suffix;
  if (controls.size() == 1) return "C2" + suffix;
  return "CN" + suffix;
}

Circuit::Circuit(int d_, int n_, int aux_) : d(d_), n(n_), aux(aux_) {
  if (d < 2) throw std::invalid_argument("Circuit: d must be >= 2");
  if (n < 1) throw std::invalid_argument("Circuit: n must be >= 1");
  if (aux < 0) throw std::invalid_argument("Circuit: aux must be >= 0");
}

void Circuit::append(Gate g) {
  const int reg_n = n + aux;
  if (g.target < 0 || g.target >= reg_n)
    throw std::invalid_argument("Circuit::append: target out of range");
  std::vector<bool> used(static_cast<size_t>(reg_n), false);
  used[static_cast<size_t>(g.target)] = true;
  for (int c : g.controls) {
    if (c < 0 || c >= reg_n)
      throw std::invalid_argument("Circuit::append: control out of range");
    if (used[static_cast<size_t>(c)])
      throw std::invalid_argument(
          "Circuit::append: controls and target must be distinct");
    used[static_cast<size_t>(c)] = true;
  }
  switch (g.family) {
    case GateFamily::Z:
      if (g.coeffs.size() != d)
        throw std::invalid_argument("Circuit::append: Z needs d coefficients");
      if (std::abs(g.coeffs.norm() - 1.0) > 1e-8)
        throw std::invalid_argument(
            "Circuit::append: Z coefficients not normalised");
      break;
    case GateFamily::X:
      break;
    case GateFamily::P:
      if (g.p < 0 || g.q < 0 || g.p >= d || g.q >= d || g.p == g.q)
        throw std::invalid_argument("Circuit::append: bad P levels");
      break;
  }
  gates.push_back(std::move(g));
}

void Circuit::extend(const Circuit& other) {
  if (other.d != d || other.n + other.aux > n + aux)
    throw std::invalid_argument("Circuit::extend: incompatible register");
  for (const Gate& g : other.gates) append(g);
}

Circuit Circuit::inverted() const {
  Circuit inv(d, n, aux);
  inv.gates.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it)
    inv.gates.push_back(it->inverse());
  return inv;
}

int Circuit::max_controls() const {
  size_t m = 0;
  for (const Gate& g : gates) m = std::max(m, g.controls.size());
  return static_cast<int>(m);
}

std::map<std::string, Index> Circuit::kind_counts() const {
  std::map<std::string, Index> counts;
  for (const Gate& g : gates) counts[g.kind_label()]++;
  return counts;
}

ComplexMatrix gate_inner_matrix(const Gate& g, int d, const ExecOptions& opt) {
  switch (g.family) {
    case GateFamily::Z: {
      ComplexMatrix z = zd_matrix(g.coeffs, opt.completion);
      return g.dagger ? ComplexMatrix(z.adjoint()) : z;
    }
    case GateFamily::X:
      return xd_matrix(d, g.dagger ? -g.phase : g.phase);
    case GateFamily::P:
      return pd_matrix(d, g.p, g.q, opt.completion);
  }
  throw std::logic_error("gate_inner_matrix: unreachable");
}

ComplexMatrix gate_matrix(const Gate& g, const QuditSystem& reg,
                          const ExecOptions& opt) {
  return gamman_matrix(reg, g.controls, g.target, gate_inner_matrix(g, reg.d, opt));
}

void apply_gate(const Gate& g, const QuditSystem& reg, StateVector& state,
                const ExecOptions& opt) {
  if (state.size() != reg.dim())
    throw std::invalid_argument("apply_gate: state dimension mismatch");
  Eigen::Map<ComplexMatrix> m(state.data(), state.size(), 1);
  apply_gate_block(g, reg, m, opt);
}

void apply_circuit(const Circuit& c, StateVector& state,
                   const ExecOptions& opt) {
  QuditSystem reg = c.reg();
  for (const Gate& g : c.gates) apply_gate(g, reg, state, opt);
}

ComplexMatrix circuit_to_matrix(const Circuit& c, const ExecOptions& opt) {
  QuditSystem reg = c.reg();
  ComplexMatrix m = ComplexMatrix::Identity(reg.dim(), reg.dim());
  for (const Gate& g : c.gates) apply_gate_block(g, reg, m, opt);
  return m;
}

VerifyReport verify_synthesis(const ComplexMatrix& u, const Circuit& c,
                              double tol, const ExecOptions& opt) {
  QuditSystem comp(c.d, c.n);
  const Index N = comp.dim();
  if (u.rows() != N || u.cols() != N)
    throw std::invalid_argument("verify_synthesis: dimension mismatch");

  ComplexMatrix m = circuit_to_matrix(c, opt);
  const Index sa = pow_index(c.d, c.aux);

  ComplexMatrix sub(N, N);
  double residual = 0.0;
  for (Index j = 0; j < N; ++j) {
    double leak = 0.0;
    for (Index k = 0; k < m.rows(); ++k) {
      if (k % sa == 0) {
        sub(k / sa, j) = m(k, j * sa);
      } else {
        leak += std::norm(m(k, j * sa));
      }
    }
    residual = std::max(residual, leak);
  }

  PhaseComparison cmp = equal_up_to_global_phase(sub, u, tol);
  VerifyReport rep;
  rep.phase = cmp.phase;
  rep.max_dev = cmp.max_dev;
  rep.ancilla_residual = residual;
  rep.ok = cmp.matches && residual <= tol;
  return rep;
}

}  // namespace qudit
