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

#include "quditkit/iontrap.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qudit {

namespace {

// Margin below which the closed-form control solutions divide by
// near-zero amplitudes and the optimiser takes over instead.
constexpr double kDegenerate = 1e-8;

double phase_arg(Cx z) { return std::abs(z) == 0.0 ? 0.0 : std::arg(z); }

void check_normalised(const Eigen::VectorXcd& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("state coefficients must be normalised");
  }
}

// Recompute infidelity and reduction phase of a control set by evolving the
// drive it describes; this is the number callers can trust.
void finish_controls(ZdControls& out, const Eigen::VectorXcd& psi) {
  const int d = static_cast<int>(psi.size());
  ComplexMatrix v = ComplexMatrix::Identity(d, d);
  if (out.t > 0.0) v = evolve(hamiltonian_v(d, out.rabi), out.t);
  const Cx amp = (v * psi)(d - 1);
  out.infidelity = std::max(0.0, 1.0 - std::norm(amp));
  out.phase = phase_arg(amp);
}

}  // namespace

LevelScheme LevelScheme::standard(int d) {
  LevelScheme s;
  s.d = d;
  s.frequencies = Eigen::VectorXd::Zero(d > 1 ? d - 1 : 0);
  for (int j = 0; j + 1 < d; ++j) s.frequencies(j) = 1.0 + 0.1 * j;
  s.validate();
  return s;
}

void LevelScheme::validate() const {
  if (d < 2) throw std::invalid_argument("level scheme needs d >= 2");
  if (frequencies.size() != d - 1) {
    throw std::invalid_argument("level scheme needs d-1 ladder frequencies");
  }
  for (Index i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies(i) > 0.0)) {
      throw std::invalid_argument("transition frequencies must be positive");
    }
    for (Index j = 0; j < i; ++j) {
      if (std::abs(frequencies(i) - frequencies(j)) < 1e-12) {
        throw std::invalid_argument("transition frequencies must be distinct");
      }
    }
  }
}

TrapConfig TrapConfig::standard(int q) {
  TrapConfig t;
  t.q = q;
  t.eta = Eigen::VectorXd::Constant(q, 0.1);
  t.validate();
  return t;
}

void TrapConfig::validate() const {
  if (q < 1) throw std::invalid_argument("trap needs at least one ion");
  if (!(nu_x > 0.0)) throw std::invalid_argument("trap frequency must be positive");
  if (eta.size() != q) throw std::invalid_argument("need one Lamb-Dicke parameter per ion");
  for (Index i = 0; i < eta.size(); ++i) {
    if (!(eta(i) > 0.0) || eta(i) >= 1.0) {
      throw std::invalid_argument("Lamb-Dicke parameters must lie in (0, 1)");
    }
    if (eta(i) > 0.3) {
      std::fprintf(stderr,
                   "note: Lamb-Dicke parameter %.3g exceeds 0.3; the first-order "
                   "sideband expansion degrades\n",
                   eta(i));
    }
  }
  if (n_max < 1) throw std::invalid_argument("phonon cutoff must be at least 1");
}

ComplexMatrix hamiltonian_v(int d, const std::vector<Cx>& rabi) {
  if (d < 2) throw std::invalid_argument("hamiltonian_v needs d >= 2");
  if (rabi.size() != static_cast<std::size_t>(d - 1)) {
    throw std::invalid_argument("hamiltonian_v needs d-1 Rabi frequencies");
  }
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) {
    h(j + 1, j) = -rabi[static_cast<std::size_t>(j)];
    h(j, j + 1) = -std::conj(rabi[static_cast<std::size_t>(j)]);
  }
  return h;
}

ComplexMatrix hamiltonian_u(int d, const TrapConfig& trap,
                            const std::vector<Cx>& rabi, int sign, int ion) {
  if (d < 2) throw std::invalid_argument("hamiltonian_u needs d >= 2");
  if (rabi.size() != static_cast<std::size_t>(d - 1)) {
    throw std::invalid_argument("hamiltonian_u needs d-1 Rabi frequencies");
  }
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("sideband sign must be +1 or -1");
  }
  trap.validate();
  if (ion < 0 || ion >= trap.q) throw std::invalid_argument("ion index out of range");
  const int p = trap.n_max + 1;
  ComplexMatrix raise = ComplexMatrix::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) raise(j + 1, j) = rabi[static_cast<std::size_t>(j)];
  ComplexMatrix mode = ComplexMatrix::Zero(p, p);
  for (int n = 0; n + 1 < p; ++n) {
    if (sign > 0) {
      mode(n + 1, n) = std::sqrt(double(n + 1));  // creation
    } else {
      mode(n, n + 1) = std::sqrt(double(n + 1));  // annihilation
    }
  }
  const double kappa = trap.eta(ion) / std::sqrt(double(trap.q));
  ComplexMatrix coupling = kappa * tensor_product(raise, mode);
  return coupling + coupling.adjoint();
}

ComplexMatrix evolve(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols()) throw std::invalid_argument("evolve needs a square matrix");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("evolve needs a Hermitian generator");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed in evolve");
  }
  Eigen::VectorXcd ph(h.rows());
  for (Index i = 0; i < h.rows(); ++i) ph(i) = std::exp(Cx(0.0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

std::optional<ZdControls> solve_z2_controls(Cx c0, Cx c1) {
  Eigen::VectorXcd psi(2);
  psi << c0, c1;
  check_normalised(psi);
  if (std::abs(c1) <= kDegenerate) return std::nullopt;
  ZdControls out;
  if (std::abs(c0) <= kDegenerate) {
    out.rabi = {Cx(0.0, 0.0)};
    out.t = 0.0;
  } else {
    out.rabi = {std::conj(c0) * c1 / (Cx(0.0, 1.0) * std::abs(c0 * c1))};
    out.t = std::acos(std::clamp(std::abs(c1), 0.0, 1.0));
  }
  finish_controls(out, psi);
  return out;
}

std::optional<ZdControls> solve_z3_controls(Cx c0, Cx c1, Cx c2) {
  Eigen::VectorXcd psi(3);
  psi << c0, c1, c2;
  check_normalised(psi);
  const double a2 = std::abs(c2);
  if (1.0 - a2 <= kDegenerate) {
    ZdControls out;
    out.rabi = {Cx(0.0, 0.0), Cx(0.0, 0.0)};
    out.t = 0.0;
    finish_controls(out, psi);
    return out;
  }
  if (std::abs(c1) <= kDegenerate || a2 <= kDegenerate) return std::nullopt;
  // The rotation angle is pinned first; both Rabi ratios follow from it and
  // normalisation guarantees |om01|^2 + |om12|^2 = 1 identically.
  const double cosv = std::clamp(std::norm(c1) / (1.0 - a2) - 1.0, -1.0, 1.0);
  const double sinv = std::sqrt(std::max(0.0, 1.0 - cosv * cosv));
  if (sinv <= kDegenerate) return std::nullopt;
  const Cx om01 =
      std::conj(c0) * c1 / (Cx(0.0, 1.0) * std::norm(c1)) * (sinv / (1.0 - cosv));
  const Cx om12 = std::conj(c1) * c2 / (Cx(0.0, 1.0) * sinv * a2);
  ZdControls out;
  out.rabi = {om01, om12};
  out.t = std::acos(cosv);
  finish_controls(out, psi);
  return out;
}

namespace {

struct ZdObjective {
  const Eigen::VectorXcd* psi;
  int d;
};

// Infidelity 1 - |<d-1| exp(i K(u)) psi>|^2 over the packed drive areas
// u_j = Omega_j t (x = [Re u_0, Im u_0, ...]), with the analytic gradient
// from the divided differences of exp(i lambda) across the spectrum of K.
void zd_eval(const gsl_vector* x, void* params, double* f_out, gsl_vector* g_out) {
  const auto& ctx = *static_cast<const ZdObjective*>(params);
  const int d = ctx.d;
  ComplexMatrix k = ComplexMatrix::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) {
    const Cx u(gsl_vector_get(x, 2 * j), gsl_vector_get(x, 2 * j + 1));
    k(j + 1, j) = u;
    k(j, j + 1) = std::conj(u);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const ComplexMatrix& q = es.eigenvectors();
  const Eigen::VectorXcd w = q.adjoint() * (*ctx.psi);
  Eigen::VectorXcd ph(d);
  for (int a = 0; a < d; ++a) ph(a) = std::exp(Cx(0.0, lam(a)));
  Cx z(0.0, 0.0);
  for (int a = 0; a < d; ++a) z += q(d - 1, a) * ph(a) * w(a);
  if (f_out) *f_out = 1.0 - std::norm(z);
  if (!g_out) return;

  ComplexMatrix g(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double half = 0.5 * (lam(a) - lam(b));
      const double sinc =
          std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
      g(a, b) = std::exp(Cx(0.0, 0.5 * (lam(a) + lam(b)))) * Cx(0.0, sinc);
    }
  }
  for (int j = 0; j + 1 < d; ++j) {
    Cx dz_re(0.0, 0.0);
    Cx dz_im(0.0, 0.0);
    for (int a = 0; a < d; ++a) {
      const Cx qa_up = std::conj(q(j + 1, a));
      const Cx qa_lo = std::conj(q(j, a));
      const Cx pref = q(d - 1, a);
      for (int b = 0; b < d; ++b) {
        const Cx core = pref * g(a, b) * w(b);
        const Cx fwd = qa_up * q(j, b);
        const Cx bwd = qa_lo * q(j + 1, b);
        dz_re += core * (fwd + bwd);
        dz_im += core * Cx(0.0, 1.0) * (fwd - bwd);
      }
    }
    gsl_vector_set(g_out, 2 * j, -2.0 * std::real(std::conj(z) * dz_re));
    gsl_vector_set(g_out, 2 * j + 1, -2.0 * std::real(std::conj(z) * dz_im));
  }
}

double zd_f(const gsl_vector* x, void* params) {
  double f = 0.0;
  zd_eval(x, params, &f, nullptr);
  return f;
}

void zd_df(const gsl_vector* x, void* params, gsl_vector* g) {
  zd_eval(x, params, nullptr, g);
}

void zd_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* g) {
  zd_eval(x, params, f, g);
}

double zd_value(const Eigen::VectorXd& x, ZdObjective& ctx) {
  gsl_vector_const_view view =
      gsl_vector_const_view_array(x.data(), static_cast<std::size_t>(x.size()));
  return zd_f(&view.vector, &ctx);
}

// Sharpen a near-solution by Newton steps on the square residual system
// F(u) = components 0..d-2 of exp(i K(u)) psi.  ||F||^2 equals the
// infidelity, so the minimiser alone leaves a state error of sqrt(f_floor)
// ~ 1e-8; driving the residual equations to zero instead reaches ~1e-15.
// The solve is rank-tolerant because a common drive-phase gauge leaves a
// one-parameter family of roots.
void zd_newton_polish(Eigen::VectorXd& x, const ZdObjective& ctx) {
  const int d = ctx.d;
  const int np = 2 * (d - 1);
  Eigen::VectorXd cur = x;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 12; ++it) {
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    for (int j = 0; j + 1 < d; ++j) {
      const Cx u(cur(2 * j), cur(2 * j + 1));
      k(j + 1, j) = u;
      k(j, j + 1) = std::conj(u);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const ComplexMatrix& q = es.eigenvectors();
    const Eigen::VectorXcd w = q.adjoint() * (*ctx.psi);
    Eigen::VectorXcd ew(d);
    for (int a = 0; a < d; ++a) ew(a) = std::exp(Cx(0.0, lam(a))) * w(a);
    const Eigen::VectorXcd v = q * ew;

    Eigen::VectorXd resid(np);
    for (int j = 0; j + 1 < d; ++j) {
      resid(2 * j) = std::real(v(j));
      resid(2 * j + 1) = std::imag(v(j));
    }
    const double rnorm = resid.norm();
    if (rnorm < best_norm) {
      best_norm = rnorm;
      x = cur;
    }
    if (rnorm < 1e-15 || rnorm > 10.0 * best_norm) break;

    ComplexMatrix g(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double half = 0.5 * (lam(a) - lam(b));
        const double sinc =
            std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
        g(a, b) = std::exp(Cx(0.0, 0.5 * (lam(a) + lam(b)))) * Cx(0.0, sinc);
      }
    }
    Eigen::MatrixXd jac(np, np);
    ComplexMatrix dk = ComplexMatrix::Zero(d, d);
    for (int col = 0; col < np; ++col) {
      const int j = col / 2;
      if (col % 2 == 0) {
        dk(j + 1, j) = Cx(1.0, 0.0);
        dk(j, j + 1) = Cx(1.0, 0.0);
      } else {
        dk(j + 1, j) = Cx(0.0, 1.0);
        dk(j, j + 1) = Cx(0.0, -1.0);
      }
      const ComplexMatrix m = q.adjoint() * dk * q;
      const Eigen::VectorXcd dv = q * (g.cwiseProduct(m) * w);
      for (int r = 0; r + 1 < d; ++r) {
        jac(2 * r, col) = std::real(dv(r));
        jac(2 * r + 1, col) = std::imag(dv(r));
      }
      dk(j + 1, j) = Cx(0.0, 0.0);
      dk(j, j + 1) = Cx(0.0, 0.0);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
    cur += cod.solve(-resid);
  }
}

}  // namespace

ZdControls solve_zd_controls(const Eigen::VectorXcd& coeffs, const ZdSolveOptions& opts) {
  const int d = static_cast<int>(coeffs.size());
  if (d < 2) throw std::invalid_argument("solve_zd_controls needs d >= 2");
  check_normalised(coeffs);
  gsl_set_error_handler_off();

  const int np = 2 * (d - 1);
  ZdObjective ctx{&coeffs, d};

  gsl_multimin_function_fdf fdf;
  fdf.n = static_cast<std::size_t>(np);
  fdf.f = &zd_f;
  fdf.df = &zd_df;
  fdf.fdf = &zd_fdf;
  fdf.params = &ctx;

  Eigen::VectorXd best = Eigen::VectorXd::Zero(np);
  double best_f = zd_value(best, ctx);  // the state may already be reduced

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  gsl_vector* x0 = gsl_vector_alloc(static_cast<std::size_t>(np));
  gsl_multimin_fdfminimizer* mini = gsl_multimin_fdfminimizer_alloc(
      gsl_multimin_fdfminimizer_vector_bfgs2, static_cast<std::size_t>(np));

  for (int s = 0; s < opts.starts && best_f > 1e-13; ++s) {
    if (s == 0) {
      // Uniform quarter-turn ladder: lands close for broad superpositions.
      for (int j = 0; j + 1 < d; ++j) {
        gsl_vector_set(x0, 2 * j, 0.0);
        gsl_vector_set(x0, 2 * j + 1, M_PI / 2.0);
      }
    } else {
      const double scale = 0.4 + 0.3 * s;
      for (int i = 0; i < np; ++i) gsl_vector_set(x0, i, scale * gauss(rng));
    }
    gsl_multimin_fdfminimizer_set(mini, &fdf, x0, 0.25, 0.1);
    for (int it = 0; it < opts.max_iter; ++it) {
      if (gsl_multimin_fdfminimizer_iterate(mini) != GSL_SUCCESS) break;
      if (mini->f < 1e-15) break;
      if (gsl_multimin_test_gradient(mini->gradient, 1e-13) == GSL_SUCCESS) break;
    }
    if (mini->f < best_f) {
      best_f = mini->f;
      for (int i = 0; i < np; ++i) best(i) = gsl_vector_get(mini->x, i);
    }
  }
  gsl_multimin_fdfminimizer_free(mini);
  gsl_vector_free(x0);

  if (best_f < 1e-6) zd_newton_polish(best, ctx);

  Eigen::VectorXcd u(d - 1);
  for (int j = 0; j + 1 < d; ++j) u(j) = Cx(best(2 * j), best(2 * j + 1));
  const double umax = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;

  ZdControls out;
  out.rabi.assign(static_cast<std::size_t>(d - 1), Cx(0.0, 0.0));
  out.t = 0.0;
  if (umax >= 1e-12) {
    // Constant drives only fix the product Omega t; pick t = 1 and stretch
    // it when the amplitude bound would otherwise be exceeded.
    double t = std::max(1.0, umax / opts.omega_max);
    t = std::min(t, opts.t_max);
    for (int j = 0; j + 1 < d; ++j) out.rabi[static_cast<std::size_t>(j)] = u(j) / t;
    out.t = t;
  }
  finish_controls(out, coeffs);
  out.converged = out.infidelity <= opts.threshold &&
                  umax <= opts.omega_max * opts.t_max * (1.0 + 1e-12);
  return out;
}

ZdControls solve_z_controls(const Eigen::VectorXcd& coeffs, const ZdSolveOptions& opts) {
  if (coeffs.size() == 2) {
    if (auto r = solve_z2_controls(coeffs(0), coeffs(1))) return *r;
  } else if (coeffs.size() == 3) {
    if (auto r = solve_z3_controls(coeffs(0), coeffs(1), coeffs(2))) return *r;
  }
  return solve_zd_controls(coeffs, opts);
}

PhasePulse two_pi_phase_pulse(Cx omega, double delta) {
  const double om = std::abs(omega);
  if (!(om > 0.0)) throw std::invalid_argument("phase pulse needs a nonzero drive");
  const double omp = std::sqrt(om * om + 0.25 * delta * delta);
  PhasePulse out;
  out.t = M_PI / omp;
  ComplexMatrix h(2, 2);
  h << Cx(0.0, 0.0), -std::conj(omega), -omega, Cx(-delta, 0.0);
  ComplexMatrix u = evolve(h, out.t);
  u.row(1) *= std::exp(Cx(0.0, -delta * out.t));  // back to the bare frame
  double ph = std::arg(u(0, 0));
  if (ph < 0.0) ph += 2.0 * M_PI;
  out.phase = ph;
  out.residual = std::abs(u(1, 0));
  return out;
}

double detuning_for_phase(double phase, double omega_mag) {
  if (!(omega_mag > 0.0)) throw std::invalid_argument("phase inversion needs |Omega| > 0");
  double target = std::fmod(phase, 2.0 * M_PI);
  if (target < 0.0) target += 2.0 * M_PI;
  if (target < 1e-9 || target > 2.0 * M_PI - 1e-9) {
    throw std::invalid_argument("requested phase outside the invertible range");
  }
  const auto measured = [&](double delta) {
    return two_pi_phase_pulse(Cx(omega_mag, 0.0), delta).phase;
  };
  double lo = -2.0 * omega_mag;
  double hi = 2.0 * omega_mag;
  for (int i = 0; i < 80 && measured(lo) > target; ++i) lo *= 2.0;
  for (int i = 0; i < 80 && measured(hi) < target; ++i) hi *= 2.0;
  double mid = 0.0;
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double got = measured(mid);
    if (std::abs(got - target) < 1e-14) break;
    if (got < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return mid;
}

namespace {

std::vector<std::pair<int, int>> resolved_pairs(const PulseSegment& seg, int d) {
  if (!seg.pairs.empty()) return seg.pairs;
  std::vector<std::pair<int, int>> ladder;
  for (int j = 0; j + 1 < d; ++j) ladder.emplace_back(j, j + 1);
  return ladder;
}

ComplexMatrix tensor_ions(const ComplexMatrix& op, int ion, int q) {
  const Index l = op.rows();
  ComplexMatrix m = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < q; ++i) {
    if (i == ion) {
      m = tensor_product(m, op);
    } else {
      m = tensor_product(m, ComplexMatrix::Identity(l, l));
    }
  }
  return m;
}

}  // namespace

ComplexMatrix segment_operator(const PulseSegment& seg, const LevelScheme& scheme,
                               const TrapConfig& trap) {
  const int d = scheme.d;
  const int l = scheme.levels();
  const int p = trap.n_max + 1;
  if (seg.ion < 0 || seg.ion >= trap.q) {
    throw std::invalid_argument("segment addresses an ion outside the trap");
  }
  if (seg.t < 0.0) throw std::invalid_argument("segment duration must be nonnegative");
  const auto pairs = resolved_pairs(seg, d);
  if (seg.rabi.size() != pairs.size()) {
    throw std::invalid_argument("segment needs one Rabi frequency per driven pair");
  }
  for (const auto& [lo, hi] : pairs) {
    if (lo < 0 || lo >= l || hi < 0 || hi >= l || lo == hi) {
      throw std::invalid_argument("segment drives an invalid level pair");
    }
  }
  const bool standing = seg.interaction == Interaction::V ||
                        seg.interaction == Interaction::AuxPhase;
  if (std::abs(seg.sw_phase - (standing ? 0.0 : M_PI / 2.0)) > 1e-9) {
    throw std::invalid_argument(
        "standing-wave phase must be 0 for internal drives and pi/2 for sidebands");
  }

  if (seg.interaction == Interaction::AuxPhase) {
    if (pairs.size() != 1) {
      throw std::invalid_argument("a phase pulse drives exactly one level pair");
    }
    const auto [g_lv, e_lv] = pairs[0];
    ComplexMatrix h2(2, 2);
    h2 << Cx(0.0, 0.0), -std::conj(seg.rabi[0]), -seg.rabi[0], Cx(-seg.detuning, 0.0);
    ComplexMatrix u2 = evolve(h2, seg.t);
    u2.row(1) *= std::exp(Cx(0.0, -seg.detuning * seg.t));
    ComplexMatrix ul = ComplexMatrix::Identity(l, l);
    ul(g_lv, g_lv) = u2(0, 0);
    ul(g_lv, e_lv) = u2(0, 1);
    ul(e_lv, g_lv) = u2(1, 0);
    ul(e_lv, e_lv) = u2(1, 1);
    return tensor_product(tensor_ions(ul, seg.ion, trap.q),
                          ComplexMatrix::Identity(p, p));
  }

  ComplexMatrix raise = ComplexMatrix::Zero(l, l);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    raise(pairs[k].second, pairs[k].first) += seg.rabi[k];
  }
  ComplexMatrix h;
  if (seg.interaction == Interaction::V) {
    ComplexMatrix hion = -(raise + raise.adjoint());
    h = tensor_product(tensor_ions(hion, seg.ion, trap.q),
                       ComplexMatrix::Identity(p, p));
  } else {
    ComplexMatrix mode = ComplexMatrix::Zero(p, p);
    for (int n = 0; n + 1 < p; ++n) {
      if (seg.interaction == Interaction::Uplus) {
        mode(n + 1, n) = std::sqrt(double(n + 1));
      } else {
        mode(n, n + 1) = std::sqrt(double(n + 1));
      }
    }
    const double kappa = trap.eta(seg.ion) / std::sqrt(double(trap.q));
    ComplexMatrix coupling =
        kappa * tensor_product(tensor_ions(raise, seg.ion, trap.q), mode);
    h = coupling + coupling.adjoint();
  }
  return evolve(h, seg.t);
}

ComplexMatrix simulate_program(const PulseProgram& prog) {
  prog.scheme.validate();
  prog.trap.validate();
  if (prog.d != prog.scheme.d) {
    throw std::invalid_argument("program dimension disagrees with its level scheme");
  }
  Index dim = prog.trap.n_max + 1;
  for (int i = 0; i < prog.trap.q; ++i) dim *= prog.scheme.levels();
  ComplexMatrix op = ComplexMatrix::Identity(dim, dim);
  for (const auto& seg : prog.segments) {
    op = segment_operator(seg, prog.scheme, prog.trap) * op;
  }
  return op;
}

namespace {

struct PayloadPlan {
  std::vector<PulseSegment> segments;
  ComplexMatrix realized;
  double infidelity = 0.0;
  double phase = 0.0;
  bool converged = true;
};

PulseSegment ladder_segment(int ion, const std::vector<Cx>& rabi, double t) {
  PulseSegment seg;
  seg.interaction = Interaction::V;
  seg.ion = ion;
  seg.rabi = rabi;
  seg.t = t;
  return seg;
}

PulseSegment phase_segment(int d, int ion, Cx omega, double delta, double t) {
  PulseSegment seg;
  seg.interaction = Interaction::AuxPhase;
  seg.ion = ion;
  seg.rabi = {omega};
  seg.t = t;
  seg.detuning = delta;
  seg.pairs = {{d - 1, 2 * d}};
  return seg;
}

// Segments realising a local gate on one ion's computational manifold, plus
// the d x d unitary they actually implement there.  Non-converged drive
// solutions still produce the best program found, flagged for the caller.
PayloadPlan plan_payload(int d, int ion, const Gate& payload,
                         const ZdSolveOptions& zopts) {
  if (!payload.controls.empty()) {
    throw std::invalid_argument("pulse payload must be a single-qudit gate");
  }
  PayloadPlan plan;
  plan.realized = ComplexMatrix::Identity(d, d);
  switch (payload.family) {
    case GateFamily::Z: {
      if (payload.coeffs.size() != d) {
        throw std::invalid_argument("payload coefficient count disagrees with d");
      }
      ZdControls ctrl = solve_z_controls(payload.coeffs, zopts);
      plan.infidelity = ctrl.infidelity;
      plan.phase = ctrl.phase;
      plan.converged = ctrl.converged;
      std::vector<Cx> rabi = ctrl.rabi;
      if (payload.dagger) {
        for (auto& r : rabi) r = -r;
      }
      if (ctrl.t > 0.0) {
        plan.segments.push_back(ladder_segment(ion, rabi, ctrl.t));
        plan.realized = evolve(hamiltonian_v(d, rabi), ctrl.t);
      }
      break;
    }
    case GateFamily::X: {
      double phi = payload.dagger ? -payload.phase : payload.phase;
      phi = std::fmod(phi, 2.0 * M_PI);
      if (phi < 0.0) phi += 2.0 * M_PI;
      if (phi > 1e-9 && phi < 2.0 * M_PI - 1e-9) {
        const double om = 1.0;
        const double delta = detuning_for_phase(phi, om);
        const PhasePulse pulse = two_pi_phase_pulse(Cx(om, 0.0), delta);
        plan.segments.push_back(phase_segment(d, ion, Cx(om, 0.0), delta, pulse.t));
        plan.realized(d - 1, d - 1) = std::exp(Cx(0.0, pulse.phase));
        plan.infidelity = pulse.residual * pulse.residual;
        plan.phase = pulse.phase;
      }
      break;
    }
    case GateFamily::P: {
      if (payload.p < 0 || payload.p >= d || payload.q < 0 || payload.q >= d ||
          payload.p == payload.q) {
        throw std::invalid_argument("transposition levels out of range");
      }
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
      psi(payload.p) = 1.0 / std::sqrt(2.0);
      psi(payload.q) = -1.0 / std::sqrt(2.0);
      ZdControls ctrl = solve_z_controls(psi, zopts);
      plan.infidelity = ctrl.infidelity;
      plan.phase = ctrl.phase;
      plan.converged = ctrl.converged;
      std::vector<Cx> back = ctrl.rabi;
      for (auto& r : back) r = -r;
      const PhasePulse pulse = two_pi_phase_pulse(Cx(1.0, 0.0), 0.0);
      ComplexMatrix v = ComplexMatrix::Identity(d, d);
      if (ctrl.t > 0.0) {
        plan.segments.push_back(ladder_segment(ion, ctrl.rabi, ctrl.t));
        v = evolve(hamiltonian_v(d, ctrl.rabi), ctrl.t);
      }
      plan.segments.push_back(phase_segment(d, ion, Cx(1.0, 0.0), 0.0, pulse.t));
      if (ctrl.t > 0.0) plan.segments.push_back(ladder_segment(ion, back, ctrl.t));
      ComplexMatrix flip = ComplexMatrix::Identity(d, d);
      flip(d - 1, d - 1) = std::exp(Cx(0.0, pulse.phase));
      plan.realized = v.adjoint() * flip * v;
      break;
    }
  }
  return plan;
}

}  // namespace

LocalPulse single_qudit_pulse(const LevelScheme& scheme, const TrapConfig& trap,
                              const Gate& payload, const ZdSolveOptions& zopts) {
  scheme.validate();
  trap.validate();
  PayloadPlan plan = plan_payload(scheme.d, 0, payload, zopts);
  LocalPulse out;
  out.program.d = scheme.d;
  out.program.scheme = scheme;
  out.program.trap = trap;
  out.program.segments = std::move(plan.segments);
  out.realized = std::move(plan.realized);
  out.infidelity = plan.infidelity;
  out.phase = plan.phase;
  out.converged = plan.converged;
  return out;
}

ProtocolResult gamma2_protocol(const LevelScheme& scheme, const TrapConfig& trap,
                               const Gate& payload, const ZdSolveOptions& zopts) {
  scheme.validate();
  trap.validate();
  if (trap.q < 2) throw std::invalid_argument("the controlled gate needs two ions");
  const int d = scheme.d;
  const int l = scheme.levels();
  const int p = trap.n_max + 1;

  PulseProgram prog;
  prog.d = d;
  prog.scheme = scheme;
  prog.trap = trap;

  const double k0 = trap.eta(0) / std::sqrt(double(trap.q));
  const double k1 = trap.eta(1) / std::sqrt(double(trap.q));
  const auto pair_seg = [&](Interaction kind, int ion, int npairs, Cx om, double t) {
    PulseSegment seg;
    seg.interaction = kind;
    seg.ion = ion;
    seg.t = t;
    seg.sw_phase = kind == Interaction::V ? 0.0 : M_PI / 2.0;
    for (int j = 0; j < npairs; ++j) {
      seg.pairs.emplace_back(j, scheme.aux(j));
      seg.rabi.push_back(om);
    }
    return seg;
  };
  const Cx fwd(0.0, 1.0);
  const Cx rev(0.0, -1.0);

  // Park the control's levels 0..d-2 through the phonon bus, restore its
  // internal labels, then park every target level in the phonon-1 branch.
  prog.segments.push_back(pair_seg(Interaction::Uplus, 0, d - 1, fwd, M_PI / (2.0 * k0)));
  prog.segments.push_back(pair_seg(Interaction::V, 0, d - 1, fwd, M_PI / 2.0));
  prog.segments.push_back(pair_seg(Interaction::Uminus, 1, d, fwd, M_PI / (2.0 * k1)));
  PayloadPlan plan = plan_payload(d, 1, payload, zopts);
  for (const auto& seg : plan.segments) prog.segments.push_back(seg);
  prog.segments.push_back(pair_seg(Interaction::Uminus, 1, d, rev, M_PI / (2.0 * k1)));
  prog.segments.push_back(pair_seg(Interaction::V, 0, d - 1, rev, M_PI / 2.0));
  prog.segments.push_back(pair_seg(Interaction::Uplus, 0, d - 1, rev, M_PI / (2.0 * k0)));

  const auto fidx = [&](int a, int b, int n) {
    return (Index(a) * l + b) * p + n;
  };
  const Index dim = Index(l) * l * p;
  ComplexMatrix op = ComplexMatrix::Identity(dim, dim);
  double cutoff = 0.0;
  for (const auto& seg : prog.segments) {
    op = (segment_operator(seg, scheme, trap) * op).eval();
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        double top = 0.0;
        for (int l0 = 0; l0 < l; ++l0) {
          for (int l1 = 0; l1 < l; ++l1) {
            top += std::norm(op(fidx(l0, l1, p - 1), fidx(a, b, 0)));
          }
        }
        cutoff = std::max(cutoff, top);
      }
    }
  }

  ProtocolResult res;
  res.program = std::move(prog);
  res.realized_y = plan.realized;
  res.control_infidelity = plan.infidelity;
  res.converged = plan.converged;
  res.restricted = ComplexMatrix(d * d, d * d);
  double escaped = 0.0;
  for (int aj = 0; aj < d; ++aj) {
    for (int bj = 0; bj < d; ++bj) {
      const Index col = fidx(aj, bj, 0);
      double kept = 0.0;
      for (int ai = 0; ai < d; ++ai) {
        for (int bi = 0; bi < d; ++bi) {
          const Cx amp = op(fidx(ai, bi, 0), col);
          res.restricted(ai * d + bi, aj * d + bj) = amp;
          kept += std::norm(amp);
        }
      }
      escaped = std::max(escaped, 1.0 - kept);
    }
  }
  res.full_op = std::move(op);
  res.subspace_leakage = std::max(0.0, escaped);
  res.cutoff_leakage = cutoff;
  return res;
}

}  // namespace qudit
