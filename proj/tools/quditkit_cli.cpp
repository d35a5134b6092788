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

#include "quditkit/io.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 2 parse/usage error, 3 verification failure,
// 4 unsupported configuration, 5 non-convergence.
constexpr int kOk = 0;
constexpr int kParse = 2;
constexpr int kVerifyFail = 3;
constexpr int kUnsupported = 4;
constexpr int kNoConverge = 5;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void kv(const char* key, double v) { std::cout << key << "=" << fmt(v) << "\n"; }
void kv(const char* key, long long v) { std::cout << key << "=" << v << "\n"; }
void kv(const char* key, bool v) { std::cout << key << "=" << (v ? 1 : 0) << "\n"; }

struct DecomposeArgs {
  std::string input;
  std::string out;
  double tol = 1e-8;
  bool no_lower = false;
};

int cmd_decompose(const DecomposeArgs& a) {
  const qudit::UnitaryFile uf = qudit::read_unitary(a.input);
  const qudit::QuditSystem sys(uf.d, uf.n);
  const double udev = qudit::unitarity_deviation(uf.matrix);
  if (udev > a.tol) {
    kv("unitarity_deviation", udev);
    std::cerr << "error: input matrix is not unitary within tol\n";
    return kVerifyFail;
  }
  qudit::SynthesisOptions opts;
  opts.tol = a.tol;
  opts.lower_to_two_qudit = !a.no_lower;
  const auto [circuit, report] = qudit::synthesize_unitary(uf.matrix, sys, opts);
  qudit::write_circuit(a.out, circuit);
  qudit::write_synthesis_report(a.out + ".report", report);
  kv("d", static_cast<long long>(uf.d));
  kv("n", static_cast<long long>(uf.n));
  kv("gates", static_cast<long long>(report.total_gates));
  kv("two_qudit", static_cast<long long>(report.two_qudit_gates));
  kv("r", static_cast<long long>(report.ancillas));
  kv("global_phase", report.global_phase);
  kv("max_deviation", report.max_deviation);
  kv("residual", report.ancilla_residual);
  kv("verified", report.verified);
  return report.verified ? kOk : kVerifyFail;
}

struct VerifyArgs {
  std::string unitary;
  std::string circuit;
  double tol = 1e-8;
};

int cmd_verify(const VerifyArgs& a) {
  const qudit::UnitaryFile uf = qudit::read_unitary(a.unitary);
  const qudit::Circuit circuit = qudit::read_circuit(a.circuit);
  if (circuit.d != uf.d || circuit.n != uf.n) {
    throw qudit::ParseError("unitary and circuit dimensions disagree");
  }
  const qudit::VerifyReport rep = qudit::verify_synthesis(uf.matrix, circuit, a.tol);
  kv("global_phase", rep.phase);
  kv("max_deviation", rep.max_dev);
  kv("residual", rep.ancilla_residual);
  kv("verified", rep.ok);
  return rep.ok ? kOk : kVerifyFail;
}

struct EstimateArgs {
  double N = 0;
  std::vector<int> d;
};

int cmd_estimate(const EstimateArgs& a) {
  kv("N", a.N);
  for (const int d : a.d) {
    const qudit::ResourceEstimate est = qudit::estimate_resources(a.N, d);
    std::cout << "d=" << d << " n=" << fmt(est.n) << " n2=" << fmt(est.n2)
              << " ratio=" << fmt(est.time_ratio) << "\n";
  }
  return kOk;
}

struct PulseArgs {
  std::string input;
  std::string out;
  std::string gate = "Z";
  double phase = 0.0;
  std::vector<int> levels;
  int d = 0;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int budget = 8;
  int nmax = 3;
  bool two_ion = false;
};

int cmd_pulse(const PulseArgs& a) {
  qudit::Gate payload;
  int d = a.d;
  if (a.gate == "Z") {
    if (a.input.empty()) {
      throw qudit::ParseError("a Z payload needs a coefficient file argument");
    }
    const qudit::CoefficientFile cf = qudit::read_coefficients(a.input);
    if (a.d != 0 && a.d != cf.d) {
      throw qudit::ParseError("--d disagrees with the coefficient file");
    }
    d = cf.d;
    payload = qudit::Gate::z(0, cf.coefficients);
  } else if (a.gate == "X") {
    if (d < 2) throw qudit::ParseError("--gate X needs --d");
    payload = qudit::Gate::x(0, a.phase);
  } else {
    if (d < 2) throw qudit::ParseError("--gate P needs --d");
    if (a.levels.size() != 2) throw qudit::ParseError("--gate P needs --levels p q");
    payload = qudit::Gate::transposition(0, a.levels[0], a.levels[1]);
  }

  qudit::ZdSolveOptions zopts;
  zopts.seed = a.seed;
  zopts.starts = a.budget;
  zopts.threshold = a.tol;

  const qudit::LevelScheme scheme = qudit::LevelScheme::standard(d);
  qudit::TrapConfig trap = qudit::TrapConfig::standard(a.two_ion ? 2 : 1);
  trap.n_max = a.nmax;
  trap.validate();

  if (a.two_ion) {
    const qudit::ProtocolResult res = qudit::gamma2_protocol(scheme, trap, payload, zopts);
    qudit::write_pulse_program(a.out, res.program);
    kv("segments", static_cast<long long>(res.program.segments.size()));
    kv("control_infidelity", res.control_infidelity);
    kv("subspace_leakage", res.subspace_leakage);
    kv("cutoff_leakage", res.cutoff_leakage);
    kv("converged", res.converged);
    return res.converged ? kOk : kNoConverge;
  }

  const qudit::LocalPulse res = qudit::single_qudit_pulse(scheme, trap, payload, zopts);
  qudit::write_pulse_program(a.out, res.program);
  double total_t = 0.0;
  for (const auto& seg : res.program.segments) total_t += seg.t;
  kv("segments", static_cast<long long>(res.program.segments.size()));
  kv("infidelity", res.infidelity);
  kv("phase", res.phase);
  kv("t_total", total_t);
  kv("converged", res.converged);
  return (res.converged && res.infidelity <= a.tol) ? kOk : kNoConverge;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-valued (qudit) quantum logic toolkit"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  CLI::App* decompose = app.add_subcommand(
      "decompose", "synthesize a unitary file into elementary gates");
  decompose->add_option("input", dec.input, "unitary file")->required();
  decompose->add_option("--out", dec.out, "circuit output path")->required();
  decompose->add_option("--tol", dec.tol, "verification tolerance")
      ->check(CLI::PositiveNumber);
  decompose->add_flag("--no-lower", dec.no_lower,
                      "keep multi-controlled gates instead of two-qudit chains");

  VerifyArgs ver;
  CLI::App* verify =
      app.add_subcommand("verify", "check a circuit file against a unitary file");
  verify->add_option("unitary", ver.unitary, "unitary file")->required();
  verify->add_option("circuit", ver.circuit, "circuit file")->required();
  verify->add_option("--tol", ver.tol, "verification tolerance")
      ->check(CLI::PositiveNumber);

  EstimateArgs est;
  CLI::App* estimate =
      app.add_subcommand("estimate", "resource estimates for an N-state space");
  estimate->add_option("--N", est.N, "state-space size")->required();
  estimate->add_option("--d", est.d, "qudit dimensions to tabulate")->required();

  PulseArgs pul;
  CLI::App* pulse =
      app.add_subcommand("pulse", "solve laser controls for an elementary gate");
  pulse->add_option("input", pul.input, "coefficient file for a Z payload");
  pulse->add_option("--out", pul.out, "pulse program output path")->required();
  pulse->add_option("--gate", pul.gate, "payload family")
      ->check(CLI::IsMember({"Z", "X", "P"}));
  pulse->add_option("--phase", pul.phase, "phase for an X payload (radians)");
  pulse->add_option("--levels", pul.levels, "levels p q for a P payload")
      ->expected(2);
  pulse->add_option("--d", pul.d, "qudit dimension");
  pulse->add_option("--tol", pul.tol, "infidelity threshold")
      ->check(CLI::PositiveNumber);
  pulse->add_option("--seed", pul.seed, "optimizer seed");
  pulse->add_option("--budget", pul.budget, "optimizer multi-start budget")
      ->check(CLI::PositiveNumber);
  pulse->add_option("--nmax", pul.nmax, "phonon cutoff")->check(CLI::PositiveNumber);
  pulse->add_flag("--two-ion", pul.two_ion,
                  "emit the two-ion controlled-gate protocol");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(dec);
    if (verify->parsed()) return cmd_verify(ver);
    if (estimate->parsed()) return cmd_estimate(est);
    if (pulse->parsed()) return cmd_pulse(pul);
  } catch (const qudit::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const qudit::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnsupported;
  } catch (const qudit::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}
