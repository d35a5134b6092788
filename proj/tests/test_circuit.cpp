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
#include "quditkit/io.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace qudit;

namespace {

fs::path temp_dir() {
  static const fs::path p = [] {
    const fs::path q = fs::temp_directory_path() / "quditkit_circuit_tests";
    fs::remove_all(q);  // stale artifacts from previous runs must not leak in
    fs::create_directories(q);
    return q;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// A register-spanning sample circuit with every gate kind: local Z/X/P,
// two-qudit controlled gates, and one multi-controlled gate.
Circuit sample_circuit() {
  Circuit c(3, 3);
  c.append(Gate::z(0, random_state(3, 1)));
  c.append(Gate::x(1, 0.77));
  c.append(Gate::transposition(2, 0, 2));
  c.append(Gate::z(1, random_state(3, 2), {0}, true));
  c.append(Gate::x(2, -1.2, {1}));
  c.append(Gate::transposition(0, 1, 2, {2}));
  c.append(Gate::z(2, random_state(3, 3), {0, 1}));
  c.append(Gate::x(0, 2.5, {1, 2}));
  return c;
}

}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("append validates targets, controls, and payload shapes") {
  Circuit c(3, 2);
  CHECK_THROWS_AS(c.append(Gate::x(2, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::x(-1, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::x(0, 1.0, {0})), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::x(0, 1.0, {1, 1})), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::x(0, 1.0, {2})), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::z(0, random_state(4, 0))), std::invalid_argument);
  Eigen::VectorXcd unnorm(3);
  unnorm << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(c.append(Gate::z(0, unnorm)), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::transposition(0, 1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(c.append(Gate::transposition(0, 0, 3)), std::invalid_argument);
  CHECK_NOTHROW(c.append(Gate::z(1, random_state(3, 5), {0})));
}

TEST_CASE("kind labels encode family and control count") {
  CHECK(Gate::z(0, random_state(3, 0)).kind_label() == "Z");
  CHECK(Gate::x(0, 1.0, {1}).kind_label() == "C2X");
  CHECK(Gate::transposition(0, 0, 1, {1, 2}).kind_label() == "CNP");
  const Circuit c = sample_circuit();
  const auto counts = c.kind_counts();
  Index total = 0;
  for (const auto& [kind, cnt] : counts) total += cnt;
  CHECK(total == static_cast<Index>(c.gates.size()));
  CHECK(counts.at("Z") == 1);
  CHECK(counts.at("C2Z") == 1);
  CHECK(counts.at("CNX") == 1);
  CHECK(c.max_controls() == 2);
}

TEST_CASE("gate inner matrices fold the inverse flag into the Z family") {
  const StateVector c = random_state(3, 11);
  const Gate z = Gate::z(0, c);
  const Gate zdg = Gate::z(0, c, {}, true);
  const ComplexMatrix m = gate_inner_matrix(z, 3);
  const ComplexMatrix mdg = gate_inner_matrix(zdg, 3);
  CHECK((mdg - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  // the completion option selects a different family member
  const ExecOptions rev{ZdCompletion::ReverseBasis};
  const ComplexMatrix mr = gate_inner_matrix(z, 3, rev);
  CHECK((mr * c - m * c).cwiseAbs().maxCoeff() < 1e-13);  // same defining action
  CHECK((mr - m).cwiseAbs().maxCoeff() > 1e-3);           // different elsewhere
}

TEST_CASE("gate inverses compose to the identity") {
  const QuditSystem sys(3, 2);
  for (const Gate& g : {Gate::z(0, random_state(3, 21), {1}),
                        Gate::x(1, 0.9, {0}), Gate::transposition(1, 0, 2)}) {
    const ComplexMatrix a = gate_matrix(g, sys);
    const ComplexMatrix b = gate_matrix(g.inverse(), sys);
    CHECK((a * b - ComplexMatrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("strided application agrees with the embedded matrix on seeded states") {
  const Circuit c = sample_circuit();
  const QuditSystem sys = c.reg();
  for (const Gate& g : c.gates) {
    const ComplexMatrix m = gate_matrix(g, sys);
    CHECK(unitarity_deviation(m) < 1e-13);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      StateVector s = random_state(sys.dim(), seed);
      const StateVector want = m * s;
      apply_gate(g, sys, s);
      CHECK((s - want).cwiseAbs().maxCoeff() < 1e-13);
      CHECK(std::abs(s.norm() - 1.0) < 1e-13);  // norm preserved
    }
  }
}

TEST_CASE("circuit matrix equals the ordered product of gate matrices") {
  const Circuit c = sample_circuit();
  const QuditSystem sys = c.reg();
  ComplexMatrix prod = ComplexMatrix::Identity(sys.dim(), sys.dim());
  for (const Gate& g : c.gates) prod = gate_matrix(g, sys) * prod;
  const ComplexMatrix m = circuit_to_matrix(c);
  CHECK((m - prod).cwiseAbs().maxCoeff() < 1e-12);

  // and apply_circuit agrees on states
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    StateVector s = random_state(sys.dim(), seed);
    const StateVector want = m * s;
    apply_circuit(c, s);
    CHECK((s - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("inverted circuits undo their original") {
  const Circuit c = sample_circuit();
  const Circuit inv = c.inverted();
  CHECK(inv.gates.size() == c.gates.size());
  const ComplexMatrix prod = circuit_to_matrix(inv) * circuit_to_matrix(c);
  CHECK((prod - ComplexMatrix::Identity(prod.rows(), prod.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("verification accepts the circuit's own operator and flags mutations") {
  Circuit c = sample_circuit();
  const ComplexMatrix u = circuit_to_matrix(c);
  const VerifyReport ok = verify_synthesis(u, c, 1e-10);
  CHECK(ok.ok);
  CHECK(ok.max_dev < 1e-12);
  CHECK(ok.ancilla_residual == 0.0);

  Circuit mutated = c;
  mutated.gates.erase(mutated.gates.begin() + 2);
  const VerifyReport bad = verify_synthesis(u, mutated, 1e-10);
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_dev > 1e-3);
}

TEST_CASE("verification restricts to ancillas parked at zero") {
  // a single transposition on the ancilla leaves it excited: the report must
  // show the leaked population even though the computational block is clean
  Circuit c(3, 1, 1);
  c.append(Gate::transposition(1, 0, 1));
  const VerifyReport rep = verify_synthesis(ComplexMatrix::Identity(3, 3), c, 1e-10);
  CHECK_FALSE(rep.ok);
  CHECK(rep.ancilla_residual == doctest::Approx(1.0));
}

TEST_CASE("global phase alignment is reported") {
  Circuit c(3, 1);
  c.append(Gate::x(0, 1.0));
  ComplexMatrix u = std::exp(Cx(0.0, 0.4)) * circuit_to_matrix(c);
  const VerifyReport rep = verify_synthesis(u, c, 1e-10);
  CHECK(rep.ok);
  CHECK(rep.phase == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("circuit files round-trip bit-exactly") {
  const fs::path dir = temp_dir();
  const Circuit c = sample_circuit();
  const fs::path f = dir / "c.json";
  write_circuit(f.string(), c);
  const Circuit back = read_circuit(f.string());
  CHECK(back.d == c.d);
  CHECK(back.n == c.n);
  CHECK(back.aux == c.aux);
  REQUIRE(back.gates.size() == c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& a = c.gates[i];
    const Gate& b = back.gates[i];
    CHECK(a.family == b.family);
    CHECK(a.target == b.target);
    CHECK(a.controls == b.controls);
    CHECK(a.dagger == b.dagger);
    CHECK(a.phase == b.phase);  // bitwise: no precision loss through text
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    REQUIRE(a.coeffs.size() == b.coeffs.size());
    if (a.coeffs.size() > 0) {
      CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  const fs::path g = dir / "c2.json";
  write_circuit(g.string(), back);
  CHECK(slurp(f) == slurp(g));
}

TEST_CASE("circuit files reject structural mistakes") {
  const fs::path dir = temp_dir();
  const auto put = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    return (dir / name).string();
  };
  CHECK_THROWS_AS(read_circuit(put("k.json",
                                   R"({"d":3,"n":1,"gates":[{"kind":"Q","target":0,"params":{}}]})")),
                  ParseError);
  CHECK_THROWS_AS(read_circuit(put("ctl.json",
                                   R"({"d":3,"n":2,"gates":[{"kind":"C2X","target":0,"params":{"phase":1.0}}]})")),
                  ParseError);
  CHECK_THROWS_AS(read_circuit(put("dag.json",
                                   R"({"d":3,"n":1,"gates":[{"kind":"X","target":0,"dagger":true,"params":{"phase":1.0}}]})")),
                  ParseError);
  CHECK_THROWS_AS(read_circuit(put("coef.json",
                                   R"({"d":3,"n":1,"gates":[{"kind":"Z","target":0,"params":{"coefficients":[[1,0],[0,0]]}}]})")),
                  ParseError);
  CHECK_THROWS_AS(read_circuit(put("lvl.json",
                                   R"({"d":3,"n":1,"gates":[{"kind":"P","target":0,"params":{"levels":[0,0]}}]})")),
                  ParseError);
  CHECK_THROWS_AS(read_circuit(put("range.json",
                                   R"({"d":3,"n":1,"gates":[{"kind":"X","target":5,"params":{"phase":1.0}}]})")),
                  ParseError);
}

TEST_CASE("coefficient files parse into normalised vectors") {
  const fs::path dir = temp_dir();
  {
    std::ofstream out(dir / "coef.json", std::ios::binary);
    out << R"({"d":3,"coefficients":[[0.5773502691896258,0],[0.5773502691896258,0],[0.5773502691896258,0]]})";
  }
  const CoefficientFile cf = read_coefficients((dir / "coef.json").string());
  CHECK(cf.d == 3);
  REQUIRE(cf.coefficients.size() == 3);
  CHECK(std::abs(cf.coefficients.norm() - 1.0) < 1e-12);
  {
    std::ofstream out(dir / "short.json", std::ios::binary);
    out << R"({"d":3,"coefficients":[[1,0],[0,0]]})";
  }
  CHECK_THROWS_AS(read_coefficients((dir / "short.json").string()), ParseError);
}

}  // TEST_SUITE
