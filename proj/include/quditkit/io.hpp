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

#include "quditkit/iontrap.hpp"
#include "quditkit/synthesis.hpp"

#include <string>

namespace qudit {

// JSON documents; doubles are serialised shortest-round-trip, so every
// read(write(x)) is bit-exact.  All writes go through a temporary file in
// the same directory followed by a rename.  Malformed or inconsistent input
// raises ParseError.

struct UnitaryFile {
  int d = 2;
  int n = 1;
  ComplexMatrix matrix;  // d^n x d^n
};

UnitaryFile read_unitary(const std::string& path);
void write_unitary(const std::string& path, const UnitaryFile& u);

Circuit read_circuit(const std::string& path);
void write_circuit(const std::string& path, const Circuit& c);

PulseProgram read_pulse_program(const std::string& path);
void write_pulse_program(const std::string& path, const PulseProgram& p);

void write_synthesis_report(const std::string& path, const SynthesisReport& r);

/// Payload description consumed by the pulse solver front end:
/// an object with `d` and `coefficients` ([re, im] pairs, length d).
struct CoefficientFile {
  int d = 2;
  Eigen::VectorXcd coefficients;
};

CoefficientFile read_coefficients(const std::string& path);

/// Atomic text write used by every writer above.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace qudit
