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

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace qudit {

namespace {

using json = nlohmann::ordered_json;

json load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

const json& field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw ParseError(std::string("missing field `") + name + "`");
  }
  return *it;
}

int int_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field `") + name + "` must be an integer");
  }
  return v.get<int>();
}

double num_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number()) {
    throw ParseError(std::string("field `") + name + "` must be a number");
  }
  return v.get<double>();
}

Cx get_complex(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError("complex entries must be [re, im] pairs");
  }
  return Cx(v[0].get<double>(), v[1].get<double>());
}

json put_complex(Cx z) { return json::array({z.real(), z.imag()}); }

Eigen::VectorXcd get_complex_vector(const json& v, Index expect, const char* what) {
  if (!v.is_array() || static_cast<Index>(v.size()) != expect) {
    throw ParseError(std::string(what) + " must be an array of the declared length");
  }
  Eigen::VectorXcd out(expect);
  for (Index i = 0; i < expect; ++i) out(i) = get_complex(v[static_cast<std::size_t>(i)]);
  return out;
}

void dump_to(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("error while writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

UnitaryFile read_unitary(const std::string& path) {
  const json j = load(path);
  if (!j.is_object()) throw ParseError("unitary document must be an object");
  UnitaryFile u;
  u.d = int_field(j, "d");
  u.n = int_field(j, "n");
  if (u.d < 2 || u.n < 1) throw ParseError("unitary document needs d >= 2, n >= 1");
  Index dim = 1;
  for (int i = 0; i < u.n; ++i) {
    dim *= u.d;
    if (dim > (Index(1) << 24)) throw ParseError("dimension exceeds supported range");
  }
  const json& m = field(j, "matrix");
  if (!m.is_array() || static_cast<Index>(m.size()) != dim) {
    throw ParseError("matrix must be d^n x d^n");
  }
  u.matrix.resize(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    const json& row = m[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
      throw ParseError("matrix must be d^n x d^n");
    }
    for (Index c = 0; c < dim; ++c) {
      u.matrix(r, c) = get_complex(row[static_cast<std::size_t>(c)]);
    }
  }
  return u;
}

void write_unitary(const std::string& path, const UnitaryFile& u) {
  json j;
  j["d"] = u.d;
  j["n"] = u.n;
  json rows = json::array();
  for (Index r = 0; r < u.matrix.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < u.matrix.cols(); ++c) row.push_back(put_complex(u.matrix(r, c)));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  dump_to(path, j);
}

Circuit read_circuit(const std::string& path) {
  const json j = load(path);
  if (!j.is_object()) throw ParseError("circuit document must be an object");
  const int d = int_field(j, "d");
  const int n = int_field(j, "n");
  const int aux = j.contains("aux") ? int_field(j, "aux") : 0;
  Circuit c;
  try {
    c = Circuit(d, n, aux);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  const json& gates = field(j, "gates");
  if (!gates.is_array()) throw ParseError("`gates` must be an array");
  for (const json& rec : gates) {
    if (!rec.is_object()) throw ParseError("gate records must be objects");
    const json& kind_v = field(rec, "kind");
    if (!kind_v.is_string()) throw ParseError("gate `kind` must be a string");
    const std::string kind = kind_v.get<std::string>();
    std::string prefix;
    char letter = '\0';
    if (kind == "Z" || kind == "X" || kind == "P") {
      letter = kind[0];
    } else if (kind.size() == 3 && (kind.rfind("C2", 0) == 0 || kind.rfind("CN", 0) == 0)) {
      prefix = kind.substr(0, 2);
      letter = kind[2];
      if (letter != 'Z' && letter != 'X' && letter != 'P') letter = '\0';
    }
    if (letter == '\0') throw ParseError("unknown gate kind `" + kind + "`");

    const int target = int_field(rec, "target");
    std::vector<int> controls;
    if (rec.contains("controls")) {
      const json& cv = rec["controls"];
      if (!cv.is_array()) throw ParseError("`controls` must be an array");
      for (const json& e : cv) {
        if (!e.is_number_integer()) throw ParseError("control indices must be integers");
        controls.push_back(e.get<int>());
      }
    }
    const std::size_t nc = controls.size();
    const bool count_ok = prefix.empty() ? nc == 0 : (prefix == "C2" ? nc == 1 : nc >= 2);
    if (!count_ok) {
      throw ParseError("gate kind `" + kind + "` disagrees with its control count");
    }

    bool dagger = false;
    if (rec.contains("dagger")) {
      if (letter != 'Z' || !rec["dagger"].is_boolean()) {
        throw ParseError("`dagger` must be a boolean on Z-family records");
      }
      dagger = rec["dagger"].get<bool>();
    }

    const json& params = field(rec, "params");
    if (!params.is_object()) throw ParseError("gate `params` must be an object");
    try {
      Gate g;
      if (letter == 'Z') {
        g = Gate::z(target, get_complex_vector(field(params, "coefficients"), d,
                                               "`coefficients`"),
                    controls, dagger);
      } else if (letter == 'X') {
        g = Gate::x(target, num_field(params, "phase"), controls);
      } else {
        const json& lv = field(params, "levels");
        if (!lv.is_array() || lv.size() != 2 || !lv[0].is_number_integer() ||
            !lv[1].is_number_integer()) {
          throw ParseError("`levels` must be a pair of integers");
        }
        g = Gate::transposition(target, lv[0].get<int>(), lv[1].get<int>(), controls);
      }
      c.append(std::move(g));
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("invalid gate record: ") + e.what());
    }
  }
  return c;
}

void write_circuit(const std::string& path, const Circuit& c) {
  json j;
  j["d"] = c.d;
  j["n"] = c.n;
  j["aux"] = c.aux;
  json arr = json::array();
  for (const Gate& g : c.gates) {
    json rec;
    rec["kind"] = g.kind_label();
    rec["target"] = g.target;
    if (!g.controls.empty()) rec["controls"] = g.controls;
    json params;
    switch (g.family) {
      case GateFamily::Z: {
        json coeffs = json::array();
        for (Index i = 0; i < g.coeffs.size(); ++i) {
          coeffs.push_back(put_complex(g.coeffs(i)));
        }
        params["coefficients"] = std::move(coeffs);
        break;
      }
      case GateFamily::X:
        params["phase"] = g.phase;
        break;
      case GateFamily::P:
        params["levels"] = json::array({g.p, g.q});
        break;
    }
    rec["params"] = std::move(params);
    if (g.dagger) rec["dagger"] = true;
    arr.push_back(std::move(rec));
  }
  j["gates"] = std::move(arr);
  dump_to(path, j);
}

PulseProgram read_pulse_program(const std::string& path) {
  const json j = load(path);
  if (!j.is_object()) throw ParseError("pulse document must be an object");
  PulseProgram p;
  p.d = int_field(j, "d");

  const json& freq = field(j, "scheme");
  if (!freq.is_array()) throw ParseError("`scheme` must be a frequency array");
  LevelScheme scheme;
  scheme.d = p.d;
  scheme.frequencies.resize(static_cast<Index>(freq.size()));
  for (Index i = 0; i < scheme.frequencies.size(); ++i) {
    const json& v = freq[static_cast<std::size_t>(i)];
    if (!v.is_number()) throw ParseError("scheme frequencies must be numbers");
    scheme.frequencies(i) = v.get<double>();
  }

  const json& trap = field(j, "trap");
  if (!trap.is_object()) throw ParseError("`trap` must be an object");
  TrapConfig tc;
  tc.nu_x = num_field(trap, "nu_x");
  tc.q = int_field(trap, "q");
  tc.n_max = int_field(trap, "n_max");
  const json& eta = field(trap, "eta");
  if (!eta.is_array()) throw ParseError("`eta` must be an array");
  tc.eta.resize(static_cast<Index>(eta.size()));
  for (Index i = 0; i < tc.eta.size(); ++i) {
    const json& v = eta[static_cast<std::size_t>(i)];
    if (!v.is_number()) throw ParseError("Lamb-Dicke parameters must be numbers");
    tc.eta(i) = v.get<double>();
  }
  try {
    scheme.validate();
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  p.scheme = std::move(scheme);
  p.trap = std::move(tc);

  const json& segs = field(j, "segments");
  if (!segs.is_array()) throw ParseError("`segments` must be an array");
  for (const json& rec : segs) {
    if (!rec.is_object()) throw ParseError("segments must be objects");
    PulseSegment s;
    const json& kind = field(rec, "interaction");
    if (!kind.is_string()) throw ParseError("`interaction` must be a string");
    const std::string label = kind.get<std::string>();
    if (label == "V") {
      s.interaction = Interaction::V;
    } else if (label == "U+") {
      s.interaction = Interaction::Uplus;
    } else if (label == "U-") {
      s.interaction = Interaction::Uminus;
    } else if (label == "AUX") {
      s.interaction = Interaction::AuxPhase;
    } else {
      throw ParseError("unknown interaction `" + label + "`");
    }
    const json& rabi = field(rec, "rabi");
    if (!rabi.is_array() || rabi.empty()) {
      throw ParseError("`rabi` must be a nonempty array of [re, im] pairs");
    }
    for (const json& v : rabi) s.rabi.push_back(get_complex(v));
    s.t = num_field(rec, "t");
    s.sw_phase = num_field(rec, "sw_phase");
    if (rec.contains("ion")) s.ion = int_field(rec, "ion");
    if (rec.contains("detuning")) s.detuning = num_field(rec, "detuning");
    if (rec.contains("pairs")) {
      const json& pv = rec["pairs"];
      if (!pv.is_array()) throw ParseError("`pairs` must be an array");
      for (const json& pr : pv) {
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() ||
            !pr[1].is_number_integer()) {
          throw ParseError("driven pairs must be [lower, upper] integer pairs");
        }
        s.pairs.emplace_back(pr[0].get<int>(), pr[1].get<int>());
      }
    }
    p.segments.push_back(std::move(s));
  }
  return p;
}

void write_pulse_program(const std::string& path, const PulseProgram& p) {
  if (p.scheme.d != p.d) {
    throw std::invalid_argument("pulse program dimension disagrees with its scheme");
  }
  json j;
  j["d"] = p.d;
  json freq = json::array();
  for (Index i = 0; i < p.scheme.frequencies.size(); ++i) {
    freq.push_back(p.scheme.frequencies(i));
  }
  j["scheme"] = std::move(freq);
  json trap;
  trap["nu_x"] = p.trap.nu_x;
  trap["q"] = p.trap.q;
  json eta = json::array();
  for (Index i = 0; i < p.trap.eta.size(); ++i) eta.push_back(p.trap.eta(i));
  trap["eta"] = std::move(eta);
  trap["n_max"] = p.trap.n_max;
  j["trap"] = std::move(trap);
  json segs = json::array();
  for (const PulseSegment& s : p.segments) {
    json rec;
    switch (s.interaction) {
      case Interaction::V:
        rec["interaction"] = "V";
        break;
      case Interaction::Uplus:
        rec["interaction"] = "U+";
        break;
      case Interaction::Uminus:
        rec["interaction"] = "U-";
        break;
      case Interaction::AuxPhase:
        rec["interaction"] = "AUX";
        break;
    }
    json rabi = json::array();
    for (const Cx& om : s.rabi) rabi.push_back(put_complex(om));
    rec["rabi"] = std::move(rabi);
    rec["t"] = s.t;
    rec["sw_phase"] = s.sw_phase;
    rec["ion"] = s.ion;
    if (!s.pairs.empty()) {
      json pv = json::array();
      for (const auto& [lo, hi] : s.pairs) pv.push_back(json::array({lo, hi}));
      rec["pairs"] = std::move(pv);
    }
    if (s.interaction == Interaction::AuxPhase) rec["detuning"] = s.detuning;
    segs.push_back(std::move(rec));
  }
  j["segments"] = std::move(segs);
  dump_to(path, j);
}

void write_synthesis_report(const std::string& path, const SynthesisReport& r) {
  json j;
  j["global_phase"] = r.global_phase;
  j["max_deviation"] = r.max_deviation;
  json counts;
  for (const auto& [kind, count] : r.gate_counts) {
    counts[kind] = static_cast<long long>(count);
  }
  j["counts"] = std::move(counts);
  j["r"] = r.ancillas;
  j["residual"] = r.ancilla_residual;
  dump_to(path, j);
}

CoefficientFile read_coefficients(const std::string& path) {
  const json j = load(path);
  if (!j.is_object()) throw ParseError("coefficient document must be an object");
  CoefficientFile out;
  out.d = int_field(j, "d");
  if (out.d < 2) throw ParseError("coefficient document needs d >= 2");
  out.coefficients =
      get_complex_vector(field(j, "coefficients"), out.d, "`coefficients`");
  return out;
}

}  // namespace qudit
