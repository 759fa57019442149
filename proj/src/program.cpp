#include "qfast/program.hpp"

#include "qfast/ansatz.hpp"
#include "qfast/error.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace qfast {

ComplexMatrix u3_matrix(const U3Params& p) {
  const double c = std::cos(p.theta / 2.0);
  const double s = std::sin(p.theta / 2.0);
  ComplexMatrix m(2, 2);
  m << c, -std::polar(s, p.lambda), std::polar(s, p.phi), std::polar(c, p.phi + p.lambda);
  return std::polar(1.0, p.global_phase) * m;
}

Gate Gate::u3(int qubit, double theta, double phi, double lambda) {
  Gate g;
  g.kind = GateKind::U3;
  g.qubits = {qubit};
  g.theta = theta;
  g.phi = phi;
  g.lambda = lambda;
  return g;
}

Gate Gate::cnot(int control, int target) {
  Gate g;
  g.kind = GateKind::CNOT;
  g.qubits = {control, target};
  return g;
}

void Program::add_u3(int qubit, const U3Params& p) {
  gates.push_back(Gate::u3(qubit, p.theta, p.phi, p.lambda));
  accumulated_phase += p.global_phase;
}

void Program::add_cnot(int control, int target) { gates.push_back(Gate::cnot(control, target)); }

void Program::validate() const {
  if (n < 1) throw Error(ErrorKind::BadQubitSet, "program needs at least one qubit");
  for (const auto& g : gates) {
    const std::size_t arity = g.kind == GateKind::U3 ? 1 : 2;
    if (g.qubits.size() != arity) throw Error(ErrorKind::BadQubitSet, "gate arity mismatch");
    for (const int q : g.qubits) {
      if (q < 0 || q >= n) throw Error(ErrorKind::BadQubitSet, "gate qubit out of range");
    }
    if (g.kind == GateKind::CNOT && g.qubits[0] == g.qubits[1]) {
      throw Error(ErrorKind::BadQubitSet, "CNOT control equals target");
    }
  }
}

void apply_gate(ComplexMatrix& m, const Gate& g, int n) {
  const auto dim = static_cast<std::uint64_t>(m.rows());
  if (g.kind == GateKind::U3) {
    const ComplexMatrix u = u3_matrix(U3Params{g.theta, g.phi, g.lambda, 0.0});
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - g.qubits[0]);
    for (std::uint64_t r = 0; r < dim; ++r) {
      if (r & bit) continue;
      const auto r0 = static_cast<Eigen::Index>(r);
      const auto r1 = static_cast<Eigen::Index>(r | bit);
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const Complex a = m(r0, c);
        const Complex b = m(r1, c);
        m(r0, c) = u(0, 0) * a + u(0, 1) * b;
        m(r1, c) = u(1, 0) * a + u(1, 1) * b;
      }
    }
    return;
  }
  const std::uint64_t control = std::uint64_t{1} << (n - 1 - g.qubits[0]);
  const std::uint64_t target = std::uint64_t{1} << (n - 1 - g.qubits[1]);
  for (std::uint64_t r = 0; r < dim; ++r) {
    if ((r & control) && !(r & target)) {
      m.row(static_cast<Eigen::Index>(r)).swap(m.row(static_cast<Eigen::Index>(r | target)));
    }
  }
}

ComplexMatrix compose_program(const Program& p) {
  p.validate();
  const Eigen::Index dim = Eigen::Index{1} << p.n;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& g : p.gates) apply_gate(u, g, p.n);
  return std::polar(1.0, p.accumulated_phase) * u;
}

std::size_t cnot_count(const Program& p) {
  std::size_t count = 0;
  for (const auto& g : p.gates) count += g.kind == GateKind::CNOT ? 1 : 0;
  return count;
}

namespace {

std::string format_angle(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string emit_qasm(const Program& p) {
  p.validate();
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(p.n) + "];\n";
  for (const auto& g : p.gates) {
    if (g.kind == GateKind::U3) {
      out += "u3(" + format_angle(g.theta) + "," + format_angle(g.phi) + "," + format_angle(g.lambda) +
             ") q[" + std::to_string(g.qubits[0]) + "];\n";
    } else {
      out += "cx q[" + std::to_string(g.qubits[0]) + "],q[" + std::to_string(g.qubits[1]) + "];\n";
    }
  }
  out += "// global_phase: " + format_angle(p.accumulated_phase) + "\n";
  return out;
}

Program parse_qasm(const std::string& text) {
  static const std::regex kQreg(R"(^qreg\s+q\[(\d+)\]\s*;$)");
  static const std::regex kU3(R"(^u3\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*,\s*([^,\s\)]+)\s*\)\s*q\[(\d+)\]\s*;$)");
  static const std::regex kCx(R"(^cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\]\s*;$)");
  static const std::regex kPhase(R"(^//\s*global_phase:\s*(\S+)$)");

  auto to_double = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw Error(ErrorKind::MalformedFile, "bad number '" + s + "'");
    return v;
  };

  Program p;
  bool have_qreg = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    std::smatch mt;
    if (std::regex_match(line, mt, kPhase)) {
      p.accumulated_phase = to_double(mt[1]);
    } else if (line.rfind("//", 0) == 0 || line.rfind("OPENQASM", 0) == 0 || line.rfind("include", 0) == 0) {
      continue;
    } else if (std::regex_match(line, mt, kQreg)) {
      if (have_qreg) throw Error(ErrorKind::MalformedFile, "only one qreg is supported");
      p.n = std::stoi(mt[1]);
      have_qreg = true;
    } else if (have_qreg && std::regex_match(line, mt, kU3)) {
      p.gates.push_back(Gate::u3(std::stoi(mt[4]), to_double(mt[1]), to_double(mt[2]), to_double(mt[3])));
    } else if (have_qreg && std::regex_match(line, mt, kCx)) {
      p.gates.push_back(Gate::cnot(std::stoi(mt[1]), std::stoi(mt[2])));
    } else {
      throw Error(ErrorKind::MalformedFile, "unsupported QASM at line " + std::to_string(line_no) + ": " + line);
    }
  }
  if (!have_qreg) throw Error(ErrorKind::MalformedFile, "missing qreg declaration");
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::MalformedFile, e.what());
  }
  return p;
}

ComplexMatrix parse_unitary(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedFile, e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("re") || !doc.contains("im")) {
    throw Error(ErrorKind::MalformedFile, "unitary document needs fields n, re, im");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1 || doc["n"].get<int>() > 12) {
    throw Error(ErrorKind::MalformedFile, "field n must be an integer in [1, 12]");
  }
  const int n = doc["n"].get<int>();
  const std::size_t dim = std::size_t{1} << n;

  auto read_grid = [&](const json& grid, const char* name) {
    if (!grid.is_array()) throw Error(ErrorKind::MalformedFile, std::string(name) + " must be an array");
    if (grid.size() != dim) {
      throw Error(ErrorKind::ShapeMismatch, std::string(name) + " has " + std::to_string(grid.size()) +
                                                " rows, expected " + std::to_string(dim));
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
      const json& row = grid[r];
      if (!row.is_array()) throw Error(ErrorKind::MalformedFile, std::string(name) + " rows must be arrays");
      if (row.size() != dim) {
        throw Error(ErrorKind::ShapeMismatch, std::string(name) + " row " + std::to_string(r) + " has " +
                                                  std::to_string(row.size()) + " entries");
      }
      for (std::size_t c = 0; c < dim; ++c) {
        if (!row[c].is_number()) throw Error(ErrorKind::MalformedFile, "non-numeric matrix entry");
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
      }
    }
    return out;
  };

  const Eigen::MatrixXd re = read_grid(doc["re"], "re");
  const Eigen::MatrixXd im = read_grid(doc["im"], "im");
  ComplexMatrix u(re.rows(), re.cols());
  u.real() = re;
  u.imag() = im;
  if (!u.allFinite()) throw Error(ErrorKind::MalformedFile, "non-finite matrix entry");
  if (unitarity_error(u) > kUnitaryFileTol) {
    throw Error(ErrorKind::NotUnitary, "matrix is not unitary within 1e-6");
  }
  return u;
}

std::string write_unitary(const ComplexMatrix& m) {
  const Eigen::Index dim = m.rows();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if (m.cols() != dim || (Eigen::Index{1} << n) != dim) {
    throw Error(ErrorKind::ShapeMismatch, "unitary must be 2^n x 2^n");
  }
  auto grid = [&](bool imag) {
    std::string s = "[\n";
    for (Eigen::Index r = 0; r < dim; ++r) {
      s += "    [";
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (c) s += ", ";
        // nlohmann emits the shortest round-trip representation.
        s += nlohmann::json(imag ? m(r, c).imag() : m(r, c).real()).dump();
      }
      s += r + 1 < dim ? "],\n" : "]\n";
    }
    return s + "  ]";
  };
  return "{\n  \"n\": " + std::to_string(n) + ",\n  \"re\": " + grid(false) + ",\n  \"im\": " + grid(true) +
         "\n}\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

VerifyReport verify(const Program& p, const ComplexMatrix& u_t, int trials, std::uint64_t seed) {
  const ComplexMatrix u_c = compose_program(p);
  if (u_c.rows() != u_t.rows() || u_t.rows() != u_t.cols()) {
    throw Error(ErrorKind::DimMismatch, "program width does not match target");
  }
  VerifyReport rep;
  rep.distance = loss(u_c, u_t);

  // Basis state j maps to column j, so fidelity is |<u_t e_j, u_c e_j>|^2.
  const Eigen::Index dim = u_t.rows();
  double sum = 0.0;
  rep.basis_min = 1.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double f = std::norm(u_t.col(j).dot(u_c.col(j)));
    rep.basis_fidelity.push_back(f);
    rep.basis_min = std::min(rep.basis_min, f);
    sum += f;
  }
  rep.basis_mean = sum / static_cast<double>(dim);

  rep.trials = std::max(trials, 0);
  std::mt19937_64 rng(seed);
  double random_sum = 0.0;
  rep.random_min = 1.0;
  for (int t = 0; t < rep.trials; ++t) {
    const ComplexVector psi = random_state(dim, rng);
    const double f = std::norm((u_t * psi).dot(u_c * psi));
    random_sum += f;
    rep.random_min = std::min(rep.random_min, f);
  }
  rep.random_mean = rep.trials > 0 ? random_sum / rep.trials : 1.0;
  if (rep.trials == 0) rep.random_min = 1.0;
  rep.combined_mean = (sum + random_sum) / static_cast<double>(dim + rep.trials);
  return rep;
}

}  // namespace qfast
