#pragma once

#include "qfast/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qfast {

/// U3(theta, phi, lambda) angles plus a global phase:
/// e^{i global_phase} [[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]].
struct U3Params {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
  double global_phase = 0.0;
};

/// U3 matrix including the global phase.
ComplexMatrix u3_matrix(const U3Params& p);

enum class GateKind { U3, CNOT };

struct Gate {
  GateKind kind = GateKind::U3;
  std::vector<int> qubits;  // {target} for U3, {control, target} for CNOT
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;

  static Gate u3(int qubit, double theta, double phi, double lambda);
  static Gate cnot(int control, int target);
};

/// Native circuit in time order with an explicit global phase.
struct Program {
  int n = 0;
  std::vector<Gate> gates;
  double accumulated_phase = 0.0;

  /// Appends U3 gate angles and folds the global phase into accumulated_phase.
  void add_u3(int qubit, const U3Params& p);
  void add_cnot(int control, int target);

  /// Throws BadQubitSet if any gate is out of range or malformed.
  void validate() const;
};

/// m <- G m for a gate acting on an n-qubit register (m has 2^n rows).
void apply_gate(ComplexMatrix& m, const Gate& g, int n);

/// e^{i phase} G_k ... G_1.
ComplexMatrix compose_program(const Program& p);

std::size_t cnot_count(const Program& p);

/// OpenQASM 2.0 text; angles and phase printed with 17 significant digits.
std::string emit_qasm(const Program& p);

/// Reads the subset produced by emit_qasm (u3, cx, one qreg, phase comment).
/// Throws MalformedFile.
Program parse_qasm(const std::string& text);

/// Unitary document: {"n": .., "re": [[..]], "im": [[..]]}.
/// Throws MalformedFile, ShapeMismatch, NotUnitary.
ComplexMatrix parse_unitary(const std::string& text);
std::string write_unitary(const ComplexMatrix& m);

inline constexpr double kUnitaryFileTol = 1e-6;

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

struct VerifyReport {
  double distance = 0.0;
  std::vector<double> basis_fidelity;
  double basis_mean = 0.0;
  double basis_min = 0.0;
  int trials = 0;
  double random_mean = 0.0;
  double random_min = 0.0;
  /// Mean over all basis states and all random states together.
  double combined_mean = 0.0;
};

/// Distance plus state fidelities |<U_T psi | P psi>|^2 on every basis state and
/// on `trials` Haar-random states. Throws DimMismatch.
VerifyReport verify(const Program& p, const ComplexMatrix& u_t, int trials, std::uint64_t seed);

}  // namespace qfast
