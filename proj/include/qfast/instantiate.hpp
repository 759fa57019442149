#pragma once

#include "qfast/config.hpp"
#include "qfast/linalg.hpp"
#include "qfast/program.hpp"

#include <array>

namespace qfast {

/// ZYZ-style extraction: e^{i phase} U3(theta, phi, lambda) == u, theta in [0, pi].
/// Throws NotUnitary.
U3Params u3_params(const ComplexMatrix& u);

/// Two-qubit Cartan decomposition
///   u = e^{i g} (A0 (x) A1) exp(i (cx XX + cy YY + cz ZZ)) (C0 (x) C1)
/// with (cx, cy, cz) folded into pi/4 >= cx >= cy >= |cz|.
struct KakResult {
  std::array<U3Params, 2> pre;   // first single-qubit layer (qubit 0, qubit 1)
  std::array<U3Params, 2> post;  // last single-qubit layer
  std::array<double, 3> coefficients{};
  int cnot_count = 0;
  Program program;         // full native circuit, compose_program(program) ~ u
  double distance = 0.0;  // loss(compose_program(program), u)
};

inline constexpr double kKakCoefficientTol = 1e-8;
inline constexpr double kKakReconstructionTol = 1e-8;

/// Throws NotUnitary (tolerance 1e-8) or DecompositionFailed.
KakResult kak_decompose(const ComplexMatrix& u, std::uint64_t seed = 0);

/// Weyl-chamber coefficients only.
std::array<double, 3> canonical_coefficients(const ComplexMatrix& u);

/// Native program for a block of one or two qubits.
Program instantiate_block(const ComplexMatrix& u, std::uint64_t seed = 0);

/// Numerically fits U3^{(x)2} . CX . U3^{(x)2} . CX . U3^{(x)2} . CX . U3^{(x)2}
/// to u. Throws OptimizationFailed if the best distance stays above 1e-4.
Program template_instantiate(const ComplexMatrix& u, const SynthesisConfig& cfg);

inline constexpr double kTemplateTarget = 1e-6;
inline constexpr double kTemplateFailure = 1e-4;

}  // namespace qfast
