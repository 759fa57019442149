#pragma once

#include "qfast/linalg.hpp"
#include "qfast/pauli.hpp"

#include <variant>
#include <vector>

namespace qfast {

/// Generic m-qubit gate: one shared function vector alpha (4^m entries) and a
/// location logit per candidate placement.
struct GenericLayer {
  RealVector alpha;
  RealVector logits;
  std::vector<Placement> placements;
};

/// Generic gate with its location collapsed onto a single placement.
struct FixedLayer {
  RealVector alpha;
  Placement q;
};

using Layer = std::variant<GenericLayer, FixedLayer>;

/// Ordered layers on n qubits; layers[0] acts first in time.
struct CircuitEncoding {
  int n = 0;
  int m = 0;
  std::vector<Layer> layers;

  [[nodiscard]] int depth() const { return static_cast<int>(layers.size()); }
  [[nodiscard]] bool all_generic() const;
  [[nodiscard]] bool all_fixed() const;
  [[nodiscard]] Eigen::Index parameter_count() const;
  /// Throws LengthMismatch / BadQubitSet on malformed layers.
  void validate() const;
};

/// Flattened parameter vector: per layer, alpha followed by logits (if any).
RealVector pack_parameters(const CircuitEncoding& enc);
void unpack_parameters(CircuitEncoding& enc, const RealVector& params);

/// Numerically stable softmax (max-subtracted).
RealVector softmax_weights(const RealVector& logits);

ComplexMatrix generic_generator(const GenericLayer& layer, int n);
ComplexMatrix fixed_generator(const FixedLayer& layer, int n);

ComplexMatrix generic_gate_unitary(const GenericLayer& layer, int n);
ComplexMatrix fixed_gate_unitary(const FixedLayer& layer, int n);
ComplexMatrix layer_unitary(const Layer& layer, int n);

/// U_C = U_d ... U_1.
ComplexMatrix circuit_unitary(const CircuitEncoding& enc);

/// sqrt(1 - |Tr(U_C^dagger U_T)|^2 / d^2), radicand clamped at 0.
double loss(const ComplexMatrix& u_c, const ComplexMatrix& u_t);

/// Denominator floor for d(sqrt)/dx at the loss minimum.
inline constexpr double kLossGradFloor = 1e-12;
/// Below this value of 1 - |Tr|^2/d^2 the loss switches to a cancellation-free form.
inline constexpr double kLossCancellationBand = 1e-6;

struct LayerGradient {
  RealVector alpha;
  RealVector logits;  // empty for fixed layers
};

struct LossGradient {
  double loss = 0.0;
  std::vector<LayerGradient> layers;

  /// Same layout as pack_parameters.
  [[nodiscard]] RealVector flat() const;
};

/// Loss plus analytic partials for every alpha and logit. Throws DimMismatch.
LossGradient loss_and_grad(const CircuitEncoding& enc, const ComplexMatrix& u_t);

/// Placement with the largest logit; lowest index wins ties.
Placement dominant_placement(const GenericLayer& layer);

}  // namespace qfast
