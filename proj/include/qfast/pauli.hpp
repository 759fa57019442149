#pragma once

#include "qfast/linalg.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qfast {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Paulis; labels[0] acts on qubit 0, the most
/// significant factor. Canonical index is the base-4 reading of the labels.
struct PauliString {
  std::vector<Pauli> labels;

  [[nodiscard]] int size() const { return static_cast<int>(labels.size()); }
  [[nodiscard]] std::uint64_t index() const;
  [[nodiscard]] std::string str() const;

  static PauliString from_index(int n, std::uint64_t index);
  static PauliString parse(const std::string& text);

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// Bit-mask form of a Pauli string for O(2^n) kernels. Row r of the matrix has
/// one nonzero, at column r ^ x, equal to phase * (-1)^popcount(r & z).
struct PauliMasks {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  Complex phase{1.0, 0.0};
};

PauliMasks masks_of(const PauliString& p);

/// Dense matrix of a Pauli string, built by repeated tensor products.
ComplexMatrix pauli_matrix(const PauliString& p);

/// h += coeff * sigma.
void accumulate_pauli(ComplexMatrix& h, const PauliMasks& sigma, double coeff);

/// Tr(sigma * y).
Complex trace_with_pauli(const PauliMasks& sigma, const ComplexMatrix& y);

/// Ascending set of distinct qubit indices.
struct Placement {
  std::vector<int> qubits;

  [[nodiscard]] int size() const { return static_cast<int>(qubits.size()); }
  [[nodiscard]] std::string str() const;
  [[nodiscard]] bool valid_for(int n) const;

  friend auto operator<=>(const Placement&, const Placement&) = default;
};

/// Undirected qubit coupling graph.
class Topology {
public:
  Topology(int n, std::vector<std::pair<int, int>> edges);

  static Topology all_to_all(int n);

  [[nodiscard]] int num_qubits() const { return n_; }
  [[nodiscard]] const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  [[nodiscard]] bool is_all_to_all() const { return all_to_all_; }
  [[nodiscard]] bool adjacent(int u, int v) const;

  /// Induced subgraph on the placement, relabeled to positions 0..|q|-1.
  [[nodiscard]] Topology induced(const Placement& q) const;

private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::uint64_t> adjacency_;
  bool all_to_all_ = false;
};

/// All 4^n Pauli strings of order n in canonical order.
std::vector<PauliString> pauli_basis(int n);

/// The 4^|q| strings of order n with identity outside q, ordered so element k
/// restricts to pauli_basis(|q|)[k]. Throws BadQubitSet.
std::vector<PauliString> restricted_basis(int n, const Placement& q);

/// Size-m qubit sets whose induced subgraph is connected, in lexicographic order.
std::vector<Placement> enumerate_placements(int n, int m, const Topology& topo);

/// e^{i sum_k alpha_k sigma_k} on |q| qubits (sigma from pauli_basis(|q|)).
/// Throws LengthMismatch.
ComplexMatrix extract_local(const RealVector& alpha, const Placement& q);

/// Masks of restricted_basis(n, q), same order.
std::vector<PauliMasks> restricted_masks(int n, const Placement& q);

/// Hermitian generator sum_k alpha_k sigma_k of pauli_basis(m).
ComplexMatrix local_generator(const RealVector& alpha, int m);

}  // namespace qfast
