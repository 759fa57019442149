#pragma once

#include "qfast/ansatz.hpp"
#include "qfast/config.hpp"
#include "qfast/program.hpp"

#include <utility>
#include <vector>

namespace qfast {

/// A unitary acting on absolute qubits of the original register.
inline constexpr double kLayerInitScale = 1e-3;
inline constexpr int kRefinementStages = 4;

struct Block {
  ComplexMatrix unitary;
  Placement qubits;
  std::size_t sequence_index = 0;
};

/// Appends a zero-initialized generic layer. Layers at even depth (0-based)
/// take the first half of the placement list, odd depths the second half;
/// lists with fewer than four placements are used whole. Throws NoPlacements.
CircuitEncoding add_layer(CircuitEncoding enc, const SynthesisConfig& cfg);

/// Candidate placements for layer `depth` (0-based) out of `all`.
std::vector<Placement> layer_candidates(const std::vector<Placement>& all, int depth);

/// Grows layers until the loss reaches cfg.exploration_distance. Each new
/// layer starts generic with alpha drawn from N(0, kLayerInitScale^2) (seeded
/// by cfg.seed) and is optimized jointly with the earlier ones; it is then
/// committed to the candidate placement whose fixed-layer optimization scores
/// best, trying candidates in order of softmax weight. Every layer of the
/// result is fixed. Throws LayerBudgetExceeded.
CircuitEncoding exploration(const ComplexMatrix& u_t, int m, const SynthesisConfig& cfg);

/// Collapses each generic layer onto its dominant placement.
CircuitEncoding fix_locations(const CircuitEncoding& enc);

/// Polishes the alphas of a fixed-structure encoding. Starts at cfg.lr_refine;
/// every run that ends above the target (plateau or budget) is followed by one
/// at a tenth of the rate and plateau tolerance, for at most kRefinementStages
/// runs. Returns the best-seen values.
CircuitEncoding refinement(const ComplexMatrix& u_t, CircuitEncoding enc, const SynthesisConfig& cfg);

int decomposition_size(const Block& block, int native);

/// {parent[i] : i in child}. Throws BadQubitSet.
Placement compose_locations(const Placement& parent, const Placement& child);

/// Per fixed layer, (extract_local(alpha, q), q) in time order.
std::vector<std::pair<ComplexMatrix, Placement>> convert_to_unitary(const CircuitEncoding& enc);

struct LevelStats {
  int level = 0;
  int parent_qubits = 0;
  int block_size = 0;
  int depth = 0;
  double exploration_loss = 0.0;
  double refined_loss = 0.0;
};

/// Hierarchical split of u_t into blocks of at most cfg.native_block_size qubits,
/// in time order. Optional stats collect one entry per expanded block.
std::vector<Block> decomposition(const ComplexMatrix& u_t, const SynthesisConfig& cfg,
                                 std::vector<LevelStats>* stats = nullptr);

/// Relabels every block program through its placement and concatenates them.
/// Throws BadQubitSet.
Program recombination(const std::vector<std::pair<Program, Placement>>& block_programs, int n);

struct SynthesisResult {
  Program program;
  double distance = 0.0;
  std::vector<Block> blocks;
  std::vector<LevelStats> stats;
};

SynthesisResult synthesize_detailed(const ComplexMatrix& u_t, const SynthesisConfig& cfg);

/// Full pipeline: decomposition, per-block KAK, recombination.
Program synthesize(const ComplexMatrix& u_t, const SynthesisConfig& cfg);

/// log2 of a power-of-two dimension; throws DimMismatch otherwise.
int qubit_count(const ComplexMatrix& u);

}  // namespace qfast
