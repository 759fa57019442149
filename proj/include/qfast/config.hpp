#pragma once

#include "qfast/pauli.hpp"

#include <cstdint>
#include <optional>

namespace qfast {

/// Knobs for the synthesis pipeline. Defaults follow the published settings
/// where they exist (0.02 / 1e-5 thresholds, 20-step recording, 100-record
/// window); the Adam and plateau constants are our own.
struct SynthesisConfig {
  double exploration_distance = 0.02;
  double refinement_distance = 1e-5;
  int native_block_size = 2;

  double lr_explore = 0.05;
  double lr_refine = 0.001;
  double explore_min_improvement = 1e-4;
  double refine_min_improvement = 1e-7;
  int record_every = 20;
  int plateau_window = 100;
  long max_steps = 50'000;

  int max_layers = 64;
  std::uint64_t seed = 0;

  /// Absent means all-to-all connectivity.
  std::optional<Topology> topology;

  /// Throws Unsupported on out-of-range values.
  void validate() const;
};

}  // namespace qfast
