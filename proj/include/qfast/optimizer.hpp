#pragma once

#include "qfast/linalg.hpp"

#include <deque>
#include <functional>
#include <string_view>

namespace qfast {

/// Adam moments and hyperparameters.
struct AdamState {
  long step = 0;
  RealVector m;
  RealVector v;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros(Eigen::Index size, double lr);
};

/// One bias-corrected Adam update in place. Throws LengthMismatch or
/// NonFiniteGradient.
void adam_step(RealVector& params, const RealVector& grads, AdamState& state);

/// Records the loss every `record_every` steps and reports a plateau once the
/// last `window` records span less than `min_improvement`.
struct PlateauDetector {
  int record_every = 20;
  int window = 100;
  double min_improvement = 1e-4;
  std::deque<double> recorded;

  void reset() { recorded.clear(); }
};

bool plateau_check(PlateauDetector& det, long step, double current_loss);

struct ValueAndGradient {
  double value = 0.0;
  RealVector gradient;
};

using Objective = std::function<ValueAndGradient(const RealVector&)>;

enum class MinimizeStatus { ThresholdMet, Plateau, BudgetExhausted };

std::string_view to_string(MinimizeStatus status) noexcept;

struct MinimizeOutcome {
  RealVector params;  // best seen
  double final_loss = 0.0;
  MinimizeStatus status = MinimizeStatus::BudgetExhausted;
  long steps_used = 0;
};

struct MinimizeOptions {
  double lr = 0.001;
  double threshold = 0.0;
  long max_steps = 50'000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam descent until the loss reaches the threshold, the plateau detector
/// fires, or max_steps updates have been taken. The detector is reset first.
MinimizeOutcome minimize(const Objective& objective, RealVector params0,
                         const MinimizeOptions& options, PlateauDetector& plateau);

}  // namespace qfast
