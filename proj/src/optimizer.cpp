#include "qfast/optimizer.hpp"

#include "qfast/error.hpp"

#include <algorithm>
#include <cmath>

namespace qfast {

AdamState AdamState::zeros(Eigen::Index size, double lr) {
  AdamState s;
  s.m = RealVector::Zero(size);
  s.v = RealVector::Zero(size);
  s.lr = lr;
  return s;
}

void adam_step(RealVector& params, const RealVector& grads, AdamState& state) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw Error(ErrorKind::LengthMismatch, "adam_step operands differ in length");
  }
  if (!grads.allFinite()) throw Error(ErrorKind::NonFiniteGradient, "gradient has NaN/Inf");

  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

bool plateau_check(PlateauDetector& det, long step, double current_loss) {
  if (det.record_every <= 0 || step % det.record_every != 0) return false;
  det.recorded.push_back(current_loss);
  while (static_cast<int>(det.recorded.size()) > det.window) det.recorded.pop_front();
  if (static_cast<int>(det.recorded.size()) < det.window) return false;
  const auto [lo, hi] = std::minmax_element(det.recorded.begin(), det.recorded.end());
  return (*hi - *lo) < det.min_improvement;
}

std::string_view to_string(MinimizeStatus status) noexcept {
  switch (status) {
    case MinimizeStatus::ThresholdMet: return "threshold_met";
    case MinimizeStatus::Plateau: return "plateau";
    case MinimizeStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

MinimizeOutcome minimize(const Objective& objective, RealVector params0,
                         const MinimizeOptions& options, PlateauDetector& plateau) {
  plateau.reset();
  AdamState adam = AdamState::zeros(params0.size(), options.lr);
  adam.beta1 = options.beta1;
  adam.beta2 = options.beta2;
  adam.eps = options.eps;

  RealVector params = std::move(params0);
  MinimizeOutcome out;
  out.params = params;
  out.final_loss = std::numeric_limits<double>::infinity();

  for (long step = 0;; ++step) {
    const ValueAndGradient eval = objective(params);
    if (eval.value < out.final_loss) {
      out.final_loss = eval.value;
      out.params = params;
    }
    out.steps_used = step;
    if (eval.value <= options.threshold) {
      out.status = MinimizeStatus::ThresholdMet;
      return out;
    }
    // The detector sees the best loss so far: Adam keeps oscillating around a
    // minimum, and that noise alone would otherwise hold the window open.
    if (step > 0 && plateau_check(plateau, step, out.final_loss)) {
      out.status = MinimizeStatus::Plateau;
      return out;
    }
    if (step >= options.max_steps) {
      out.status = MinimizeStatus::BudgetExhausted;
      return out;
    }
    adam_step(params, eval.gradient, adam);
  }
}

}  // namespace qfast
