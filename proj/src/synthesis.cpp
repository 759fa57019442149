#include "qfast/synthesis.hpp"

#include "qfast/error.hpp"
#include "qfast/instantiate.hpp"
#include "qfast/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>

namespace qfast {

int qubit_count(const ComplexMatrix& u) {
  int n = 0;
  while ((Eigen::Index{1} << n) < u.rows()) ++n;
  if (u.rows() != u.cols() || (Eigen::Index{1} << n) != u.rows() || n < 1) {
    throw Error(ErrorKind::DimMismatch, "expected a 2^n x 2^n matrix");
  }
  return n;
}

namespace {

Topology topology_for(const SynthesisConfig& cfg, int n) {
  if (cfg.topology) {
    if (cfg.topology->num_qubits() != n) {
      throw Error(ErrorKind::BadQubitSet, "topology size does not match the target");
    }
    return *cfg.topology;
  }
  return Topology::all_to_all(n);
}

Objective encoding_objective(const CircuitEncoding& shape, const ComplexMatrix& u_t) {
  return [enc = shape, &u_t](const RealVector& params) mutable {
    unpack_parameters(enc, params);
    const LossGradient lg = loss_and_grad(enc, u_t);
    return ValueAndGradient{lg.loss, lg.flat()};
  };
}

std::uint64_t block_seed(std::uint64_t seed, int level, std::size_t position) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(position)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t{words[0]} << 32) | words[1];
}

}  // namespace

std::vector<Placement> layer_candidates(const std::vector<Placement>& all, int depth) {
  if (all.size() < 4) return all;
  const auto half = static_cast<std::ptrdiff_t>(all.size() / 2);
  if (depth % 2 == 0) return {all.begin(), all.begin() + half};
  return {all.begin() + half, all.end()};
}

CircuitEncoding add_layer(CircuitEncoding enc, const SynthesisConfig& cfg) {
  const auto all = enumerate_placements(enc.n, enc.m, topology_for(cfg, enc.n));
  if (all.empty()) {
    throw Error(ErrorKind::NoPlacements, "no connected " + std::to_string(enc.m) + "-qubit placement");
  }
  GenericLayer layer;
  layer.placements = layer_candidates(all, enc.depth());
  layer.alpha = RealVector::Zero(Eigen::Index{1} << (2 * enc.m));
  layer.logits = RealVector::Zero(static_cast<Eigen::Index>(layer.placements.size()));
  enc.layers.emplace_back(std::move(layer));
  return enc;
}

CircuitEncoding exploration(const ComplexMatrix& u_t, int m, const SynthesisConfig& cfg) {
  const int n = qubit_count(u_t);
  if (m < 1 || m >= n) throw Error(ErrorKind::Unsupported, "exploration needs 1 <= m < n");
  CircuitEncoding enc{n, m, {}};
  PlateauDetector plateau{cfg.record_every, cfg.plateau_window, cfg.explore_min_improvement, {}};
  MinimizeOptions opts;
  opts.lr = cfg.lr_explore;
  opts.threshold = cfg.exploration_distance;
  opts.max_steps = cfg.max_steps;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> jitter(0.0, kLayerInitScale);
  while (true) {
    if (enc.depth() >= cfg.max_layers) {
      throw Error(ErrorKind::LayerBudgetExceeded,
                  "no solution within " + std::to_string(cfg.max_layers) + " layers");
    }
    enc = add_layer(std::move(enc), cfg);
    // A zero layer sits on a critical point of the loss, so it is nudged off
    // unless the circuit already meets the threshold.
    if (loss(circuit_unitary(enc), u_t) > cfg.exploration_distance) {
      for (auto& a : std::get<GenericLayer>(enc.layers.back()).alpha) a = jitter(rng);
    }
    const MinimizeOutcome generic = minimize(encoding_objective(enc, u_t), pack_parameters(enc), opts, plateau);
    unpack_parameters(enc, generic.params);

    // A softmax mixture with shared alpha can do what no single placement
    // does, so the newest layer is committed by trying its candidates as
    // fixed layers, most weighted first, and keeping the best.
    const auto& layer = std::get<GenericLayer>(enc.layers.back());
    const RealVector weights = softmax_weights(layer.logits);
    std::vector<std::size_t> order(layer.placements.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return weights(static_cast<Eigen::Index>(x)) > weights(static_cast<Eigen::Index>(y));
    });
    // Two consecutive gates on one placement merge into a single gate.
    if (enc.depth() > 1 && order.size() > 1) {
      const auto& prev = std::get<FixedLayer>(enc.layers[enc.layers.size() - 2]).q;
      std::erase_if(order, [&](std::size_t k) { return layer.placements[k] == prev; });
    }
    std::optional<CircuitEncoding> best;
    double best_loss = std::numeric_limits<double>::infinity();
    for (const std::size_t k : order) {
      CircuitEncoding trial = enc;
      trial.layers.back() = FixedLayer{layer.alpha, layer.placements[k]};
      const MinimizeOutcome out = minimize(encoding_objective(trial, u_t), pack_parameters(trial), opts, plateau);
      if (out.final_loss < best_loss) {
        best_loss = out.final_loss;
        unpack_parameters(trial, out.params);
        best = std::move(trial);
      }
      if (best_loss <= cfg.exploration_distance) break;
    }
    enc = std::move(*best);
    if (best_loss <= cfg.exploration_distance) return enc;
  }
}

CircuitEncoding fix_locations(const CircuitEncoding& enc) {
  CircuitEncoding out{enc.n, enc.m, {}};
  out.layers.reserve(enc.layers.size());
  for (const auto& layer : enc.layers) {
    if (const auto* g = std::get_if<GenericLayer>(&layer)) {
      out.layers.emplace_back(FixedLayer{g->alpha, dominant_placement(*g)});
    } else {
      out.layers.push_back(layer);
    }
  }
  return out;
}

CircuitEncoding refinement(const ComplexMatrix& u_t, CircuitEncoding enc, const SynthesisConfig& cfg) {
  if (!enc.all_fixed()) throw Error(ErrorKind::Unsupported, "refinement needs fixed layers");
  RealVector params = pack_parameters(enc);
  double scale = 1.0;
  for (int stage = 0; stage < kRefinementStages; ++stage, scale *= 0.1) {
    PlateauDetector plateau{cfg.record_every, cfg.plateau_window, cfg.refine_min_improvement * scale, {}};
    MinimizeOptions opts;
    opts.lr = cfg.lr_refine * scale;
    opts.threshold = cfg.refinement_distance;
    opts.max_steps = cfg.max_steps;
    const MinimizeOutcome out = minimize(encoding_objective(enc, u_t), params, opts, plateau);
    params = out.params;
    if (out.status == MinimizeStatus::ThresholdMet) break;
  }
  unpack_parameters(enc, params);
  return enc;
}

int decomposition_size(const Block& block, int native) {
  return std::max(native, (block.qubits.size() + 1) / 2);
}

Placement compose_locations(const Placement& parent, const Placement& child) {
  Placement out;
  for (std::size_t k = 0; k < child.qubits.size(); ++k) {
    const int idx = child.qubits[k];
    if (idx < 0 || idx >= parent.size() || (k > 0 && idx <= child.qubits[k - 1])) {
      throw Error(ErrorKind::BadQubitSet, "child " + child.str() + " does not fit parent " + parent.str());
    }
    out.qubits.push_back(parent.qubits[static_cast<std::size_t>(idx)]);
  }
  return out;
}

std::vector<std::pair<ComplexMatrix, Placement>> convert_to_unitary(const CircuitEncoding& enc) {
  std::vector<std::pair<ComplexMatrix, Placement>> out;
  out.reserve(enc.layers.size());
  for (const auto& layer : enc.layers) {
    const auto* f = std::get_if<FixedLayer>(&layer);
    if (!f) throw Error(ErrorKind::Unsupported, "convert_to_unitary needs fixed layers");
    out.emplace_back(extract_local(f->alpha, f->q), f->q);
  }
  return out;
}

std::vector<Block> decomposition(const ComplexMatrix& u_t, const SynthesisConfig& cfg,
                                 std::vector<LevelStats>* stats) {
  cfg.validate();
  const int n = qubit_count(u_t);
  const Topology topo = topology_for(cfg, n);
  Placement all;
  for (int q = 0; q < n; ++q) all.qubits.push_back(q);
  std::vector<Block> blocks{Block{u_t, all, 0}};

  const int native = cfg.native_block_size;
  int level = 0;
  auto oversized = [&](const Block& b) { return b.qubits.size() > native; };
  while (std::any_of(blocks.begin(), blocks.end(), oversized)) {
    std::vector<Block> next;
    for (const auto& b : blocks) {
      if (!oversized(b)) {
        next.push_back(b);
        continue;
      }
      SynthesisConfig local = cfg;
      local.topology = topo.induced(b.qubits);
      local.seed = block_seed(cfg.seed, level, next.size());
      const int m = decomposition_size(b, native);
      const CircuitEncoding explored = exploration(b.unitary, m, local);
      const CircuitEncoding refined = refinement(b.unitary, fix_locations(explored), local);
      if (stats) {
        stats->push_back(LevelStats{level, b.qubits.size(), m, refined.depth(),
                                    loss(circuit_unitary(explored), b.unitary),
                                    loss(circuit_unitary(refined), b.unitary)});
      }
      for (auto& [unitary, q] : convert_to_unitary(refined)) {
        next.push_back(Block{std::move(unitary), compose_locations(b.qubits, q), 0});
      }
    }
    for (std::size_t k = 0; k < next.size(); ++k) next[k].sequence_index = k;
    blocks = std::move(next);
    ++level;
  }
  return blocks;
}

Program recombination(const std::vector<std::pair<Program, Placement>>& block_programs, int n) {
  Program out;
  out.n = n;
  for (const auto& [prog, where] : block_programs) {
    if (prog.n != where.size() || !where.valid_for(n)) {
      throw Error(ErrorKind::BadQubitSet, "block program does not fit placement " + where.str());
    }
    for (const auto& g : prog.gates) {
      Gate relabeled = g;
      for (int& q : relabeled.qubits) {
        if (q < 0 || q >= where.size()) throw Error(ErrorKind::BadQubitSet, "gate qubit outside its block");
        q = where.qubits[static_cast<std::size_t>(q)];
      }
      out.gates.push_back(std::move(relabeled));
    }
    out.accumulated_phase += prog.accumulated_phase;
  }
  out.accumulated_phase = std::remainder(out.accumulated_phase, 2.0 * M_PI);
  return out;
}

SynthesisResult synthesize_detailed(const ComplexMatrix& u_t, const SynthesisConfig& cfg) {
  cfg.validate();
  const int n = qubit_count(u_t);
  if (n > 6) throw Error(ErrorKind::Unsupported, "targets above 6 qubits are not supported");
  if (unitarity_error(u_t) > kUnitaryFileTol) throw Error(ErrorKind::NotUnitary, "target is not unitary");

  SynthesisResult res;
  res.blocks = decomposition(u_t, cfg, &res.stats);
  std::vector<std::pair<Program, Placement>> block_programs;
  block_programs.reserve(res.blocks.size());
  for (const auto& b : res.blocks) {
    block_programs.emplace_back(instantiate_block(b.unitary, cfg.seed + b.sequence_index), b.qubits);
  }
  res.program = recombination(block_programs, n);
  // Align the global phase with the target so the composed matrix matches it.
  res.program.accumulated_phase = 0.0;
  res.program.accumulated_phase = best_phase(compose_program(res.program), u_t);
  res.distance = loss(compose_program(res.program), u_t);
  return res;
}

Program synthesize(const ComplexMatrix& u_t, const SynthesisConfig& cfg) {
  return synthesize_detailed(u_t, cfg).program;
}

}  // namespace qfast
