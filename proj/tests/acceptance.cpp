// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"

#include "qfast/ansatz.hpp"
#include "qfast/instantiate.hpp"
#include "qfast/pauli.hpp"
#include "qfast/program.hpp"
#include "qfast/synthesis.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace {

using qfast::CircuitEncoding;
using qfast::ComplexMatrix;
using qfast::Placement;
using qfast::RealVector;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%s] (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
              seconds_since(start));
  std::fflush(stdout);
}

std::string format(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

ComplexMatrix qft(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  ComplexMatrix f(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                           2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(d));
    }
  }
  return f;
}

ComplexMatrix toffoli() {
  ComplexMatrix u = ComplexMatrix::Identity(8, 8);
  u(6, 6) = u(7, 7) = 0.0;
  u(6, 7) = u(7, 6) = 1.0;
  return u;
}

// Every synthesized circuit, kept for the fidelity and determinism checks.
struct Run {
  std::string name;
  ComplexMatrix target;
  qfast::SynthesisConfig cfg;
  qfast::SynthesisResult result;
  std::string qasm;
  double seconds = 0.0;
};
std::vector<Run> runs;

Run& synth(const std::string& name, const ComplexMatrix& target, const qfast::SynthesisConfig& cfg) {
  const auto start = Clock::now();
  Run r{name, target, cfg, qfast::synthesize_detailed(target, cfg), {}, 0.0};
  r.seconds = seconds_since(start);
  r.qasm = qfast::emit_qasm(r.result.program);
  std::printf("  %s: cnots %zu, distance %.3g, %.1f s\n", name.c_str(), qfast::cnot_count(r.result.program),
              r.result.distance, r.seconds);
  runs.push_back(std::move(r));
  return runs.back();
}

RealVector random_vector(Eigen::Index size, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  RealVector v(size);
  for (auto& x : v) x = normal(rng);
  return v;
}

Outcome gradient_correctness() {
  int checked = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const int n = 2 + static_cast<int>(seed % 2);
    const int depth = 1 + static_cast<int>(seed % 3);
    const auto places = qfast::enumerate_placements(n, 2, qfast::Topology::all_to_all(n));
    CircuitEncoding enc{n, 2, {}};
    for (int k = 0; k < depth; ++k) {
      if (seed % 4 < 2) {
        enc.layers.emplace_back(qfast::GenericLayer{random_vector(16, rng, 0.7),
                                                    random_vector(static_cast<Eigen::Index>(places.size()), rng, 1.0),
                                                    places});
      } else {
        enc.layers.emplace_back(qfast::FixedLayer{random_vector(16, rng, 0.7), places[rng() % places.size()]});
      }
    }
    const ComplexMatrix u_t = qfast::random_unitary(n, 7000 + seed);
    const RealVector analytic = qfast::loss_and_grad(enc, u_t).flat();
    auto f = [probe = enc, &u_t](const RealVector& x) mutable {
      qfast::unpack_parameters(probe, x);
      return oracle::naive_loss(qfast::circuit_unitary(probe), u_t);
    };
    const RealVector fd = oracle::central_difference(f, qfast::pack_parameters(enc), 1e-6);
    for (Eigen::Index k = 0; k < fd.size(); ++k) {
      const double excess = std::abs(analytic(k) - fd(k)) / std::max(1e-8, 1e-4 * std::abs(fd(k)));
      worst = std::max(worst, excess);
      ++checked;
    }
  }
  return {worst <= 1.0, std::to_string(checked) + " partials, worst error/tolerance " + format("%.3g", worst)};
}

Outcome representation_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const int n = 2 + static_cast<int>(seed % 3);
    const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const auto places = qfast::enumerate_placements(n, m, qfast::Topology::all_to_all(n));
    const Placement q = places[rng() % places.size()];
    const RealVector alpha = random_vector(Eigen::Index{1} << (2 * m), rng, 1.0);
    const ComplexMatrix lifted = qfast::lift(qfast::extract_local(alpha, q), q.qubits, n);
    worst = std::max(worst, qfast::max_abs_diff(lifted, qfast::fixed_gate_unitary(qfast::FixedLayer{alpha, q}, n)));
  }
  return {worst <= 1e-10, "20 pairs, max deviation " + format("%.3g", worst)};
}

Outcome loss_law() {
  const ComplexMatrix u = qfast::random_unitary(3, 99);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  bool ok = qfast::loss(u, u) <= 1e-12;
  ok = ok && qfast::loss(ComplexMatrix(std::polar(1.0, 0.77) * u), u) <= 1e-12;
  ok = ok && std::abs(qfast::loss(id, oracle::pauli('X')) - 1.0) <= 1e-12;
  double worst = 0.0;
  for (const double theta : {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3}) {
    worst = std::max(worst, std::abs(qfast::loss(id, oracle::expi(theta * oracle::pauli('Z'))) - std::sin(theta)));
  }
  ok = ok && worst <= 1e-10;
  return {ok, "max |sin| deviation " + format("%.3g", worst)};
}

Outcome placement_counts() {
  const auto all = qfast::enumerate_placements(4, 2, qfast::Topology::all_to_all(4));
  const auto star = qfast::enumerate_placements(4, 2, qfast::Topology(4, {{0, 1}, {1, 2}, {1, 3}}));
  const std::vector<Placement> expected{{{0, 1}}, {{1, 2}}, {{1, 3}}};
  std::string listed;
  for (const auto& p : star) listed += p.str();
  return {all.size() == 6 && star == expected, "all-to-all " + std::to_string(all.size()) + ", star " + listed};
}

Outcome kak_roundtrip() {
  const auto start = Clock::now();
  double worst = 0.0;
  int max_cnots = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ComplexMatrix u = qfast::random_unitary(2, 20000 + seed);
    const auto r = qfast::kak_decompose(u, seed);
    worst = std::max(worst, qfast::loss(qfast::compose_program(r.program), u));
    max_cnots = std::max(max_cnots, static_cast<int>(qfast::cnot_count(r.program)));
  }
  const auto cx = qfast::kak_decompose(oracle::cnot(0, 1, 2));
  const auto id = qfast::kak_decompose(ComplexMatrix::Identity(4, 4));
  const double elapsed = seconds_since(start);
  const bool ok = worst <= 1e-8 && max_cnots <= 3 && qfast::cnot_count(cx.program) == 1 &&
                  qfast::cnot_count(id.program) == 0 && elapsed <= 30.0;
  return {ok, "worst distance " + format("%.3g", worst) + ", max cnots " + std::to_string(max_cnots) +
                  ", CNOT->" + std::to_string(qfast::cnot_count(cx.program)) + ", I->" +
                  std::to_string(qfast::cnot_count(id.program))};
}

Outcome three_seed_run(const std::string& name, const ComplexMatrix& target, std::size_t max_cnots,
                       double budget_seconds, const std::optional<qfast::Topology>& topo = std::nullopt) {
  bool all_ok = true;
  bool one_tight = false;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    qfast::SynthesisConfig cfg;
    cfg.seed = seed;
    cfg.topology = topo;
    const Run& r = synth(name + "/seed" + std::to_string(seed), target, cfg);
    const std::size_t cnots = qfast::cnot_count(r.result.program);
    all_ok = all_ok && r.result.distance <= 1e-3 && cnots <= max_cnots && r.seconds <= budget_seconds;
    one_tight = one_tight || r.result.distance <= 1e-5;
    detail += (seed ? "; " : "") + std::to_string(cnots) + " cx " + format("%.2g", r.result.distance);
  }
  return {all_ok && one_tight, detail};
}

Outcome hierarchy_check() {
  const ComplexMatrix ga = qfast::random_unitary(2, 31);
  const ComplexMatrix gb = qfast::random_unitary(2, 32);
  const ComplexMatrix target = oracle::lift(ga, {0, 1}, 4) * oracle::lift(gb, {2, 3}, 4);
  qfast::SynthesisConfig cfg;
  const Run& r = synth("hier4", target, cfg);
  std::size_t levels = 0;
  for (const auto& s : r.result.stats) levels = std::max(levels, static_cast<std::size_t>(s.level) + 1);
  const bool ok = r.result.distance <= 1e-2 && r.seconds <= 3600.0 && !r.result.stats.empty();
  return {ok, std::to_string(qfast::cnot_count(r.result.program)) + " cx, distance " +
                  format("%.3g", r.result.distance) + ", " + std::to_string(levels) + " levels, " +
                  std::to_string(r.result.blocks.size()) + " blocks"};
}

Outcome topology_compliance() {
  const qfast::Topology path(3, {{0, 1}, {1, 2}});
  const ComplexMatrix target = qfast::random_unitary(3, 4242);
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    qfast::SynthesisConfig cfg;
    cfg.seed = seed;
    cfg.topology = path;
    const Run& r = synth("path3/seed" + std::to_string(seed), target, cfg);
    std::size_t off_edge = 0;
    for (const auto& g : r.result.program.gates) {
      if (g.kind == qfast::GateKind::CNOT && !path.adjacent(g.qubits[0], g.qubits[1])) ++off_edge;
    }
    ok = ok && off_edge == 0;
    detail += (seed ? "; " : "") + std::to_string(qfast::cnot_count(r.result.program)) + " cx, " +
              std::to_string(off_edge) + " off-edge, " + format("%.2g", r.result.distance);
  }
  return {ok, detail};
}

Outcome fidelity_band() {
  double worst = 1.0;
  int checked = 0;
  for (const auto& r : runs) {
    if (r.result.distance > 1e-3) continue;
    const auto rep = qfast::verify(r.result.program, r.target, 1000, 1);
    worst = std::min(worst, rep.combined_mean);
    ++checked;
  }
  return {checked > 0 && worst >= 0.9999,
          std::to_string(checked) + " circuits, lowest mean fidelity " + format("%.10f", worst)};
}

Outcome determinism() {
  const std::size_t original = runs.size();
  std::size_t identical = 0;
  for (std::size_t k = 0; k < original; ++k) {
    const auto again = qfast::synthesize(runs[k].target, runs[k].cfg);
    if (qfast::emit_qasm(again) == runs[k].qasm) ++identical;
  }
  return {identical == original && original > 0,
          std::to_string(identical) + "/" + std::to_string(original) + " reruns byte-identical"};
}

}  // namespace

int main() {
  report(1, "analytic gradients match central differences", gradient_correctness);
  report(2, "lift(extract_local) equals the fixed gate", representation_oracle);
  report(3, "loss laws", loss_law);
  report(4, "placement counts", placement_counts);
  report(5, "KAK roundtrip", kak_roundtrip);
  report(6, "qft3 end to end", [] { return three_seed_run("qft3", qft(3), 14, 1800.0); });
  report(7, "Toffoli end to end", [] { return three_seed_run("ccx", toffoli(), 48, 2700.0); });
  report(8, "hierarchical 4-qubit decomposition", hierarchy_check);
  report(9, "path topology compliance", topology_compliance);
  report(10, "fidelity band", fidelity_band);
  report(11, "determinism", determinism);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures == 0 ? 0 : 1;
}
