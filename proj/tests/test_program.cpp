#include "oracles.hpp"

#include "qfast/error.hpp"
#include "qfast/program.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace {

using qfast::ComplexMatrix;
using qfast::Gate;
using qfast::Program;

constexpr double kPi = std::numbers::pi;

Program bell_program() {
  Program p;
  p.n = 2;
  p.gates = {Gate::u3(0, kPi / 2, 0.0, kPi), Gate::cnot(0, 1)};
  return p;
}

Program random_program(int n, int gates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  Program p;
  p.n = n;
  p.accumulated_phase = angle(rng);
  for (int k = 0; k < gates; ++k) {
    const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    if (n > 1 && rng() % 3 == 0) {
      const int b = (a + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1))) % n;
      p.gates.push_back(Gate::cnot(a, b));
    } else {
      p.gates.push_back(Gate::u3(a, angle(rng), angle(rng), angle(rng)));
    }
  }
  return p;
}

ComplexMatrix reference_compose(const Program& p) {
  ComplexMatrix u = ComplexMatrix::Identity(Eigen::Index{1} << p.n, Eigen::Index{1} << p.n);
  for (const auto& g : p.gates) {
    if (g.kind == qfast::GateKind::U3) {
      u = oracle::lift(oracle::u3(g.theta, g.phi, g.lambda), {g.qubits[0]}, p.n) * u;
    } else {
      u = oracle::cnot(g.qubits[0], g.qubits[1], p.n) * u;
    }
  }
  return std::polar(1.0, p.accumulated_phase) * u;
}

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::size_t count = 0;
  for (std::string line; std::getline(in, line);) count += line.rfind(prefix, 0) == 0 ? 1 : 0;
  return count;
}

TEST(U3Matrix, StandardConvention) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const qfast::U3Params p{angle(rng), angle(rng), angle(rng), angle(rng)};
    EXPECT_LE(qfast::max_abs_diff(qfast::u3_matrix(p), std::polar(1.0, p.global_phase) * oracle::u3(p.theta, p.phi, p.lambda)),
              1e-15);
  }
}

TEST(ComposeProgram, Empty) {
  Program p;
  p.n = 3;
  EXPECT_EQ(qfast::compose_program(p), ComplexMatrix::Identity(8, 8));
}

TEST(ComposeProgram, BellState) {
  const ComplexMatrix u = qfast::compose_program(bell_program());
  EXPECT_NEAR(std::abs(u(0, 0) - 1.0 / std::numbers::sqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(3, 0) - 1.0 / std::numbers::sqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 0)) + std::abs(u(2, 0)), 0.0, 1e-15);
}

TEST(ComposeProgram, XOnSecondQubit) {
  Program p;
  p.n = 2;
  p.gates = {Gate::u3(1, kPi, 0.0, kPi)};
  const ComplexMatrix expected = qfast::tensor_product(ComplexMatrix::Identity(2, 2), oracle::pauli('X'));
  EXPECT_LE(qfast::max_abs_diff(qfast::compose_program(p), expected), 1e-15);
}

TEST(ComposeProgram, MatchesLiftOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Program p = random_program(1 + static_cast<int>(seed % 4), 12, seed);
    EXPECT_LE(qfast::max_abs_diff(qfast::compose_program(p), reference_compose(p)), 1e-12);
  }
}

TEST(ComposeProgram, AddU3FoldsPhase) {
  Program p;
  p.n = 1;
  p.add_u3(0, qfast::U3Params{0.4, 0.1, -0.2, 0.7});
  p.add_u3(0, qfast::U3Params{0.0, 0.0, 0.0, 0.5});
  EXPECT_NEAR(p.accumulated_phase, 1.2, 1e-15);
  const ComplexMatrix expected = std::polar(1.0, 1.2) * oracle::u3(0.4, 0.1, -0.2);
  EXPECT_LE(qfast::max_abs_diff(qfast::compose_program(p), expected), 1e-15);
}

TEST(Program, Validation) {
  Program p;
  p.n = 2;
  p.gates = {Gate::cnot(1, 1)};
  EXPECT_THROW(p.validate(), qfast::Error);
  p.gates = {Gate::u3(2, 0, 0, 0)};
  EXPECT_THROW(p.validate(), qfast::Error);
  p.gates = {Gate::cnot(1, 0)};
  EXPECT_NO_THROW(p.validate());
}

TEST(CnotCount, Counts) {
  Program empty;
  empty.n = 2;
  EXPECT_EQ(qfast::cnot_count(empty), 0U);
  const Program bell = bell_program();
  EXPECT_EQ(qfast::cnot_count(bell), 1U);
  const Program a = random_program(3, 30, 1);
  const Program b = random_program(3, 30, 2);
  Program joined = a;
  joined.gates.insert(joined.gates.end(), b.gates.begin(), b.gates.end());
  EXPECT_EQ(qfast::cnot_count(joined), qfast::cnot_count(a) + qfast::cnot_count(b));
}

TEST(Qasm, EmptyProgram) {
  Program p;
  p.n = 2;
  EXPECT_EQ(qfast::emit_qasm(p), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n// global_phase: 0\n");
}

TEST(Qasm, BellProgram) {
  const std::string text = qfast::emit_qasm(bell_program());
  EXPECT_EQ(count_lines_starting(text, "u3("), 1U);
  EXPECT_EQ(count_lines_starting(text, "cx q[0],q[1];"), 1U);
  EXPECT_EQ(count_lines_starting(text, "cx "), 1U);
  EXPECT_NE(text.find("u3(1.5707963267948966,0,3.1415926535897931) q[0];"), std::string::npos);
}

TEST(Qasm, RoundTripThroughReferenceReader) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Program p = random_program(1 + static_cast<int>(seed % 4), 25, seed);
    const std::string text = qfast::emit_qasm(p);
    EXPECT_LE(qfast::max_abs_diff(oracle::qasm_unitary(text), qfast::compose_program(p)), 1e-9);
    EXPECT_EQ(qfast::emit_qasm(p), text);
    const Program back = qfast::parse_qasm(text);
    EXPECT_EQ(qfast::emit_qasm(back), text);
  }
}

TEST(Qasm, ParserRejectsGarbage) {
  EXPECT_THROW(qfast::parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[0];\n"), qfast::Error);
  EXPECT_THROW(qfast::parse_qasm("OPENQASM 2.0;\n"), qfast::Error);
}

TEST(UnitaryFile, IdentityDocument) {
  const ComplexMatrix u = qfast::parse_unitary(R"({"n": 1, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]})");
  EXPECT_EQ(u, ComplexMatrix::Identity(2, 2));
}

TEST(UnitaryFile, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexMatrix u = qfast::random_unitary(2, seed);
    const std::string text = qfast::write_unitary(u);
    const ComplexMatrix back = qfast::parse_unitary(text);
    EXPECT_LE(qfast::max_abs_diff(back, u), 1e-15);
    EXPECT_EQ(qfast::write_unitary(back), text);
  }
}

TEST(UnitaryFile, Errors) {
  auto kind_of = [](const std::string& text) {
    try {
      qfast::parse_unitary(text);
    } catch (const qfast::Error& e) {
      return e.kind();
    }
    return qfast::ErrorKind::Unsupported;
  };
  EXPECT_EQ(kind_of(R"({"n": 1, "re": [[1, 0], [0, 1], [0, 0]], "im": [[0, 0], [0, 0], [0, 0]]})"),
            qfast::ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of(R"({"n": 1, "re": [[1, 1], [0, 1]], "im": [[0, 0], [0, 0]]})"), qfast::ErrorKind::NotUnitary);
  EXPECT_EQ(kind_of(R"({"n": 1, "re": [[1, 0], [0, 1]]})"), qfast::ErrorKind::MalformedFile);
  EXPECT_EQ(kind_of("not json"), qfast::ErrorKind::MalformedFile);
}

TEST(Verify, ExactProgram) {
  const Program p = random_program(3, 20, 9);
  const auto r = qfast::verify(p, qfast::compose_program(p), 200, 4);
  EXPECT_LE(r.distance, 1e-12);
  ASSERT_EQ(r.basis_fidelity.size(), 8U);
  for (const double f : r.basis_fidelity) EXPECT_NEAR(f, 1.0, 1e-12);
  EXPECT_NEAR(r.random_mean, 1.0, 1e-12);
  EXPECT_NEAR(r.random_min, 1.0, 1e-12);
  EXPECT_NEAR(r.combined_mean, 1.0, 1e-12);
  EXPECT_EQ(r.trials, 200);
}

TEST(Verify, PhaseInsensitive) {
  Program p = random_program(2, 10, 3);
  const ComplexMatrix u = qfast::compose_program(p);
  p.accumulated_phase += 1.3;
  const auto r = qfast::verify(p, u, 50, 1);
  EXPECT_LE(r.distance, 1e-12);
  EXPECT_NEAR(r.random_min, 1.0, 1e-12);
}

TEST(Verify, DeterministicPerSeed) {
  const Program p = random_program(2, 10, 3);
  const ComplexMatrix u = qfast::random_unitary(2, 77);
  const auto a = qfast::verify(p, u, 100, 5);
  const auto b = qfast::verify(p, u, 100, 5);
  const auto c = qfast::verify(p, u, 100, 6);
  EXPECT_EQ(a.random_mean, b.random_mean);
  EXPECT_EQ(a.random_min, b.random_min);
  EXPECT_NE(a.random_mean, c.random_mean);
}

TEST(Verify, SmallDistanceGivesHighFidelity) {
  const Program p = random_program(3, 20, 12);
  const ComplexMatrix exact = qfast::compose_program(p);
  const ComplexMatrix target = oracle::expi(1e-3 * oracle::random_hermitian(8, 2).normalized()) * exact;
  const auto r = qfast::verify(p, target, 1000, 0);
  EXPECT_LE(r.distance, 1e-3);
  EXPECT_GE(r.random_mean, 0.9999);
  EXPECT_GE(r.combined_mean, 0.9999);
}

TEST(Verify, DimensionMismatch) {
  EXPECT_THROW(qfast::verify(bell_program(), ComplexMatrix::Identity(8, 8), 10, 0), qfast::Error);
}

}  // namespace
