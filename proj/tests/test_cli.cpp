#include "oracles.hpp"

#include "qfast/ansatz.hpp"
#include "qfast/cli.hpp"
#include "qfast/error.hpp"
#include "qfast/instantiate.hpp"
#include "qfast/program.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using qfast::ComplexMatrix;

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qfast_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_matrix(const std::string& name, const ComplexMatrix& u) const {
    qfast::write_text_file(path(name), qfast::write_unitary(u));
    return path(name);
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return qfast::cli::run(args, out_, err_);
  }

  std::string value_of(const std::string& key) const {
    std::istringstream in(out_.str());
    for (std::string line; std::getline(in, line);) {
      if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    }
    return {};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SynthCnotUsesOneCnot) {
  const std::string in = write_matrix("cnot2q.unitary", oracle::cnot(0, 1, 2));
  ASSERT_EQ(run({"synth", "--in", in, "--out", path("cnot.qasm"), "--report", path("cnot.csv")}), 0) << err_.str();
  const std::string qasm = qfast::read_text_file(path("cnot.qasm"));
  const qfast::Program p = qfast::parse_qasm(qasm);
  EXPECT_EQ(qfast::cnot_count(p), 1U);
  EXPECT_LE(oracle::naive_loss(oracle::qasm_unitary(qasm), oracle::cnot(0, 1, 2)), 1e-7);
  EXPECT_LE(qfast::loss(qfast::compose_program(p), oracle::cnot(0, 1, 2)), 1e-8);
  // name, n, cnot_count, distance, time_seconds
  const std::string row = out_.str();
  EXPECT_EQ(row.rfind("cnot2q, 2, 1, ", 0), 0U) << row;
  const std::string report = qfast::read_text_file(path("cnot.csv"));
  EXPECT_EQ(report.rfind("name, n, cnot_count, distance, time_seconds\ncnot2q, 2, 1, ", 0), 0U) << report;
}

TEST_F(CliTest, SynthBadFileExitsTwo) {
  qfast::write_text_file(path("bad.unitary"), "{\"n\": 1, \"re\": [[1]]");
  EXPECT_EQ(run({"synth", "--in", path("bad.unitary")}), 2);
  EXPECT_NE(err_.str().find("MalformedFile"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"synth", "--in", path("missing.unitary")}), 2);
  EXPECT_EQ(run({"synth"}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
}

TEST_F(CliTest, SynthThresholdControlsExit) {
  const std::string in = write_matrix("u.unitary", qfast::random_unitary(2, 3));
  EXPECT_EQ(run({"synth", "--in", in, "--threshold", "1e-6"}), 0);
  EXPECT_EQ(run({"synth", "--in", in, "--threshold", "-1"}), 1);
}

TEST_F(CliTest, SynthWithTopologyFile) {
  const std::string in = write_matrix("ccz.unitary", oracle::lift(oracle::cnot(0, 1, 2), {1, 2}, 3));
  qfast::write_text_file(path("path.edges"), "# path\n0 1\n\n1 2\n");
  ASSERT_EQ(run({"synth", "--in", in, "--topology", path("path.edges"), "--out", path("o.qasm")}), 0) << err_.str();
  for (const auto& g : qfast::parse_qasm(qfast::read_text_file(path("o.qasm"))).gates) {
    if (g.kind == qfast::GateKind::CNOT) EXPECT_NE(std::abs(g.qubits[0] - g.qubits[1]), 2);
  }
  qfast::write_text_file(path("wrong.edges"), "0 1\n1 5\n");
  EXPECT_EQ(run({"synth", "--in", in, "--topology", path("wrong.edges")}), 2);
}

TEST_F(CliTest, SynthIsByteDeterministic) {
  const std::string in = write_matrix("t.unitary", oracle::cnot(0, 2, 3));
  ASSERT_EQ(run({"synth", "--in", in, "--out", path("a.qasm"), "--seed", "7"}), 0) << err_.str();
  ASSERT_EQ(run({"synth", "--in", in, "--out", path("b.qasm"), "--seed", "7"}), 0) << err_.str();
  EXPECT_EQ(qfast::read_text_file(path("a.qasm")), qfast::read_text_file(path("b.qasm")));
}

TEST_F(CliTest, VerifyExactPairAndDeterminism) {
  const ComplexMatrix u = qfast::random_unitary(2, 11);
  const std::string in = write_matrix("u.unitary", u);
  ASSERT_EQ(run({"kak", "--in", in, "--out", path("u.qasm")}), 0) << err_.str();
  const std::vector<std::string> args{"verify", "--program", path("u.qasm"), "--unitary", in, "--trials", "1000", "--seed", "1"};
  ASSERT_EQ(run(args), 0) << err_.str();
  const std::string first = out_.str();
  EXPECT_LE(std::stod(value_of("distance")), 1e-8);
  EXPECT_NEAR(std::stod(value_of("combined_mean")), 1.0, 1e-12);
  EXPECT_EQ(value_of("random_trials"), "1000");
  ASSERT_EQ(run(args), 0);
  EXPECT_EQ(out_.str(), first);
}

TEST_F(CliTest, VerifyReportsPerturbation) {
  const ComplexMatrix u = qfast::random_unitary(2, 12);
  const std::string in = write_matrix("u.unitary", u);
  qfast::Program p = qfast::parse_qasm(qfast::emit_qasm(qfast::kak_decompose(u).program));
  p.gates[0].theta += 0.05;
  qfast::write_text_file(path("p.qasm"), qfast::emit_qasm(p));
  ASSERT_EQ(run({"verify", "--program", path("p.qasm"), "--unitary", in, "--trials", "100"}), 0);
  EXPECT_LT(std::stod(value_of("random_mean")), 1.0 - 1e-6);
  EXPECT_GT(std::stod(value_of("distance")), 1e-3);
  EXPECT_EQ(run({"verify", "--program", path("nope.qasm"), "--unitary", in}), 2);
}

TEST_F(CliTest, KakExamples) {
  ASSERT_EQ(run({"kak", "--in", write_matrix("id.unitary", ComplexMatrix::Identity(4, 4))}), 0);
  EXPECT_EQ(value_of("cnot_count"), "0");
  EXPECT_NE(out_.str().find("OPENQASM 2.0;"), std::string::npos);
  ASSERT_EQ(run({"kak", "--in", write_matrix("cx.unitary", oracle::cnot(0, 1, 2))}), 0);
  EXPECT_EQ(value_of("cnot_count"), "1");
  ASSERT_EQ(run({"kak", "--in", write_matrix("r.unitary", qfast::random_unitary(2, 5))}), 0);
  EXPECT_LE(std::stoi(value_of("cnot_count")), 3);
  EXPECT_LE(std::stod(value_of("distance")), 1e-8);
  EXPECT_EQ(run({"kak", "--in", write_matrix("three.unitary", qfast::random_unitary(3, 5))}), 2);
}

TEST(ParseEdgeList, Formats) {
  const auto edges = qfast::cli::parse_edge_list("# comment\n0 1\n\n  1 2  \n2 3 # trailing\n");
  EXPECT_EQ(edges, (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_THROW(qfast::cli::parse_edge_list("0\n"), qfast::Error);
  EXPECT_THROW(qfast::cli::parse_edge_list("0 x\n"), qfast::Error);
  EXPECT_THROW(qfast::cli::parse_edge_list("0 1 2\n"), qfast::Error);
}

}  // namespace
