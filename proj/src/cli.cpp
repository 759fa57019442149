#include "qfast/cli.hpp"

#include "qfast/error.hpp"
#include "qfast/instantiate.hpp"
#include "qfast/program.hpp"
#include "qfast/synthesis.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace qfast::cli {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedFile:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::NotUnitary:
    case ErrorKind::DimMismatch:
    case ErrorKind::Io:
      return true;
    default:
      return false;
  }
}

// CLI11 consumes its argument vector from the back.
int parse_args(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               bool& done) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  done = false;
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    done = true;
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return is_input_error(e.kind()) ? kExitIo : kExitSynthesis;
}

std::optional<Topology> load_topology(const std::string& spec, int n) {
  if (spec.empty() || spec == "all") return std::nullopt;
  return Topology(n, parse_edge_list(read_text_file(spec)));
}

}  // namespace

std::vector<std::pair<int, int>> parse_edge_list(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int u = 0;
    int v = 0;
    std::string extra;
    if (!(fields >> u >> v) || (fields >> extra)) {
      throw Error(ErrorKind::MalformedFile, "edge list line " + std::to_string(line_no) + " is not `u v`");
    }
    edges.emplace_back(u, v);
  }
  return edges;
}

int cmd_synth(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize a unitary into u3 + cx gates", "synth"};
  SynthesisConfig cfg;
  std::string in_path;
  std::string out_path;
  std::string report_path;
  std::string topology = "all";
  double threshold = 1e-3;
  bool verbose = false;
  app.add_option("--in", in_path, "Input unitary file")->required();
  app.add_option("--out", out_path, "Output QASM file");
  app.add_option("--report", report_path, "Write the metrics row (with header) here");
  app.add_option("--block-size", cfg.native_block_size, "Native block size")->capture_default_str();
  app.add_option("--topology", topology, "Edge list file, or `all`")->capture_default_str();
  app.add_option("--exploration-distance", cfg.exploration_distance)->capture_default_str();
  app.add_option("--refinement-distance", cfg.refinement_distance)->capture_default_str();
  app.add_option("--seed", cfg.seed)->capture_default_str();
  app.add_option("--max-layers", cfg.max_layers)->capture_default_str();
  app.add_option("--lr-explore", cfg.lr_explore)->capture_default_str();
  app.add_option("--lr-refine", cfg.lr_refine)->capture_default_str();
  app.add_option("--threshold", threshold, "Exit 0 only if distance <= threshold")->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "Print per-level statistics to stderr");

  bool done = false;
  if (const int rc = parse_args(app, args, out, err, done); done) return rc;

  ComplexMatrix target;
  int n = 0;
  try {
    target = parse_unitary(read_text_file(in_path));
    n = qubit_count(target);
    cfg.topology = load_topology(topology, n);
    cfg.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  SynthesisResult res;
  const auto start = std::chrono::steady_clock::now();
  try {
    res = synthesize_detailed(target, cfg);
  } catch (const Error& e) {
    return report_error(e, err);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (verbose) {
    for (const auto& s : res.stats) {
      err << "level " << s.level << ": " << s.parent_qubits << "q -> " << s.depth << " blocks of "
          << s.block_size << "q, explore " << short_fmt(s.exploration_loss) << ", refine "
          << short_fmt(s.refined_loss) << '\n';
    }
  }

  const std::string name = std::filesystem::path(in_path).stem().string();
  const std::string row = name + ", " + std::to_string(n) + ", " + std::to_string(cnot_count(res.program)) + ", " +
                          short_fmt(res.distance) + ", " + short_fmt(seconds);
  out << row << '\n';
  try {
    if (!out_path.empty()) write_text_file(out_path, emit_qasm(res.program));
    if (!report_path.empty()) write_text_file(report_path, "name, n, cnot_count, distance, time_seconds\n" + row + '\n');
  } catch (const Error& e) {
    return report_error(e, err);
  }
  return res.distance <= threshold ? kExitOk : kExitFailed;
}

int cmd_verify(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare a QASM program against a unitary", "verify"};
  std::string program_path;
  std::string unitary_path;
  int trials = 1000;
  std::uint64_t seed = 0;
  app.add_option("--program", program_path, "QASM file written by synth or kak")->required();
  app.add_option("--unitary", unitary_path, "Target unitary file")->required();
  app.add_option("--trials", trials, "Random input states")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed)->capture_default_str();

  bool done = false;
  if (const int rc = parse_args(app, args, out, err, done); done) return rc;

  VerifyReport rep;
  try {
    const Program p = parse_qasm(read_text_file(program_path));
    const ComplexMatrix target = parse_unitary(read_text_file(unitary_path));
    rep = verify(p, target, trials, seed);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  out << "distance: " << fmt(rep.distance) << '\n';
  for (std::size_t k = 0; k < rep.basis_fidelity.size(); ++k) {
    out << "basis " << k << ": " << fmt(rep.basis_fidelity[k]) << '\n';
  }
  out << "basis_mean: " << fmt(rep.basis_mean) << '\n'
      << "basis_min: " << fmt(rep.basis_min) << '\n'
      << "random_trials: " << rep.trials << '\n'
      << "random_mean: " << fmt(rep.random_mean) << '\n'
      << "random_min: " << fmt(rep.random_min) << '\n'
      << "combined_mean: " << fmt(rep.combined_mean) << '\n';
  return kExitOk;
}

int cmd_kak(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decompose a two-qubit unitary into at most three CNOTs", "kak"};
  std::string in_path;
  std::string out_path;
  std::uint64_t seed = 0;
  app.add_option("--in", in_path, "Input 4x4 unitary file")->required();
  app.add_option("--out", out_path, "Output QASM file");
  app.add_option("--seed", seed)->capture_default_str();

  bool done = false;
  if (const int rc = parse_args(app, args, out, err, done); done) return rc;

  ComplexMatrix target;
  try {
    target = parse_unitary(read_text_file(in_path));
    if (target.rows() != 4) throw Error(ErrorKind::ShapeMismatch, "kak needs a 2-qubit unitary");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  KakResult res;
  try {
    res = kak_decompose(target, seed);
    if (!out_path.empty()) write_text_file(out_path, emit_qasm(res.program));
  } catch (const Error& e) {
    return report_error(e, err);
  }
  out << "cnot_count: " << res.cnot_count << '\n'
      << "coefficients: " << fmt(res.coefficients[0]) << ' ' << fmt(res.coefficients[1]) << ' '
      << fmt(res.coefficients[2]) << '\n'
      << "distance: " << fmt(res.distance) << '\n';
  if (out_path.empty()) out << emit_qasm(res.program);
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static constexpr const char* kUsage = "usage: qfast {synth|verify|kak} [options]  (--help for details)\n";
  if (args.empty()) {
    err << kUsage;
    return kExitIo;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "synth") return cmd_synth(rest, out, err);
  if (args[0] == "verify") return cmd_verify(rest, out, err);
  if (args[0] == "kak") return cmd_kak(rest, out, err);
  if (args[0] == "-h" || args[0] == "--help") {
    out << kUsage;
    return kExitOk;
  }
  err << "unknown command '" << args[0] << "'\n" << kUsage;
  return kExitIo;
}

}  // namespace qfast::cli
