#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qfast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitSynthesis = 3;

/// Each command parses its own flags (args excludes the program and
/// subcommand names) and reports errors on `err`.
int cmd_synth(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_verify(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_kak(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Dispatches on args[0] in {synth, verify, kak}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses one `u v` edge per line; `all` (or an empty path) selects all-to-all.
/// Blank lines and `#` comments are skipped. Throws MalformedFile.
std::vector<std::pair<int, int>> parse_edge_list(const std::string& text);

}  // namespace qfast::cli
