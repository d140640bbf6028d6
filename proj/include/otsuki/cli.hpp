#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace otsuki {

/// Command-line entry point. Subcommands: geodesic, spectrum, edwards,
/// index, verify, sweep. Returns 0 on success, 1 on usage or validation
/// errors and 2 on numerical or cross-check failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses a sweep list: one "p/q" or "p q" per line, '#' starts a comment.
/// The result is sorted by (p, q) with duplicates removed.
std::vector<std::pair<int, int>> parse_sweep_list(std::istream& in);

} // namespace otsuki
