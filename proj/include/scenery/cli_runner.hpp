#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scenery::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitInterrupted = 130;

// Runs one experiment. args excludes the program name. With --out STEM the
// results go to STEM.csv and STEM.json (each written to a temp file, then
// renamed); otherwise the CSV (or, with --format json, the JSON summary) goes
// to out. Errors are reported on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

// SIGINT/SIGTERM raise the cancellation flag; the run then writes what it has
// with "partial": true.
void install_interrupt_handler();

// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace scenery::cli
