#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace horseshoe::cli {

enum ExitCode : int { ok = 0, failure = 1, usage = 2, accuracy = 3 };

/// An input line that is not a finite decimal number.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One observation per line; blank lines are skipped. Throws InputError with
/// the line number on the first bad line, or if nothing was read.
std::vector<double> parse_observations(std::istream& in, const std::string& source);
std::vector<double> read_observations(const std::filesystem::path& path);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace horseshoe::cli
