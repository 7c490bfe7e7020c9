#pragma once

#include "cca/fock.hpp"

#include <complex>
#include <string>
#include <vector>

namespace cca::cli {

/// Entry point used by the binary and by tests. Returns the process exit
/// status: 0 on success, 2 on configuration/validation failure, 3 on
/// numerical-guard aborts (dimension cap, trace drift).
int run_command(const std::vector<std::string>& args);

/// Parses complex literals of the form "a+bi": "0.5", "0.1i", "-1+0.5i", "i".
std::complex<double> parse_complex(std::string text);

/// Parses a comma-separated occupation list such as "1,0,0".
Occupation parse_occupation(const std::string& text);

/// 12-significant-digit, locale-independent number formatting used by every
/// CSV artifact.
std::string format_number(double value);

}  // namespace cca::cli
