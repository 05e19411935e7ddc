#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qkemp/asymptotics.hpp"
#include "qkemp/qcalc.hpp"

namespace qkemp::cli {

/// Exit statuses of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitInvalid = 2;

/// Runs one command line (without the program name). The document goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1.5", "q^-10", "2*q^-60.3": theta in scaled form, never overflowing.
ScaledReal parse_theta(const std::string& text, QBase q);
/// "3/10" -> (3, 10).
std::pair<std::int64_t, std::int64_t> parse_fraction(const std::string& text);
/// "200:400", "200:400:10" or "10,20,40".
std::vector<std::int64_t> parse_n_list(const std::string& text);

}  // namespace qkemp::cli
