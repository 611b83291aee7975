#pragma once

#include <string>

#include "lincom/common.hpp"
#include "lincom/sysalg.hpp"

namespace lincom {

// Parses "1 1 -1 -1 0; 2 -2 3 0 -3" (rows ';'-separated, entries whitespace).
// Throws Error("ParseError", ...) with position info on malformed input.
IntMat parse_matrix(const std::string& text);

std::string matrix_to_text(const IntMat& M);

// "num/den" string for exact rationals in reports.
std::string rat_to_string(const Rat& q);

}  // namespace lincom
