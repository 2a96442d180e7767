#pragma once

#include <string>

#include "msll/linalg.hpp"

namespace msll {

// Shortest decimal form that round-trips a double exactly (17 significant
// digits). All file formats use it so written values re-read bit-identically.
std::string format_double(double x);

// Comma-joined format_double of every component.
std::string format_vector(const Vector& v);

// Strict parsers: the whole string must be consumed. context prefixes the
// FormatError message, typically "file:line: key".
double parse_double(const std::string& s, const std::string& context);
Vector parse_vector(const std::string& s, const std::string& context);

}  // namespace msll
