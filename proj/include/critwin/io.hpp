// io.hpp -- small formatting and file helpers shared by the CSV/JSON
// emitters.  All formatting is locale-independent ('.' decimal separator)
// and deterministic, so identical inputs produce byte-identical outputs.

#pragma once

#include "critwin/specfun.hpp"

#include <string>

namespace critwin {
namespace io {

// Round-trip-safe decimal rendering: scientific notation for 0 < |x| < 1e-4,
// plain otherwise; "nan"/"inf" spelled out.
std::string format_number(double x);

// Scientific notation with the given number of significant digits.
std::string format_scientific(double x, int digits);

// Extended-precision value in scientific notation with `digits` significant
// digits.
std::string format_xreal(const xreal& x, int digits);

// RFC-4180 field escaping: quotes the field if it contains a comma, quote,
// or newline; doubles embedded quotes.
std::string csv_field(const std::string& field);

// Writes content to path, throwing std::runtime_error (with errno text) on
// failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace io
}  // namespace critwin
