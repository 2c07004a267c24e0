#include "critwin/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace critwin {
namespace io {

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (x == 0.0) {
        return "0";
    }
    char buffer[48];
    if (std::fabs(x) < 1e-4) {
        std::snprintf(buffer, sizeof buffer, "%.16e", x);
    } else {
        std::snprintf(buffer, sizeof buffer, "%.17g", x);
    }
    return buffer;
}

std::string format_scientific(double x, int digits) {
    if (digits < 1) {
        throw std::invalid_argument("format_scientific: digits >= 1 required");
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*e", digits - 1, x);
    return buffer;
}

std::string format_xreal(const xreal& x, int digits) {
    if (digits < 1) {
        throw std::invalid_argument("format_xreal: digits >= 1 required");
    }
    std::ostringstream out;
    out << std::scientific << std::setprecision(digits - 1) << x;
    return out.str();
}

std::string csv_field(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing: " +
                                 std::strerror(errno));
    }
    out << content;
    out.flush();
    if (!out) {
        throw std::runtime_error("error while writing '" + path + "': " +
                                 std::strerror(errno));
    }
}

}  // namespace io
}  // namespace critwin
