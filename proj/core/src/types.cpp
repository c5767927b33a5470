#include "pairdeg/types.hpp"

#include <fmt/format.h>

namespace pairdeg {

std::string format_complex(cplx z) {
    return fmt::format("{:.10g}{:+.10g}i", z.real(), z.imag());
}

std::string OutputMeta::csv_comment() const {
    if (empty()) return {};
    std::string line = "#";
    if (!tool.empty()) line += " " + tool;
    if (!version.empty()) line += " version=" + version;
    if (!config_hash.empty()) line += " config_hash=" + config_hash;
    return line + "\n";
}

}  // namespace pairdeg
