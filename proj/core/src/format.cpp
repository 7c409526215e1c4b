#include "compdist/format.hpp"

#include <array>
#include <charconv>

namespace compdist {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

std::string format_tuple(std::span<const double> values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(values[i]);
    }
    out += ')';
    return out;
}

}  // namespace compdist
