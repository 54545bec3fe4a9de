#include "actr/types.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace actr {

bool slot_value_less(const SlotValue& a, const SlotValue& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    if (const auto* na = std::get_if<double>(&a))
        return *na < std::get<double>(b);
    if (const auto* sa = std::get_if<std::string>(&a))
        return *sa < std::get<std::string>(b);
    return std::get<ChunkRef>(a).id < std::get<ChunkRef>(b).id;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string format_fixed(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 96> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::fixed, precision);
    return std::string(buf.data(), ptr);
}

}  // namespace actr
