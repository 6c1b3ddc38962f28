#include "positlab/scalar.hpp"

#include <cctype>
#include <charconv>

namespace positlab {

namespace {

unsigned parse_unsigned(std::string_view s, std::string_view whole)
{
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("unknown scalar '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

AnyArith parse_arith(std::string_view name)
{
    std::string lower(name);
    for (char& c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "f64" || lower == "double" || lower == "binary64") {
        return Float64Arith{};
    }
    if (lower == "f32" || lower == "float" || lower == "binary32") {
        return Float32Arith{};
    }
    if (lower == "rational") {
        return RationalArith{};
    }
    std::string_view s(lower);
    if (s.starts_with("posit<")) {
        if (!s.ends_with(">")) {
            throw std::invalid_argument("unknown scalar '" + std::string(name) + "'");
        }
        return PositArith(PositConfig::parse(s.substr(6, s.size() - 7)));
    }
    if (s.starts_with("posit")) {
        auto rest = s.substr(5);
        auto us = rest.find('_');
        if (us == std::string_view::npos) {
            throw std::invalid_argument("unknown scalar '" + std::string(name) + "'");
        }
        return PositArith(PositConfig(parse_unsigned(rest.substr(0, us), name), parse_unsigned(rest.substr(us + 1), name)));
    }
    throw std::invalid_argument("unknown scalar '" + std::string(name) +
                                "' (expected f64, f32, rational, positN_E or posit<N,E>)");
}

std::string arith_id(const AnyArith& a)
{
    if (auto* p = std::get_if<PositArith>(&a)) {
        return "posit" + std::to_string(p->config.nbits) + "_" + std::to_string(p->config.es);
    }
    return std::visit([](const auto& s) { return s.name(); }, a);
}

}  // namespace positlab
