#pragma once

// Command-line value parsers: complex numbers as "re+imi", windows and
// integer lists as comma-separated fields.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "equidist.hpp"

namespace cubicpcf {

namespace detail {

// Strict decimal parse of the whole of s.
inline double parse_decimal(const std::string& s, const std::string& whole) {
    if (s.empty()) throw UsageError("malformed complex number '" + whole + "'");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw UsageError("malformed complex number '" + whole + "'");
    return v;
}

}  // namespace detail

/// "1.5", "-2i", "i", "0.5-0.25i", "1e-3+2e2i".
inline Complex parse_complex(const std::string& text) {
    if (text.empty()) throw UsageError("empty complex literal");
    if (text.back() != 'i') return {detail::parse_decimal(text, text), 0.0};
    const std::string body = text.substr(0, text.size() - 1);
    // split at the last sign that is not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re = split == std::string::npos ? "" : body.substr(0, split);
    std::string im = split == std::string::npos ? body : body.substr(split);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    return {re.empty() ? 0.0 : detail::parse_decimal(re, text), detail::parse_decimal(im, text)};
}

/// "re_min,re_max,im_min,im_max".
inline Window parse_window(const std::string& text) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string field = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        v.push_back(detail::parse_decimal(field, text));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (v.size() != 4) throw UsageError("window needs four comma-separated numbers, got '" + text + "'");
    Window w{v[0], v[1], v[2], v[3]};
    w.validate();
    return w;
}

/// "4,6,8".
inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string field = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        char* end = nullptr;
        errno = 0;
        const long v = field.empty() ? 0 : std::strtol(field.c_str(), &end, 10);
        if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE || v < 0 || v > 1000000)
            throw UsageError("malformed integer list '" + text + "'");
        out.push_back(static_cast<int>(v));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace cubicpcf
