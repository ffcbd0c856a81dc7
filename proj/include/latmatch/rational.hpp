#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "latmatch/errors.hpp"

namespace latmatch {

// Exact rational number. All matching values, weights and fitness values are
// kept exact; decimals only appear at the rendering edge.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "p/q" and plain decimals like "0.63" (all parsed exactly).
inline Rat parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw ValidationError("empty rational literal");
    auto bad = [&] { throw ValidationError("malformed rational literal '" + s + "'"); };
    std::size_t dot = s.find('.');
    try {
        if (dot != std::string::npos) {
            if (s.find('/') != std::string::npos) bad();
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            std::size_t frac_len = s.size() - dot - 1;
            if (frac_len == 0 || digits.empty()) bad();
            Rat r(mpz_class(digits, 10));
            mpz_class den(1);
            for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
            r /= Rat(den);
            r.canonicalize();
            return r;
        }
        Rat r(s, 10);
        if (r.get_den() == 0) throw ValidationError("zero denominator in '" + s + "'");
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        bad();
    }
    return Rat();  // unreachable
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }

}  // namespace latmatch
