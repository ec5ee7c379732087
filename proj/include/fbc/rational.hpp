#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace fbc {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt floor_of(const Rational& r) {
    BigInt n = boost::multiprecision::numerator(r);
    BigInt d = boost::multiprecision::denominator(r);
    BigInt q = n / d;
    if (n < 0 && q * d != n) q -= 1;
    return q;
}

inline bool is_integral(const Rational& r) {
    return boost::multiprecision::denominator(r) == 1;
}

// "num/den" with den > 0; integers still carry "/1" so parsing is uniform.
inline std::string to_string(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt n(s.substr(0, slash));
        BigInt d(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("zero denominator");
        return Rational(n, d);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: " + s);
    }
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace fbc
