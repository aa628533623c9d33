#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace sprshift {

using BigInt = boost::multiprecision::cpp_int;

// Natural log of a positive big integer, accurate to ~1 ulp of double.
inline double log_big(const BigInt& z) {
    if (z <= 0) return -std::numeric_limits<double>::infinity();
    const long bits = static_cast<long>(boost::multiprecision::msb(z));
    if (bits <= 52) return std::log(z.template convert_to<double>());
    const BigInt top = z >> (bits - 52);
    return std::log(top.template convert_to<double>()) + double(bits - 52) * M_LN2;
}

} // namespace sprshift
