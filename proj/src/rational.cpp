#include "dsym/rational.hpp"

#include <cctype>
#include <cmath>

namespace dsym {

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
    BigInt num(static_cast<std::int64_t>(std::ldexp(mant, 53)));
    exp -= 53;
    Rational q(num);
    if (exp > 0)
        q *= Rational(BigInt(1) << exp);
    else if (exp < 0)
        q /= Rational(BigInt(1) << (-exp));
    return q;
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty numeric literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(BigInt(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    size_t frac_len = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("bad numeric literal '" + text + "'");
    BigInt num(digits);
    BigInt den = 1;
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(num, den);
}

std::string rational_to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

}  // namespace dsym
