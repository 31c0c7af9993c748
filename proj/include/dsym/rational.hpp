#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dsym {

using BigInt = boost::multiprecision::cpp_int;
// plain-value rational (no expression templates) so it composes with generic code
using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

/// Exact conversion (every binary64 is a dyadic rational).
Rational rational_from_double(double x);

/// Parses "p/q", "n", or a plain decimal like "-3.25". Throws on anything else.
Rational parse_rational(const std::string& text);

/// Complex number with exact rational parts. Coefficients parsed from the
/// symbol grammar are always representable this way.
struct RationalComplex {
    Rational re{0};
    Rational im{0};

    RationalComplex() = default;
    RationalComplex(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

    RationalComplex operator+(const RationalComplex& o) const { return {re + o.re, im + o.im}; }
    RationalComplex operator-(const RationalComplex& o) const { return {re - o.re, im - o.im}; }
    RationalComplex operator-() const { return {-re, -im}; }
    RationalComplex operator*(const RationalComplex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    RationalComplex& operator+=(const RationalComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    bool operator==(const RationalComplex& o) const { return re == o.re && im == o.im; }
};

/// Canonical text for a rational ("9/2", "-3", "0"). Used by the symbol printer.
std::string rational_to_string(const Rational& q);

}  // namespace dsym
