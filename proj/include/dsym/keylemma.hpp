#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "dsym/rational.hpp"
#include "dsym/series.hpp"

namespace dsym {

/// Parameters of the canonical degree-2 two-variable family
///   Phi(z) = a1(1-z1) + a2(1-z2) + b1(1-z1)^2 + b2(1-z2)^2 + c(1-z1)(1-z2)
/// with Re b1 = a1/2 - a1^2, Re b2 = a2/2 - a2^2, Re c = -2 a1 a2, studied
/// through phi(u,v) = Phi(e^{i theta1}, e^{i theta2}) under
/// theta1 = a2(u+v), theta2 = a1(u-v).
template <class T>
struct KeylemmaParamsT {
    T a1{}, a2{};
    T im_b1{}, im_b2{}, im_c{};

    T re_b1() const { return a1 / T(2) - a1 * a1; }
    T re_b2() const { return a2 / T(2) - a2 * a2; }
    T re_c() const { return T(-2) * a1 * a2; }

    bool valid() const {
        return T(0) < a2 && a2 <= a1 && a1 <= T(1) && a2 <= T(1) - a1;
    }
};

using KeylemmaParams = KeylemmaParamsT<Rational>;
using KeylemmaParamsD = KeylemmaParamsT<double>;

template <class T>
struct PhiSeries {
    TruncatedSeries<T> re;
    TruncatedSeries<T> im;
};

namespace detail {
template <class T>
T factorial_of(int k) {
    T f(1);
    for (int i = 2; i <= k; ++i) f = f * T(i);
    return f;
}
}  // namespace detail

/// cos/sin of a zero-constant series from their exact Taylor series.
template <class T>
TruncatedSeries<T> cos_series(const TruncatedSeries<T>& x) {
    int cap = x.cap();
    auto out = TruncatedSeries<T>::constant(x.nvars(), cap, T(1));
    TruncatedSeries<T> pw = x * x;
    TruncatedSeries<T> x2 = pw;
    int sign = -1;
    for (int k = 1; 2 * k <= cap; ++k) {
        TruncatedSeries<T> term = pw;
        term.scale(T(sign) / detail::factorial_of<T>(2 * k));
        out += term;
        sign = -sign;
        if (2 * (k + 1) <= cap) pw = pw * x2;
    }
    return out;
}

template <class T>
TruncatedSeries<T> sin_series(const TruncatedSeries<T>& x) {
    int cap = x.cap();
    TruncatedSeries<T> out(x.nvars(), cap);
    TruncatedSeries<T> pw = x;
    TruncatedSeries<T> x2 = x * x;
    int sign = 1;
    for (int k = 0; 2 * k + 1 <= cap; ++k) {
        TruncatedSeries<T> term = pw;
        term.scale(T(sign) / detail::factorial_of<T>(2 * k + 1));
        out += term;
        sign = -sign;
        if (2 * (k + 1) + 1 <= cap) pw = pw * x2;
    }
    return out;
}

/// Taylor coefficients of Re phi and Im phi in (u, v) through total degree
/// `cap`, exact for rational parameters.
template <class T>
PhiSeries<T> expand_phi_uv(const KeylemmaParamsT<T>& p, int cap = 6) {
    const int nv = 2;
    TruncatedSeries<T> u = TruncatedSeries<T>::variable(nv, cap, 0);
    TruncatedSeries<T> v = TruncatedSeries<T>::variable(nv, cap, 1);
    TruncatedSeries<T> th1 = u + v;
    th1.scale(p.a2);
    TruncatedSeries<T> th2 = u - v;
    th2.scale(p.a1);

    struct CS {
        TruncatedSeries<T> re, im;
        CS operator*(const CS& o) const {
            return {re * o.re - im * o.im, re * o.im + im * o.re};
        }
    };
    auto one_minus_z = [&](const TruncatedSeries<T>& th) -> CS {
        auto one = TruncatedSeries<T>::constant(nv, cap, T(1));
        TruncatedSeries<T> x = one - cos_series(th);
        TruncatedSeries<T> y = sin_series(th);
        y.scale(T(-1));
        return {x, y};
    };
    CS s1 = one_minus_z(th1);
    CS s2 = one_minus_z(th2);
    CS s1s1 = s1 * s1;
    CS s2s2 = s2 * s2;
    CS s1s2 = s1 * s2;

    PhiSeries<T> out{TruncatedSeries<T>(nv, cap), TruncatedSeries<T>(nv, cap)};
    auto add = [&](T qr, T qi, const CS& s) {
        TruncatedSeries<T> re = s.re;
        re.scale(qr);
        TruncatedSeries<T> t = s.im;
        t.scale(qi);
        out.re += re - t;
        TruncatedSeries<T> im = s.im;
        im.scale(qr);
        TruncatedSeries<T> t2 = s.re;
        t2.scale(qi);
        out.im += im + t2;
    };
    add(p.a1, T(0), s1);
    add(p.a2, T(0), s2);
    add(p.re_b1(), p.im_b1, s1s1);
    add(p.re_b2(), p.im_b2, s2s2);
    add(p.re_c(), p.im_c, s1s2);
    return out;
}

/// Im b1, Im b2 that solve the two order-3 matching equations for a given
/// Im c (denominator 2 a1 + 2 a2 - 3 must not vanish).
template <class T>
void derive_im_b(const T& a1, const T& a2, const T& im_c, T& im_b1, T& im_b2) {
    T den = T(2) * a1 + T(2) * a2 - T(3);
    if (den == T(0)) throw std::domain_error("derive_im_b: 2(a1+a2) = 3");
    im_b1 = a1 * (T(2) * a2 * a2 + T(2) * a1 * a2 + a1 - T(2) * a2) /
            (T(2) * a2 * a2 * den) * im_c;
    im_b2 = a2 * (T(2) * a1 * a1 + T(2) * a1 * a2 - T(2) * a1 + a2) /
            (T(2) * a1 * a1 * den) * im_c;
}

/// Solver-forced low-order coefficients of gamma and h for Re phi = gamma^2,
/// Im phi = gamma h, with gamma = -2 a1 a2 u + ... and h(0,0) = 1.
template <class T>
struct ForcedCoefficients {
    T g20{}, g11{}, g02{};
    T g30{}, g21{}, g12{}, g03{};
    T g40{}, g31{}, g22{}, g13{}, g04{};
    T h00{}, h10{}, h01{}, h20{}, h11{}, h02{};
    // residuals of the six non-forcible coefficient matches
    T im_v2{}, re_v3{}, im_v3{}, re_v4{}, im_v4{}, re_v5{};
};

template <class T>
ForcedCoefficients<T> force_factorization(const PhiSeries<T>& s, const T& a1, const T& a2) {
    auto R = [&](int i, int j) { return s.re.coeff({i, j}); };
    auto I = [&](int i, int j) { return s.im.coeff({i, j}); };
    T gl = T(-2) * a1 * a2;        // gamma's u coefficient
    T d2 = T(2) * gl;              // -4 a1 a2
    ForcedCoefficients<T> f;
    f.h00 = I(1, 0) / gl;          // equals 1 for this family
    f.g20 = R(3, 0) / d2;
    f.g11 = R(2, 1) / d2;
    f.g02 = R(1, 2) / d2;
    f.h10 = (I(2, 0) - f.g20) / gl;
    f.h01 = (I(1, 1) - f.g11) / gl;
    f.g30 = (R(4, 0) - f.g20 * f.g20) / d2;
    f.g21 = (R(3, 1) - T(2) * f.g20 * f.g11) / d2;
    f.g12 = (R(2, 2) - f.g11 * f.g11 - T(2) * f.g20 * f.g02) / d2;
    f.g03 = (R(1, 3) - T(2) * f.g11 * f.g02) / d2;
    f.h20 = (I(3, 0) - f.g20 * f.h10 - f.g30) / gl;
    f.h11 = (I(2, 1) - f.g20 * f.h01 - f.g11 * f.h10 - f.g21) / gl;
    f.h02 = (I(1, 2) - f.g11 * f.h01 - f.g02 * f.h10 - f.g12) / gl;
    f.g40 = (R(5, 0) - T(2) * f.g20 * f.g30) / d2;
    f.g31 = (R(4, 1) - T(2) * (f.g20 * f.g21 + f.g11 * f.g30)) / d2;
    f.g22 = (R(3, 2) - T(2) * (f.g20 * f.g12 + f.g11 * f.g21 + f.g02 * f.g30)) / d2;
    f.g13 = (R(2, 3) - T(2) * (f.g20 * f.g03 + f.g11 * f.g12 + f.g02 * f.g21)) / d2;
    f.g04 = (R(1, 4) - T(2) * (f.g11 * f.g03 + f.g02 * f.g12)) / d2;

    f.im_v2 = I(0, 2) - f.g02;
    f.re_v3 = R(0, 3);
    f.im_v3 = I(0, 3) - (f.g02 * f.h01 + f.g03);
    f.re_v4 = R(0, 4) - f.g02 * f.g02;
    f.im_v4 = I(0, 4) - (f.g04 + f.g03 * f.h01 + f.g02 * f.h02);
    f.re_v5 = R(0, 5) - T(2) * f.g02 * f.g03;
    return f;
}

struct Obstruction {
    char part = ' ';  // 'R' or 'I'
    Midx index;
    double residual = 0.0;
};

template <class T>
struct FactorizationAttemptT {
    TruncatedSeries<T> gamma{2, 4};
    TruncatedSeries<T> h{2, 2};
    std::optional<Obstruction> obstruction;
};

inline double residual_magnitude(const Rational& v) { return std::abs(to_double(v)); }
inline double residual_magnitude(double v) { return std::abs(v); }
inline bool residual_nonzero(const Rational& v, double) { return v != 0; }
inline bool residual_nonzero(double v, double tol) { return std::abs(v) > tol; }

/// Order-by-order factorization attempt. Under-determined coefficients are
/// deferred; the returned obstruction is the first coefficient match (Re
/// order <= 5, Im order <= 4) no choice of remaining unknowns can satisfy.
template <class T>
FactorizationAttemptT<T> attempt_factorization(const KeylemmaParamsT<T>& p, double tol = 1e-10) {
    if (!p.valid()) throw std::invalid_argument("attempt_factorization: invalid parameters");
    PhiSeries<T> s = expand_phi_uv(p, 6);
    ForcedCoefficients<T> f = force_factorization(s, p.a1, p.a2);

    FactorizationAttemptT<T> out;
    out.gamma.set({1, 0}, T(-2) * p.a1 * p.a2);
    out.gamma.set({2, 0}, f.g20);
    out.gamma.set({1, 1}, f.g11);
    out.gamma.set({0, 2}, f.g02);
    out.gamma.set({3, 0}, f.g30);
    out.gamma.set({2, 1}, f.g21);
    out.gamma.set({1, 2}, f.g12);
    out.gamma.set({0, 3}, f.g03);
    out.gamma.set({4, 0}, f.g40);
    out.gamma.set({3, 1}, f.g31);
    out.gamma.set({2, 2}, f.g22);
    out.gamma.set({1, 3}, f.g13);
    out.gamma.set({0, 4}, f.g04);
    out.h.set({0, 0}, f.h00);
    out.h.set({1, 0}, f.h10);
    out.h.set({0, 1}, f.h01);
    out.h.set({2, 0}, f.h20);
    out.h.set({1, 1}, f.h11);
    out.h.set({0, 2}, f.h02);

    struct Check {
        char part;
        Midx idx;
        const T* value;
    };
    const Check checks[] = {
        {'I', {0, 2}, &f.im_v2}, {'R', {0, 3}, &f.re_v3}, {'I', {0, 3}, &f.im_v3},
        {'R', {0, 4}, &f.re_v4}, {'I', {0, 4}, &f.im_v4}, {'R', {0, 5}, &f.re_v5},
    };
    for (auto& ch : checks) {
        if (residual_nonzero(*ch.value, tol)) {
            out.obstruction = Obstruction{ch.part, ch.idx, residual_magnitude(*ch.value)};
            break;
        }
    }
    return out;
}

/// Residuals validating the printed order-3/4 identities of the family
/// against the independently expanded series (Im b derived from Im c).
struct EquationReport {
    double a1 = 0, a2 = 0, im_c = 0;
    double im_b1 = 0, im_b2 = 0;
    double residual_eq6 = 0;      // Re v^3 coefficient vanishes
    double residual_eq7 = 0;      // Im v^2 coefficient equals gamma02
    double residual_gamma02 = 0;  // gamma02 closed form
    double residual_eq9 = 0;      // Re v^4 coefficient vs the Im(c)^2 formula
    double residual_eq8 = 0;      // Im v^3 root in Im(c)^2 vs closed form
    bool eq8_applicable = false;
};

EquationReport keylemma_equations(const Rational& a1, const Rational& a2, const Rational& im_c);
EquationReport keylemma_equations_d(double a1, double a2, double im_c);

struct Step2Report {
    double max_boundary_value = 0;   // max of P over the three boundary curves
    double boundary_tol = 1e-12;
    std::vector<std::pair<double, double>> critical_points;
    bool critical_points_expected = false;  // subset of {(0,0),(1/3,1/3)}
    double p_half_half = 0;
};

/// P(a1,a2) = 2a1^3+2a2^3+a1a2^2+a1^2a2-3a1^2-3a2^2+3a1a2 on the triangle
/// 0 < a2 < a1, a2 < 1-a1: negative on the boundary except at (1/2,1/2) and
/// critical points only at (0,0), (1/3,1/3).
Step2Report keylemma_step2_geometry(int boundary_samples = 2000);

struct Step3Report {
    std::vector<double> roots;       // of the equal-a consistency equation
    double max_root_error = 0;       // vs {0, 3/4}
    double closed_form_residual = 0; // v^4-Im closed form vs series, sampled
};

Step3Report keylemma_step3();

double keylemma_p(double x, double y);

}  // namespace dsym
