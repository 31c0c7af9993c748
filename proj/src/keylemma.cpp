#include "dsym/keylemma.hpp"

#include <algorithm>
#include <cmath>

namespace dsym {

namespace {

template <class T>
EquationReport equations_impl(const T& a1, const T& a2, const T& im_c, double tol) {
    KeylemmaParamsT<T> p;
    p.a1 = a1;
    p.a2 = a2;
    p.im_c = im_c;
    derive_im_b(a1, a2, im_c, p.im_b1, p.im_b2);
    if (!p.valid()) throw std::invalid_argument("keylemma_equations: invalid parameters");

    PhiSeries<T> s = expand_phi_uv(p, 6);
    ForcedCoefficients<T> f = force_factorization(s, a1, a2);

    EquationReport rep;
    rep.a1 = residual_magnitude(a1);
    rep.a2 = residual_magnitude(a2);
    rep.im_c = residual_magnitude(im_c);
    rep.im_b1 = residual_magnitude(p.im_b1);
    rep.im_b2 = residual_magnitude(p.im_b2);
    rep.residual_eq6 = residual_magnitude(f.re_v3);
    rep.residual_eq7 = residual_magnitude(f.im_v2);

    T den = T(2) * a1 + T(2) * a2 - T(3);
    T g02_closed = -(a1 + a2) * (a1 + a2) / (T(2) * den) * im_c;
    rep.residual_gamma02 = residual_magnitude(T(f.g02 - g02_closed));

    // identity behind the first Im(c)^2 expression: the v^4 Re coefficient is
    // independent of the imaginary parts and equals k9 * RHS9 where
    // gamma02^2 = k9 * Im(c)^2.
    T apb = a1 + a2;
    T E = a1 * a2 * a2 + a1 * a1 * a2 - a1 * a1 - a2 * a2 + a1 * a2;
    T rhs9 = -a1 * a2 * den * den * E / (apb * apb * apb);
    T k9 = apb * apb * apb * apb / (T(4) * den * den);
    rep.residual_eq9 = residual_magnitude(T(s.re.coeff({0, 4}) - k9 * rhs9));

    // second Im(c)^2 expression: the Im v^3 residual is linear in Im(c)^2;
    // its root must sit at RHS8. Probe the linear map with a second Im c.
    T q = T(3) * a1 * a2 * a2 + T(3) * a1 * a1 * a2 - a1 * a1 - a2 * a2 - a1 * a2;
    if (a1 != a2 && apb != T(1)) {
        rep.eq8_applicable = true;
        T rhs8 = -a1 * a2 * den * den * q / (T(3) * apb * apb * (apb - T(1)));
        auto probe = [&](const T& c) {
            KeylemmaParamsT<T> pp;
            pp.a1 = a1;
            pp.a2 = a2;
            pp.im_c = c;
            derive_im_b(a1, a2, c, pp.im_b1, pp.im_b2);
            PhiSeries<T> ss = expand_phi_uv(pp, 6);
            return force_factorization(ss, a1, a2).im_v3;
        };
        T r0 = probe(T(0));
        T c1 = im_c == T(0) ? T(1) : im_c;
        T r1 = probe(c1);
        T slope = (r1 - r0) / (c1 * c1);  // residual = slope*Im(c)^2 + r0
        if (residual_nonzero(slope, 1e-14)) {
            T root = -r0 / slope;
            rep.residual_eq8 = residual_magnitude(T(root - rhs8));
        } else {
            rep.residual_eq8 = residual_magnitude(r0);
        }
    }
    (void)tol;
    return rep;
}

}  // namespace

EquationReport keylemma_equations(const Rational& a1, const Rational& a2, const Rational& im_c) {
    return equations_impl<Rational>(a1, a2, im_c, 0.0);
}

EquationReport keylemma_equations_d(double a1, double a2, double im_c) {
    return equations_impl<double>(a1, a2, im_c, 1e-10);
}

double keylemma_p(double x, double y) {
    return 2 * x * x * x + 2 * y * y * y + x * y * y + x * x * y - 3 * x * x - 3 * y * y +
           3 * x * y;
}

Step2Report keylemma_step2_geometry(int boundary_samples) {
    Step2Report rep;
    rep.p_half_half = keylemma_p(0.5, 0.5);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < boundary_samples; ++i) {
        double t = static_cast<double>(i) / boundary_samples;
        // lower edge a2=0, diagonal a2=a1 (a1<1/2), upper edge a2=1-a1 (a1>1/2);
        // the corner (1/2,1/2) itself is excluded (P vanishes there)
        worst = std::max(worst, keylemma_p(t, 0.0));
        if (t < 0.5) worst = std::max(worst, keylemma_p(t, t));
        if (t > 0.5 && t < 1.0) worst = std::max(worst, keylemma_p(t, 1.0 - t));
    }
    rep.max_boundary_value = worst;

    // critical points of P: Newton from a dense start grid, deduplicated
    auto grad = [](double x, double y) {
        return std::pair<double, double>{6 * x * x + y * y + 2 * x * y - 6 * x + 3 * y,
                                         x * x + 6 * y * y + 2 * x * y + 3 * x - 6 * y};
    };
    std::vector<std::pair<double, double>> found;
    for (int i = -4; i <= 8; ++i) {
        for (int j = -4; j <= 8; ++j) {
            double x = i / 4.0, y = j / 4.0;
            bool ok = true;
            for (int it = 0; it < 80; ++it) {
                auto [gx, gy] = grad(x, y);
                double hxx = 12 * x + 2 * y - 6, hxy = 2 * y + 2 * x + 3;
                double hyx = 2 * x + 2 * y + 3, hyy = 12 * y + 2 * x - 6;
                double det = hxx * hyy - hxy * hyx;
                if (std::abs(det) < 1e-14) {
                    ok = false;
                    break;
                }
                double dx = (gx * hyy - gy * hxy) / det;
                double dy = (hxx * gy - hyx * gx) / det;
                x -= dx;
                y -= dy;
                if (std::abs(dx) + std::abs(dy) < 1e-15) break;
            }
            auto [gx, gy] = grad(x, y);
            if (!ok || std::abs(gx) + std::abs(gy) > 1e-10) continue;
            if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) > 10 || std::abs(y) > 10)
                continue;
            bool dup = false;
            for (auto& [fx, fy] : found)
                if (std::abs(fx - x) + std::abs(fy - y) < 1e-7) dup = true;
            if (!dup) found.emplace_back(x, y);
        }
    }
    std::sort(found.begin(), found.end());
    rep.critical_points = found;
    rep.critical_points_expected = true;
    for (auto& [x, y] : found) {
        bool near_origin = std::hypot(x, y) < 1e-9;
        bool near_third = std::hypot(x - 1.0 / 3, y - 1.0 / 3) < 1e-9;
        if (!near_origin && !near_third) rep.critical_points_expected = false;
    }
    return rep;
}

Step3Report keylemma_step3() {
    Step3Report rep;
    // consistency equation of the equal-parameter case:
    //   -a(2a-1)(4a-3)^2/8 = -a^2(4a-3)(4a-5)/4
    auto fn = [](double a) {
        return -a * (2 * a - 1) * (4 * a - 3) * (4 * a - 3) / 8 +
               a * a * (4 * a - 3) * (4 * a - 5) / 4;
    };
    // cubic in a; scan for sign changes plus deflation of the evident a=0 root
    std::vector<double> roots;
    double lo = -10, hi = 10;
    int steps = 200000;
    double prev = fn(lo);
    for (int i = 1; i <= steps; ++i) {
        double x = lo + (hi - lo) * i / steps;
        double cur = fn(x);
        if (prev == 0.0) roots.push_back(lo + (hi - lo) * (i - 1) / steps);
        if (prev * cur < 0) {
            double a = lo + (hi - lo) * (i - 1) / steps, b = x;
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (a + b);
                if (fn(a) * fn(m) <= 0)
                    b = m;
                else
                    a = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                roots.end());
    rep.roots = roots;
    rep.max_root_error = 0;
    for (double r : roots) {
        double err = std::min(std::abs(r), std::abs(r - 0.75));
        rep.max_root_error = std::max(rep.max_root_error, err);
    }

    // the v^4-Im coefficient match at a1 = a2 = a, checked exactly in
    // rationals at a sample point against its closed form
    Rational a(2, 7), c(3, 11);
    KeylemmaParams p;
    p.a1 = a;
    p.a2 = a;
    p.im_c = c;
    derive_im_b(p.a1, p.a2, p.im_c, p.im_b1, p.im_b2);
    auto s = expand_phi_uv(p, 6);
    auto f = force_factorization(s, p.a1, p.a2);
    Rational den = 4 * a - 3;
    Rational closed = a * (2 * a - 1) *
                      (16 * a * a * a * a - 32 * a * a * a + 15 * a * a + 4 * c * c) /
                      (4 * den * den) * c;
    rep.closed_form_residual = std::abs(to_double(Rational(f.im_v4 + closed)));
    return rep;
}

}  // namespace dsym
