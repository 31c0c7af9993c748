#include "dsym/flat.hpp"

#include <algorithm>
#include <cmath>

#include "dsym/parallel.hpp"
#include "dsym/primes.hpp"

namespace dsym {

namespace {

Rational factorial_q(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

Rational pow_q(const Rational& x, int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

double ChebyshevBasisPoly::eval(double y) const {
    double acc = 0.0, p = 1.0;
    for (auto& c : coeffs_in_one_minus_y) {
        acc += to_double(c) * p;
        p *= (1.0 - y);
    }
    return acc;
}

ChebyshevBasisPoly chebyshev_coeffs(char kind, int n) {
    if (kind != 'T' && kind != 'U') throw std::invalid_argument("chebyshev kind must be T or U");
    if (kind == 'U' && n < 0) throw std::invalid_argument("U_n needs n >= 0");
    if (kind == 'T' && n < 1) throw std::invalid_argument("T_n in this basis needs n >= 1");
    ChebyshevBasisPoly out;
    out.kind = kind;
    out.n = n;
    out.coeffs_in_one_minus_y.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        Rational c;
        if (kind == 'U') {
            c = pow_q(Rational(-2), j) * factorial_q(n + j + 1) /
                (factorial_q(n - j) * factorial_q(2 * j + 1));
        } else {
            c = Rational(n) * pow_q(Rational(-2), j) * factorial_q(n + j - 1) /
                (factorial_q(n - j) * factorial_q(2 * j));
        }
        out.coeffs_in_one_minus_y[j] = c;
    }
    return out;
}

namespace {

/// d_j^{(n)}: y^{n+j} coefficients of P_n(y) = y^n((1-y/2)U_{n-1}(1-y) - T_n(1-y)/2).
std::vector<Rational> p_coeffs(int n) {
    auto U = chebyshev_coeffs('U', n - 1).coeffs_in_one_minus_y;  // U_{n-1}(1-y): y^j coeffs
    auto T = chebyshev_coeffs('T', n).coeffs_in_one_minus_y;
    std::vector<Rational> d(n + 1, Rational(0));
    for (int j = 0; j <= n; ++j) {
        Rational u_j = j <= n - 1 ? U[j] : Rational(0);
        Rational u_jm1 = (j - 1 >= 0 && j - 1 <= n - 1) ? U[j - 1] : Rational(0);
        d[j] = u_j - u_jm1 / 2 - T[j] / 2;
    }
    return d;
}

/// e_j^{(n)}: y^{n+j} coefficients of Q_n(y) = y^n T_n(1-y).
std::vector<Rational> q_coeffs(int n) { return chebyshev_coeffs('T', n).coeffs_in_one_minus_y; }

}  // namespace

std::vector<std::vector<Rational>> flat_system_matrix(int N) {
    // rows: c_{2N}, c_{2N-1}, ..., c_1 ; columns: a_N, b_N, ..., a_1, b_1
    std::vector<std::vector<Rational>> M(2 * N, std::vector<Rational>(2 * N, Rational(0)));
    for (int n = 1; n <= N; ++n) {
        auto d = p_coeffs(n);
        auto e = q_coeffs(n);
        int col_a = 2 * (N - n), col_b = col_a + 1;
        for (int j = 0; j <= n; ++j) {
            int m = n + j;  // row for c_m
            int row = 2 * N - m;
            M[row][col_a] = d[j];
            M[row][col_b] = e[j];
        }
    }
    return M;
}

Rational flat_block_determinant_expression(int n) {
    return Rational(n) * n - Rational((2 * n - 1) * (n - 2), 4);
}

Rational flat_block_determinant(int n) {
    auto d = p_coeffs(n);
    auto e = q_coeffs(n);
    // block rows (c_{2n}, c_{2n-1}) vs columns (a_n, b_n)
    return d[n] * e[n - 1] - d[n - 1] * e[n];
}

FlatPolynomial build_flat_polynomial(const std::vector<Rational>& target) {
    if (target.empty() || target.size() % 2 != 0)
        throw std::invalid_argument("target must list c_1..c_{2N}");
    int N = static_cast<int>(target.size()) / 2;
    FlatPolynomial out;
    out.N = N;
    out.target = target;
    out.a.assign(N, Rational(0));
    out.b.assign(N, Rational(0));

    // back-substitution over the block upper-triangular system, top block first
    std::vector<Rational> rhs(2 * N);  // rhs[row] for rows c_{2N}..c_1
    for (int m = 1; m <= 2 * N; ++m) rhs[2 * N - m] = target[m - 1];
    auto M = flat_system_matrix(N);
    for (int n = N; n >= 1; --n) {
        int row_hi = 2 * N - 2 * n;       // c_{2n}
        int row_lo = 2 * N - (2 * n - 1); // c_{2n-1}
        int col_a = 2 * (N - n), col_b = col_a + 1;
        Rational a11 = M[row_hi][col_a], a12 = M[row_hi][col_b];
        Rational a21 = M[row_lo][col_a], a22 = M[row_lo][col_b];
        Rational det = a11 * a22 - a12 * a21;
        if (det == 0) throw std::logic_error("singular diagonal block");
        Rational an = (rhs[row_hi] * a22 - a12 * rhs[row_lo]) / det;
        Rational bn = (a11 * rhs[row_lo] - rhs[row_hi] * a21) / det;
        out.a[n - 1] = an;
        out.b[n - 1] = bn;
        for (int row = 0; row < 2 * N; ++row)
            rhs[row] -= M[row][col_a] * an + M[row][col_b] * bn;
    }

    // expand Phi into powers of z
    out.poly_z.assign(2 * N + 1, Rational(0));
    std::vector<Rational> omz{Rational(1)};  // (1-z)^k coefficients, iteratively
    auto add_power = [&](const Rational& coef, int power) {
        // coef * (1-z)^power
        std::vector<Rational> c(power + 1);
        c[0] = Rational(1);
        for (int k = 1; k <= power; ++k)
            for (int i = k; i >= 0; --i)
                c[i] = (i > 0 ? -c[i - 1] : Rational(0)) + (i <= k - 1 ? c[i] : Rational(0));
        for (int i = 0; i <= power; ++i) out.poly_z[i] += coef * c[i];
    };
    for (int n = 1; n <= N; ++n) {
        Rational scale = pow_q(Rational(-1), n - 1) / pow_q(Rational(2), n);
        add_power(scale * out.a[n - 1], 2 * n - 1);
        add_power(-scale * out.b[n - 1], 2 * n);
    }
    return out;
}

double FlatPolynomial::eval_re_on_circle(double x) const {
    Cplx z(std::cos(x), std::sin(x));
    Cplx acc(0, 0), p(1, 0);
    for (auto& c : poly_z) {
        acc += to_double(c) * p;
        p *= z;
    }
    return acc.real();
}

double FlatPolynomial::target_value(double x) const {
    double y = 1.0 - std::cos(x);
    double acc = 0.0, p = y;
    for (auto& c : target) {
        acc += to_double(c) * p;
        p *= y;
    }
    return acc;
}

BohrLift build_separated_example(const std::vector<int>& orders) {
    if (orders.empty()) throw std::invalid_argument("needs at least one order");
    const int d = static_cast<int>(orders.size());
    std::vector<std::int64_t> gens;
    std::int64_t p = 2;
    while (static_cast<int>(gens.size()) < d) {
        if (is_prime(p)) gens.push_back(p);
        ++p;
    }
    RationalComplex constant(Rational(0));
    std::vector<std::pair<Midx, RationalComplex>> coeffs;
    for (int j = 0; j < d; ++j) {
        if (orders[j] < 2 || orders[j] % 2 != 0)
            throw std::invalid_argument("orders must be even and >= 2");
        int m = orders[j] / 2;  // target exponent of (1 - cos x)
        int N = (m + 1) / 2;
        std::vector<Rational> target(2 * N, Rational(0));
        target[m - 1] = Rational(1);
        FlatPolynomial flat = build_flat_polynomial(target);
        constant += RationalComplex(flat.poly_z[0]);
        for (size_t k = 1; k < flat.poly_z.size(); ++k) {
            if (flat.poly_z[k] == 0) continue;
            Midx alpha(d, 0);
            alpha[j] = static_cast<int>(k);
            coeffs.emplace_back(alpha, RationalComplex(flat.poly_z[k]));
        }
    }
    BohrLift L = lift_from_coefficients(constant, coeffs, gens);
    // the construction makes Re on the torus exactly sum_j (1-cos theta_j)^{m_j},
    // so z = 1 is the unique boundary point; verified on a coarse grid
    int g = d <= 2 ? 512 : 64;
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= g;
    std::vector<double> theta(d);
    for (long long i = 0; i < total; ++i) {
        long long rem = i;
        bool origin = true;
        for (int j = 0; j < d; ++j) {
            int idx = rem % g;
            rem /= g;
            theta[j] = -M_PI + 2.0 * M_PI * idx / g;
            if (idx != g / 2) origin = false;  // theta = 0 cell
        }
        (void)origin;
        double re = L.re_theta(theta);
        double dist = 0;
        for (int j = 0; j < d; ++j) dist = std::max(dist, std::abs(theta[j]));
        if (re < -1e-12 || (re < 1e-13 && dist > 0.3))
            throw std::logic_error("separated construction lost its unique boundary zero");
    }
    return L;
}

PolyFactor parse_poly_factor(const std::string& text, int dim) {
    // grammar: sum of products of "zK", integer/rational constants
    PolyFactor out;
    out.dim = dim;
    size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip();
    bool first = true;
    while (pos < text.size()) {
        int sign = 1;
        if (text[pos] == '+') {
            ++pos;
        } else if (text[pos] == '-') {
            sign = -1;
            ++pos;
        } else if (!first) {
            throw std::invalid_argument("expected +/- in polynomial at position " +
                                        std::to_string(pos));
        }
        first = false;
        skip();
        Rational coef(1);
        Midx alpha(dim, 0);
        bool any = false;
        while (pos < text.size()) {
            skip();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                skip();
            }
            if (pos >= text.size()) break;
            char ch = text[pos];
            if (ch == 'z') {
                ++pos;
                size_t start = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
                int var = std::stoi(text.substr(start, pos - start));
                if (var < 1 || var > dim)
                    throw std::invalid_argument("variable z" + std::to_string(var) +
                                                " out of range");
                int exp = 1;
                skip();
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    skip();
                    size_t es = pos;
                    while (pos < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[pos])))
                        ++pos;
                    exp = std::stoi(text.substr(es, pos - es));
                }
                alpha[var - 1] += exp;
                any = true;
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                size_t start = pos;
                while (pos < text.size() &&
                       (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                        text[pos] == '/' || text[pos] == '.'))
                    ++pos;
                coef *= parse_rational(text.substr(start, pos - start));
                any = true;
            } else {
                break;
            }
            skip();
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) break;
        }
        if (!any) throw std::invalid_argument("empty term in polynomial");
        if (sign < 0) coef = -coef;
        bool merged = false;
        for (auto& [m, c] : out.coeffs)
            if (m == alpha) {
                c += RationalComplex(coef);
                merged = true;
            }
        if (!merged) out.coeffs.emplace_back(alpha, RationalComplex(coef));
    }
    return out;
}

namespace {

/// Multiply sparse multi-index polynomials with exact coefficients.
using SparsePoly = std::vector<std::pair<Midx, RationalComplex>>;

SparsePoly poly_mul(const SparsePoly& A, const SparsePoly& B, int dim) {
    std::map<Midx, RationalComplex> acc;
    for (auto& [ma, ca] : A)
        for (auto& [mb, cb] : B) {
            Midx m(dim);
            for (int j = 0; j < dim; ++j) m[j] = ma[j] + mb[j];
            auto [it, fresh] = acc.try_emplace(m, ca * cb);
            if (!fresh) it->second += ca * cb;
        }
    SparsePoly out;
    for (auto& [m, c] : acc)
        if (!c.is_zero()) out.emplace_back(m, c);
    return out;
}

SparsePoly poly_add(SparsePoly A, const SparsePoly& B) {
    for (auto& [mb, cb] : B) {
        bool merged = false;
        for (auto& [ma, ca] : A)
            if (ma == mb) {
                ca += cb;
                merged = true;
                break;
            }
        if (!merged) A.emplace_back(mb, cb);
    }
    SparsePoly out;
    for (auto& [m, c] : A)
        if (!c.is_zero()) out.emplace_back(m, c);
    return out;
}

SparsePoly poly_scale(SparsePoly A, const RationalComplex& k) {
    for (auto& [m, c] : A) c = c * k;
    return A;
}

SparsePoly one_minus_z(int j, int dim) {
    Midx zero(dim, 0), ej(dim, 0);
    ej[j] = 1;
    return {{zero, RationalComplex(Rational(1))}, {ej, RationalComplex(Rational(-1))}};
}

CertifiedLift certify(BohrLift L, int grid_override = 0) {
    CertifiedLift out;
    const int d = L.dim;
    int g = grid_override > 0 ? grid_override : (d <= 2 ? 4096 : (d == 3 ? 256 : 64));
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= g;
    int chunks = static_cast<int>(std::min<long long>(total, 256));
    std::vector<double> chunk_min(chunks, std::numeric_limits<double>::infinity());
    chunked_for(chunks, [&](int c) {
        long long lo = total * c / chunks, hi = total * (c + 1) / chunks;
        std::vector<double> theta(d);
        double best = std::numeric_limits<double>::infinity();
        for (long long i = lo; i < hi; ++i) {
            long long rem = i;
            for (int j = 0; j < d; ++j) {
                theta[j] = -M_PI + 2.0 * M_PI * (rem % g) / g;
                rem /= g;
            }
            best = std::min(best, L.re_theta(theta));
        }
        chunk_min[c] = best;
    });
    out.grid_min = *std::min_element(chunk_min.begin(), chunk_min.end());
    // gradient sup-bound from the coefficient l1 norm gives the cell-gap margin
    double lip = 0;
    for (auto& t : L.terms) lip += std::abs(t.c) * total_degree(t.alpha);
    out.lipschitz_margin = lip * (M_PI / g) * std::sqrt(static_cast<double>(d));
    out.certified = out.grid_min >= -1e-9;
    out.lift = L;
    out.symbol = symbol_from_lift(L);
    if (!out.certified)
        throw ClassViolation("delta too large for this polynomial factor (grid min " +
                             std::to_string(out.grid_min) + ")");
    return out;
}

}  // namespace

CertifiedLift counterexample_factory(CexKind kind, const Rational& delta, const PolyFactor& Pin) {
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    int d = std::max(Pin.dim, 2);
    PolyFactor P = Pin;
    if (P.dim < d) {
        P.dim = d;
        for (auto& [m, c] : P.coeffs) m.resize(d, 0);
    }
    std::vector<std::int64_t> gens;
    std::int64_t p = 2;
    while (static_cast<int>(gens.size()) < d) {
        if (is_prime(p)) gens.push_back(p);
        ++p;
    }
    RationalComplex dq{delta};
    SparsePoly f1 = one_minus_z(0, d);
    SparsePoly f2 = one_minus_z(1, d);
    SparsePoly sq = poly_mul(f1, f1, d);
    SparsePoly phi;
    switch (kind) {
        case CexKind::Cex3: {
            SparsePoly pf(P.coeffs.begin(), P.coeffs.end());
            phi = poly_add(f1, poly_scale(poly_mul(sq, pf, d), dq));
            break;
        }
        case CexKind::Cex5a: {
            // 2(1-z1) + (1-z1)^2 (1 - delta(1-z2) - delta(1-z1)(1-z2))
            SparsePoly inner = {{Midx(d, 0), RationalComplex(Rational(1))}};
            inner = poly_add(inner, poly_scale(f2, RationalComplex(-delta)));
            inner = poly_add(inner, poly_scale(poly_mul(f1, f2, d), RationalComplex(-delta)));
            phi = poly_add(poly_scale(f1, RationalComplex(Rational(2))),
                           poly_mul(sq, inner, d));
            break;
        }
        case CexKind::Cex5b: {
            SparsePoly pf(P.coeffs.begin(), P.coeffs.end());
            SparsePoly quart = poly_mul(sq, sq, d);
            phi = poly_add(f1, poly_scale(sq, RationalComplex(Rational(1, 2))));
            phi = poly_add(phi, poly_scale(poly_mul(quart, pf, d), dq));
            break;
        }
    }
    RationalComplex constant(Rational(0));
    SparsePoly coeffs;
    for (auto& [m, c] : phi) {
        if (total_degree(m) == 0)
            constant += c;
        else
            coeffs.emplace_back(m, c);
    }
    BohrLift L = lift_from_coefficients(constant, coeffs, gens);
    return certify(std::move(L));
}

CertifiedLift counterexample_factory(CexKind kind, const Rational& delta) {
    PolyFactor P;
    P.dim = 2;
    Midx e2(2, 0);
    e2[1] = 1;
    P.coeffs.emplace_back(e2, RationalComplex(Rational(1)));
    return counterexample_factory(kind, delta, P);
}

}  // namespace dsym
