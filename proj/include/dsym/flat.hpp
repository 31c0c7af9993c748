#pragma once

#include <string>
#include <vector>

#include "dsym/bohr.hpp"
#include "dsym/rational.hpp"
#include "dsym/symbol.hpp"

namespace dsym {

/// Chebyshev polynomial written in the (1-y) basis:
///   U_n(y) = sum_j (-2)^j (n+j+1)!/((n-j)!(2j+1)!) (1-y)^j
///   T_n(y) = n sum_j (-2)^j (n+j-1)!/((n-j)!(2j)!) (1-y)^j
struct ChebyshevBasisPoly {
    char kind = 'T';  // 'T' or 'U'
    int n = 0;
    std::vector<Rational> coeffs_in_one_minus_y;  // index j = coefficient of (1-y)^j

    double eval(double y) const;
};

ChebyshevBasisPoly chebyshev_coeffs(char kind, int n);

/// Phi(z) = sum_{n=1}^N (-1)^{n-1}/2^n (a_n (1-z)^{2n-1} - b_n (1-z)^{2n})
/// with Re Phi(e^{ix}) = sum_m target[m-1] (1-cos x)^m.
struct FlatPolynomial {
    int N = 0;
    std::vector<Rational> a, b;        // solved coefficients, index n-1
    std::vector<Rational> target;      // c_m, m = 1..2N
    std::vector<Rational> poly_z;      // coefficients of z^0..z^{2N} of Phi (real)

    double eval_re_on_circle(double x) const;
    double target_value(double x) const;  // sum c_m (1-cos x)^m
};

/// Exact block back-substitution through the upper-triangular system; the
/// 2x2 diagonal blocks are always nonsingular.
FlatPolynomial build_flat_polynomial(const std::vector<Rational>& target);

/// The full system matrix in the documented ordering (rows c_{2N}..c_1,
/// columns a_N,b_N,...,a_1,b_1), for structural assertions.
std::vector<std::vector<Rational>> flat_system_matrix(int N);

/// The recorded diagonal-block determinant expression n^2 - (2n-1)(n-2)/4;
/// nonzero for every integer n.
Rational flat_block_determinant_expression(int n);

/// Determinant of the actual 2x2 diagonal block for index n.
Rational flat_block_determinant(int n);

/// Phi(z) = sum_j Phi_j(z_j) with Re Phi(e^{i theta}) = sum_j (1-cos
/// theta_j)^{k_j/2}; orders k_j even >= 2 are the theta-flatness orders.
/// Generators default to the first d primes.
BohrLift build_separated_example(const std::vector<int>& orders);

enum class CexKind { Cex3, Cex5a, Cex5b };

/// A d-variable polynomial factor for the counterexample families; parsed
/// from expressions like "z2" or "1 + z1*z2".
struct PolyFactor {
    int dim = 0;
    std::vector<std::pair<Midx, RationalComplex>> coeffs;
};

PolyFactor parse_poly_factor(const std::string& text, int dim);

struct CertifiedLift {
    BohrLift lift;
    DirichletSymbol symbol;
    double grid_min = 0.0;          // min of Re over the certification grid
    double lipschitz_margin = 0.0;  // grid-gap bound from the coefficient l1 norm
    bool certified = false;
};

/// Builds the requested family member and certifies Re >= 0 on a torus grid;
/// throws ClassViolation ("delta too large") when certification fails.
///   Cex3:  (1-z1) + delta (1-z1)^2 P(z)
///   Cex5a: 2(1-z1) + (1-z1)^2 (1 - delta(1-z2) - delta(1-z1)(1-z2))
///   Cex5b: (1-z1) + 1/2 (1-z1)^2 + delta (1-z1)^4 P(z)
CertifiedLift counterexample_factory(CexKind kind, const Rational& delta, const PolyFactor& P);
CertifiedLift counterexample_factory(CexKind kind, const Rational& delta);  // default P = z2

}  // namespace dsym
