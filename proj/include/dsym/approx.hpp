#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dsym/bohr.hpp"
#include "dsym/genset.hpp"
#include "dsym/rational.hpp"

namespace dsym {

/// Local normal form of the lift at a boundary point: independent linear
/// forms ell_j (rows, scaled to unit leading coefficient), even contact
/// orders k_1 >= ... >= k_d, and the Im linear form in the ell basis.
struct RegularityProfile {
    std::vector<double> theta_w;
    double tau = 0.0;
    Eigen::MatrixXd ell;   // d x d, row j = ell_j
    std::vector<int> k;    // even, descending
    Eigen::VectorXd b;     // Im phi ~ tau + sum b_j ell_j; b_1 != 0
};

/// Throws std::domain_error("NotSupported") for Hessian kernels of dimension
/// >= 2 on non-separated lifts, ClassViolation on odd or sign-indefinite
/// leading kernel terms.
RegularityProfile boundary_regularity(const BohrLift& lift, const BoundaryPoint& bp);

/// (sum_{j>=2} 1/k_j) * k_1 / (2 (k_1 - 1)); throws on d = 1.
Rational eta_exact(const std::vector<int>& k);

struct CompactnessIndex {
    double eta = 0.0;
    std::vector<std::pair<size_t, double>> per_point;  // boundary index -> eta
};

CompactnessIndex compactness_index(const BohrLift& lift, const BoundaryScan& scan);

struct OmegaConfig {
    long long samples = 400000;
    double radius = 0.7;       // half-width of the sampling window around the point
    double re_lo = 1e-6;
    double re_hi = 1e-2;
    int bins = 40;
    std::uint64_t seed = 2;
};

struct ContactExponents {
    double omega_hat = 0.0;
    double C = 0.0;
    double r2 = 0.0;
    bool restricted = false;  // no boundary point: omega irrelevant
};

ContactExponents omega_estimate(const BohrLift& lift, const BoundaryPoint& bp,
                                const OmegaConfig& cfg = {});
ContactExponents omega_estimate(const BohrLift& lift, const BoundaryScan& scan,
                                const OmegaConfig& cfg = {});

/// Upper-envelope fit on prepared (re, |im - tau|) pairs; exposed so synthetic
/// contact geometries can be fitted directly.
ContactExponents omega_fit_from_pairs(const std::vector<std::pair<double, double>>& pairs,
                                      const OmegaConfig& cfg = {});

struct AnBounds {
    double lower = 0.0;  // n^{-eta}
    double upper = 0.0;  // (log n / n)^{eta}
};

AnBounds an_bounds(long long n, double eta);

enum class Omega1Form { AsPrinted, SignCorrected };

/// Upper shape curve from the contact exponents: (log n/n)^{(kappa-1)
/// * omega/(2(omega-1))} for omega > 1; for omega <= 1 the exponential form,
/// with the printed n^{-1/2} exponent or its sign-corrected n^{+1/2} variant.
double an_upper_contact(long long n, double omega, double kappa,
                        Omega1Form form = Omega1Form::AsPrinted);

enum class SchattenMembership { InSp, NotInSp };

/// InSp iff p * eta > 1.
SchattenMembership schatten_predicate(const Rational& eta, const Rational& p);
SchattenMembership schatten_predicate(double eta, double p);

struct SeparatorResult {
    int d = 0;
    int k = 0;  // even flatness order used in every variable
    Rational eta;
    BohrLift lift;
    DirichletSymbol symbol;
};

/// A symbol whose operator lies in S_q but not in S_p (0 < p < q), found by
/// exhaustive search over d, k <= 64 and realized by the flat constructor.
SeparatorResult schatten_separator(double p, double q);

/// Hyperbolic length of the boundary of {s : |Im s|^omega <= C Re s,
/// sigma <= Re s <= C} by quadrature.
double hyperbolic_length(double omega, double sigma, double C, int quad_nodes = 4096);

/// Product bound prod_j (1-e^{-jL/n})/(1+e^{-jL/n}); requires L >= 1.
double blaschke_product_bound(int n, double L);

/// -int_0^1 ln((1-e^{-xL})/(1+e^{-xL})) dx  (positive; Riemann limit of
/// -ln(product bound)/n).
double blaschke_quadrature_rate(double L, int quad_nodes = 200000);

/// Blaschke product on the right half-plane with the given zeros.
Cplx blaschke_eval(const std::vector<Cplx>& zeros, const Cplx& s);

/// n zeros equally spaced in hyperbolic length along the boundary of
/// Omega_{omega,sigma,C}.
std::vector<Cplx> blaschke_zeros_on_curve(double omega, double sigma, double C, int n);

struct WitnessConfig {
    int max_iter = 50;
    double tol = 1e-12;
    int radial_variable = -1;  // -1: argmax of the linear coefficients
    bool parallel = true;
};

struct WitnessEntry {
    std::vector<int> alpha;
    std::vector<double> rho;
    std::vector<double> theta;
    double residual = 0.0;
};

struct LatticeWitness {
    double delta = 0.0, nu = 0.0;
    std::vector<Cplx> s_points;            // s_m
    std::vector<WitnessEntry> entries;     // all Z(alpha)
    long long s_count = 0;                 // |S| = floor((1/delta)^{1-1/k1})
    long long preimages_per_s = 0;         // prod_{j>=2} floor((1/delta)^{1-1/k_j})
    double max_residual = 0.0;
    double min_separation = 0.0;           // min sup-norm angular gap
    double c1_fitted = 0.0;                // min_separation / delta
    double rho_ratio = 0.0;                // C2: max(rho/delta, delta/rho)
    double lower_bound_quantity = 0.0;     // inf_m N_Phi(s_m;Z) zeta(2 Re s_m)
    std::vector<std::string> violations;   // machine-checked invariant failures
};

/// Newton preimage lattice of Lemma-style interpolation data. Throws
/// std::runtime_error on Newton divergence.
LatticeWitness lower_bound_witness(const BohrLift& lift, const RegularityProfile& prof,
                                   double delta, double nu, const WitnessConfig& cfg = {});

struct ProbeResult {
    std::vector<double> singular_values;  // descending
    int ncols = 0;
    double fit_slope = 0.0;    // of log sigma_n vs log n (negative)
    double decay_exponent = 0.0;  // -fit_slope
    double fit_r2 = 0.0;
    int window_lo = 0, window_hi = 0;
    double min_column_mass = 0.0;  // truncation diagnostic, want >= 0.99
};

/// Compression of the composition operator to the generating-set subspace in
/// the orthonormal monomial basis: columns k <= M with prime support in the
/// generators, rows all monomials of total degree <= D.
ProbeResult truncated_matrix_probe(const DirichletSymbol& sym, const GeneratingSet& gen, int M,
                                   int D, int window_lo = 10, int window_hi = 60);

/// Riemann zeta on (1, inf) by Euler-Maclaurin; relative error ~1e-14 for
/// s >= 1.001.
double zeta_real(double s);

}  // namespace dsym
