#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsym/genset.hpp"
#include "dsym/series.hpp"
#include "dsym/symbol.hpp"

namespace dsym {

using Cplx = std::complex<double>;

struct BohrTerm {
    Midx alpha;
    RationalComplex c_exact;
    Cplx c;
};

/// Polydisc polynomial  constant + sum c_n z^{alpha(n)}  obtained from a
/// symbol by the substitution q_j^{-s} -> z_j (constant = c1 - 1/2 when
/// c0 = 0). phi(theta) = eval at z_j = e^{i theta_j}.
struct BohrLift {
    RationalComplex constant_exact;
    Cplx constant{0.0, 0.0};
    std::vector<BohrTerm> terms;
    int dim = 0;
    GeneratingSet source;

    int degree() const;
    double coeff_l1() const;     // sum |c_n|
    double im_bound() const;     // sup |Im Phi| <= |Im constant| + coeff_l1

    Cplx eval(const std::vector<Cplx>& z) const;
    Cplx eval_theta(const std::vector<double>& theta) const;
    double re_theta(const std::vector<double>& theta) const;

    /// Gradient and Hessian of Re phi at theta, as exact cos/sin sums.
    void re_gradient_hessian(const std::vector<double>& theta, Eigen::VectorXd& grad,
                             Eigen::MatrixXd& hess) const;
    Eigen::VectorXd re_gradient(const std::vector<double>& theta) const;

    /// d Phi / d z_j at z.
    Cplx partial(const std::vector<Cplx>& z, int j) const;

    /// m-th derivative of t -> Re phi(theta + t v) at t = 0, as an exact
    /// cos/sin sum (v need not be a unit vector).
    double re_directional_derivative(const std::vector<double>& theta,
                                     const Eigen::VectorXd& v, int order) const;

    /// Exact evaluation at z_j = signs_j (each +1 or -1).
    RationalComplex eval_exact_pm1(const std::vector<int>& signs) const;
};

/// Bohr lift for the c0 = 0 pipeline (throws on c0 >= 1).
BohrLift lift(const DirichletSymbol& sym, const GeneratingSet& gen);

/// Lift used for range analysis: offset c1 - 1/2 when c0 = 0, plain c1 when
/// c0 >= 1 (the class-(b) half-plane condition).
BohrLift range_lift(const DirichletSymbol& sym, const GeneratingSet& gen);

/// Build a lift directly from multi-index coefficients (flat-constructor use).
BohrLift lift_from_coefficients(const RationalComplex& constant,
                                const std::vector<std::pair<Midx, RationalComplex>>& coeffs,
                                const std::vector<std::int64_t>& generators);

/// Symbol whose Bohr lift over `generators` is the given polynomial.
DirichletSymbol symbol_from_lift(const BohrLift& lift);

/// Coefficients of Phi rotated to the boundary point (z -> w z) and shifted
/// by -i tau, written in powers of (1 - z_j); exact polynomial identity.
struct LocalExpansion {
    std::vector<double> theta;
    double tau = 0.0;
    TruncatedSeries<Cplx> poly{0, 0};
    std::vector<Cplx> a_raw;                // |alpha| = 1 coefficients
    std::vector<double> a;                  // their real parts (validated)
    std::vector<Cplx> b;                    // alpha = 2 e_j
    std::vector<std::vector<Cplx>> c;       // strictly upper triangular e_j + e_k

    /// Resum the expansion at a torus point; equals eval up to roundoff.
    Cplx resum(const std::vector<Cplx>& z) const;
};

/// Throws ClassViolation when a linear coefficient has |Im| > tol or
/// Re < -tol (the one-variable slice argument fails).
LocalExpansion local_expansion(const BohrLift& lift, const std::vector<double>& theta_w,
                               double tol = 1e-8);

struct JuliaCaratheodoryReport {
    bool pass = false;
    std::string detail;
};

/// Pass iff every |alpha|=1 coefficient is real and >= 0 and at least one is
/// positive (constant lifts pass degenerately).
JuliaCaratheodoryReport julia_caratheodory_check(const LocalExpansion& exp, double tol = 1e-9);

struct BoundaryPoint {
    std::vector<double> theta;
    double tau = 0.0;
    Eigen::MatrixXd hessian;
    Eigen::VectorXd eigvals;   // ascending
    Eigen::MatrixXd eigvecs;   // columns match eigvals
    int index_j = 0;
    LocalExpansion local;
};

struct BoundaryConfig {
    int grid_per_dim = 0;        // 0: 64 for d <= 3, 16 for d in 4..6
    double boundary_tol = 1e-9;  // accept minima with Re <= this
    double dedup_radius = 1e-4;  // angular max-norm
    double rank_tol = 1e-6;      // eigenvalue > rank_tol*(1+||H||) counts toward J
    int max_iter = 200;
    bool parallel = true;
};

struct BoundaryScan {
    std::vector<BoundaryPoint> points;
    double global_min = 0.0;
    RangeKind range_kind = RangeKind::Restricted;
};

/// Global minimum of Re phi over the torus: grid seeding plus damped Newton
/// polish. Never throws on negative minima (callers decide).
double torus_min_re(const BohrLift& lift, int grid_per_dim = 0, bool parallel = true);

/// Multi-start scan for all Re phi = 0 minima. Throws ClassViolation when the
/// global minimum is below -boundary_tol (not a class member).
BoundaryScan find_boundary_points(const BohrLift& lift, const BoundaryConfig& cfg = {});

/// Serial twin of find_boundary_points kept as the reference implementation;
/// identical output by construction.
BoundaryScan find_boundary_points_reference(const BohrLift& lift, BoundaryConfig cfg = {});

}  // namespace dsym
