#include "dsym/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsym/parallel.hpp"

namespace dsym {

int BohrLift::degree() const {
    int d = 0;
    for (auto& t : terms) d = std::max(d, total_degree(t.alpha));
    return d;
}

double BohrLift::coeff_l1() const {
    double s = 0;
    for (auto& t : terms) s += std::abs(t.c);
    return s;
}

double BohrLift::im_bound() const { return std::abs(constant.imag()) + coeff_l1(); }

Cplx BohrLift::eval(const std::vector<Cplx>& z) const {
    if (static_cast<int>(z.size()) != dim) throw std::invalid_argument("eval: dimension mismatch");
    Cplx acc = constant;
    for (auto& t : terms) {
        Cplx m(1.0, 0.0);
        for (int j = 0; j < dim; ++j)
            for (int e = 0; e < t.alpha[j]; ++e) m *= z[j];
        acc += t.c * m;
    }
    return acc;
}

Cplx BohrLift::eval_theta(const std::vector<double>& theta) const {
    Cplx acc = constant;
    for (auto& t : terms) {
        double phase = 0;
        for (int j = 0; j < dim; ++j) phase += t.alpha[j] * theta[j];
        acc += t.c * Cplx(std::cos(phase), std::sin(phase));
    }
    return acc;
}

double BohrLift::re_theta(const std::vector<double>& theta) const {
    double acc = constant.real();
    for (auto& t : terms) {
        double phase = 0;
        for (int j = 0; j < dim; ++j) phase += t.alpha[j] * theta[j];
        acc += t.c.real() * std::cos(phase) - t.c.imag() * std::sin(phase);
    }
    return acc;
}

void BohrLift::re_gradient_hessian(const std::vector<double>& theta, Eigen::VectorXd& grad,
                                   Eigen::MatrixXd& hess) const {
    grad = Eigen::VectorXd::Zero(dim);
    hess = Eigen::MatrixXd::Zero(dim, dim);
    for (auto& t : terms) {
        double phase = 0;
        for (int j = 0; j < dim; ++j) phase += t.alpha[j] * theta[j];
        double cr = t.c.real(), ci = t.c.imag();
        double s = std::sin(phase), c = std::cos(phase);
        double g = -cr * s - ci * c;
        double h = -cr * c + ci * s;
        for (int j = 0; j < dim; ++j) {
            if (t.alpha[j] == 0) continue;
            grad[j] += t.alpha[j] * g;
            for (int k = j; k < dim; ++k) {
                if (t.alpha[k] == 0) continue;
                hess(j, k) += t.alpha[j] * t.alpha[k] * h;
            }
        }
    }
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < j; ++k) hess(j, k) = hess(k, j);
}

Eigen::VectorXd BohrLift::re_gradient(const std::vector<double>& theta) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    for (auto& t : terms) {
        double phase = 0;
        for (int j = 0; j < dim; ++j) phase += t.alpha[j] * theta[j];
        double g = -t.c.real() * std::sin(phase) - t.c.imag() * std::cos(phase);
        for (int j = 0; j < dim; ++j) grad[j] += t.alpha[j] * g;
    }
    return grad;
}

Cplx BohrLift::partial(const std::vector<Cplx>& z, int j) const {
    Cplx acc(0.0, 0.0);
    for (auto& t : terms) {
        if (t.alpha[j] == 0) continue;
        Cplx m(static_cast<double>(t.alpha[j]), 0.0);
        for (int k = 0; k < dim; ++k) {
            int e = t.alpha[k] - (k == j ? 1 : 0);
            for (int i = 0; i < e; ++i) m *= z[k];
        }
        acc += t.c * m;
    }
    return acc;
}

double BohrLift::re_directional_derivative(const std::vector<double>& theta,
                                           const Eigen::VectorXd& v, int order) const {
    double acc = 0.0;
    for (auto& t : terms) {
        double phase = 0.0, omega = 0.0;
        for (int j = 0; j < dim; ++j) {
            phase += t.alpha[j] * theta[j];
            omega += t.alpha[j] * v[j];
        }
        Cplx rotated = t.c * Cplx(std::cos(phase), std::sin(phase));
        Cplx iw_m = std::pow(Cplx(0.0, omega), order);
        acc += (rotated * iw_m).real();
    }
    return acc;
}

RationalComplex BohrLift::eval_exact_pm1(const std::vector<int>& signs) const {
    RationalComplex acc = constant_exact;
    for (auto& t : terms) {
        int sgn = 1;
        for (int j = 0; j < dim; ++j)
            if (signs[j] < 0 && (t.alpha[j] & 1)) sgn = -sgn;
        acc += sgn > 0 ? t.c_exact : -t.c_exact;
    }
    return acc;
}

namespace {

BohrLift make_lift(const DirichletSymbol& sym, const GeneratingSet& gen,
                   const RationalComplex& offset) {
    BohrLift L;
    L.dim = static_cast<int>(gen.generators.size());
    L.source = gen;
    L.constant_exact = offset;
    L.constant = offset.to_complex();
    for (auto& [n, c] : sym.terms) {
        auto it = gen.exponent_map.find(n);
        if (it == gen.exponent_map.end())
            throw std::invalid_argument("generating set does not cover frequency " +
                                        std::to_string(n));
        L.terms.push_back({it->second, c, c.to_complex()});
    }
    return L;
}

}  // namespace

BohrLift lift(const DirichletSymbol& sym, const GeneratingSet& gen) {
    if (sym.c0 != 0) throw std::invalid_argument("lift: defined only for characteristic 0");
    return make_lift(sym, gen, sym.c1 - RationalComplex(Rational(1, 2)));
}

BohrLift range_lift(const DirichletSymbol& sym, const GeneratingSet& gen) {
    if (sym.c0 == 0) return make_lift(sym, gen, sym.c1 - RationalComplex(Rational(1, 2)));
    return make_lift(sym, gen, sym.c1);
}

BohrLift lift_from_coefficients(const RationalComplex& constant,
                                const std::vector<std::pair<Midx, RationalComplex>>& coeffs,
                                const std::vector<std::int64_t>& generators) {
    BohrLift L;
    L.dim = static_cast<int>(generators.size());
    L.constant_exact = constant;
    L.constant = constant.to_complex();
    L.source.generators = generators;
    for (auto& [alpha, c] : coeffs) {
        if (c.is_zero()) continue;
        if (static_cast<int>(alpha.size()) != L.dim)
            throw std::invalid_argument("lift_from_coefficients: index dimension");
        std::int64_t n = 1;
        for (int j = 0; j < L.dim; ++j)
            for (int e = 0; e < alpha[j]; ++e) n *= generators[j];
        L.source.exponent_map[n] = alpha;
        L.terms.push_back({alpha, c, c.to_complex()});
    }
    std::sort(L.terms.begin(), L.terms.end(),
              [](const BohrTerm& x, const BohrTerm& y) { return x.alpha < y.alpha; });
    return L;
}

DirichletSymbol symbol_from_lift(const BohrLift& lift) {
    DirichletSymbol sym;
    sym.c1 = lift.constant_exact + RationalComplex(Rational(1, 2));
    for (auto& t : lift.terms) {
        std::int64_t n = 1;
        for (int j = 0; j < lift.dim; ++j)
            for (int e = 0; e < t.alpha[j]; ++e) n *= lift.source.generators[j];
        sym.add_term(n, t.c_exact);
    }
    sym.normalize();
    return sym;
}

// ---------------------------------------------------------------------------
// Local expansion (binomial re-expansion around a boundary point)
// ---------------------------------------------------------------------------

LocalExpansion local_expansion(const BohrLift& lift, const std::vector<double>& theta_w,
                               double tol) {
    const int d = lift.dim;
    LocalExpansion out;
    out.theta = theta_w;
    std::vector<Cplx> w(d);
    for (int j = 0; j < d; ++j) w[j] = Cplx(std::cos(theta_w[j]), std::sin(theta_w[j]));
    Cplx at_w = lift.eval(w);
    out.tau = at_w.imag();

    int cap = std::max(lift.degree(), 1);
    TruncatedSeries<Cplx> poly(d, cap);
    poly.set(Midx(d, 0), at_w - Cplx(0.0, out.tau));

    // z^alpha rotated by w and expanded: w^alpha * prod_j (1-(1-zeta_j))^{alpha_j}
    std::vector<std::vector<double>> binom(cap + 1, std::vector<double>(cap + 1, 0.0));
    for (int n = 0; n <= cap; ++n) {
        binom[n][0] = 1.0;
        for (int k = 1; k <= n; ++k)
            binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
    }
    for (auto& t : lift.terms) {
        Cplx cw = t.c;
        for (int j = 0; j < d; ++j)
            for (int e = 0; e < t.alpha[j]; ++e) cw *= w[j];
        // iterate over beta <= alpha componentwise, beta != 0
        Midx beta(d, 0);
        while (true) {
            int j = 0;
            while (j < d && beta[j] == t.alpha[j]) beta[j++] = 0;
            if (j == d) break;
            ++beta[j];
            double prod = 1.0;
            int total = 0;
            for (int k = 0; k < d; ++k) {
                prod *= binom[t.alpha[k]][beta[k]];
                total += beta[k];
            }
            Cplx coef = cw * prod * ((total & 1) ? -1.0 : 1.0);
            poly.set(beta, poly.coeff(beta) + coef);
        }
    }
    out.poly = poly;

    out.a_raw.assign(d, Cplx(0, 0));
    out.a.assign(d, 0.0);
    out.b.assign(d, Cplx(0, 0));
    out.c.assign(d, std::vector<Cplx>(d, Cplx(0, 0)));
    for (int j = 0; j < d; ++j) {
        Midx e(d, 0);
        e[j] = 1;
        out.a_raw[j] = poly.coeff(e);
        e[j] = 2;
        out.b[j] = poly.coeff(e);
        for (int k = j + 1; k < d; ++k) {
            Midx ejk(d, 0);
            ejk[j] = 1;
            ejk[k] = 1;
            out.c[j][k] = poly.coeff(ejk);
        }
    }
    double scale = 1.0 + lift.coeff_l1();
    for (int j = 0; j < d; ++j) {
        if (std::abs(out.a_raw[j].imag()) > tol * scale)
            throw ClassViolation("linear coefficient a_" + std::to_string(j + 1) +
                                 " has nonzero imaginary part");
        if (out.a_raw[j].real() < -tol * scale)
            throw ClassViolation("linear coefficient a_" + std::to_string(j + 1) +
                                 " is negative");
        out.a[j] = out.a_raw[j].real();
    }
    return out;
}

Cplx LocalExpansion::resum(const std::vector<Cplx>& z) const {
    std::vector<Cplx> om(z.size());
    for (size_t j = 0; j < z.size(); ++j) {
        Cplx w(std::cos(theta[j]), std::sin(theta[j]));
        om[j] = Cplx(1.0, 0.0) - z[j] / w;
    }
    return poly.eval(om) + Cplx(0.0, tau);
}

JuliaCaratheodoryReport julia_caratheodory_check(const LocalExpansion& exp, double tol) {
    JuliaCaratheodoryReport rep;
    bool any_positive = false;
    bool degenerate = true;
    for (auto& [m, v] : exp.poly.coeffs())
        if (total_degree(m) >= 1 && std::abs(v) > tol) degenerate = false;
    for (size_t j = 0; j < exp.a_raw.size(); ++j) {
        const Cplx& a = exp.a_raw[j];
        if (std::abs(a.imag()) > tol) {
            rep.detail = "a_" + std::to_string(j + 1) + " not real";
            return rep;
        }
        if (a.real() < -tol) {
            rep.detail = "a_" + std::to_string(j + 1) + " negative";
            return rep;
        }
        if (a.real() > tol) any_positive = true;
    }
    if (!any_positive && !degenerate) {
        rep.detail = "no positive linear coefficient but higher terms present";
        return rep;
    }
    rep.pass = true;
    rep.detail = degenerate ? "constant map" : "linear coefficients nonnegative";
    return rep;
}

// ---------------------------------------------------------------------------
// Boundary-point scan
// ---------------------------------------------------------------------------

namespace {

double wrap_angle(double t) {
    t = std::fmod(t + M_PI, 2.0 * M_PI);
    if (t < 0) t += 2.0 * M_PI;
    return t - M_PI;
}

double torus_dist_inf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (size_t j = 0; j < a.size(); ++j) {
        double d = std::abs(wrap_angle(a[j] - b[j]));
        m = std::max(m, d);
    }
    return m;
}

struct Polished {
    std::vector<double> theta;
    double value;
};

Polished polish(const BohrLift& L, std::vector<double> theta, int max_iter) {
    const int d = L.dim;
    Eigen::VectorXd g;
    Eigen::MatrixXd H;
    double f = L.re_theta(theta);
    double scale = 1.0 + L.coeff_l1();
    for (int iter = 0; iter < max_iter; ++iter) {
        L.re_gradient_hessian(theta, g, H);
        if (g.norm() <= 1e-15 * scale) break;
        Eigen::VectorXd step = -g;
        bool have_newton = false;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd nstep = ldlt.solve(-g);
            if (nstep.allFinite() && nstep.dot(g) < 0 && nstep.norm() < 10.0) {
                step = nstep;
                have_newton = true;
            }
        }
        // near a critical point the objective sits on its fp floor and a
        // sufficient-decrease test cannot see progress; trust short Newton steps
        if (have_newton && g.norm() <= 1e-6 * scale && step.norm() <= 1e-2) {
            for (int j = 0; j < d; ++j) theta[j] = wrap_angle(theta[j] + step[j]);
            f = L.re_theta(theta);
            continue;
        }
        double t = 1.0;
        double slope = g.dot(step);
        std::vector<double> cand(d);
        bool moved = false;
        while (t > 1e-14) {
            for (int j = 0; j < d; ++j) cand[j] = wrap_angle(theta[j] + t * step[j]);
            double fc = L.re_theta(cand);
            if (fc <= f + 1e-4 * t * slope) {
                theta = cand;
                f = fc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return {theta, f};
}

/// Resolve the minimizer along near-flat Hessian directions, where gradient
/// descent stalls at |t - t*| ~ grad_tol^{1/3}: with f(t) ~ c_k (t-t*)^k along
/// the direction, Newton on f^{(k-1)} is well conditioned and lands on t* to
/// machine precision. Directions with no detectable finite order (flat valleys)
/// are left alone.
std::vector<double> refine_degenerate(const BohrLift& L, std::vector<double> theta) {
    const int d = L.dim;
    double scale = 1.0 + L.coeff_l1();
    for (int pass = 0; pass < 3; ++pass) {
        Polished p = polish(L, theta, 40);
        theta = p.theta;
        Eigen::VectorXd g;
        Eigen::MatrixXd H;
        L.re_gradient_hessian(theta, g, H);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        double hnorm = H.norm();
        bool moved = false;
        for (int i = 0; i < d; ++i) {
            if (es.eigenvalues()[i] > 1e-6 * (1.0 + hnorm)) continue;
            Eigen::VectorXd v = es.eigenvectors().col(i);
            int k = 0;
            for (int m = 4; m <= 40; m += 2) {
                double fm = L.re_directional_derivative(theta, v, m);
                double coef = fm / std::tgamma(m + 1.0);
                if (coef > 1e-6 * scale) {
                    k = m;
                    break;
                }
                if (coef < -1e-6 * scale) {
                    k = 0;  // not a minimum along this line
                    break;
                }
            }
            if (k == 0) continue;
            double t = 0.0;
            for (int it = 0; it < 20; ++it) {
                std::vector<double> shifted(d);
                for (int j = 0; j < d; ++j) shifted[j] = theta[j] + t * v[j];
                double h = L.re_directional_derivative(shifted, v, k - 1);
                double hp = L.re_directional_derivative(shifted, v, k);
                if (std::abs(hp) < 1e-12 * scale) break;
                double step = h / hp;
                t -= step;
                if (std::abs(step) < 1e-15) break;
            }
            if (t != 0.0) {
                for (int j = 0; j < d; ++j) theta[j] = wrap_angle(theta[j] + t * v[j]);
                moved = true;
            }
        }
        if (!moved && pass > 0) break;
    }
    return theta;
}

}  // namespace

double torus_min_re(const BohrLift& L, int grid_per_dim, bool parallel) {
    const int d = L.dim;
    if (d == 0) return L.constant.real();
    int g = grid_per_dim > 0 ? grid_per_dim : (d <= 3 ? 64 : 16);
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= g;
    int chunks = static_cast<int>(std::min<long long>(total, 256));
    std::vector<double> chunk_min(chunks, std::numeric_limits<double>::infinity());
    chunked_for(
        chunks,
        [&](int c) {
            long long lo = total * c / chunks, hi = total * (c + 1) / chunks;
            std::vector<double> theta(d);
            double best = std::numeric_limits<double>::infinity();
            for (long long i = lo; i < hi; ++i) {
                long long rem = i;
                for (int j = 0; j < d; ++j) {
                    theta[j] = -M_PI + 2.0 * M_PI * (rem % g + 0.5) / g;
                    rem /= g;
                }
                best = std::min(best, polish(L, theta, 120).value);
            }
            chunk_min[c] = best;
        },
        parallel);
    double m = std::numeric_limits<double>::infinity();
    for (double v : chunk_min) m = std::min(m, v);
    return m;
}

namespace {

BoundaryScan scan_impl(const BohrLift& L, const BoundaryConfig& cfg, bool parallel) {
    const int d = L.dim;
    BoundaryScan out;
    if (d == 0) {
        out.global_min = L.constant.real();
        out.range_kind =
            out.global_min <= cfg.boundary_tol ? RangeKind::Unrestricted : RangeKind::Restricted;
        return out;
    }
    int g = cfg.grid_per_dim > 0 ? cfg.grid_per_dim : (d <= 3 ? 64 : 16);
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= g;
    int chunks = static_cast<int>(std::min<long long>(total, 256));
    double scale = 1.0 + L.coeff_l1();

    std::vector<std::vector<Polished>> chunk_candidates(chunks);
    std::vector<double> chunk_min(chunks, std::numeric_limits<double>::infinity());
    chunked_for(
        chunks,
        [&](int c) {
            long long lo = total * c / chunks, hi = total * (c + 1) / chunks;
            std::vector<double> theta(d);
            for (long long i = lo; i < hi; ++i) {
                long long rem = i;
                for (int j = 0; j < d; ++j) {
                    theta[j] = -M_PI + 2.0 * M_PI * (rem % g + 0.5) / g;
                    rem /= g;
                }
                Polished p = polish(L, theta, cfg.max_iter);
                chunk_min[c] = std::min(chunk_min[c], p.value);
                if (p.value <= cfg.boundary_tol * scale) chunk_candidates[c].push_back(p);
            }
        },
        parallel);

    out.global_min = std::numeric_limits<double>::infinity();
    std::vector<Polished> candidates;
    for (int c = 0; c < chunks; ++c) {
        out.global_min = std::min(out.global_min, chunk_min[c]);
        for (auto& p : chunk_candidates[c]) candidates.push_back(p);
    }
    if (out.global_min < -cfg.boundary_tol * scale)
        throw ClassViolation("Re of the lift attains " + std::to_string(out.global_min) +
                             " on the torus; symbol is not a class member");
    out.range_kind = out.global_min <= cfg.boundary_tol * scale ? RangeKind::Unrestricted
                                                                : RangeKind::Restricted;
    if (out.range_kind == RangeKind::Restricted) return out;

    std::sort(candidates.begin(), candidates.end(), [](const Polished& x, const Polished& y) {
        if (x.value != y.value) return x.value < y.value;
        return x.theta < y.theta;
    });
    std::vector<Polished> kept;
    for (auto& p : candidates) {
        bool dup = false;
        for (auto& q : kept)
            if (torus_dist_inf(p.theta, q.theta) < cfg.dedup_radius) {
                dup = true;
                break;
            }
        if (!dup) kept.push_back(p);
    }
    // resolve degenerate valleys exactly, then re-deduplicate
    for (auto& p : kept) {
        p.theta = refine_degenerate(L, p.theta);
        p.value = L.re_theta(p.theta);
    }
    std::sort(kept.begin(), kept.end(), [](const Polished& x, const Polished& y) {
        if (x.value != y.value) return x.value < y.value;
        return x.theta < y.theta;
    });
    {
        std::vector<Polished> merged;
        for (auto& p : kept) {
            bool dup = false;
            for (auto& q : merged)
                if (torus_dist_inf(p.theta, q.theta) < cfg.dedup_radius) {
                    dup = true;
                    break;
                }
            if (!dup) merged.push_back(p);
        }
        kept = std::move(merged);
    }
    std::sort(kept.begin(), kept.end(),
              [](const Polished& x, const Polished& y) { return x.theta < y.theta; });

    for (auto& p : kept) {
        BoundaryPoint bp;
        bp.theta = p.theta;
        Eigen::VectorXd grad;
        L.re_gradient_hessian(p.theta, grad, bp.hessian);
        if (grad.norm() > 1e-8 * scale) continue;  // converged to a non-critical shelf
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bp.hessian);
        bp.eigvals = es.eigenvalues();
        bp.eigvecs = es.eigenvectors();
        double hnorm = bp.hessian.norm();
        if (bp.eigvals.minCoeff() < -1e-8 * (1.0 + hnorm))
            throw ClassViolation("indefinite Hessian at a boundary minimum");
        bp.index_j = 0;
        for (int i = 0; i < bp.eigvals.size(); ++i)
            if (bp.eigvals[i] > cfg.rank_tol * (1.0 + hnorm)) ++bp.index_j;
        bp.local = local_expansion(L, p.theta);
        bp.tau = bp.local.tau;
        out.points.push_back(std::move(bp));
    }
    return out;
}

}  // namespace

BoundaryScan find_boundary_points(const BohrLift& L, const BoundaryConfig& cfg) {
    return scan_impl(L, cfg, cfg.parallel);
}

BoundaryScan find_boundary_points_reference(const BohrLift& L, BoundaryConfig cfg) {
    return scan_impl(L, cfg, false);
}

}  // namespace dsym
