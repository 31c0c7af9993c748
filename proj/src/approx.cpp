#include "dsym/approx.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "dsym/classify.hpp"
#include "dsym/parallel.hpp"
#include "dsym/series.hpp"

namespace dsym {

namespace {

double unit_double(std::uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

/// Directional derivatives of Re phi along a unit direction v at theta_w:
/// f(t) = Re const + sum Re[c~_alpha e^{i omega_alpha t}], omega = alpha.v.
double re_directional_derivative(const BohrLift& L, const std::vector<double>& theta_w,
                                 const Eigen::VectorXd& v, int order) {
    double acc = 0.0;
    for (auto& t : L.terms) {
        double phase = 0.0, omega = 0.0;
        for (int j = 0; j < L.dim; ++j) {
            phase += t.alpha[j] * theta_w[j];
            omega += t.alpha[j] * v[j];
        }
        Cplx rotated = t.c * Cplx(std::cos(phase), std::sin(phase));
        // d^m/dt^m Re[c e^{i w t}] at 0 = Re[c (i w)^m]
        Cplx iw_m = std::pow(Cplx(0.0, omega), order);
        acc += (rotated * iw_m).real();
    }
    return acc;
}

}  // namespace

RegularityProfile boundary_regularity(const BohrLift& L, const BoundaryPoint& bp) {
    const int d = L.dim;
    RegularityProfile out;
    out.theta_w = bp.theta;
    out.tau = bp.tau;

    double hnorm = bp.hessian.norm();
    double rank_tol = 1e-6 * (1.0 + hnorm);
    std::vector<int> kernel_idx, positive_idx;
    for (int i = 0; i < d; ++i) {
        if (bp.eigvals[i] > rank_tol)
            positive_idx.push_back(i);
        else
            kernel_idx.push_back(i);
    }
    if (kernel_idx.size() >= 2 && !is_separated(L))
        throw std::domain_error(
            "NotSupported: Hessian kernel of dimension >= 2 on a non-separated lift");

    struct Form {
        Eigen::VectorXd row;
        int k;
        double lambda;  // Hessian eigenvalue for ordering among k = 2
    };
    std::vector<Form> forms;
    for (int i : positive_idx) {
        Eigen::VectorXd v = bp.eigvecs.col(i);
        forms.push_back({std::sqrt(bp.eigvals[i] / 2.0) * v, 2, bp.eigvals[i]});
    }
    double scale = 1.0 + L.coeff_l1();
    for (int i : kernel_idx) {
        Eigen::VectorXd v = bp.eigvecs.col(i);
        if (is_separated(L) && kernel_idx.size() >= 2) {
            // kernel eigenvectors of a separated lift are coordinate axes up to
            // ordering; snap to the dominant coordinate
            int best = 0;
            for (int j = 1; j < d; ++j)
                if (std::abs(v[j]) > std::abs(v[best])) best = j;
            v = Eigen::VectorXd::Zero(d);
            v[best] = 1.0;
        }
        int korder = 0;
        double coef = 0.0;
        for (int m = 3; m <= 40; ++m) {
            double der = re_directional_derivative(L, bp.theta, v, m);
            double fact = std::tgamma(m + 1.0);
            double c = der / fact;
            if (std::abs(c) > 1e-8 * scale) {
                if (m % 2 == 1)
                    throw ClassViolation("odd leading kernel term along a boundary direction");
                if (c < 0) throw ClassViolation("negative leading kernel term");
                korder = m;
                coef = c;
                break;
            }
        }
        if (korder == 0)
            throw std::domain_error(
                "NotSupported: Re phi is flat along a kernel direction (order > 40)");
        forms.push_back({std::pow(coef, 1.0 / korder) * v, korder, 0.0});
    }
    std::sort(forms.begin(), forms.end(), [](const Form& a, const Form& b) {
        if (a.k != b.k) return a.k > b.k;
        return a.lambda > b.lambda;
    });

    out.ell.resize(d, d);
    out.k.resize(d);
    for (int i = 0; i < d; ++i) {
        out.ell.row(i) = forms[i].row.transpose();
        out.k[i] = forms[i].k;
    }
    // Im phi gradient at theta_w equals -(a vector); express in the ell basis
    Eigen::VectorXd g(d);
    for (int j = 0; j < d; ++j) g[j] = -bp.local.a[j];
    out.b = out.ell.transpose().fullPivLu().solve(g);
    if (std::abs(out.b[0]) < 1e-9 * scale)
        throw ClassViolation("vanishing Im linear form on the leading contact direction");
    return out;
}

Rational eta_exact(const std::vector<int>& k) {
    if (k.size() < 2) throw std::domain_error("eta undefined for dimension 1");
    Rational s(0);
    for (size_t j = 1; j < k.size(); ++j) s += Rational(1, k[j]);
    return s * Rational(k[0], 2 * (k[0] - 1));
}

CompactnessIndex compactness_index(const BohrLift& L, const BoundaryScan& scan) {
    CompactnessIndex out;
    out.eta = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < scan.points.size(); ++i) {
        RegularityProfile prof = boundary_regularity(L, scan.points[i]);
        double eta = to_double(eta_exact(prof.k));
        out.per_point.emplace_back(i, eta);
        out.eta = std::min(out.eta, eta);
    }
    return out;
}

ContactExponents omega_fit_from_pairs(const std::vector<std::pair<double, double>>& pairs,
                                      const OmegaConfig& cfg) {
    ContactExponents out;
    double llo = std::log(cfg.re_lo), lhi = std::log(cfg.re_hi);
    std::vector<double> envelope(cfg.bins, -std::numeric_limits<double>::infinity());
    std::vector<double> env_x(cfg.bins, 0.0);
    for (auto& [re, im_dev] : pairs) {
        if (re < cfg.re_lo || re > cfg.re_hi || im_dev <= 0) continue;
        int b = static_cast<int>((std::log(re) - llo) / (lhi - llo) * cfg.bins);
        b = std::clamp(b, 0, cfg.bins - 1);
        double y = std::log(im_dev);
        if (y > envelope[b]) {
            envelope[b] = y;
            env_x[b] = std::log(re);
        }
    }
    std::vector<double> xs, ys;
    for (int b = 0; b < cfg.bins; ++b) {
        if (!std::isfinite(envelope[b])) continue;
        xs.push_back(env_x[b]);
        ys.push_back(envelope[b]);
    }
    if (xs.size() < 5) throw std::runtime_error("omega fit: too few occupied envelope bins");
    size_t m = xs.size();
    double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    double slope = sxy / sxx;  // ~ 1/omega
    double ss_res = 0;
    for (size_t i = 0; i < m; ++i) {
        double pred = ybar + slope * (xs[i] - xbar);
        ss_res += (ys[i] - pred) * (ys[i] - pred);
    }
    out.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    out.omega_hat = 1.0 / slope;
    // envelope line log|im| = intercept + slope log re  and |im|^w <= C re
    // give log C = w * intercept
    out.C = std::exp(out.omega_hat * (ybar - slope * xbar));
    return out;
}

ContactExponents omega_estimate(const BohrLift& L, const BoundaryPoint& bp,
                                const OmegaConfig& cfg) {
    const int d = L.dim;
    std::mt19937_64 rng(cfg.seed);
    // anisotropic window in the Hessian eigenbasis: flat directions get a wide
    // range, stiff ones a narrow one, so the upper envelope is well populated
    std::vector<double> span(d, cfg.radius);
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd v = bp.eigvecs.col(i);
        double lo = 0.0, hi = cfg.radius;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            std::vector<double> theta(d);
            for (int j = 0; j < d; ++j) theta[j] = bp.theta[j] + mid * v[j];
            if (L.re_theta(theta) <= 4.0 * cfg.re_hi)
                lo = mid;
            else
                hi = mid;
        }
        span[i] = std::max(lo, 1e-4);
    }
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(cfg.samples);
    std::vector<double> theta(d);
    for (long long i = 0; i < cfg.samples; ++i) {
        for (int j = 0; j < d; ++j) theta[j] = bp.theta[j];
        for (int i2 = 0; i2 < d; ++i2) {
            double u = span[i2] * (2.0 * unit_double(rng()) - 1.0);
            for (int j = 0; j < d; ++j) theta[j] += u * bp.eigvecs(j, i2);
        }
        Cplx val = L.eval_theta(theta);
        pairs.emplace_back(val.real(), std::abs(val.imag() - bp.tau));
    }
    return omega_fit_from_pairs(pairs, cfg);
}

ContactExponents omega_estimate(const BohrLift& L, const BoundaryScan& scan,
                                const OmegaConfig& cfg) {
    if (scan.range_kind == RangeKind::Restricted || scan.points.empty()) {
        ContactExponents out;
        out.restricted = true;
        return out;
    }
    if (scan.points.size() != 1)
        throw std::invalid_argument("omega_estimate: needs a unique boundary point");
    return omega_estimate(L, scan.points.front(), cfg);
}

AnBounds an_bounds(long long n, double eta) {
    if (n < 2) throw std::invalid_argument("an_bounds: n >= 2");
    AnBounds out;
    out.lower = std::pow(1.0 / n, eta);
    out.upper = std::pow(std::log(static_cast<double>(n)) / n, eta);
    return out;
}

double an_upper_contact(long long n, double omega, double kappa, Omega1Form form) {
    if (n < 2) throw std::invalid_argument("an_upper_contact: n >= 2");
    if (omega > 1.0) {
        double e = (kappa - 1.0) * omega / (2.0 * (omega - 1.0));
        return std::pow(std::log(static_cast<double>(n)) / n, e);
    }
    double arg = form == Omega1Form::AsPrinted ? std::pow(n, -0.5) : std::pow(n, 0.5);
    return std::exp(-arg);
}

SchattenMembership schatten_predicate(const Rational& eta, const Rational& p) {
    if (eta <= 0 || p <= 0) throw std::invalid_argument("schatten_predicate: positive arguments");
    return p * eta > 1 ? SchattenMembership::InSp : SchattenMembership::NotInSp;
}

SchattenMembership schatten_predicate(double eta, double p) {
    if (eta <= 0 || p <= 0) throw std::invalid_argument("schatten_predicate: positive arguments");
    return p * eta > 1.0 ? SchattenMembership::InSp : SchattenMembership::NotInSp;
}

SeparatorResult schatten_separator(double p, double q) {
    if (!(0 < p && p < q)) throw std::invalid_argument("schatten_separator: needs 0 < p < q");
    // eta(d, k) = (d-1)/(2(k-1)); need p*eta <= 1 < q*eta. Deterministic pick:
    // maximize the log-scale margin min(log(q eta), -log(p eta)).
    int best_d = 0, best_k = 0;
    double best_margin = -1;
    Rational best_eta;
    for (int k = 2; k <= 64; k += 2) {
        for (int d = 2; d <= 64; ++d) {
            Rational eta(d - 1, 2 * (k - 1));
            double e = to_double(eta);
            if (!(p * e <= 1.0 && q * e > 1.0)) continue;
            double margin = std::min(std::log(q * e), -std::log(p * e));
            if (margin > best_margin + 1e-12) {
                best_margin = margin;
                best_d = d;
                best_k = k;
                best_eta = eta;
            }
        }
    }
    if (best_d == 0) throw std::logic_error("no (d,k) <= 64 separates the classes");
    SeparatorResult out;
    out.d = best_d;
    out.k = best_k;
    out.eta = best_eta;
    return out;
}

// ---------------------------------------------------------------------------
// Hyperbolic geometry and Blaschke machinery
// ---------------------------------------------------------------------------

double hyperbolic_length(double omega, double sigma, double C, int quad_nodes) {
    if (!(omega >= 1.0) || !(sigma > 0 && sigma < 0.5) || !(C > 1.0))
        throw std::invalid_argument("hyperbolic_length: need omega >= 1, sigma in (0,1/2), C > 1");
    double c1 = std::pow(C, 1.0 / omega);
    double L1 = 2.0 * c1 * std::pow(sigma, 1.0 / omega) / sigma;
    double L2 = 2.0 * c1 * std::pow(C, 1.0 / omega) / C;
    // Gamma3: y = C^{1/w} x^{1/w}, x in [sigma, C], two symmetric arcs;
    // substitute x = e^t for resolution near x = 0
    double t0 = std::log(sigma), t1 = std::log(C);
    auto integrand = [&](double t) {
        double x = std::exp(t);
        double dy = c1 / omega * std::pow(x, 1.0 / omega - 1.0);
        return std::sqrt(1.0 + dy * dy) / x * x;  // |dz|/x with dx = x dt
    };
    double h = (t1 - t0) / quad_nodes;
    double sum = 0.5 * (integrand(t0) + integrand(t1));
    for (int i = 1; i < quad_nodes; ++i) sum += integrand(t0 + i * h);
    double L3 = 2.0 * sum * h;
    return L1 + L2 + L3;
}

double blaschke_product_bound(int n, double L) {
    if (L < 1.0) throw std::invalid_argument("blaschke_product_bound: L >= 1");
    double log_prod = 0.0;
    for (int j = 1; j <= n; ++j) {
        double e = std::exp(-static_cast<double>(j) * L / n);
        log_prod += std::log((1.0 - e) / (1.0 + e));
    }
    return std::exp(log_prod);
}

double blaschke_quadrature_rate(double L, int quad_nodes) {
    double sum = 0.0;
    for (int i = 0; i < quad_nodes; ++i) {
        double x = (i + 0.5) / quad_nodes;
        double e = std::exp(-x * L);
        sum += std::log((1.0 - e) / (1.0 + e));
    }
    return -sum / quad_nodes;
}

Cplx blaschke_eval(const std::vector<Cplx>& zeros, const Cplx& s) {
    Cplx prod(1.0, 0.0);
    for (auto& z : zeros) prod *= (s - z) / (s + std::conj(z));
    return prod;
}

std::vector<Cplx> blaschke_zeros_on_curve(double omega, double sigma, double C, int n) {
    // polyline of the closed boundary of Omega_{omega,sigma,C}, oriented:
    // lower arc (x: C -> sigma), left edge up, upper arc (sigma -> C), right edge down
    double c1 = std::pow(C, 1.0 / omega);
    auto ycurve = [&](double x) { return c1 * std::pow(x, 1.0 / omega); };
    std::vector<Cplx> pts;
    const int seg = 4000;
    for (int i = 0; i <= seg; ++i) {  // lower arc
        double t = std::log(C) + (std::log(sigma) - std::log(C)) * i / seg;
        double x = std::exp(t);
        pts.emplace_back(x, -ycurve(x));
    }
    for (int i = 1; i <= seg; ++i) {  // left edge
        double y = -ycurve(sigma) + 2.0 * ycurve(sigma) * i / seg;
        pts.emplace_back(sigma, y);
    }
    for (int i = 1; i <= seg; ++i) {  // upper arc
        double t = std::log(sigma) + (std::log(C) - std::log(sigma)) * i / seg;
        double x = std::exp(t);
        pts.emplace_back(x, ycurve(x));
    }
    for (int i = 1; i <= seg; ++i) {  // right edge
        double y = ycurve(C) - 2.0 * ycurve(C) * i / seg;
        pts.emplace_back(C, y);
    }
    // cumulative hyperbolic length
    std::vector<double> cum(pts.size(), 0.0);
    for (size_t i = 1; i < pts.size(); ++i) {
        Cplx mid = 0.5 * (pts[i] + pts[i - 1]);
        cum[i] = cum[i - 1] + std::abs(pts[i] - pts[i - 1]) / mid.real();
    }
    double total = cum.back();
    std::vector<Cplx> zeros;
    for (int j = 0; j < n; ++j) {
        double target = total * (j + 0.5) / n;
        size_t idx = std::lower_bound(cum.begin(), cum.end(), target) - cum.begin();
        idx = std::clamp<size_t>(idx, 1, pts.size() - 1);
        double t = (target - cum[idx - 1]) / (cum[idx] - cum[idx - 1]);
        zeros.push_back(pts[idx - 1] + t * (pts[idx] - pts[idx - 1]));
    }
    return zeros;
}

// ---------------------------------------------------------------------------
// Lower-bound witness lattice
// ---------------------------------------------------------------------------

LatticeWitness lower_bound_witness(const BohrLift& L, const RegularityProfile& prof,
                                   double delta, double nu, const WitnessConfig& cfg) {
    const int d = L.dim;
    if (!(delta > 0 && delta * nu < 1.0))
        throw std::invalid_argument("lower_bound_witness: need 0 < delta < 1/nu");
    LatticeWitness out;
    out.delta = delta;
    out.nu = nu;

    // per-form lattice extents
    std::vector<long long> extent(d);
    for (int j = 0; j < d; ++j)
        extent[j] = static_cast<long long>(
            std::floor(std::pow(1.0 / delta, 1.0 - 1.0 / prof.k[j])));
    out.s_count = extent[0];
    out.preimages_per_s = 1;
    for (int j = 1; j < d; ++j) out.preimages_per_s *= extent[j];
    if (out.s_count < 1 || out.preimages_per_s < 1)
        throw std::invalid_argument("lower_bound_witness: delta too large for the lattice");

    // radial unknown: variable with the largest linear coefficient
    std::vector<double> avec(d);
    {
        LocalExpansion le = local_expansion(L, prof.theta_w);
        for (int j = 0; j < d; ++j) avec[j] = le.a[j];
    }
    int rv = cfg.radial_variable;
    if (rv < 0) rv = static_cast<int>(std::max_element(avec.begin(), avec.end()) - avec.begin());
    if (avec[rv] <= 0) throw std::invalid_argument("lower_bound_witness: no positive a_j");

    Eigen::MatrixXd ell_inv = prof.ell.fullPivLu().inverse();
    std::vector<Cplx> w(d);
    for (int j = 0; j < d; ++j) w[j] = Cplx(std::cos(prof.theta_w[j]), std::sin(prof.theta_w[j]));

    long long total = out.s_count * out.preimages_per_s;
    std::vector<WitnessEntry> entries(static_cast<size_t>(total));
    std::vector<int> failures(static_cast<size_t>(total), 0);

    int chunks = static_cast<int>(std::min<long long>(total, 256));
    chunked_for(
        chunks,
        [&](int c) {
            long long lo = total * c / chunks, hi = total * (c + 1) / chunks;
            Eigen::VectorXd u(d);
            std::vector<double> rho(d), theta(d);
            std::vector<Cplx> z(d);
            for (long long idx = lo; idx < hi; ++idx) {
                // decode alpha: alpha_1 = m in [1, extent_0], alpha_j in [1, extent_j]
                long long rem = idx;
                std::vector<int> alpha(d);
                for (int j = 0; j < d; ++j) {
                    alpha[j] = static_cast<int>(rem % extent[j]) + 1;
                    rem /= extent[j];
                }
                long long m = alpha[0];
                for (int j = 1; j < d; ++j) u[j] = alpha[j] * delta;
                for (int j = 0; j < d; ++j) rho[j] = delta;

                double target_re = nu * delta;
                double target_im = prof.tau + m * delta;
                // unknowns: rho[rv] and u[0]
                double r1 = nu * delta / avec[rv];
                double u1 = prof.b[0] != 0 ? m * delta / prof.b[0] : 0.0;
                for (int j = 1; j < d; ++j) u1 -= prof.b[j] * u[j] / prof.b[0];
                auto assemble = [&](double r, double uu) {
                    u[0] = uu;
                    rho[rv] = r;
                    Eigen::VectorXd th = ell_inv * u;
                    for (int j = 0; j < d; ++j) {
                        theta[j] = th[j];
                        z[j] = (1.0 - rho[j]) * Cplx(std::cos(theta[j]), std::sin(theta[j])) *
                               w[j];
                    }
                };
                double res = std::numeric_limits<double>::infinity();
                for (int it = 0; it < cfg.max_iter; ++it) {
                    assemble(r1, u1);
                    Cplx val = L.eval(z);
                    double f1 = val.real() - target_re;
                    double f2 = val.imag() - target_im;
                    res = std::hypot(f1, f2);
                    if (res <= cfg.tol) break;
                    // Jacobian
                    Cplx dPhi_dr = L.partial(z, rv) * (-z[rv] / (1.0 - rho[rv]));
                    Cplx dPhi_du(0, 0);
                    for (int j = 0; j < d; ++j)
                        dPhi_du += L.partial(z, j) * Cplx(0, 1) * z[j] * ell_inv(j, 0);
                    double j11 = dPhi_dr.real(), j12 = dPhi_du.real();
                    double j21 = dPhi_dr.imag(), j22 = dPhi_du.imag();
                    double det = j11 * j22 - j12 * j21;
                    if (std::abs(det) < 1e-18) break;
                    double dr = (f1 * j22 - f2 * j12) / det;
                    double du = (j11 * f2 - j21 * f1) / det;
                    // damping: keep rho positive and step bounded
                    double t = 1.0;
                    while (t > 1e-6) {
                        double rn = r1 - t * dr, un = u1 - t * du;
                        if (rn > 0 && rn < 0.5) {
                            assemble(rn, un);
                            Cplx v2 = L.eval(z);
                            double rn2 =
                                std::hypot(v2.real() - target_re, v2.imag() - target_im);
                            if (rn2 < res) {
                                r1 = rn;
                                u1 = un;
                                break;
                            }
                        }
                        t *= 0.5;
                    }
                    if (t <= 1e-6) break;
                }
                assemble(r1, u1);
                Cplx val = L.eval(z);
                res = std::hypot(val.real() - target_re, val.imag() - target_im);
                WitnessEntry e;
                e.alpha = alpha;
                e.rho = rho;
                e.theta = theta;
                e.residual = res;
                entries[static_cast<size_t>(idx)] = std::move(e);
                if (res > 100 * cfg.tol) failures[static_cast<size_t>(idx)] = 1;
            }
        },
        cfg.parallel);

    long long nfail = std::accumulate(failures.begin(), failures.end(), 0ll);
    if (nfail > 0)
        throw std::runtime_error("lower_bound_witness: Newton failed on " +
                                 std::to_string(nfail) + " lattice nodes (nu too small?)");
    out.entries = std::move(entries);

    for (long long m = 1; m <= out.s_count; ++m)
        out.s_points.emplace_back(0.5 + nu * delta, prof.tau + m * delta);

    out.max_residual = 0.0;
    double rho_hi = 0.0, rho_lo = std::numeric_limits<double>::infinity();
    for (auto& e : out.entries) {
        out.max_residual = std::max(out.max_residual, e.residual);
        for (double r : e.rho) {
            rho_hi = std::max(rho_hi, r / delta);
            rho_lo = std::min(rho_lo, r / delta);
        }
    }
    out.rho_ratio = std::max(rho_hi, 1.0 / rho_lo);

    // pairwise separation (sup-norm over coordinates)
    size_t nent = out.entries.size();
    std::vector<double> chunk_sep(256, std::numeric_limits<double>::infinity());
    int sep_chunks = static_cast<int>(std::min<size_t>(nent, 256));
    chunked_for(
        sep_chunks,
        [&](int c) {
            size_t lo = nent * c / sep_chunks, hi = nent * (c + 1) / sep_chunks;
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = lo; i < hi; ++i)
                for (size_t j = i + 1; j < nent; ++j) {
                    double s = 0;
                    for (int t = 0; t < d; ++t)
                        s = std::max(s, std::abs(out.entries[i].theta[t] -
                                                 out.entries[j].theta[t]));
                    best = std::min(best, s);
                }
            chunk_sep[c] = best;
        },
        cfg.parallel);
    out.min_separation = *std::min_element(chunk_sep.begin(), chunk_sep.begin() + sep_chunks);
    out.c1_fitted = out.min_separation / delta;

    // inf_m N_Phi(s_m; Z) zeta(2 Re s_m)
    double zeta_val = zeta_real(1.0 + 2.0 * nu * delta);
    std::vector<double> n_phi(static_cast<size_t>(out.s_count), 0.0);
    for (auto& e : out.entries) {
        double prod = 1.0;
        for (double r : e.rho) prod *= (1.0 - (1.0 - r) * (1.0 - r));
        n_phi[static_cast<size_t>(e.alpha[0] - 1)] += prod;
    }
    double inf_q = std::numeric_limits<double>::infinity();
    for (double v : n_phi) inf_q = std::min(inf_q, v * zeta_val);
    out.lower_bound_quantity = inf_q;

    // machine checks
    if (out.max_residual > 1e-10)
        out.violations.push_back("max residual " + std::to_string(out.max_residual));
    if (static_cast<long long>(out.s_points.size()) !=
        static_cast<long long>(std::floor(std::pow(1.0 / delta, 1.0 - 1.0 / prof.k[0]))))
        out.violations.push_back("wrong |S|");
    if (out.min_separation <= 0) out.violations.push_back("non-positive separation");
    if (out.rho_ratio > 1e4) out.violations.push_back("rho escaped the delta scale");
    return out;
}

// ---------------------------------------------------------------------------
// Truncated matrix probe
// ---------------------------------------------------------------------------

namespace {

/// exp of a zero-constant series via per-term exponentials:
/// exp(sum c_a z^a) = prod_a sum_m (c_a)^m z^{m a} / m!.
TruncatedSeries<Cplx> exp_series(const std::vector<std::pair<Midx, Cplx>>& terms, int nvars,
                                 int cap) {
    auto out = TruncatedSeries<Cplx>::constant(nvars, cap, Cplx(1.0, 0.0));
    for (auto& [alpha, c] : terms) {
        int deg = total_degree(alpha);
        if (deg == 0 || deg > cap) continue;
        TruncatedSeries<Cplx> factor(nvars, cap);
        Cplx pw(1.0, 0.0);
        double fact = 1.0;
        for (int k = 0; k * deg <= cap; ++k) {
            if (k > 0) {
                pw *= c;
                fact *= k;
            }
            Midx m(nvars, 0);
            for (int j = 0; j < nvars; ++j) m[j] = k * alpha[j];
            factor.set(m, pw / fact);
        }
        out = out * factor;
    }
    return out;
}

}  // namespace

ProbeResult truncated_matrix_probe(const DirichletSymbol& sym, const GeneratingSet& gen, int M,
                                   int D, int window_lo, int window_hi) {
    if (sym.c0 != 0) throw std::invalid_argument("probe: characteristic must be 0");
    const int d = static_cast<int>(gen.generators.size());
    if (d > 3) throw std::invalid_argument("probe: supports dimension <= 3");
    if (M > 512) throw std::invalid_argument("probe: basis cap <= 512");

    // per-generator column factors g_j = q_j^{-c1} exp(-log q_j * S(z)),
    // S(z) = sum_n c_n z^{alpha(n)}
    Cplx c1 = sym.c1.to_complex();
    std::vector<std::pair<Midx, Cplx>> sterms;
    for (auto& [n, c] : sym.terms) {
        auto it = gen.exponent_map.find(n);
        if (it == gen.exponent_map.end())
            throw std::invalid_argument("probe: generating set does not cover " +
                                        std::to_string(n));
        sterms.emplace_back(it->second, c.to_complex());
    }
    // column k is the lift of k^{-phi}: k^{-c1} exp(-log k * S(z)), for k <= M
    // with prime support inside the generating set
    std::vector<std::int64_t> col_keys;
    {
        std::vector<std::int64_t> frontier{1};
        std::set<std::int64_t> seen{1};
        for (size_t i = 0; i < frontier.size(); ++i) {
            col_keys.push_back(frontier[i]);
            for (int j = 0; j < d; ++j) {
                std::int64_t nk = frontier[i] * gen.generators[j];
                if (nk > M || seen.count(nk)) continue;
                seen.insert(nk);
                frontier.push_back(nk);
            }
        }
        std::sort(col_keys.begin(), col_keys.end());
    }
    std::vector<TruncatedSeries<Cplx>> col_series(
        col_keys.size(), TruncatedSeries<Cplx>(d, D));
    chunked_for(static_cast<int>(col_keys.size()), [&](int ci) {
        std::int64_t k = col_keys[ci];
        if (k == 1) {
            col_series[ci] = TruncatedSeries<Cplx>::constant(d, D, Cplx(1.0, 0.0));
            return;
        }
        double lk = std::log(static_cast<double>(k));
        std::vector<std::pair<Midx, Cplx>> scaled;
        for (auto& [a, c] : sterms) scaled.emplace_back(a, -lk * c);
        auto e = exp_series(scaled, d, D);
        e.scale(std::exp(-c1 * lk));
        col_series[ci] = std::move(e);
    });

    // rows: all multi-indices of total degree <= D, graded lexicographic
    std::vector<Midx> rows;
    {
        Midx m(d, 0);
        std::function<void(int, int)> rec = [&](int j, int remaining) {
            if (j == d) {
                rows.push_back(m);
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                m[j] = e;
                rec(j + 1, remaining - e);
            }
            m[j] = 0;
        };
        rec(0, D);
        std::sort(rows.begin(), rows.end(), [](const Midx& a, const Midx& b) {
            int da = total_degree(a), db = total_degree(b);
            if (da != db) return da < db;
            return a < b;
        });
    }

    Eigen::MatrixXcd A(rows.size(), col_keys.size());
    std::vector<double> mass(col_keys.size(), 1.0);
    chunked_for(static_cast<int>(col_keys.size()), [&](int ci) {
        const auto& series = col_series[ci];
        double captured = 0.0;
        for (size_t r = 0; r < rows.size(); ++r) {
            Cplx v = series.coeff(rows[r]);
            A(r, ci) = v;
            captured += std::norm(v);
        }
        // true column mass: k^{-2 Re c1} (2pi)^{-d} int exp(-2 log k Re S)
        std::int64_t k = col_keys[ci];
        if (k == 1) return;
        double lk = std::log(static_cast<double>(k));
        int g = d <= 2 ? 256 : 48;
        long long tot = 1;
        for (int j = 0; j < d; ++j) tot *= g;
        double integral = 0.0;
        std::vector<double> theta(d);
        for (long long i = 0; i < tot; ++i) {
            long long rem = i;
            for (int j = 0; j < d; ++j) {
                theta[j] = -M_PI + 2.0 * M_PI * (rem % g) / g;
                rem /= g;
            }
            double re_s = 0.0;
            for (auto& [a, cc] : sterms) {
                double phase = 0;
                for (int j = 0; j < d; ++j) phase += a[j] * theta[j];
                re_s += cc.real() * std::cos(phase) - cc.imag() * std::sin(phase);
            }
            integral += std::exp(-2.0 * lk * re_s);
        }
        integral /= tot;
        double true_mass = std::pow(static_cast<double>(k), -2.0 * c1.real()) * integral;
        if (true_mass > 0) mass[ci] = captured / true_mass;
    });
    double min_mass = *std::min_element(mass.begin(), mass.end());

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    ProbeResult out;
    out.ncols = static_cast<int>(col_keys.size());
    out.min_column_mass = min_mass;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        out.singular_values.push_back(svd.singularValues()[i]);

    out.window_lo = window_lo;
    out.window_hi = std::min<int>(window_hi, out.ncols - 1);
    std::vector<double> xs, ys;
    for (int n = out.window_lo; n <= out.window_hi; ++n) {
        double s = out.singular_values[n - 1];
        if (s <= 0) continue;
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(s));
    }
    if (xs.size() >= 3) {
        size_t m = xs.size();
        double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
        double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
        double sxx = 0, sxy = 0, syy = 0;
        for (size_t i = 0; i < m; ++i) {
            sxx += (xs[i] - xbar) * (xs[i] - xbar);
            sxy += (xs[i] - xbar) * (ys[i] - ybar);
            syy += (ys[i] - ybar) * (ys[i] - ybar);
        }
        out.fit_slope = sxy / sxx;
        out.decay_exponent = -out.fit_slope;
        double ss_res = 0;
        for (size_t i = 0; i < m; ++i) {
            double pred = ybar + out.fit_slope * (xs[i] - xbar);
            ss_res += (ys[i] - pred) * (ys[i] - pred);
        }
        out.fit_r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Zeta
// ---------------------------------------------------------------------------

double zeta_real(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("zeta_real: s > 1 required");
    // Euler-Maclaurin with N = 24 and Bernoulli corrections through B_16
    static const double B[] = {1.0 / 6,  -1.0 / 30,   1.0 / 42,      -1.0 / 30,
                               5.0 / 66, -691.0 / 2730, 7.0 / 6,     -3617.0 / 510};
    const int N = 24;
    double acc = 0.0;
    for (int n = 1; n < N; ++n) acc += std::pow(n, -s);
    acc += std::pow(N, 1.0 - s) / (s - 1.0);
    acc += 0.5 * std::pow(N, -s);
    for (int k = 1; k <= 8; ++k) {
        // B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
        double poch = 1.0;
        for (int i = 0; i < 2 * k - 1; ++i) poch *= (s + i);
        double f = 1.0;
        for (int i = 2; i <= 2 * k; ++i) f *= i;
        acc += B[k - 1] / f * poch * std::pow(N, -s - 2 * k + 1.0);
    }
    return acc;
}

}  // namespace dsym
