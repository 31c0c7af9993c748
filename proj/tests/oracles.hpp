// Test-side oracles, independent of the implementation paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dsym/bohr.hpp"

namespace oracles {

using dsym::BohrLift;
using dsym::Cplx;

/// Central finite-difference gradient of Re phi (step h).
inline Eigen::VectorXd fd_gradient(const BohrLift& L, const std::vector<double>& theta,
                                   double h = 1e-5) {
    Eigen::VectorXd g(L.dim);
    for (int j = 0; j < L.dim; ++j) {
        auto tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        g[j] = (L.re_theta(tp) - L.re_theta(tm)) / (2 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const BohrLift& L, const std::vector<double>& theta,
                                  double h = 1e-5) {
    Eigen::MatrixXd H(L.dim, L.dim);
    for (int j = 0; j < L.dim; ++j)
        for (int k = 0; k < L.dim; ++k) {
            auto tpp = theta, tpm = theta, tmp = theta, tmm = theta;
            tpp[j] += h;
            tpp[k] += h;
            tpm[j] += h;
            tpm[k] -= h;
            tmp[j] -= h;
            tmp[k] += h;
            tmm[j] -= h;
            tmm[k] -= h;
            H(j, k) = (L.re_theta(tpp) - L.re_theta(tpm) - L.re_theta(tmp) + L.re_theta(tmm)) /
                      (4 * h * h);
        }
    return H;
}

/// Dense-grid minimum of Re phi over the torus (d = 1 or 2 only).
inline double grid_min_re(const BohrLift& L, int g) {
    double best = std::numeric_limits<double>::infinity();
    if (L.dim == 1) {
        for (int i = 0; i < g; ++i)
            best = std::min(best, L.re_theta({-M_PI + 2 * M_PI * i / g}));
        return best;
    }
    std::vector<double> theta(2);
    for (int i = 0; i < g; ++i) {
        theta[0] = -M_PI + 2 * M_PI * i / g;
        for (int j = 0; j < g; ++j) {
            theta[1] = -M_PI + 2 * M_PI * j / g;
            best = std::min(best, L.re_theta(theta));
        }
    }
    return best;
}

/// Riemann-sum box measure on a g x g grid (d = 2).
inline double grid_box_measure(const BohrLift& L, double tau, double eps, int g) {
    long long hits = 0;
    std::vector<double> theta(2);
    for (int i = 0; i < g; ++i) {
        theta[0] = -M_PI + 2 * M_PI * i / g;
        for (int j = 0; j < g; ++j) {
            theta[1] = -M_PI + 2 * M_PI * j / g;
            Cplx v = L.eval_theta(theta);
            if (v.real() >= 0 && v.real() <= eps && std::abs(v.imag() - tau) <= eps / 2) ++hits;
        }
    }
    return static_cast<double>(hits) / (static_cast<double>(g) * g);
}

/// sup over a tau grid of the grid box measure.
inline double grid_sup_tau_measure(const BohrLift& L, double eps, int g) {
    double M = L.im_bound();
    double best = 0;
    for (double tau = -M; tau <= M; tau += eps / 2)
        best = std::max(best, grid_box_measure(L, tau, eps, g));
    return best;
}

/// -w_j dPhi/dz_j(w): symbolic-differentiation route to the linear local
/// coefficients, independent of the binomial transform.
inline Cplx linear_coefficient_by_differentiation(const BohrLift& L,
                                                  const std::vector<double>& theta_w, int j) {
    std::vector<Cplx> w(L.dim);
    for (int i = 0; i < L.dim; ++i) w[i] = Cplx(std::cos(theta_w[i]), std::sin(theta_w[i]));
    return -w[j] * L.partial(w, j);
}

}  // namespace oracles
