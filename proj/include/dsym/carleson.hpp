#pragma once

#include <cstdint>
#include <vector>

#include "dsym/bohr.hpp"

namespace dsym {

/// Carleson box [0,eps] x [tau - eps/2, tau + eps/2] in the closed right half-plane.
struct CarlesonBox {
    double tau = 0.0;
    double eps = 0.0;

    bool contains(const Cplx& s) const {
        return s.real() >= 0.0 && s.real() <= eps && std::abs(s.imag() - tau) <= eps / 2.0;
    }
};

enum class SamplerKind { Lattice, PseudoRandom };

struct SampleConfig {
    SamplerKind kind = SamplerKind::Lattice;
    std::uint64_t seed = 1;
    int chunks = 64;
    double stratify_share = 0.5;           // fraction of points near boundary points
    double stratify_radius_factor = 10.0;  // ball radius = factor * sqrt(eps)
    std::vector<std::vector<double>> centers;  // boundary angles; empty = plain sampling
    bool parallel = true;
};

struct MeasureEstimate {
    double value = 0.0;
    double ci95 = 0.0;
    long long hits = 0;     // raw in-box events over all strata
    long long samples = 0;  // points actually evaluated
};

/// Pushforward measure of the box under Phi on the torus, by stratified
/// (quasi-)Monte Carlo. Bitwise reproducible for fixed (seed, chunks).
MeasureEstimate box_measure(const BohrLift& lift, const CarlesonBox& box, const SampleConfig& cfg,
                            long long n);

/// Plain single-loop serial reference for the same estimator (no chunk
/// machinery); must agree bitwise with box_measure at chunks = 1.
MeasureEstimate box_measure_reference(const BohrLift& lift, const CarlesonBox& box,
                                      const SampleConfig& cfg, long long n);

struct SupTauResult {
    double tau_star = 0.0;
    MeasureEstimate estimate;
    std::vector<double> tau_grid_values;  // per tau cell, for diagnostics
};

/// Maximizes the box measure over a tau grid of spacing <= eps/2 covering
/// [-M, M], M = |Im constant| + l1(coefficients). One sampling pass feeds
/// every tau cell. Throws if an explicit spacing exceeds eps/2.
SupTauResult sup_tau_measure(const BohrLift& lift, double eps, const SampleConfig& cfg,
                             long long n, double spacing = 0.0);

enum class CarlesonEvidence { CompactEvidence, NonCompactEvidence, Inconclusive, RestrictedRange };

const char* evidence_name(CarlesonEvidence e);

struct ExponentFit {
    double kappa_hat = 0.0;
    double stderr_slope = 0.0;
    double r2 = 0.0;
    std::vector<double> eps_grid;
    std::vector<double> sup_tau_values;
    std::vector<double> tau_stars;
    std::vector<double> ci95;
    CarlesonEvidence verdict = CarlesonEvidence::Inconclusive;
};

/// Least-squares slope of log sup_tau measure against log eps over a
/// geometric eps grid. Needs >= 5 eps values.
ExponentFit kappa_fit(const BohrLift& lift, double eps_max, double eps_min, long long n_per_eps,
                      const SampleConfig& cfg, int n_eps = 5);

}  // namespace dsym
