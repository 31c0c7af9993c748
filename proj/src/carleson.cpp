#include "dsym/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dsym/parallel.hpp"

namespace dsym {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit_double(std::uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

/// One sampling stratum: either the full torus (complement of the balls) or a
/// sup-norm ball around a boundary point.
struct Stratum {
    bool is_ball = false;
    std::vector<double> center;  // ball center (angles)
    double radius = 0.0;
    double volume = 1.0;         // normalized torus volume of the sampling box
    long long n = 0;             // points assigned
    std::vector<std::uint64_t> lattice_gen;
    std::vector<double> shift;
};

struct StratumPlan {
    std::vector<Stratum> strata;  // [0] = complement/“rest”, then one per ball
    int dim = 0;
};

StratumPlan make_plan(const BohrLift& L, const SampleConfig& cfg, double eps, long long n) {
    StratumPlan plan;
    plan.dim = L.dim;
    const int d = L.dim;
    double r = cfg.stratify_radius_factor * std::sqrt(std::max(eps, 0.0));
    bool stratify =
        !cfg.centers.empty() && cfg.stratify_share > 0.0 && r > 0.0 && d > 0;
    size_t nballs = stratify ? cfg.centers.size() : 0;

    Stratum rest;
    rest.is_ball = false;
    rest.volume = 1.0;
    plan.strata.push_back(rest);
    for (size_t b = 0; b < nballs; ++b) {
        Stratum s;
        s.is_ball = true;
        s.center = cfg.centers[b];
        s.radius = std::min(r, M_PI);
        s.volume = 1.0;
        for (int j = 0; j < d; ++j) s.volume *= std::min(2.0 * s.radius, 2.0 * M_PI) / (2.0 * M_PI);
        plan.strata.push_back(s);
    }
    long long n_balls_total = nballs ? static_cast<long long>(cfg.stratify_share * n) : 0;
    long long per_ball = nballs ? std::max<long long>(n_balls_total / nballs, 1) : 0;
    plan.strata[0].n = n - per_ball * static_cast<long long>(nballs);
    for (size_t b = 0; b < nballs; ++b) plan.strata[b + 1].n = per_ball;

    for (size_t s = 0; s < plan.strata.size(); ++s) {
        auto& st = plan.strata[s];
        if (st.n <= 0 || d == 0) continue;
        std::uint64_t h = splitmix64(cfg.seed * 0x100000001b3ull + s);
        st.shift.resize(d);
        for (int j = 0; j < d; ++j) st.shift[j] = unit_double(splitmix64(h + 17 * j + 1));
        if (cfg.kind == SamplerKind::Lattice) {
            std::uint64_t m = static_cast<std::uint64_t>(st.n);
            std::uint64_t a = static_cast<std::uint64_t>(0.6180339887498949 * m) | 1ull;
            while (std::gcd(a, m) != 1) a += 2;
            st.lattice_gen.resize(d);
            std::uint64_t g = 1;
            for (int j = 0; j < d; ++j) {
                st.lattice_gen[j] = g;
                g = (static_cast<unsigned __int128>(g) * a) % m;
            }
        }
    }
    return plan;
}

/// Point i of stratum s in angle coordinates. Deterministic in (cfg, i).
void stratum_point(const StratumPlan& plan, const SampleConfig& cfg, size_t s, long long i,
                   std::mt19937_64* rng, std::vector<double>& theta) {
    const auto& st = plan.strata[s];
    const int d = plan.dim;
    for (int j = 0; j < d; ++j) {
        double u;
        if (cfg.kind == SamplerKind::Lattice) {
            std::uint64_t m = static_cast<std::uint64_t>(st.n);
            std::uint64_t frac = (static_cast<unsigned __int128>(
                                      static_cast<std::uint64_t>(i)) *
                                  st.lattice_gen[j]) %
                                 m;
            u = static_cast<double>(frac) / static_cast<double>(m) + st.shift[j];
            u -= std::floor(u);
        } else {
            u = unit_double((*rng)());
        }
        if (st.is_ball) {
            theta[j] = st.center[j] + st.radius * (2.0 * u - 1.0);
        } else {
            theta[j] = -M_PI + 2.0 * M_PI * u;
        }
    }
}

int ball_multiplicity(const StratumPlan& plan, const std::vector<double>& theta) {
    int m = 0;
    for (size_t s = 1; s < plan.strata.size(); ++s) {
        const auto& st = plan.strata[s];
        bool inside = true;
        for (size_t j = 0; j < theta.size(); ++j) {
            double diff = std::remainder(theta[j] - st.center[j], 2.0 * M_PI);
            if (std::abs(diff) > st.radius) {
                inside = false;
                break;
            }
        }
        if (inside) ++m;
    }
    return m;
}

struct BinAccumulator {
    std::vector<double> weight;  // per tau bin (or single cell)
    long long evals = 0;
    long long hits = 0;
};

/// Core sampling pass: for every stratum, bins Im values of in-box points.
/// `nbins == 1` means a fixed single box (no tau binning).
std::vector<BinAccumulator> run_pass(const BohrLift& L, const SampleConfig& cfg,
                                     const StratumPlan& plan, double re_hi, double im_lo,
                                     double bin_width, int nbins, bool parallel,
                                     bool single_box, const CarlesonBox& box) {
    const size_t ns = plan.strata.size();
    const int chunks = std::max(cfg.chunks, 1);
    std::vector<std::vector<BinAccumulator>> chunk_acc(
        chunks, std::vector<BinAccumulator>(ns));
    for (auto& row : chunk_acc)
        for (auto& acc : row) acc.weight.assign(nbins, 0.0);

    chunked_for(
        chunks,
        [&](int c) {
            std::vector<double> theta(plan.dim);
            auto& row = chunk_acc[c];
            for (size_t s = 0; s < ns; ++s) {
                const auto& st = plan.strata[s];
                if (st.n <= 0) continue;
                long long lo = st.n * c / chunks, hi = st.n * (c + 1) / chunks;
                std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x51ul + s * 1315423911ull)) + c);
                auto& acc = row[s];
                for (long long i = lo; i < hi; ++i) {
                    stratum_point(plan, cfg, s, i, &rng, theta);
                    Cplx val = L.eval_theta(theta);
                    acc.evals++;
                    if (val.real() < 0.0 || val.real() > re_hi) continue;
                    double w;
                    if (st.is_ball) {
                        w = 1.0 / ball_multiplicity(plan, theta);
                    } else {
                        if (ball_multiplicity(plan, theta) > 0) continue;  // covered by balls
                        w = 1.0;
                    }
                    if (single_box) {
                        if (std::abs(val.imag() - box.tau) > box.eps / 2.0) continue;
                        acc.weight[0] += w;
                        acc.hits++;
                    } else {
                        int k = static_cast<int>(std::floor((val.imag() - im_lo) / bin_width));
                        if (k < 0 || k >= nbins) continue;
                        acc.weight[k] += w;
                        acc.hits++;
                    }
                }
            }
        },
        parallel && cfg.parallel);

    std::vector<BinAccumulator> total(ns);
    for (auto& acc : total) acc.weight.assign(nbins, 0.0);
    for (int c = 0; c < chunks; ++c)
        for (size_t s = 0; s < ns; ++s) {
            for (int k = 0; k < nbins; ++k) total[s].weight[k] += chunk_acc[c][s].weight[k];
            total[s].evals += chunk_acc[c][s].evals;
            total[s].hits += chunk_acc[c][s].hits;
        }
    return total;
}

MeasureEstimate combine_single(const StratumPlan& plan,
                               const std::vector<BinAccumulator>& acc) {
    MeasureEstimate est;
    double var = 0.0;
    for (size_t s = 0; s < plan.strata.size(); ++s) {
        const auto& st = plan.strata[s];
        if (st.n <= 0) continue;
        double p = acc[s].weight[0] / static_cast<double>(st.n);
        est.value += st.volume * p;
        double pv = std::min(std::max(p, 0.0), 1.0);
        var += st.volume * st.volume * pv * (1.0 - pv) / static_cast<double>(st.n);
        est.hits += acc[s].hits;
        est.samples += acc[s].evals;
    }
    est.ci95 = 1.96 * std::sqrt(var);
    return est;
}

}  // namespace

MeasureEstimate box_measure(const BohrLift& L, const CarlesonBox& box, const SampleConfig& cfg,
                            long long n) {
    if (box.eps <= 0) throw std::invalid_argument("box_measure: eps must be positive");
    if (n < 1000) throw std::invalid_argument("box_measure: needs at least 1e3 samples");
    if (L.dim == 0) {
        MeasureEstimate est;
        est.value = box.contains(L.constant) ? 1.0 : 0.0;
        est.samples = n;
        est.hits = est.value > 0 ? n : 0;
        return est;
    }
    StratumPlan plan = make_plan(L, cfg, box.eps, n);
    auto acc = run_pass(L, cfg, plan, box.eps, 0, 0, 1, true, true, box);
    return combine_single(plan, acc);
}

MeasureEstimate box_measure_reference(const BohrLift& L, const CarlesonBox& box,
                                      const SampleConfig& cfg, long long n) {
    if (box.eps <= 0) throw std::invalid_argument("box_measure: eps must be positive");
    if (L.dim == 0) return box_measure(L, box, cfg, n);
    StratumPlan plan = make_plan(L, cfg, box.eps, n);
    std::vector<BinAccumulator> acc(plan.strata.size());
    for (auto& a : acc) a.weight.assign(1, 0.0);
    std::vector<double> theta(plan.dim);
    for (size_t s = 0; s < plan.strata.size(); ++s) {
        const auto& st = plan.strata[s];
        if (st.n <= 0) continue;
        std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x51ul + s * 1315423911ull)) + 0);
        for (long long i = 0; i < st.n; ++i) {
            stratum_point(plan, cfg, s, i, &rng, theta);
            Cplx val = L.eval_theta(theta);
            acc[s].evals++;
            if (val.real() < 0.0 || val.real() > box.eps) continue;
            if (std::abs(val.imag() - box.tau) > box.eps / 2.0) continue;
            double w;
            if (st.is_ball) {
                w = 1.0 / ball_multiplicity(plan, theta);
            } else {
                if (ball_multiplicity(plan, theta) > 0) continue;
                w = 1.0;
            }
            acc[s].weight[0] += w;
            acc[s].hits++;
        }
    }
    return combine_single(plan, acc);
}

SupTauResult sup_tau_measure(const BohrLift& L, double eps, const SampleConfig& cfg, long long n,
                             double spacing) {
    if (eps <= 0) throw std::invalid_argument("sup_tau_measure: eps must be positive");
    if (spacing == 0.0) spacing = eps / 2.0;
    if (spacing > eps / 2.0 + 1e-15)
        throw std::invalid_argument("sup_tau_measure: tau grid spacing exceeds eps/2");
    double M = L.im_bound() + eps;
    int nbins = std::max(2, static_cast<int>(std::ceil(2.0 * M / spacing)) + 2);
    double im_lo = -M;

    SupTauResult out;
    if (L.dim == 0) {
        out.tau_star = L.constant.imag();
        CarlesonBox box{out.tau_star, eps};
        out.estimate = box_measure(L, box, cfg, n);
        return out;
    }
    StratumPlan plan = make_plan(L, cfg, eps, n);
    auto acc = run_pass(L, cfg, plan, eps, im_lo, spacing, nbins, true, false, CarlesonBox{});

    out.tau_grid_values.assign(nbins - 1, 0.0);
    long long total_hits = 0, total_evals = 0;
    for (size_t s = 0; s < plan.strata.size(); ++s) {
        const auto& st = plan.strata[s];
        if (st.n <= 0) continue;
        total_hits += acc[s].hits;
        total_evals += acc[s].evals;
        for (int k = 0; k + 1 < nbins; ++k)
            out.tau_grid_values[k] +=
                st.volume * (acc[s].weight[k] + acc[s].weight[k + 1]) / static_cast<double>(st.n);
    }
    int best = 0;
    for (int k = 1; k + 1 < nbins; ++k)
        if (out.tau_grid_values[k] > out.tau_grid_values[best]) best = k;
    out.tau_star = im_lo + (best + 1) * spacing;
    out.estimate.value = out.tau_grid_values[best];
    out.estimate.hits = total_hits;
    out.estimate.samples = total_evals;
    // normal-approximation interval at the maximizing window
    double var = 0.0;
    for (size_t s = 0; s < plan.strata.size(); ++s) {
        const auto& st = plan.strata[s];
        if (st.n <= 0) continue;
        double p = (acc[s].weight[best] + acc[s].weight[best + 1]) / static_cast<double>(st.n);
        double pv = std::min(std::max(p, 0.0), 1.0);
        var += st.volume * st.volume * pv * (1.0 - pv) / static_cast<double>(st.n);
    }
    out.estimate.ci95 = 1.96 * std::sqrt(var);
    return out;
}

const char* evidence_name(CarlesonEvidence e) {
    switch (e) {
        case CarlesonEvidence::CompactEvidence: return "CompactEvidence";
        case CarlesonEvidence::NonCompactEvidence: return "NonCompactEvidence";
        case CarlesonEvidence::Inconclusive: return "Inconclusive";
        case CarlesonEvidence::RestrictedRange: return "RestrictedRangeEvidence";
    }
    return "?";
}

ExponentFit kappa_fit(const BohrLift& L, double eps_max, double eps_min, long long n_per_eps,
                      const SampleConfig& cfg, int n_eps) {
    if (n_eps < 5) throw std::invalid_argument("kappa_fit: needs at least 5 eps values");
    if (!(eps_max > eps_min && eps_min > 0))
        throw std::invalid_argument("kappa_fit: bad eps range");
    ExponentFit fit;
    double ratio = std::pow(eps_min / eps_max, 1.0 / (n_eps - 1));
    for (int i = 0; i < n_eps; ++i) {
        double eps = eps_max * std::pow(ratio, i);
        auto sup = sup_tau_measure(L, eps, cfg, n_per_eps);
        fit.eps_grid.push_back(eps);
        fit.sup_tau_values.push_back(sup.estimate.value);
        fit.tau_stars.push_back(sup.tau_star);
        fit.ci95.push_back(sup.estimate.ci95);
    }
    std::vector<double> xs, ys, sigmas;
    for (int i = 0; i < n_eps; ++i) {
        if (fit.sup_tau_values[i] <= 0) continue;
        xs.push_back(std::log(fit.eps_grid[i]));
        ys.push_back(std::log(fit.sup_tau_values[i]));
        sigmas.push_back(fit.ci95[i] / (1.96 * fit.sup_tau_values[i]));
    }
    if (xs.empty()) {
        fit.verdict = CarlesonEvidence::RestrictedRange;
        return fit;
    }
    if (xs.size() < 3) {
        fit.verdict = CarlesonEvidence::Inconclusive;
        return fit;
    }
    size_t m = xs.size();
    double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    fit.kappa_hat = sxy / sxx;
    double ss_res = 0;
    for (size_t i = 0; i < m; ++i) {
        double pred = ybar + fit.kappa_hat * (xs[i] - xbar);
        ss_res += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    double se_resid = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
    double se_meas = 0;
    for (size_t i = 0; i < m; ++i) {
        double w = (xs[i] - xbar) / sxx;
        se_meas += w * w * sigmas[i] * sigmas[i];
    }
    se_meas = std::sqrt(se_meas);
    fit.stderr_slope = std::max(se_resid, se_meas);

    if (fit.kappa_hat - 2 * fit.stderr_slope > 1.0)
        fit.verdict = CarlesonEvidence::CompactEvidence;
    else if (std::abs(fit.kappa_hat - 1.0) <= 2 * fit.stderr_slope)
        fit.verdict = CarlesonEvidence::NonCompactEvidence;
    else
        fit.verdict = CarlesonEvidence::Inconclusive;
    return fit;
}

}  // namespace dsym
