#include "dsym/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace dsym {

namespace {

using nlohmann::json;

void require_finite(const json& j, const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw std::runtime_error("non-finite numeric field at " + path);
    if (j.is_object())
        for (auto& [k, v] : j.items()) require_finite(v, path + "." + k);
    if (j.is_array()) {
        int i = 0;
        for (auto& v : j) require_finite(v, path + "[" + std::to_string(i++) + "]");
    }
}

json genset_json(const GeneratingSet& gs) {
    json j;
    j["generators"] = gs.generators;
    json em = json::object();
    for (auto& [n, alpha] : gs.exponent_map) em[std::to_string(n)] = alpha;
    j["exponents"] = em;
    return j;
}

json point_json(const BoundaryPoint& bp) {
    json j;
    j["theta"] = bp.theta;
    j["tau"] = bp.tau;
    json H = json::array();
    for (int r = 0; r < bp.hessian.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < bp.hessian.cols(); ++c) row.push_back(bp.hessian(r, c));
        H.push_back(row);
    }
    j["hessian"] = H;
    json ev = json::array();
    for (int i = 0; i < bp.eigvals.size(); ++i) ev.push_back(bp.eigvals[i]);
    j["eigenvalues"] = ev;
    j["index_j"] = bp.index_j;
    json a = json::array(), b = json::array();
    for (auto& v : bp.local.a) a.push_back(v);
    for (auto& v : bp.local.b) b.push_back({v.real(), v.imag()});
    j["local"]["a"] = a;
    j["local"]["b"] = b;
    json c = json::array();
    for (size_t r = 0; r < bp.local.c.size(); ++r)
        for (size_t s = r + 1; s < bp.local.c.size(); ++s)
            c.push_back({{"j", r + 1},
                         {"k", s + 1},
                         {"c", {bp.local.c[r][s].real(), bp.local.c[r][s].imag()}}});
    j["local"]["cross"] = c;
    auto jc = julia_caratheodory_check(bp.local);
    j["julia_caratheodory"] = jc.pass ? "pass" : "fail";
    return j;
}

}  // namespace

std::string report_to_json(const AnalysisReport& rep) {
    json j;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["seed"] = rep.seed;
    j["symbol"] = {
        {"text", rep.symbol_text},
        {"normalized", print_symbol(rep.symbol)},
        {"json", json::parse(symbol_to_json(rep.symbol))},
    };
    json prof;
    prof["c0"] = rep.profile.c0;
    prof["dimension"] = rep.profile.dimension;
    prof["degree"] = rep.profile.degree;
    prof["range"] =
        rep.profile.range_kind == RangeKind::Unrestricted ? "unrestricted" : "restricted";
    prof["class_member"] = rep.profile.class_member;
    prof["min_re"] = rep.profile.min_re;
    json sets = json::array();
    for (auto& gs : rep.profile.all_minimal_sets) sets.push_back(gs.generators);
    prof["generating_sets"] = sets;
    if (!rep.profile.optimal_set.generators.empty())
        prof["optimal_set"] = genset_json(rep.profile.optimal_set);
    j["profile"] = prof;

    json pts = json::array();
    for (auto& bp : rep.scan.points) pts.push_back(point_json(bp));
    j["boundary_points"] = pts;
    j["global_min_re"] = rep.scan.global_min;

    json v;
    switch (rep.verdict.verdict) {
        case Verdict::Compact: v["verdict"] = "Compact"; break;
        case Verdict::NonCompact: v["verdict"] = "NonCompact"; break;
        case Verdict::UndeterminedByTheory: v["verdict"] = "UndeterminedByTheory"; break;
    }
    v["rule"] = rule_name(rep.verdict.rule);
    json kw = json::array();
    for (auto& ka : rep.verdict.kappa_w)
        kw.push_back({{"point", ka.point}, {"case", ka.propmain_case}, {"kappa", ka.kappa}});
    v["kappa_w"] = kw;
    j["verdict"] = v;

    if (rep.carleson) {
        json c;
        c["kappa_hat"] = rep.carleson->kappa_hat;
        c["stderr"] = rep.carleson->stderr_slope;
        c["r2"] = rep.carleson->r2;
        c["eps"] = rep.carleson->eps_grid;
        c["sup_tau_measure"] = rep.carleson->sup_tau_values;
        c["tau_star"] = rep.carleson->tau_stars;
        c["ci95"] = rep.carleson->ci95;
        c["evidence"] = evidence_name(rep.carleson->verdict);
        j["carleson"] = c;
    }
    if (rep.regularity) {
        json r;
        r["eta"] = rep.regularity->eta;
        json per = json::array();
        for (auto& [idx, eta] : rep.regularity->per_point)
            per.push_back({{"point", idx}, {"eta", eta}});
        r["per_point"] = per;
        j["regularity"] = r;
    }
    require_finite(j, "$");
    return j.dump(2) + "\n";
}

void report_roundtrip_check(const std::string& json_text) {
    json j = json::parse(json_text);
    require_finite(j, "$");
    std::string again = j.dump(2) + "\n";
    if (json::parse(again) != j) throw std::runtime_error("report does not round-trip");
}

std::string fit_to_csv(const ExponentFit& fit) {
    std::ostringstream out;
    out.precision(17);
    out << "eps,tau_star,measure,ci95\n";
    for (size_t i = 0; i < fit.eps_grid.size(); ++i)
        out << fit.eps_grid[i] << "," << fit.tau_stars[i] << "," << fit.sup_tau_values[i] << ","
            << fit.ci95[i] << "\n";
    out << "# kappa_hat=" << fit.kappa_hat << " stderr=" << fit.stderr_slope
        << " r2=" << fit.r2 << " evidence=" << evidence_name(fit.verdict) << "\n";
    return out.str();
}

std::string witness_to_csv(const LatticeWitness& w) {
    std::ostringstream out;
    out.precision(17);
    size_t d = w.entries.empty() ? 0 : w.entries.front().rho.size();
    out << "m";
    for (size_t j = 2; j <= d; ++j) out << ",alpha" << j;
    for (size_t j = 1; j <= d; ++j) out << ",rho" << j;
    for (size_t j = 1; j <= d; ++j) out << ",theta" << j;
    out << ",residual\n";
    for (auto& e : w.entries) {
        out << e.alpha[0];
        for (size_t j = 1; j < d; ++j) out << "," << e.alpha[j];
        for (size_t j = 0; j < d; ++j) out << "," << e.rho[j];
        for (size_t j = 0; j < d; ++j) out << "," << e.theta[j];
        out << "," << e.residual << "\n";
    }
    return out.str();
}

}  // namespace dsym
