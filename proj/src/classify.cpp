#include "dsym/classify.hpp"

#include <cmath>

namespace dsym {

const char* rule_name(RuleTag tag) {
    switch (tag) {
        case RuleTag::RestrictedRange: return "RestrictedRange";
        case RuleTag::Thm1: return "Thm1";
        case RuleTag::Dim1: return "dim1";
        case RuleTag::Thm2: return "Thm2";
        case RuleTag::Thm4DegLe2: return "Thm4-deg<=2";
        case RuleTag::Thm4JGe2: return "Thm4-J>=2";
        case RuleTag::OutsideTheory: return "OutsideTheory";
    }
    return "?";
}

bool is_separated(const BohrLift& lift) {
    for (auto& t : lift.terms) {
        int support = 0;
        for (int e : t.alpha)
            if (e > 0) ++support;
        if (support > 1) return false;
    }
    return true;
}

std::optional<KappaAssignment> propmain_kappa(const BoundaryPoint& bp, int degree, int dim,
                                              double dep_tol) {
    const int J = bp.index_j;
    // dependence: the Im linear form lies in the span of the positive
    // eigendirections, i.e. the a-vector has no Hessian-kernel component.
    double hnorm = bp.hessian.norm();
    double rank_tol = 1e-6 * (1.0 + hnorm);
    Eigen::VectorXd a(dim);
    for (int j = 0; j < dim; ++j) a[j] = bp.local.a[j];
    double kernel_mass = 0.0;
    for (int i = 0; i < bp.eigvals.size(); ++i) {
        if (bp.eigvals[i] > rank_tol) continue;
        kernel_mass += std::pow(bp.eigvecs.col(i).dot(a), 2);
    }
    bool dependent = std::sqrt(kernel_mass) <= dep_tol * (1.0 + a.norm());

    KappaAssignment out;
    if (J >= 1 && !dependent) {
        out.propmain_case = "PROPMAIN-case1";
        out.kappa = 1.0 + J / 2.0;
        return out;
    }
    if (J >= 2 && dependent) {
        out.propmain_case = "PROPMAIN-case2";
        out.kappa = (1.0 + J) / 2.0;
        return out;
    }
    if (J == 1 && dependent && degree == 2) {
        out.propmain_case = "PROPMAIN-case3";
        out.kappa = 9.0 / 8.0;
        return out;
    }
    if (J == 0 && degree == 2) {
        out.propmain_case = "PROPMAIN-case4";
        out.kappa = (dim + 3) / 4.0;
        return out;
    }
    return std::nullopt;
}

CompactnessVerdict classify_compactness(const SymbolProfile& profile, const BohrLift& lift,
                                        const BoundaryScan& scan) {
    for (size_t i = 0; i < scan.points.size(); ++i) {
        const auto& bp = scan.points[i];
        double scale = 1.0 + lift.coeff_l1();
        if (std::abs(lift.re_theta(bp.theta)) > 1e-6 * scale)
            throw std::invalid_argument("boundary point does not belong to this lift");
    }

    CompactnessVerdict out;
    const int d = profile.dimension;
    const int deg = profile.degree;
    for (size_t i = 0; i < scan.points.size(); ++i) {
        auto ka = propmain_kappa(scan.points[i], deg, d);
        if (ka) {
            ka->point = static_cast<int>(i);
            out.kappa_w.push_back(*ka);
        }
    }

    if (profile.range_kind == RangeKind::Restricted) {
        out.verdict = Verdict::Compact;
        out.rule = RuleTag::RestrictedRange;
        return out;
    }
    if (profile.c0 >= 1) {
        out.verdict = Verdict::NonCompact;  // unrestricted at this point
        out.rule = RuleTag::Thm1;
        return out;
    }
    if (d == 1) {
        out.verdict = Verdict::NonCompact;
        out.rule = RuleTag::Dim1;
        return out;
    }
    if (is_separated(lift) && d >= 2) {
        out.verdict = Verdict::Compact;
        out.rule = RuleTag::Thm2;
        return out;
    }
    if (deg <= 2 && d >= 2) {
        out.verdict = Verdict::Compact;
        out.rule = RuleTag::Thm4DegLe2;
        return out;
    }
    bool all_j_ge2 = !scan.points.empty();
    for (auto& bp : scan.points)
        if (bp.index_j <= 1) all_j_ge2 = false;
    if (deg >= 3 && all_j_ge2) {
        out.verdict = Verdict::Compact;
        out.rule = RuleTag::Thm4JGe2;
        return out;
    }
    out.verdict = Verdict::UndeterminedByTheory;
    out.rule = RuleTag::OutsideTheory;
    return out;
}

}  // namespace dsym
