#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsym/bohr.hpp"
#include "dsym/genset.hpp"

namespace dsym {

enum class RuleTag {
    RestrictedRange,
    Thm1,
    Dim1,
    Thm2,
    Thm4DegLe2,
    Thm4JGe2,
    OutsideTheory,
};

const char* rule_name(RuleTag tag);

/// Box-measure exponent assignment for one boundary point, with the case tag
/// of the local-geometry table that produced it.
struct KappaAssignment {
    int point = -1;  // index into the boundary scan, -1 = not applicable
    std::string propmain_case;
    double kappa = 0.0;
};

struct CompactnessVerdict {
    Verdict verdict = Verdict::UndeterminedByTheory;
    RuleTag rule = RuleTag::OutsideTheory;
    std::vector<KappaAssignment> kappa_w;  // one entry per point where a case applies
};

/// True when every term's multi-index touches at most one variable
/// (sum-of-one-variable-polynomials form).
bool is_separated(const BohrLift& lift);

/// Case table for the local box-measure exponent at a boundary point:
///   case1: J >= 1, Im-form independent of the positive directions -> 1 + J/2
///   case2: J >= 2, dependent -> (1 + J)/2
///   case3: J = 1, dependent, degree 2 -> 9/8
///   case4: J = 0, degree 2 -> (d + 3)/4
std::optional<KappaAssignment> propmain_kappa(const BoundaryPoint& bp, int degree, int dim,
                                              double dep_tol = 1e-7);

/// Decision tree over the structural profile, the lift, and the boundary scan.
CompactnessVerdict classify_compactness(const SymbolProfile& profile, const BohrLift& lift,
                                        const BoundaryScan& scan);

}  // namespace dsym
