#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "dsym/symbol.hpp"

namespace dsym {

enum class RangeKind { Restricted, Unrestricted };

/// Q-independent generators q_1 < ... < q_d together with the multi-index
/// alpha(n) of every n in the support, n = prod q_j^{alpha_j(n)} exactly.
struct GeneratingSet {
    std::vector<std::int64_t> generators;
    std::map<std::int64_t, std::vector<int>> exponent_map;

    int degree() const;  // max |alpha(n)| over the support
    bool operator==(const GeneratingSet&) const = default;
};

struct DimensionResult {
    int dimension = 0;
    std::vector<GeneratingSet> sets;  // every minimal generating set, sorted
};

struct SearchConfig {
    int max_candidates = 4096;
    long long max_nodes = 20'000'000;
};

/// The candidate/subset search region was exhausted before completing; signals
/// oversized input, not mathematical failure.
struct SearchBoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rank over Q of the prime-exponent vectors of lambda, plus every minimal
/// Q-independent generating set whose exponent vectors are componentwise
/// bounded by some element of lambda. Deterministic enumeration order.
DimensionResult complex_dimension(const std::vector<std::int64_t>& lambda,
                                  const SearchConfig& cfg = {});

struct SymbolProfile {
    std::int64_t c0 = 0;
    int dimension = 0;
    std::vector<GeneratingSet> all_minimal_sets;
    GeneratingSet optimal_set;  // min degree, ties by smallest generator list
    int degree = 0;
    RangeKind range_kind = RangeKind::Restricted;
    bool class_member = false;
    double min_re = 0.0;  // global min of Re over the torus (range diagnostic)
};

/// Structural profile plus range/class analysis through the Bohr lift.
SymbolProfile degree_profile(const DirichletSymbol& sym, const SearchConfig& cfg = {});

enum class Verdict { Compact, NonCompact, UndeterminedByTheory };

/// Characteristic >= 1 rule: compact iff restricted range.
Verdict theorem1_verdict(const DirichletSymbol& sym, RangeKind range_kind);

}  // namespace dsym
