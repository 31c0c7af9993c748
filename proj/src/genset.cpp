#include "dsym/genset.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "dsym/bohr.hpp"
#include "dsym/primes.hpp"
#include "dsym/rational.hpp"

namespace dsym {

int GeneratingSet::degree() const {
    int deg = 0;
    for (auto& [n, alpha] : exponent_map) {
        int s = 0;
        for (int e : alpha) s += e;
        deg = std::max(deg, s);
    }
    return deg;
}

namespace {

using Vec = std::vector<int>;

int rank_over_q(std::vector<std::vector<BigInt>> m) {
    // fraction-free elimination
    size_t rows = m.size();
    if (rows == 0) return 0;
    size_t cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        for (size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            BigInt f1 = m[r][c], f2 = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] = m[i][j] * f1 - m[r][j] * f2;
        }
        ++r;
    }
    return static_cast<int>(r);
}

/// Unique rational solution of V^T alpha = target (V columns Q-independent),
/// accepted only if every entry is a nonnegative integer.
bool representation(const std::vector<Vec>& gens, const Vec& target, Vec& alpha_out) {
    size_t d = gens.size(), np = target.size();
    // augmented system rows: one per prime
    std::vector<std::vector<Rational>> m(np, std::vector<Rational>(d + 1));
    for (size_t p = 0; p < np; ++p) {
        for (size_t j = 0; j < d; ++j) m[p][j] = gens[j][p];
        m[p][d] = target[p];
    }
    size_t r = 0;
    std::vector<int> pivot_col(np, -1);
    for (size_t c = 0; c < d && r < np; ++c) {
        size_t piv = r;
        while (piv < np && m[piv][c] == 0) ++piv;
        if (piv == np) continue;
        std::swap(m[r], m[piv]);
        Rational inv = m[r][c];
        for (size_t j = c; j <= d; ++j) m[r][j] /= inv;
        for (size_t i = 0; i < np; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (size_t j = c; j <= d; ++j) m[i][j] -= f * m[r][j];
        }
        pivot_col[r] = static_cast<int>(c);
        ++r;
    }
    if (r < d) return false;  // dependent generators (caller prevents this)
    for (size_t i = r; i < np; ++i)
        if (m[i][d] != 0) return false;  // inconsistent
    alpha_out.assign(d, 0);
    for (size_t i = 0; i < r; ++i) {
        Rational v = m[i][d];
        if (v < 0 || denominator(v) != 1) return false;
        BigInt num = numerator(v);
        if (num > 1000000) return false;
        alpha_out[pivot_col[i]] = num.convert_to<int>();
    }
    return true;
}

}  // namespace

DimensionResult complex_dimension(const std::vector<std::int64_t>& lambda,
                                  const SearchConfig& cfg) {
    if (lambda.empty()) throw std::invalid_argument("complex_dimension: empty support");
    std::vector<std::int64_t> ns(lambda);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    // prime-exponent matrix
    std::set<std::int64_t> prime_set;
    std::vector<ExponentVector> facts;
    facts.reserve(ns.size());
    for (auto n : ns) {
        facts.push_back(factorize(n));
        for (auto& [p, e] : facts.back().entries) prime_set.insert(p);
    }
    std::vector<std::int64_t> primes(prime_set.begin(), prime_set.end());
    size_t np = primes.size();
    auto to_vec = [&](const ExponentVector& f) {
        Vec v(np, 0);
        for (size_t i = 0; i < np; ++i) {
            auto it = f.entries.find(primes[i]);
            if (it != f.entries.end()) v[i] = it->second;
        }
        return v;
    };
    std::vector<Vec> evecs;
    evecs.reserve(ns.size());
    std::vector<std::vector<BigInt>> emat;
    for (auto& f : facts) {
        evecs.push_back(to_vec(f));
        emat.emplace_back(evecs.back().begin(), evecs.back().end());
    }
    DimensionResult out;
    out.dimension = rank_over_q(emat);
    const int d = out.dimension;

    // candidates: lattice divisors of some n, i.e. 0 != v <= e(n) componentwise
    std::set<Vec> cand_set;
    for (auto& e : evecs) {
        Vec v(np, 0);
        while (true) {
            size_t j = 0;
            while (j < np && v[j] == e[j]) v[j++] = 0;
            if (j == np) break;
            ++v[j];
            cand_set.insert(v);
            if (static_cast<int>(cand_set.size()) > cfg.max_candidates)
                throw SearchBoundExceeded("candidate cap exceeded (" +
                                          std::to_string(cfg.max_candidates) + ")");
        }
    }
    struct Cand {
        std::int64_t value;
        Vec v;
    };
    std::vector<Cand> cands;
    cands.reserve(cand_set.size());
    for (auto& v : cand_set) {
        std::int64_t value = 1;
        for (size_t i = 0; i < np; ++i)
            for (int e = 0; e < v[i]; ++e) value *= primes[i];
        cands.push_back({value, v});
    }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.value < b.value; });

    // DFS over candidate subsets of size d with rank pruning
    long long nodes = 0;
    std::vector<size_t> chosen;
    std::vector<Vec> chosen_vecs;
    auto rank_of = [&](const std::vector<Vec>& vv) {
        std::vector<std::vector<BigInt>> m;
        for (auto& v : vv) m.emplace_back(v.begin(), v.end());
        return rank_over_q(m);
    };
    std::function<void(size_t)> dfs = [&](size_t start) {
        if (++nodes > cfg.max_nodes)
            throw SearchBoundExceeded("subset search cap exceeded (" +
                                      std::to_string(cfg.max_nodes) + ")");
        if (static_cast<int>(chosen.size()) == d) {
            GeneratingSet gs;
            Vec alpha;
            for (size_t i = 0; i < ns.size(); ++i) {
                if (!representation(chosen_vecs, evecs[i], alpha)) return;
                gs.exponent_map[ns[i]] = alpha;
            }
            for (size_t idx : chosen) gs.generators.push_back(cands[idx].value);
            out.sets.push_back(std::move(gs));
            return;
        }
        size_t remaining = d - chosen.size();
        for (size_t i = start; i + remaining <= cands.size(); ++i) {
            chosen_vecs.push_back(cands[i].v);
            if (rank_of(chosen_vecs) == static_cast<int>(chosen_vecs.size())) {
                chosen.push_back(i);
                dfs(i + 1);
                chosen.pop_back();
            }
            chosen_vecs.pop_back();
        }
    };
    dfs(0);
    std::sort(out.sets.begin(), out.sets.end(),
              [](const GeneratingSet& a, const GeneratingSet& b) {
                  return a.generators < b.generators;
              });
    return out;
}

SymbolProfile degree_profile(const DirichletSymbol& sym, const SearchConfig& cfg) {
    SymbolProfile prof;
    prof.c0 = sym.c0;
    if (sym.is_constant()) {
        prof.dimension = 0;
        prof.degree = 0;
        double re_c1 = to_double(sym.c1.re);
        if (re_c1 <= 0.5)
            throw ClassViolation("constant symbol with Re c1 <= 1/2 is not a class member");
        prof.range_kind = RangeKind::Restricted;
        prof.class_member = true;
        prof.min_re = re_c1 - 0.5;
        return prof;
    }
    if (sym.c0 >= 1 && sym.terms.empty()) {
        // phi_0 constant: in the class iff phi_0 == 0 or Re c1 > 0
        prof.dimension = 0;
        prof.degree = 0;
        double re_c1 = to_double(sym.c1.re);
        prof.min_re = re_c1;
        prof.class_member = sym.c1.is_zero() || re_c1 > 0;
        if (!prof.class_member)
            throw ClassViolation("constant shift maps outside the right half-plane");
        prof.range_kind = sym.c1.is_zero() ? RangeKind::Unrestricted : RangeKind::Restricted;
        return prof;
    }
    std::vector<std::int64_t> lambda;
    for (auto& [n, c] : sym.terms) lambda.push_back(n);
    DimensionResult dr = complex_dimension(lambda, cfg);
    prof.dimension = dr.dimension;
    prof.all_minimal_sets = dr.sets;
    if (dr.sets.empty()) throw std::runtime_error("no generating set found within the search region");
    int best = dr.sets.front().degree();
    size_t best_idx = 0;
    for (size_t i = 1; i < dr.sets.size(); ++i) {
        int deg = dr.sets[i].degree();
        if (deg < best) {
            best = deg;
            best_idx = i;
        }
    }
    prof.optimal_set = dr.sets[best_idx];
    prof.degree = best;

    BohrLift L = range_lift(sym, prof.optimal_set);
    prof.min_re = torus_min_re(L);
    double scale = 1.0 + L.coeff_l1();
    prof.class_member = prof.min_re >= -1e-9 * scale;
    prof.range_kind =
        prof.min_re <= 1e-9 * scale ? RangeKind::Unrestricted : RangeKind::Restricted;
    return prof;
}

Verdict theorem1_verdict(const DirichletSymbol& sym, RangeKind range_kind) {
    if (sym.c0 < 1)
        throw std::invalid_argument("theorem1_verdict: requires characteristic >= 1");
    return range_kind == RangeKind::Restricted ? Verdict::Compact : Verdict::NonCompact;
}

}  // namespace dsym
