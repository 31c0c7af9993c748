#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dsym/rational.hpp"

namespace dsym {

/// Symbol not in the bounded-composition class; the CLI maps this to exit 2.
struct ClassViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Dirichlet polynomial symbol  c0*s + c1 + sum_{n in Lambda} c_n n^{-s}.
/// Zero coefficients are dropped at construction; keys are >= 2.
struct DirichletSymbol {
    std::int64_t c0 = 0;
    RationalComplex c1;
    std::map<std::int64_t, RationalComplex> terms;

    bool is_constant() const { return c0 == 0 && terms.empty(); }

    void add_term(std::int64_t n, const RationalComplex& c);
    void normalize();  // drop zero coefficients

    bool operator==(const DirichletSymbol&) const = default;
};

/// Grammar: terms "a*n^-s", "a", "c0*s" joined by +/-. Numbers are integers,
/// rationals p/q, or decimals; an "i" suffix marks an imaginary part.
///   "9/2 - 2^-s - 3^-s - 2*6^-s"
///   "s + 2^-s - 2^-s"
/// Duplicate n merge by summation. Throws std::invalid_argument on malformed
/// input, n <= 1 in a non-constant term, or negative characteristic.
DirichletSymbol parse_symbol(const std::string& text);

/// Accepts either the expression grammar or the JSON form
/// {"c0":0,"c1":[4.5,0],"terms":[{"n":2,"c":[-1,0]},...]}.
DirichletSymbol parse_symbol_any(const std::string& text);

/// Reads a symbol from a file holding either format.
DirichletSymbol load_symbol_file(const std::string& path);

/// Canonical text; parse(print(s)) == s on normalized symbols.
std::string print_symbol(const DirichletSymbol& sym);

std::string symbol_to_json(const DirichletSymbol& sym);
DirichletSymbol symbol_from_json(const std::string& json_text);

}  // namespace dsym
