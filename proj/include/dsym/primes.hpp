#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace dsym {

/// Prime factorization of an integer n >= 2, exponents >= 1.
struct ExponentVector {
    std::map<std::int64_t, int> entries;  // prime -> exponent

    std::int64_t reconstruct() const;
    bool operator==(const ExponentVector&) const = default;
};

bool is_prime(std::int64_t n);

/// Trial division for small factors, Pollard rho beyond. Throws on n < 2.
ExponentVector factorize(std::int64_t n);

}  // namespace dsym
