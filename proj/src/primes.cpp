#include "dsym/primes.hpp"

#include <numeric>
#include <stdexcept>

namespace dsym {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
    u64 r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

bool miller_rabin(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    // deterministic witness set for 64-bit integers
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    u64 c = 1;
    while (true) {
        u64 x = 2, y = 2, d = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            u64 diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
        ++c;
    }
}

void factor_rec(u64 n, std::map<std::int64_t, int>& out) {
    if (n == 1) return;
    if (miller_rabin(n)) {
        out[static_cast<std::int64_t>(n)]++;
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

std::int64_t ExponentVector::reconstruct() const {
    std::int64_t n = 1;
    for (auto& [p, e] : entries)
        for (int i = 0; i < e; ++i) n *= p;
    return n;
}

bool is_prime(std::int64_t n) { return n >= 2 && miller_rabin(static_cast<u64>(n)); }

ExponentVector factorize(std::int64_t n) {
    if (n < 2) throw std::invalid_argument("factorize: n must be >= 2");
    ExponentVector ev;
    u64 m = static_cast<u64>(n);
    for (u64 p = 2; p * p <= m && p < 100000; p += (p == 2 ? 1 : 2)) {
        while (m % p == 0) {
            ev.entries[static_cast<std::int64_t>(p)]++;
            m /= p;
        }
    }
    if (m > 1) factor_rec(m, ev.entries);
    return ev;
}

}  // namespace dsym
