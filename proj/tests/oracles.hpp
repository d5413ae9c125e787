#pragma once

// Test-only reference computations. Everything here is written directly from
// the defining formulas and deliberately shares no code with the library's
// schedule generators or trace engines.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using u128 = unsigned __int128;

inline u128 fact(int n) {
    u128 out = 1;
    for (int k = 2; k <= n; ++k) out *= static_cast<u128>(k);
    return out;
}

inline u128 a(int n) { return 2 * fact(n) - 1; }
inline u128 b(int n) { return fact(n + 1) + fact(n) - 1; }

/// Multiplier of T_i in the factorial example: 0 on [a_n, b_n), 2 on [b_n, a_{n+1}).
inline int factorial_multiplier(u128 i) {
    for (int n = 1;; ++n) {
        if (i < a(n + 1)) return i < b(n) ? 0 : 2;
    }
}

/// c_1 .. c_{count}, d_1 .. d_{count}
struct Cubic {
    std::vector<u128> c;  // c[n] for n >= 1, c[0] unused
    std::vector<u128> d;
    explicit Cubic(int count) : c(count + 2, 0), d(count + 2, 0) {
        c[1] = 1;
        for (int n = 1; n <= count; ++n) {
            d[n] = c[n] + static_cast<u128>(n) * n * n * c[n];
            c[n + 1] = d[n] + static_cast<u128>(n);
        }
    }
    /// 0 on [c_n, d_n), c_{n+1} on [d_n, c_{n+1})
    u128 multiplier(u128 i) const {
        for (std::size_t n = 1; n + 1 < c.size(); ++n) {
            if (i < c[n + 1]) return i < d[n] ? 0 : c[n + 1];
        }
        return 0;
    }
};

/// sum_{i=1}^{n} |m_i| for an integer multiplier rule, in exact integers.
template <class F>
u128 brute_sum(F multiplier, u128 n) {
    u128 s = 0;
    for (u128 i = 1; i <= n; ++i) s += static_cast<u128>(multiplier(i));
    return s;
}

/// Power-of-two spike multiplier: n at i = 2^n (n >= 1), else 1.
inline int power2_multiplier(std::uint64_t i) {
    if (i >= 2 && (i & (i - 1)) == 0) {
        int n = 0;
        while (i > 1) {
            i >>= 1;
            ++n;
        }
        return n;
    }
    return 1;
}

/// (1/n) sum_{i<=n} |lambda_i| sum_{j>i} |x_j| for a dense coordinate list x[1..]
template <class W>
double shift_average(W lambda, const std::vector<double>& x, std::uint64_t n) {
    long double s = 0;
    for (std::uint64_t i = 1; i <= n; ++i) {
        long double tail = 0;
        for (std::size_t j = i + 1; j < x.size(); ++j) tail += std::fabs(x[j]);
        s += std::fabs(static_cast<long double>(lambda(i))) * tail;
    }
    return static_cast<double>(s / static_cast<long double>(n));
}

}  // namespace oracle
