#pragma once

// Exact reference for the X kernel, kept apart from the library loops.

#include <algorithm>
#include <vector>

#include "qkzb/poly.hpp"

namespace oracle {

using qkzb::GaussQ;

// subsets of {1..size} with k elements, via bitmasks
inline std::vector<std::vector<int>> subsets(int size, int k) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << size); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        std::vector<int> s;
        for (int j = 0; j < size; ++j)
            if (mask & (1 << j)) s.push_back(j + 1);
        out.push_back(s);
    }
    return out;
}

inline bool in(const std::vector<int>& s, int j) { return std::find(s.begin(), s.end(), j) != s.end(); }

// X straight from the double sum, written independently of the library loops.
inline GaussQ brute_x(int n, int m, const std::vector<int>& T, const std::vector<int>& Tp, const std::vector<GaussQ>& b,
               const std::vector<GaussQ>& t, bool distinct, bool sprime = false) {
    const GaussQ I = GaussQ::i();
    GaussQ sum(0);
    for (int i1 = 1; i1 <= 2 * n; ++i1)
        for (int i2 = 1; i2 <= 2 * n; ++i2) {
            if (in(T, i1) || in(T, i2) || (distinct && i1 == i2)) continue;
            GaussQ prod(1);
            for (int ip : {i1, i2}) {
                GaussQ num(1), den(1);
                for (int j = 1; j <= 2 * n; ++j)
                    if (in(T, j)) num *= b[ip - 1] + b[j - 1];
                for (int j = 1; j <= 2 * m; ++j)
                    if (in(Tp, j)) num *= b[ip - 1] + I * t[j - 1];
                int top = sprime ? 2 * m : 2 * n;
                const std::vector<int>& excl = sprime ? Tp : T;
                for (int j = 1; j <= top; ++j)
                    if (!in(excl, j) && j != i1 && j != i2) den *= b[ip - 1] - b[j - 1];
                for (int j = 1; j <= 2 * m; ++j)
                    if (!in(Tp, j)) den *= b[ip - 1] - I * t[j - 1];
                prod *= num / den;
            }
            sum += prod;
        }
    return sum;
}

}  // namespace oracle
