#pragma once

#include <vector>

#include "latmatch/errors.hpp"
#include "latmatch/rational.hpp"

namespace latmatch {

// Exact-rational simplex for  max obj.v  s.t.  A v <= b, v >= 0  with b >= 0,
// so the all-slack basis is feasible. Bland's rule, fully deterministic.
struct SimplexResult {
    bool unbounded = false;
    Rat value;
    std::vector<Rat> solution;       // v, length n
    std::vector<Rat> reduced_costs;  // final objective row over the n+m columns
    std::vector<Rat> ray;            // improving direction (length n) when unbounded
};

inline SimplexResult simplex_max(const std::vector<std::vector<Rat>>& A,
                                 const std::vector<Rat>& b, const std::vector<Rat>& obj) {
    const std::size_t m = A.size();
    const std::size_t n = obj.size();
    for (std::size_t i = 0; i < m; ++i)
        if (b[i] < 0) throw Error("simplex_max requires nonnegative right-hand sides");

    const std::size_t cols = n + m + 1;  // variables, slacks, rhs
    std::vector<std::vector<Rat>> T(m, std::vector<Rat>(cols, Rat(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1;
        T[i][cols - 1] = b[i];
        basis[i] = n + i;
    }
    std::vector<Rat> z(cols, Rat(0));
    for (std::size_t j = 0; j < n; ++j) z[j] = -obj[j];

    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < n + m; ++j)
            if (z[j] < 0) {
                enter = j;
                break;  // Bland: smallest improving index
            }
        if (enter == cols) break;  // optimal

        std::size_t leave = m;
        Rat best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] <= 0) continue;
            Rat ratio = T[i][cols - 1] / T[i][enter];
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) {
            SimplexResult res;
            res.unbounded = true;
            res.ray.assign(n, Rat(0));
            if (enter < n) res.ray[enter] = 1;
            for (std::size_t i = 0; i < m; ++i)
                if (basis[i] < n) res.ray[basis[i]] = -T[i][enter];
            return res;
        }

        Rat pivot = T[leave][enter];
        for (auto& x : T[leave]) x /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || T[i][enter] == 0) continue;
            Rat f = T[i][enter];
            for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[leave][j];
        }
        if (z[enter] != 0) {
            Rat f = z[enter];
            for (std::size_t j = 0; j < cols; ++j) z[j] -= f * T[leave][j];
        }
        basis[leave] = enter;
    }

    SimplexResult res;
    res.solution.assign(n, Rat(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.solution[basis[i]] = T[i][cols - 1];
    res.value = z[cols - 1];
    res.reduced_costs.assign(z.begin(), z.begin() + static_cast<long>(n + m));
    return res;
}

}  // namespace latmatch
