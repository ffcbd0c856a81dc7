#pragma once

#include <set>
#include <string>
#include <vector>

#include "latmatch/expert.hpp"

namespace latmatch {

// One strict inequality sum(lhs) < sum(rhs) over variables x_0..x_{n-1}.
// Stored as coefficients c = m_lhs - m_rhs, asserting c . x < 0; lhs and
// rhs are disjoint after cancellation.
struct LinearInequality {
    std::vector<long long> coeff;

    bool operator<(const LinearInequality& o) const { return coeff < o.coeff; }
    bool operator==(const LinearInequality& o) const { return coeff == o.coeff; }

    static LinearInequality from_sides(std::size_t n_vars, const std::vector<int>& lhs,
                                       const std::vector<int>& rhs) {
        LinearInequality q;
        q.coeff.assign(n_vars, 0);
        for (int v : lhs) q.coeff[static_cast<std::size_t>(v)] += 1;
        for (int v : rhs) q.coeff[static_cast<std::size_t>(v)] -= 1;
        return q;
    }
    std::vector<std::pair<std::size_t, long long>> lhs_multiset() const {
        std::vector<std::pair<std::size_t, long long>> out;
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (coeff[i] > 0) out.emplace_back(i, coeff[i]);
        return out;
    }
    std::vector<std::pair<std::size_t, long long>> rhs_multiset() const {
        std::vector<std::pair<std::size_t, long long>> out;
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (coeff[i] < 0) out.emplace_back(i, -coeff[i]);
        return out;
    }
};

// Variables correspond to the non-top, non-bottom concepts of a lattice:
// variable v is concept id v + 1.
struct InequalitySystem {
    std::size_t n_vars = 0;
    std::vector<LinearInequality> items;
};

inline std::string render_side(const std::vector<std::pair<std::size_t, long long>>& side,
                               const Lattice* lat) {
    if (side.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (i) out += " + ";
        if (side[i].second != 1) out += std::to_string(side[i].second) + "*";
        out += lat ? lat->name(static_cast<ConceptId>(side[i].first + 1))
                   : "x" + std::to_string(side[i].first + 1);
    }
    return out;
}

inline std::string render_inequality(const LinearInequality& q, const Lattice* lat = nullptr) {
    return render_side(q.lhs_multiset(), lat) + " < " + render_side(q.rhs_multiset(), lat);
}

// Derives the inequality system of a plausible expert matrix. For entries
// sharing a requested filter, h(F1,G) < h(F2,G) yields
// Phi(F1 n G) < Phi(F2 n G); for entries sharing a given filter with equal
// intersections, h(F,G1) < h(F,G2) yields Phi(G2) < Phi(G1). Phi drops the
// top and bottom concepts. Trivially satisfiable inequalities (lhs a proper
// sub-multiset of rhs after cancellation) carry no information and are
// dropped; duplicates are merged.
inline InequalitySystem derive_inequalities(const ExpertMatrix& h, const Lattice& lat) {
    {
        PlausibilityReport rep = check_plausibility(h);
        if (!rep.empty())
            throw ValidationError("expert matrix violates plausibility constraint (" +
                                  std::to_string(rep.violations.front().constraint) +
                                  "): " + rep.violations.front().detail);
    }
    std::size_t n_vars = lat.size() >= 2 ? lat.size() - 2 : 0;
    InequalitySystem sys;
    sys.n_vars = n_vars;
    std::set<std::vector<long long>> seen;

    auto phi = [&](const ConceptSet& s) {
        std::vector<int> vars;
        s.for_each([&](std::size_t c) {
            if (c != 0 && c + 1 != lat.size()) vars.push_back(static_cast<int>(c - 1));
        });
        return vars;
    };
    auto emit = [&](const ConceptSet& smaller, const ConceptSet& larger) {
        LinearInequality q = LinearInequality::from_sides(n_vars, phi(smaller), phi(larger));
        bool lhs_any = false, rhs_any = false;
        for (auto c : q.coeff) {
            if (c > 0) lhs_any = true;
            if (c < 0) rhs_any = true;
        }
        if (!lhs_any && rhs_any) return;  // 0 < positive sum, trivially true
        if (!lhs_any && !rhs_any) {
            // Identical sums over the free variables. If the underlying sets
            // also agree, the strict entry is contradictory and the zero
            // inequality (0 < 0) keeps the system unrealisable; a difference
            // confined to top/bottom is absorbed by the bound weights.
            if (smaller == larger) {
                if (seen.insert(q.coeff).second) sys.items.push_back(std::move(q));
            }
            return;
        }
        if (seen.insert(q.coeff).second) sys.items.push_back(std::move(q));
    };

    const auto& filters = h.filters();
    const int nf = static_cast<int>(filters.size());
    std::vector<std::vector<int>> by_requested(nf), by_given(nf);
    for (auto [g, r] : h.pairs()) {
        by_requested[r].push_back(g);
        by_given[g].push_back(r);
    }
    for (int r = 0; r < nf; ++r)
        for (int g1 : by_requested[r])
            for (int g2 : by_requested[r]) {
                if (g1 == g2) continue;
                if (*h.at(g1, r) < *h.at(g2, r))
                    emit(filters[g1].members & filters[r].members,
                         filters[g2].members & filters[r].members);
            }
    for (int g = 0; g < nf; ++g)
        for (int r1 : by_given[g])
            for (int r2 : by_given[g]) {
                if (r1 == r2) continue;
                if ((filters[g].members & filters[r1].members) !=
                    (filters[g].members & filters[r2].members))
                    continue;
                if (*h.at(g, r1) < *h.at(g, r2))
                    emit(filters[r2].members, filters[r1].members);
            }
    std::sort(sys.items.begin(), sys.items.end());
    return sys;
}

}  // namespace latmatch
