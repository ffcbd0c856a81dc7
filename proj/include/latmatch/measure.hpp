#pragma once

#include <optional>
#include <vector>

#include "latmatch/lattice.hpp"
#include "latmatch/rational.hpp"
#include "latmatch/weighting.hpp"

namespace latmatch {

// Matching measure: how well the given profile covers the requested one.
// Exactly 1 iff requested ⊆ given; the inverse measure (over-qualification)
// is obtained by swapping the arguments.
inline Rat match_value(const Weighting& w, const Filter& given, const Filter& requested) {
    return w.weight_of(given.members & requested.members) / w.weight_of(requested.members);
}

// Symbolic matching value term: a pair of weight sums numerator/denominator
// with numerator ⊆ denominator. Any term whose two sets coincide is the
// distinguished top element 1.
struct MatchValueTerm {
    ConceptSet numerator;
    ConceptSet denominator;
    bool one = false;

    bool operator==(const MatchValueTerm& o) const {
        if (one || o.one) return one == o.one;
        return numerator == o.numerator && denominator == o.denominator;
    }
    bool operator!=(const MatchValueTerm& o) const { return !(*this == o); }
    bool operator<(const MatchValueTerm& o) const {
        if (one != o.one) return o.one;  // 1 sorts last
        if (one) return false;
        if (numerator != o.numerator) return numerator < o.numerator;
        return denominator < o.denominator;
    }
};

inline MatchValueTerm mvt_one(const Lattice& lat) {
    return MatchValueTerm{lat.empty_set(), lat.empty_set(), true};
}

inline MatchValueTerm make_mvt(const Lattice& lat, const ConceptSet& num, const ConceptSet& den) {
    if (num == den) return mvt_one(lat);
    if (!num.subset_of(den)) throw ValidationError("mvt numerator not contained in denominator");
    return MatchValueTerm{num, den, false};
}

inline MatchValueTerm mvt_of(const Lattice& lat, const Filter& given, const Filter& requested) {
    return make_mvt(lat, given.members & requested.members, requested.members);
}

inline MatchValueTerm mvt_bottom(const Lattice& lat) {
    ConceptSet num(lat.size());
    num.set(static_cast<std::size_t>(lat.top()));
    return make_mvt(lat, num, lat.full_set());
}

inline Rat mvt_evaluate(const Weighting& w, const MatchValueTerm& v) {
    if (v.one) return Rat(1);
    return w.weight_of(v.numerator) / w.weight_of(v.denominator);
}

// v1 ≤ v2 under every strictly positive substitution. Closed form:
// A1 ⊆ A2 and (B2 − A2) ⊆ (B1 − A1).
inline bool mvt_leq(const MatchValueTerm& v1, const MatchValueTerm& v2) {
    if (v2.one) return true;
    if (v1.one) return v2.one;
    return v1.numerator.subset_of(v2.numerator) &&
           (v2.denominator - v2.numerator).subset_of(v1.denominator - v1.numerator);
}

// Least upper bound in the term lattice: numerator F1 ∪ F2, denominator
// (G1 ∪ F2) ∩ (F1 ∪ G2).
inline MatchValueTerm mvt_join(const Lattice& lat, const MatchValueTerm& v1,
                               const MatchValueTerm& v2) {
    if (v1.one || v2.one) return mvt_one(lat);
    ConceptSet num = v1.numerator | v2.numerator;
    ConceptSet den = (v1.denominator | v2.numerator) & (v1.numerator | v2.denominator);
    return make_mvt(lat, num, den);
}

// Greatest lower bound: numerator F1 ∩ F2, denominator the filter generated
// by (G1 − F1) ∪ (G2 − F2) ∪ (F1 ∩ F2).
inline MatchValueTerm mvt_meet(const Lattice& lat, const MatchValueTerm& v1,
                               const MatchValueTerm& v2) {
    if (v1.one) return v2;
    if (v2.one) return v1;
    ConceptSet num = v1.numerator & v2.numerator;
    ConceptSet gen = (v1.denominator - v1.numerator) | (v2.denominator - v2.numerator) | num;
    return make_mvt(lat, num, lat.close_up(gen));
}

// All matching value terms of the lattice: every strict filter pair plus 1.
inline std::vector<MatchValueTerm> enumerate_mvts(const Lattice& lat,
                                                  const std::vector<Filter>& filters) {
    std::vector<MatchValueTerm> out;
    out.push_back(mvt_one(lat));
    for (const auto& a : filters)
        for (const auto& b : filters)
            if (a != b && a.subset_of(b)) out.push_back(make_mvt(lat, a.members, b.members));
    std::sort(out.begin(), out.end());
    return out;
}

// Relation on filter pairs; admissibility makes its term image a filter
// in the term lattice.
struct AdmissibleRelation {
    std::vector<std::pair<Filter, Filter>> pairs;

    bool contains(const Filter& f, const Filter& g) const {
        for (const auto& [a, b] : pairs)
            if (a == f && b == g) return true;
        return false;
    }
};

struct AdmissibilityViolation {
    int condition;  // 1..3
    Filter f, g;    // witness pair
};

// Checks the three admissibility conditions against the full filter universe.
inline std::optional<AdmissibilityViolation> check_admissible(const Lattice& lat,
                                                              const AdmissibleRelation& r,
                                                              const std::vector<Filter>& filters) {
    // (1) G ⊆ F implies r(F, G).
    for (const auto& f : filters)
        for (const auto& g : filters)
            if (g.subset_of(f) && !r.contains(f, g)) return AdmissibilityViolation{1, f, g};
    // (2) r(F, G) and C ∉ F with G − {C} still a filter implies r(F, G − {C}).
    for (const auto& [f, g] : r.pairs) {
        ConceptSet candidates = g.members - f.members;
        bool bad = false;
        AdmissibilityViolation v{2, f, g};
        candidates.for_each([&](std::size_t c) {
            if (bad) return;
            ConceptSet reduced = g.members;
            reduced.reset(c);
            if (reduced.none() || !lat.is_upward_closed(reduced)) return;
            if (!r.contains(f, Filter{reduced})) {
                v.g = Filter{reduced};
                bad = true;
            }
        });
        if (bad) return v;
    }
    // (3) r(F, G) implies r(F ∪ {C}, G ∪ {C}) whenever both stay filters.
    for (const auto& [f, g] : r.pairs) {
        for (std::size_t c = 0; c < lat.size(); ++c) {
            ConceptSet fc = f.members, gc = g.members;
            fc.set(c);
            gc.set(c);
            if (!lat.is_upward_closed(fc) || !lat.is_upward_closed(gc)) continue;
            if (!r.contains(Filter{fc}, Filter{gc}))
                return AdmissibilityViolation{3, Filter{fc}, Filter{gc}};
        }
    }
    return std::nullopt;
}

// Term image of an admissible relation; asserts it is upward closed in the
// term lattice and reports the violated condition otherwise.
inline std::vector<MatchValueTerm> admissible_mvt_filter(const Lattice& lat,
                                                         const AdmissibleRelation& r,
                                                         const std::vector<Filter>& filters) {
    if (auto v = check_admissible(lat, r, filters))
        throw ValidationError("relation is not admissible: condition (" +
                              std::to_string(v->condition) + ") fails for pair " +
                              filter_label(lat, v->f) + ", " + filter_label(lat, v->g));
    std::vector<MatchValueTerm> image;
    for (const auto& [f, g] : r.pairs) image.push_back(mvt_of(lat, f, g));
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());

    auto in_image = [&](const MatchValueTerm& t) {
        return std::binary_search(image.begin(), image.end(), t);
    };
    const auto universe = enumerate_mvts(lat, filters);
    for (const auto& t : image)
        for (const auto& u : universe)
            if (mvt_leq(t, u) && !in_image(u))
                throw ValidationError("internal error: admissible image is not upward closed");
    return image;
}

}  // namespace latmatch
