#pragma once

#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "latmatch/inequality.hpp"
#include "latmatch/rational.hpp"

namespace latmatch {

// Outcome of the realisability decision. A realisable system has a strictly
// satisfying positive rational witness; a non-realisable one has positive
// integer multipliers whose combination has every rhs multiplicity bounded
// by the lhs multiplicity (checkable by pure multiset arithmetic).
struct RealisabilityResult {
    bool realisable = false;
    std::vector<Rat> witness;               // per variable, all > 0
    std::vector<long long> certificate;     // per inequality, >= 0, not all 0
};

inline bool verify_certificate(const InequalitySystem& sys,
                               const std::vector<long long>& cert) {
    if (cert.size() != sys.items.size()) return false;
    bool any = false;
    std::vector<mpz_class> combo(sys.n_vars, 0);
    for (std::size_t i = 0; i < cert.size(); ++i) {
        if (cert[i] < 0) return false;
        if (cert[i] > 0) any = true;
        for (std::size_t v = 0; v < sys.n_vars; ++v)
            combo[v] += mpz_class(static_cast<long>(cert[i])) * static_cast<long>(sys.items[i].coeff[v]);
    }
    if (!any) return false;
    for (auto& c : combo)
        if (c < 0) return false;  // some rhs multiplicity exceeds the lhs one
    return true;
}

inline bool verify_witness(const InequalitySystem& sys, const std::vector<Rat>& witness) {
    if (witness.size() != sys.n_vars) return false;
    for (const auto& w : witness)
        if (w <= 0) return false;
    for (const auto& q : sys.items) {
        Rat dot = 0;
        for (std::size_t v = 0; v < sys.n_vars; ++v) dot += Rat(static_cast<long>(q.coeff[v])) * witness[v];
        if (!(dot < 0)) return false;
    }
    return true;
}

namespace detail_fm {

struct Row {
    std::vector<long long> c;     // coefficients over the variables
    std::vector<long long> prov;  // provenance multipliers over original inequalities
};

inline long long safe_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw CapExceeded("coefficient overflow in elimination");
    return r;
}
inline long long safe_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) throw CapExceeded("coefficient overflow in elimination");
    return r;
}

inline void normalize(Row& row) {
    long long g = 0;
    for (auto x : row.c) g = std::gcd(g, x < 0 ? -x : x);
    for (auto x : row.prov) g = std::gcd(g, x < 0 ? -x : x);
    if (g > 1) {
        for (auto& x : row.c) x /= g;
        for (auto& x : row.prov) x /= g;
    }
}

inline bool is_contradiction(const Row& row) {
    for (auto x : row.c)
        if (x < 0) return false;
    return true;  // c >= 0 componentwise while asserting c.x < 0
}

}  // namespace detail_fm

// Decides realisability by Fourier-Motzkin elimination over the positive
// orthant, eliminating variables in ascending index order. Certificates are
// tracked through every combination step. `cap` bounds the intermediate
// inequality count; past it a CapExceeded escapes and the caller falls back
// to the linear-programming path.
inline RealisabilityResult decide_realisability(const InequalitySystem& sys,
                                                std::size_t cap = 200000) {
    using detail_fm::Row;
    std::vector<Row> rows;
    for (std::size_t i = 0; i < sys.items.size(); ++i) {
        Row r;
        r.c = sys.items[i].coeff;
        r.prov.assign(sys.items.size(), 0);
        r.prov[i] = 1;
        detail_fm::normalize(r);
        rows.push_back(std::move(r));
    }

    auto found_certificate = [&](const Row& row) {
        RealisabilityResult res;
        res.realisable = false;
        res.certificate = row.prov;
        return res;
    };
    for (const auto& r : rows)
        if (detail_fm::is_contradiction(r)) return found_certificate(r);

    // History of row sets per elimination stage, for witness extraction.
    std::vector<std::vector<Row>> stages;
    for (std::size_t q = 0; q < sys.n_vars; ++q) {
        stages.push_back(rows);
        std::vector<Row> zero, pos, neg;
        for (auto& r : rows) {
            if (r.c[q] > 0)
                pos.push_back(std::move(r));
            else if (r.c[q] < 0)
                neg.push_back(std::move(r));
            else
                zero.push_back(std::move(r));
        }
        std::vector<Row> next = std::move(zero);
        std::set<std::vector<long long>> seen;
        for (auto& r : next) seen.insert(r.c);
        std::optional<Row> contradiction;
        auto push = [&](Row r) {
            if (contradiction) return;
            detail_fm::normalize(r);
            if (detail_fm::is_contradiction(r)) {
                contradiction = std::move(r);
                return;
            }
            if (seen.insert(r.c).second) {
                next.push_back(std::move(r));
                if (next.size() > cap) throw CapExceeded("intermediate inequality cap exceeded");
            }
        };
        if (!neg.empty()) {
            for (const auto& p : pos)
                for (const auto& m : neg) {
                    long long a = p.c[q], b = -m.c[q];
                    long long g = std::gcd(a, b);
                    long long fp = b / g, fm = a / g;
                    Row comb;
                    comb.c.resize(sys.n_vars);
                    comb.prov.resize(sys.items.size());
                    for (std::size_t v = 0; v < sys.n_vars; ++v)
                        comb.c[v] = detail_fm::safe_add(detail_fm::safe_mul(fp, p.c[v]),
                                                        detail_fm::safe_mul(fm, m.c[v]));
                    for (std::size_t i = 0; i < sys.items.size(); ++i)
                        comb.prov[i] = detail_fm::safe_add(detail_fm::safe_mul(fp, p.prov[i]),
                                                           detail_fm::safe_mul(fm, m.prov[i]));
                    push(std::move(comb));
                    if (contradiction) return found_certificate(*contradiction);
                }
        }
        // Over the positive orthant a row with a positive coefficient on
        // x_q also implies its x_q-free remainder.
        for (const auto& p : pos) {
            Row strip = p;
            strip.c[q] = 0;
            push(std::move(strip));
            if (contradiction) return found_certificate(*contradiction);
        }
        rows = std::move(next);
    }

    // Feasible: every remaining row would be a contradiction, so none remain.
    RealisabilityResult res;
    res.realisable = true;
    res.witness.assign(sys.n_vars, Rat(0));
    for (std::size_t k = sys.n_vars; k-- > 0;) {
        Rat lower = 0;  // variables are strictly positive
        std::optional<Rat> upper;
        for (const auto& r : stages[k]) {
            if (r.c[k] == 0) continue;
            Rat rest = 0;
            for (std::size_t v = k + 1; v < sys.n_vars; ++v)
                rest += Rat(static_cast<long>(r.c[v])) * res.witness[v];
            Rat bound = -rest / Rat(static_cast<long>(r.c[k]));
            if (r.c[k] > 0) {
                if (!upper || bound < *upper) upper = bound;
            } else {
                if (bound > lower) lower = bound;
            }
        }
        if (upper) {
            if (!(lower < *upper))
                throw Error("internal error: empty interval during witness extraction");
            res.witness[k] = (lower + *upper) / 2;
        } else {
            res.witness[k] = lower + 1;
        }
    }
    if (!verify_witness(sys, res.witness))
        throw Error("internal error: extracted witness fails verification");
    return res;
}

}  // namespace latmatch
