#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "latmatch/enriched_graph.hpp"
#include "latmatch/errors.hpp"

namespace latmatch {

// The sentence database cannot be satisfied by any probability model.
struct InconsistentInput : Error {
    using Error::Error;
};

inline constexpr std::size_t kAtomCap = 20;

// Conjunction of atoms and negated atoms over an ordered atom list.
struct Event {
    std::uint32_t pos = 0;
    std::uint32_t neg = 0;

    static Event atom(int i) { return Event{std::uint32_t(1) << i, 0}; }
    Event intersect(const Event& o) const { return Event{pos | o.pos, neg | o.neg}; }
    bool contradictory() const { return (pos & neg) != 0; }
    bool matches(std::uint32_t world) const {
        return (world & pos) == pos && (world & neg) == 0;
    }
};

// P(consequence | condition) constrained to [lower, upper].
struct Sentence {
    Event condition;
    Event consequence;
    double lower = 0.0;
    double upper = 1.0;
};

enum class SentenceMode { LowerBound, Strict };

struct SentenceDb {
    std::vector<int> atom_nodes;          // graph node per atom
    std::vector<std::string> atom_names;  // parallel to atom_nodes
    std::vector<Sentence> sentences;

    int atom_of(int node) const {
        for (std::size_t i = 0; i < atom_nodes.size(); ++i)
            if (atom_nodes[i] == node) return static_cast<int>(i);
        return -1;
    }
};

// Nodes reachable from the sources along directed edges, name-sorted for a
// stable atom order.
inline std::vector<int> scope_nodes(const EnrichedGraph& g, const std::vector<int>& sources) {
    std::vector<char> seen(g.size(), 0);
    std::vector<int> stack = sources;
    for (int s : stack) seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int ei : g.adjacency()[static_cast<std::size_t>(v)]) {
            int to = g.edge(ei).to;
            if (!seen[static_cast<std::size_t>(to)]) {
                seen[static_cast<std::size_t>(to)] = 1;
                stack.push_back(to);
            }
        }
    }
    std::vector<int> scope;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (seen[v]) scope.push_back(static_cast<int>(v));
    std::sort(scope.begin(), scope.end(),
              [&](int a, int b) { return g.name(a) < g.name(b); });
    return scope;
}

// One atom per scoped node; one sentence per edge inside the scope. Lattice
// edges yield P(to|from)[1,1]; extra edges yield [d,1] in lower-bound mode
// and [d,d] in strict mode.
inline SentenceDb build_sentences(const EnrichedGraph& g, SentenceMode mode,
                                  const std::vector<int>& scope) {
    if (scope.size() > kAtomCap)
        throw CapExceeded("query scope has " + std::to_string(scope.size()) +
                          " atoms, cap is " + std::to_string(kAtomCap));
    SentenceDb db;
    std::vector<int> atom_of(g.size(), -1);
    for (int v : scope) {
        atom_of[static_cast<std::size_t>(v)] = static_cast<int>(db.atom_nodes.size());
        db.atom_nodes.push_back(v);
        db.atom_names.push_back(g.name(v));
    }
    for (const auto& e : g.edges()) {
        int af = atom_of[static_cast<std::size_t>(e.from)];
        int at = atom_of[static_cast<std::size_t>(e.to)];
        if (af < 0 || at < 0) continue;
        Sentence s;
        s.condition = Event::atom(af);
        s.consequence = Event::atom(at);
        if (e.lattice_edge) {
            s.lower = s.upper = 1.0;
        } else if (mode == SentenceMode::LowerBound) {
            s.lower = e.degree;
            s.upper = 1.0;
        } else {
            s.lower = s.upper = e.degree;
        }
        db.sentences.push_back(s);
    }
    return db;
}

inline SentenceDb build_sentences(const EnrichedGraph& g, SentenceMode mode) {
    std::vector<int> all;
    for (std::size_t v = 0; v < g.size(); ++v) all.push_back(static_cast<int>(v));
    std::sort(all.begin(), all.end(), [&](int a, int b) { return g.name(a) < g.name(b); });
    return build_sentences(g, mode, all);
}

// Probability model over the elementary conjunctions of the atom list.
struct PModel {
    std::vector<std::string> atoms;
    std::vector<double> p;  // size 2^atoms.size(), world bit i = atom i true

    double probability(const Event& e) const {
        if (e.contradictory()) return 0.0;
        double s = 0;
        for (std::uint32_t w = 0; w < p.size(); ++w)
            if (e.matches(w)) s += p[w];
        return s;
    }
    double entropy() const {
        double h = 0;
        for (double x : p)
            if (x > 0) h -= x * std::log(x);
        return h;
    }
};

namespace detail_me {

// Solves the small dense system (H + damp I) d = -grad restricted to the
// free indices; returns false when the system is too ill-conditioned.
inline bool solve_newton(const std::vector<std::vector<double>>& H, const std::vector<double>& grad,
                         const std::vector<int>& free_idx, double damp, std::vector<double>& dir) {
    const std::size_t k = free_idx.size();
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            A[i][j] = H[static_cast<std::size_t>(free_idx[i])][static_cast<std::size_t>(free_idx[j])];
        A[i][i] += damp;
        A[i][k] = -grad[static_cast<std::size_t>(free_idx[i])];
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (std::fabs(A[piv][col]) < 1e-14) return false;
        std::swap(A[piv], A[col]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            if (f == 0) continue;
            for (std::size_t cc = col; cc <= k; ++cc) A[r][cc] -= f * A[col][cc];
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        dir[static_cast<std::size_t>(free_idx[i])] = A[i][k] / A[i][i];
    return true;
}

}  // namespace detail_me

// Maximum entropy model of a sentence database: maximizes -sum p log p
// subject to the transformed inequality pair of every sentence. Solved in
// the exponential-family dual with projected Newton steps and a fixed
// iteration schedule; bounds of exactly 1 (or 0) become hard support
// restrictions. Inconsistency is reported when the converged model violates
// a constraint by more than 1e-6.
inline PModel maxent_solve(const std::vector<Sentence>& sentences,
                           const std::vector<std::string>& atoms) {
    if (atoms.size() > kAtomCap)
        throw CapExceeded("atom count " + std::to_string(atoms.size()) + " exceeds cap " +
                          std::to_string(kAtomCap));
    const std::uint32_t n_worlds = std::uint32_t(1) << atoms.size();
    for (const auto& s : sentences)
        if (!(0.0 <= s.lower && s.lower <= s.upper && s.upper <= 1.0))
            throw ValidationError("sentence bounds must satisfy 0 <= l <= u <= 1");

    std::vector<char> alive(n_worlds, 1);
    for (const auto& s : sentences) {
        Event ab = s.condition.intersect(s.consequence);
        Event anb = s.condition.intersect(Event{s.consequence.neg, s.consequence.pos});
        if (s.lower == 1.0)
            for (std::uint32_t w = 0; w < n_worlds; ++w)
                if (anb.matches(w)) alive[w] = 0;
        if (s.upper == 0.0)
            for (std::uint32_t w = 0; w < n_worlds; ++w)
                if (ab.matches(w)) alive[w] = 0;
    }
    std::vector<std::uint32_t> support;
    for (std::uint32_t w = 0; w < n_worlds; ++w)
        if (alive[w]) support.push_back(w);
    if (support.empty()) throw InconsistentInput("no world satisfies the hard sentences");

    // Soft constraint rows g with g . p <= 0, over the support only.
    std::vector<std::vector<double>> rows;
    for (const auto& s : sentences) {
        Event ab = s.condition.intersect(s.consequence);
        Event anb = s.condition.intersect(Event{s.consequence.neg, s.consequence.pos});
        if (s.lower > 0.0 && s.lower < 1.0) {
            std::vector<double> gl(support.size(), 0.0);
            for (std::size_t i = 0; i < support.size(); ++i) {
                if (ab.matches(support[i])) gl[i] = -(1.0 - s.lower);
                if (anb.matches(support[i])) gl[i] = s.lower;
            }
            rows.push_back(std::move(gl));
        }
        if (s.upper < 1.0 && s.upper > 0.0) {
            std::vector<double> gu(support.size(), 0.0);
            for (std::size_t i = 0; i < support.size(); ++i) {
                if (ab.matches(support[i])) gu[i] = 1.0 - s.upper;
                if (anb.matches(support[i])) gu[i] = -s.upper;
            }
            rows.push_back(std::move(gu));
        }
    }

    const std::size_t k = rows.size();
    std::vector<double> lambda(k, 0.0);
    std::vector<double> p(support.size(), 0.0);

    auto model_for = [&](const std::vector<double>& lam) {
        double mx = -1e300;
        std::vector<double> s(support.size(), 0.0);
        for (std::size_t i = 0; i < support.size(); ++i) {
            double acc = 0;
            for (std::size_t j = 0; j < k; ++j) acc -= lam[j] * rows[j][i];
            s[i] = acc;
            if (acc > mx) mx = acc;
        }
        double z = 0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            s[i] = std::exp(s[i] - mx);
            z += s[i];
        }
        for (auto& x : s) x /= z;
        return std::make_pair(s, mx + std::log(z));  // (model, log partition)
    };

    double f_cur;
    std::tie(p, f_cur) = model_for(lambda);
    if (k > 0) {
        std::vector<double> grad(k), expg(k);
        std::vector<std::vector<double>> H(k, std::vector<double>(k));
        const int max_iters = 2000;
        for (int iter = 0; iter < max_iters; ++iter) {
            for (std::size_t j = 0; j < k; ++j) {
                double e = 0;
                for (std::size_t i = 0; i < support.size(); ++i) e += p[i] * rows[j][i];
                expg[j] = e;
                grad[j] = -e;  // d/d lambda_j of log Z
            }
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = a; b < k; ++b) {
                    double e = 0;
                    for (std::size_t i = 0; i < support.size(); ++i)
                        e += p[i] * rows[a][i] * rows[b][i];
                    H[a][b] = H[b][a] = e - expg[a] * expg[b];
                }
            // Projected-gradient stationarity over lambda >= 0.
            double pg_norm = 0;
            std::vector<int> free_idx;
            for (std::size_t j = 0; j < k; ++j) {
                double g = (lambda[j] <= 0.0 && grad[j] > 0.0) ? 0.0 : grad[j];
                pg_norm = std::max(pg_norm, std::fabs(g));
                if (!(lambda[j] <= 0.0 && grad[j] > 0.0)) free_idx.push_back(static_cast<int>(j));
            }
            if (pg_norm < 1e-12) break;

            std::vector<double> dir(k, 0.0);
            bool have_newton =
                !free_idx.empty() && detail_me::solve_newton(H, grad, free_idx, 1e-12, dir);
            if (!have_newton)
                for (std::size_t j = 0; j < k; ++j) dir[j] = -grad[j];
            // Backtracking line search on the dual objective.
            double step = 1.0;
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt) {
                std::vector<double> trial(k);
                double step_norm = 0;
                for (std::size_t j = 0; j < k; ++j) {
                    trial[j] = std::max(0.0, lambda[j] + step * dir[j]);
                    step_norm = std::max(step_norm, std::fabs(trial[j] - lambda[j]));
                }
                auto [tp, tf] = model_for(trial);
                if (tf < f_cur - 1e-15) {
                    lambda = std::move(trial);
                    p = std::move(tp);
                    f_cur = tf;
                    moved = step_norm > 1e-9;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;  // step norm below threshold
        }
        // Feasibility of the converged model decides consistency.
        double max_violation = 0;
        for (std::size_t j = 0; j < k; ++j) {
            double e = 0;
            for (std::size_t i = 0; i < support.size(); ++i) e += p[i] * rows[j][i];
            max_violation = std::max(max_violation, e);
        }
        if (max_violation > 1e-6)
            throw InconsistentInput("sentences are not jointly satisfiable (violation " +
                                    std::to_string(max_violation) + ")");
    }

    PModel model;
    model.atoms = atoms;
    model.p.assign(n_worlds, 0.0);
    double total = 0;
    for (double x : p) total += x;
    for (std::size_t i = 0; i < support.size(); ++i) model.p[support[i]] = p[i] / total;
    return model;
}

inline PModel maxent_solve(const SentenceDb& db) { return maxent_solve(db.sentences, db.atom_names); }

// Answer to a probabilistic query: me[DB](a n b) / me[DB](a), or the
// distinguished inconsistent result when the database is unsatisfiable or
// the condition has probability zero under the maximum entropy model.
struct ProbResult {
    bool inconsistent = false;
    double value = 0.0;
};

inline ProbResult prob_query(const SentenceDb& db, const Event& consequence,
                             const Event& condition) {
    PModel me;
    try {
        me = maxent_solve(db);
    } catch (const InconsistentInput&) {
        return ProbResult{true, 0.0};
    }
    double pa = me.probability(condition);
    if (pa <= 1e-12) return ProbResult{true, 0.0};
    return ProbResult{false, me.probability(condition.intersect(consequence)) / pa};
}

// Probabilistic matching value of a given against a requested property set:
// the query P(ev(requested) | ev(given)) over the database built from the
// subgraph reachable from both sets.
struct ProbMatchResult {
    ProbResult result;
    SentenceDb db;
    PModel model;  // valid when result.inconsistent is false
};

inline ProbMatchResult prob_match(const EnrichedGraph& g, const std::vector<std::string>& given,
                                  const std::vector<std::string>& requested, SentenceMode mode) {
    if (given.empty() || requested.empty())
        throw ValidationError("profiles must assert at least one property");
    std::vector<int> sources;
    for (const auto& n : given) sources.push_back(g.id_of(n));
    for (const auto& n : requested) sources.push_back(g.id_of(n));
    ProbMatchResult out;
    out.db = build_sentences(g, mode, scope_nodes(g, sources));
    Event ev_given, ev_requested;
    for (const auto& n : given) ev_given = ev_given.intersect(Event::atom(out.db.atom_of(g.id_of(n))));
    for (const auto& n : requested)
        ev_requested = ev_requested.intersect(Event::atom(out.db.atom_of(g.id_of(n))));
    try {
        out.model = maxent_solve(out.db);
    } catch (const InconsistentInput&) {
        out.result.inconsistent = true;
        return out;
    }
    double pa = out.model.probability(ev_given);
    if (pa <= 1e-12) {
        out.result.inconsistent = true;
        return out;
    }
    out.result.value = out.model.probability(ev_given.intersect(ev_requested)) / pa;
    return out;
}

}  // namespace latmatch
