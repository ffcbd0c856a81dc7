#pragma once

#include <numeric>
#include <optional>

#include "latmatch/fourier_motzkin.hpp"
#include "latmatch/simplex.hpp"
#include "latmatch/weighting.hpp"

namespace latmatch {

inline const Rat kDefaultMargin = Rat(1, 1024);

// Raised when the margin LP certifies that no weighting can exist.
struct InfeasibleSystem : Error {
    std::vector<long long> certificate;
    explicit InfeasibleSystem(std::vector<long long> cert)
        : Error("inequality system is not realisable"), certificate(std::move(cert)) {}
};

namespace detail_lp {

// Margin LP on the dual:  the primal is  min sum(x)  s.t.  -c_q . x >= eps
// per inequality q and x_i >= eps. Feasibility of the margin system is
// equivalent to realisability (strict solutions rescale), and the dual is
// solvable by a single-phase simplex. Returns the primal optimum, or the
// Farkas multipliers of the inequality rows when infeasible.
struct MarginLp {
    bool feasible = false;
    std::vector<Rat> x;                   // per variable, >= eps
    std::vector<long long> certificate;   // per inequality when infeasible
};

inline MarginLp solve_margin_lp(const InequalitySystem& sys, const Rat& eps) {
    const std::size_t n = sys.n_vars;
    const std::size_t m = sys.items.size() + n;  // inequality rows then unit rows
    // Dual: max eps * sum(y)  s.t.  M^T y <= 1, y >= 0.
    std::vector<std::vector<Rat>> At(n, std::vector<Rat>(m, Rat(0)));
    for (std::size_t q = 0; q < sys.items.size(); ++q)
        for (std::size_t v = 0; v < n; ++v) At[v][q] = Rat(static_cast<long>(-sys.items[q].coeff[v]));
    for (std::size_t v = 0; v < n; ++v) At[v][sys.items.size() + v] = 1;
    std::vector<Rat> ones(n, Rat(1));
    std::vector<Rat> obj(m, eps);

    SimplexResult r = simplex_max(At, ones, obj);
    MarginLp out;
    if (r.unbounded) {
        // Scale the improving ray to integers; only the inequality rows form
        // the certificate (unit rows cannot drive unboundedness alone).
        mpz_class lcm = 1;
        for (std::size_t q = 0; q < sys.items.size(); ++q) {
            Rat y = r.ray[q];
            if (y < 0) throw Error("internal error: negative Farkas multiplier");
            lcm = lcm / gcd(lcm, y.get_den()) * y.get_den();
        }
        out.certificate.assign(sys.items.size(), 0);
        for (std::size_t q = 0; q < sys.items.size(); ++q) {
            mpz_class num = r.ray[q].get_num() * (lcm / r.ray[q].get_den());
            if (!num.fits_slong_p()) throw CapExceeded("certificate multiplier overflow");
            out.certificate[q] = num.get_si();
        }
        return out;
    }
    out.feasible = true;
    // Primal optimum appears as the reduced costs of the dual slack columns.
    out.x.assign(n, Rat(0));
    for (std::size_t v = 0; v < n; ++v) out.x[v] = r.reduced_costs[m + v];
    // Exactness check: the recovered point must satisfy the margin system.
    for (std::size_t v = 0; v < n; ++v)
        if (out.x[v] < eps) throw Error("internal error: LP solution below margin");
    for (const auto& q : sys.items) {
        Rat dot = 0;
        for (std::size_t v = 0; v < n; ++v) dot += Rat(static_cast<long>(q.coeff[v])) * out.x[v];
        if (!(-dot >= eps)) throw Error("internal error: LP solution violates a margin row");
    }
    return out;
}

}  // namespace detail_lp

// Solves  min sum(x)  s.t. every derived inequality holds with margin eps and
// x_i >= eps, then extends the solution to the top and bottom concepts (both
// get eps) and normalizes to a weighting. Throws InfeasibleSystem with a
// verifiable certificate when no weighting exists.
inline Weighting extract_weights(const InequalitySystem& sys, const Lattice& lat,
                                 const Rat& eps = kDefaultMargin) {
    if (eps <= 0) throw ValidationError("margin must be positive");
    if (sys.n_vars + 2 != lat.size() && !(lat.size() <= 2 && sys.n_vars == 0))
        throw ValidationError("inequality system does not match the lattice");
    if (sys.n_vars == 0) {
        // Any inequality over zero variables reads 0 < 0.
        if (!sys.items.empty())
            throw InfeasibleSystem(std::vector<long long>(sys.items.size(), 1));
        return Weighting::uniform(lat.size());
    }
    detail_lp::MarginLp lp = detail_lp::solve_margin_lp(sys, eps);
    if (!lp.feasible) throw InfeasibleSystem(std::move(lp.certificate));
    std::vector<Rat> w(lat.size(), eps);  // top and bottom keep the margin weight
    for (std::size_t v = 0; v < sys.n_vars; ++v) w[v + 1] = lp.x[v];
    return Weighting::from_values(std::move(w), /*normalize=*/true);
}

struct LearnResult {
    PlausibilityReport plausibility;
    InequalitySystem system;
    bool fm_capped = false;  // FM exceeded its bound; the LP decided instead
    RealisabilityResult realisability;
    std::optional<Weighting> weights;
    RankingReport ranking;
};

// Full learning pipeline: plausibility check, inequality derivation,
// constructive realisability (LP fallback past the FM cap), weight
// extraction and ranking verification.
inline LearnResult learn_weights(const ExpertMatrix& h, const Lattice& lat,
                                 const Rat& eps = kDefaultMargin, std::size_t fm_cap = 200000) {
    LearnResult out;
    out.plausibility = check_plausibility(h);
    if (!out.plausibility.empty()) return out;
    out.system = derive_inequalities(h, lat);
    try {
        out.realisability = decide_realisability(out.system, fm_cap);
    } catch (const CapExceeded&) {
        out.fm_capped = true;
        detail_lp::MarginLp lp = detail_lp::solve_margin_lp(out.system, eps);
        out.realisability.realisable = lp.feasible;
        if (lp.feasible)
            out.realisability.witness = lp.x;
        else
            out.realisability.certificate = lp.certificate;
    }
    if (!out.realisability.realisable) return out;
    out.weights = extract_weights(out.system, lat, eps);
    out.ranking = verify_ranking(*out.weights, h);
    return out;
}

}  // namespace latmatch
