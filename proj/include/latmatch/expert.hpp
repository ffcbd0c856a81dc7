#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latmatch/measure.hpp"

namespace latmatch {

// Expert-provided matching values on filter pairs, possibly partial.
// Entries are addressed by (given, requested) filter indices.
class ExpertMatrix {
  public:
    explicit ExpertMatrix(const Lattice& lat) : lat_(&lat) {}

    const Lattice& lattice() const { return *lat_; }
    const std::vector<Filter>& filters() const { return filters_; }

    int intern(const Filter& f) {
        auto it = index_.find(f.members);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(filters_.size());
        index_.emplace(f.members, id);
        filters_.push_back(f);
        for (auto& row : grid_) row.resize(filters_.size());
        grid_.emplace_back(filters_.size());
        return id;
    }
    std::optional<int> index_of(const Filter& f) const {
        auto it = index_.find(f.members);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    void set(const Filter& given, const Filter& requested, const Rat& value) {
        if (value < 0 || value > 1)
            throw ValidationError("expert value " + to_string(value) + " outside [0,1]");
        int g = intern(given), r = intern(requested);
        if (grid_[g][r]) throw ValidationError("duplicate expert entry for pair");
        grid_[g][r] = value;
        pairs_.emplace_back(g, r);
    }

    const std::optional<Rat>& at(int given, int requested) const { return grid_[given][requested]; }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    std::size_t entry_count() const { return pairs_.size(); }

    std::string label(int f) const { return filter_label(*lat_, filters_[f]); }

  private:
    const Lattice* lat_;
    std::vector<Filter> filters_;
    std::map<ConceptSet, int> index_;
    std::vector<std::vector<std::optional<Rat>>> grid_;  // [given][requested]
    std::vector<std::pair<int, int>> pairs_;
};

// Expert matrix file: CSV with header `given,requested,value`, filters
// written as generator lists like <C2|C4>.
inline ExpertMatrix load_expert_matrix(std::string_view text, const Lattice& lat) {
    ExpertMatrix h(lat);
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        if (detail::split_ws(line).empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',')
                cells.push_back(cur), cur.clear();
            else if (c != ' ' && c != '\t' && c != '\r')
                cur.push_back(c);
        }
        cells.push_back(cur);
        if (!header_seen) {
            if (cells != std::vector<std::string>{"given", "requested", "value"})
                throw ParseError(lineno, "expected header 'given,requested,value'");
            header_seen = true;
            continue;
        }
        if (cells.size() != 3) throw ParseError(lineno, "expected 'given,requested,value'");
        try {
            h.set(parse_filter(lat, cells[0]), parse_filter(lat, cells[1]),
                  parse_rational(cells[2]));
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    if (!header_seen) throw ParseError(0, "missing 'given,requested,value' header");
    return h;
}

// Equivalence classes of `candidates` under same-intersection with `f`.
inline std::vector<std::vector<Filter>> relevance_partition(const Lattice&, const Filter& f,
                                                            const std::vector<Filter>& candidates) {
    std::map<ConceptSet, std::vector<Filter>> classes;
    for (const auto& g : candidates) classes[f.members & g.members].push_back(g);
    std::vector<std::vector<Filter>> out;
    for (auto& [key, cls] : classes) out.push_back(std::move(cls));
    return out;
}

struct PlausibilityViolation {
    int constraint;       // 1..8
    std::string detail;   // witness filters and values, human readable
};

struct PlausibilityReport {
    std::vector<PlausibilityViolation> violations;
    bool truncated = false;
    bool empty() const { return violations.empty(); }
};

// Checks the eight plausibility constraints over the provided entries.
// An instance is applicable when every h(...) it mentions is present and
// all constructed sets are filters. Violations are data, not errors.
inline PlausibilityReport check_plausibility(const ExpertMatrix& h,
                                             std::size_t max_violations = 200) {
    const Lattice& lat = h.lattice();
    const auto& filters = h.filters();
    const int nf = static_cast<int>(filters.size());
    PlausibilityReport report;
    auto add = [&](int constraint, std::string detail) {
        if (report.violations.size() >= max_violations) {
            report.truncated = true;
            return false;
        }
        report.violations.push_back({constraint, std::move(detail)});
        return true;
    };

    // Entry lists grouped by requested / given filter index.
    std::vector<std::vector<int>> by_requested(nf), by_given(nf);
    for (auto [g, r] : h.pairs()) {
        by_requested[r].push_back(g);
        by_given[g].push_back(r);
    }
    auto val = [&](int g, int r) -> const std::optional<Rat>& { return h.at(g, r); };
    auto idx = [&](const ConceptSet& s) -> std::optional<int> {
        return h.index_of(Filter{s});
    };
    auto pair_text = [&](int g, int r) { return "h(" + h.label(g) + ", " + h.label(r) + ")"; };

    for (auto [g, r] : h.pairs()) {
        const Filter& F = filters[g];
        const Filter& G = filters[r];
        const Rat& v = *val(g, r);
        // (1) requested contained in given forces value 1.
        if (G.subset_of(F) && v != 1) {
            if (!add(1, pair_text(g, r) + " = " + to_string(v) + ", expected 1")) return report;
        }
        // (2) value depends only on the intersection with the requested filter.
        if (auto fg = idx(F.members & G.members)) {
            if (auto& v2 = val(*fg, r); v2 && *v2 != v) {
                if (!add(2, pair_text(g, r) + " = " + to_string(v) + " but " + pair_text(*fg, r) +
                                " = " + to_string(*v2)))
                    return report;
            }
        }
        // (3) dropping an unmet requirement strictly improves the value.
        {
            ConceptSet unmet = G.members - F.members;
            bool stop = false;
            unmet.for_each([&](std::size_t c) {
                if (stop) return;
                ConceptSet reduced = G.members;
                reduced.reset(c);
                if (reduced.none() || !lat.is_upward_closed(reduced)) return;
                auto rr = idx(reduced);
                if (!rr) return;
                if (auto& v2 = val(g, *rr); v2 && !(v < *v2)) {
                    if (!add(3, pair_text(g, r) + " = " + to_string(v) + " not < " +
                                    pair_text(g, *rr) + " = " + to_string(*v2) + " (dropped " +
                                    lat.name(static_cast<ConceptId>(c)) + ")"))
                        stop = true;
                }
            });
            if (report.truncated) return report;
        }
        // (4) adding one concept to both sides never decreases the value.
        for (std::size_t c = 0; c < lat.size(); ++c) {
            ConceptSet fc = F.members, gc = G.members;
            fc.set(c);
            gc.set(c);
            if (!lat.is_upward_closed(fc) || !lat.is_upward_closed(gc)) continue;
            auto fi = idx(fc), gi = idx(gc);
            if (!fi || !gi) continue;
            if (auto& v2 = val(*fi, *gi); v2 && !(v <= *v2)) {
                if (!add(4, pair_text(g, r) + " = " + to_string(v) + " not <= " +
                                pair_text(*fi, *gi) + " = " + to_string(*v2)))
                    return report;
            }
        }
    }

    // (5) and (8): pairs of entries sharing the requested filter.
    for (int r = 0; r < nf; ++r) {
        const auto& givens = by_requested[r];
        for (std::size_t a = 0; a < givens.size(); ++a)
            for (std::size_t b = 0; b < givens.size(); ++b) {
                int g1 = givens[a], g2 = givens[b];
                if (g1 == g2) continue;
                const Rat& v1 = *val(g1, r);
                const Rat& v2 = *val(g2, r);
                if (!(v1 < v2)) continue;
                const Filter& F1 = filters[g1];
                const Filter& F2 = filters[g2];
                const Filter& G = filters[r];
                // (5) adding an unheld requested concept to both given filters
                // preserves the strict order.
                ConceptSet cand = (G.members - F1.members) - F2.members;
                bool stop = false;
                cand.for_each([&](std::size_t c) {
                    if (stop) return;
                    ConceptSet f1c = F1.members, f2c = F2.members;
                    f1c.set(c);
                    f2c.set(c);
                    if (!lat.is_upward_closed(f1c) || !lat.is_upward_closed(f2c)) return;
                    auto i1 = idx(f1c), i2 = idx(f2c);
                    if (!i1 || !i2) return;
                    auto& w1 = val(*i1, r);
                    auto& w2 = val(*i2, r);
                    if (w1 && w2 && !(*w1 < *w2)) {
                        if (!add(5, pair_text(g1, r) + " < " + pair_text(g2, r) + " but " +
                                        pair_text(*i1, r) + " = " + to_string(*w1) + " not < " +
                                        pair_text(*i2, r) + " = " + to_string(*w2)))
                            stop = true;
                    }
                });
                if (report.truncated) return report;
                // (8) any requested filter with the same relevance for both
                // given filters preserves the strict order.
                for (int r2 = 0; r2 < nf; ++r2) {
                    if (r2 == r) continue;
                    const Filter& G2 = filters[r2];
                    if ((G2.members & F1.members) != (G.members & F1.members)) continue;
                    if ((G2.members & F2.members) != (G.members & F2.members)) continue;
                    auto& w1 = val(g1, r2);
                    auto& w2 = val(g2, r2);
                    if (w1 && w2 && !(*w1 < *w2)) {
                        if (!add(8, pair_text(g1, r) + " < " + pair_text(g2, r) + " but " +
                                        pair_text(g1, r2) + " = " + to_string(*w1) + " not < " +
                                        pair_text(g2, r2) + " = " + to_string(*w2)))
                            return report;
                    }
                }
            }
    }

    // (6): rankings against a requested filter agree inversely with
    // over-qualification rankings, within equal relevance.
    for (int r = 0; r < nf; ++r) {
        const auto& givens = by_requested[r];
        const Filter& G = filters[r];
        for (std::size_t a = 0; a < givens.size(); ++a)
            for (std::size_t b = a + 1; b < givens.size(); ++b) {
                int g1 = givens[a], g2 = givens[b];
                const Filter& F1 = filters[g1];
                const Filter& F2 = filters[g2];
                auto i1 = idx(F1.members & G.members);
                auto i2 = idx(F2.members & G.members);
                if (!i1 || !i2) continue;
                for (int f = 0; f < nf; ++f) {
                    const Filter& F = filters[f];
                    if ((F.members & F1.members & G.members) !=
                        (F.members & F2.members & G.members))
                        continue;
                    auto& left1 = val(g1, r);
                    auto& left2 = val(g2, r);
                    auto& right1 = val(f, *i1);
                    auto& right2 = val(f, *i2);
                    if (!left1 || !left2 || !right1 || !right2) continue;
                    bool lhs = *left1 > *left2;
                    bool rhs = *right1 < *right2;
                    if (lhs != rhs) {
                        if (!add(6, pair_text(g1, r) + " vs " + pair_text(g2, r) +
                                        " disagrees with " + pair_text(f, *i1) + " vs " +
                                        pair_text(f, *i2)))
                            return report;
                    }
                }
            }
    }

    // (7): same given filter, equal intersections; adding a shared requested
    // concept to the given filter preserves the strict order.
    for (int g = 0; g < nf; ++g) {
        const auto& reqs = by_given[g];
        const Filter& F = filters[g];
        for (std::size_t a = 0; a < reqs.size(); ++a)
            for (std::size_t b = 0; b < reqs.size(); ++b) {
                int r1 = reqs[a], r2 = reqs[b];
                if (r1 == r2) continue;
                const Filter& G1 = filters[r1];
                const Filter& G2 = filters[r2];
                if ((F.members & G1.members) != (F.members & G2.members)) continue;
                const Rat& v1 = *val(g, r1);
                const Rat& v2 = *val(g, r2);
                if (!(v1 < v2)) continue;
                ConceptSet shared = G1.members & G2.members;
                bool stop = false;
                shared.for_each([&](std::size_t c) {
                    if (stop) return;
                    ConceptSet fc = F.members;
                    fc.set(c);
                    if (!lat.is_upward_closed(fc)) return;
                    auto fi = idx(fc);
                    if (!fi) return;
                    auto& w1 = val(*fi, r1);
                    auto& w2 = val(*fi, r2);
                    if (w1 && w2 && !(*w1 < *w2)) {
                        if (!add(7, pair_text(g, r1) + " < " + pair_text(g, r2) + " but " +
                                        pair_text(*fi, r1) + " = " + to_string(*w1) + " not < " +
                                        pair_text(*fi, r2) + " = " + to_string(*w2)))
                            stop = true;
                    }
                });
                if (report.truncated) return report;
            }
    }
    return report;
}

struct RankingFailure {
    int condition;  // 1 or 2
    std::string detail;
};

struct RankingReport {
    std::vector<RankingFailure> failures;
    bool empty() const { return failures.empty(); }
};

// Checks that the measure induced by `w` reproduces every strict expert
// ranking: condition (1) for fixed requested filters, condition (2) for
// fixed given filters within one relevance class.
inline RankingReport verify_ranking(const Weighting& w, const ExpertMatrix& h) {
    const auto& filters = h.filters();
    const int nf = static_cast<int>(filters.size());
    RankingReport report;
    std::vector<std::vector<int>> by_requested(nf), by_given(nf);
    for (auto [g, r] : h.pairs()) {
        by_requested[r].push_back(g);
        by_given[g].push_back(r);
    }
    for (int r = 0; r < nf; ++r)
        for (std::size_t a = 0; a < by_requested[r].size(); ++a)
            for (std::size_t b = 0; b < by_requested[r].size(); ++b) {
                int g1 = by_requested[r][a], g2 = by_requested[r][b];
                if (g1 == g2) continue;
                if (!(*h.at(g1, r) > *h.at(g2, r))) continue;
                Rat m1 = match_value(w, filters[g1], filters[r]);
                Rat m2 = match_value(w, filters[g2], filters[r]);
                if (!(m1 > m2))
                    report.failures.push_back(
                        {1, "h(" + h.label(g1) + ", " + h.label(r) + ") > h(" + h.label(g2) +
                                ", " + h.label(r) + ") but mu gives " + to_string(m1) +
                                " vs " + to_string(m2)});
            }
    for (int g = 0; g < nf; ++g)
        for (std::size_t a = 0; a < by_given[g].size(); ++a)
            for (std::size_t b = 0; b < by_given[g].size(); ++b) {
                int r1 = by_given[g][a], r2 = by_given[g][b];
                if (r1 == r2) continue;
                const Filter& F = filters[g];
                if ((F.members & filters[r1].members) != (F.members & filters[r2].members))
                    continue;  // different relevance classes are not compared
                if (!(*h.at(g, r1) > *h.at(g, r2))) continue;
                Rat m1 = match_value(w, F, filters[r1]);
                Rat m2 = match_value(w, F, filters[r2]);
                if (!(m1 > m2))
                    report.failures.push_back(
                        {2, "h(" + h.label(g) + ", " + h.label(r1) + ") > h(" + h.label(g) +
                                ", " + h.label(r2) + ") but mu gives " + to_string(m1) +
                                " vs " + to_string(m2)});
            }
    return report;
}

}  // namespace latmatch
