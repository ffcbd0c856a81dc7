#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "latmatch/bitset.hpp"
#include "latmatch/errors.hpp"
#include "latmatch/kb.hpp"

namespace latmatch {

using ConceptId = int;

inline constexpr std::size_t kConceptCap = 4096;

// Finite lattice over dense concept ids. Id 0 is the top concept and the
// largest id is the bottom concept. `up[i]` / `down[i]` are the reflexive
// ancestor / descendant sets of concept i.
class Lattice {
  public:
    std::size_t size() const { return names_.size(); }
    const std::string& name(ConceptId i) const { return names_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& names() const { return names_; }

    ConceptId id_of(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw ValidationError("unknown concept '" + name + "'");
        return it->second;
    }
    bool has(const std::string& name) const { return by_name_.count(name) != 0; }

    ConceptId top() const { return 0; }
    ConceptId bottom() const { return static_cast<ConceptId>(size()) - 1; }
    bool is_synthetic(ConceptId i) const { return synthetic_[static_cast<std::size_t>(i)]; }

    bool leq(ConceptId a, ConceptId b) const {
        return up_[static_cast<std::size_t>(a)].test(static_cast<std::size_t>(b));
    }
    const ConceptSet& up(ConceptId i) const { return up_[static_cast<std::size_t>(i)]; }
    const ConceptSet& down(ConceptId i) const { return down_[static_cast<std::size_t>(i)]; }

    ConceptSet empty_set() const { return ConceptSet(size()); }
    ConceptSet full_set() const {
        ConceptSet s(size());
        for (std::size_t i = 0; i < size(); ++i) s.set(i);
        return s;
    }

    // Upward closure of an arbitrary concept set.
    ConceptSet close_up(const ConceptSet& s) const {
        ConceptSet out(size());
        s.for_each([&](std::size_t i) { out |= up_[i]; });
        return out;
    }
    bool is_upward_closed(const ConceptSet& s) const { return close_up(s) == s; }

    // Least upper bound / greatest lower bound; -1 when it does not exist
    // (never for a validated lattice, used during construction).
    ConceptId lub(ConceptId a, ConceptId b) const { return bound(a, b, up_); }
    ConceptId glb(ConceptId a, ConceptId b) const { return bound(a, b, down_); }

    // Concept ids ordered so that every concept appears after all its
    // (strict) ancestors.
    std::vector<ConceptId> topo_ancestors_first() const {
        std::vector<ConceptId> order(size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](ConceptId a, ConceptId b) {
            return up_[static_cast<std::size_t>(a)].count() <
                   up_[static_cast<std::size_t>(b)].count();
        });
        return order;
    }

    // Cover pairs (sub, super) of the order restricted to declared concepts;
    // enough to re-serialize the lattice as a knowledge-base document.
    std::vector<std::pair<ConceptId, ConceptId>> cover_edges() const {
        std::vector<std::pair<ConceptId, ConceptId>> covers;
        std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            if (synthetic_[i]) continue;
            up_[i].for_each([&](std::size_t j) {
                if (j == i || synthetic_[j]) return;
                // j covers i within the declared concepts?
                bool direct = true;
                for (std::size_t k = 0; k < n && direct; ++k) {
                    if (k == i || k == j || synthetic_[k]) continue;
                    if (up_[i].test(k) && up_[k].test(j)) direct = false;
                }
                if (direct) covers.emplace_back(static_cast<ConceptId>(i), static_cast<ConceptId>(j));
            });
        }
        return covers;
    }

    std::string to_document() const {
        std::string out;
        for (std::size_t i = 0; i < size(); ++i)
            if (!synthetic_[i]) out += "concept " + names_[i] + "\n";
        for (auto [sub, sup] : cover_edges())
            out += "axiom " + name(sub) + " <= " + name(sup) + "\n";
        return out;
    }

    friend Lattice build_lattice(const TBoxDocument& doc);

  private:
    ConceptId bound(ConceptId a, ConceptId b, const std::vector<ConceptSet>& dir) const {
        ConceptSet common = dir[static_cast<std::size_t>(a)] & dir[static_cast<std::size_t>(b)];
        ConceptId best = -1;
        std::size_t best_cover = 0;
        common.for_each([&](std::size_t u) {
            std::size_t c = (dir[u] & common).count();
            if (best < 0 || c > best_cover) best = static_cast<ConceptId>(u), best_cover = c;
        });
        if (best < 0) return -1;
        if (!common.subset_of(dir[static_cast<std::size_t>(best)])) return -1;
        return best;
    }

    std::vector<std::string> names_;
    std::map<std::string, ConceptId> by_name_;
    std::vector<ConceptSet> up_, down_;
    std::vector<char> synthetic_;
};

// Non-empty upward-closed concept set; the representation of a profile.
struct Filter {
    ConceptSet members;

    bool operator==(const Filter& o) const { return members == o.members; }
    bool operator!=(const Filter& o) const { return members != o.members; }
    bool operator<(const Filter& o) const { return members < o.members; }
    bool subset_of(const Filter& o) const { return members.subset_of(o.members); }
    std::size_t count() const { return members.count(); }
};

inline Filter make_filter(const Lattice& lat, const ConceptSet& members) {
    if (members.none()) throw ValidationError("a filter must be non-empty");
    if (!lat.is_upward_closed(members)) throw ValidationError("concept set is not upward closed");
    return Filter{members};
}

// Upward closure of a non-empty generator set.
inline Filter filter_close(const Lattice& lat, const ConceptSet& generators) {
    if (generators.none()) throw ValidationError("empty generator set");
    return Filter{lat.close_up(generators)};
}

inline Filter filter_close(const Lattice& lat, const std::vector<ConceptId>& generators) {
    ConceptSet g(lat.size());
    for (ConceptId c : generators) g.set(static_cast<std::size_t>(c));
    return filter_close(lat, g);
}

// Minimal elements of a filter; the canonical generator list.
inline std::vector<ConceptId> filter_generators(const Lattice& lat, const Filter& f) {
    std::vector<ConceptId> gens;
    f.members.for_each([&](std::size_t m) {
        ConceptSet below = lat.down(static_cast<ConceptId>(m)) & f.members;
        if (below.count() == 1) gens.push_back(static_cast<ConceptId>(m));
    });
    return gens;
}

// Canonical "<g1|g2>" label, generator names sorted lexicographically.
inline std::string filter_label(const Lattice& lat, const Filter& f) {
    std::vector<std::string> names;
    for (ConceptId g : filter_generators(lat, f)) names.push_back(lat.name(g));
    std::sort(names.begin(), names.end());
    std::string out = "<";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += "|";
        out += names[i];
    }
    return out + ">";
}

// Parses "<g1|g2>" into the generated filter.
inline Filter parse_filter(const Lattice& lat, std::string_view text) {
    std::string s(text);
    if (s.size() < 3 || s.front() != '<' || s.back() != '>')
        throw ValidationError("malformed filter label '" + s + "' (expected <name|name|...>)");
    ConceptSet gens(lat.size());
    std::string cur;
    auto flush = [&] {
        auto tok = detail::split_ws(cur);
        cur.clear();
        if (tok.size() != 1) throw ValidationError("malformed filter label '" + s + "'");
        gens.set(static_cast<std::size_t>(lat.id_of(tok[0])));
    };
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] == '|')
            flush();
        else
            cur.push_back(s[i]);
    }
    flush();
    return filter_close(lat, gens);
}

inline Lattice build_lattice(const TBoxDocument& doc) {
    // Expand blow-up directives into named subsumption chains. Values listed
    // later in the enumeration are the more specific concepts.
    std::vector<std::string> names = doc.concepts;
    std::vector<std::pair<std::string, std::string>> edges = doc.axioms;  // sub <= super
    std::set<std::string> declared(names.begin(), names.end());
    for (const auto& b : doc.blowups) {
        std::string prev = b.base;
        for (const auto& v : b.values) {
            std::string gen = b.base + "." + b.role + "." + v;
            if (!declared.insert(gen).second)
                throw ParseError(b.line, "blow-up concept '" + gen + "' clashes with an existing name");
            names.push_back(gen);
            edges.emplace_back(gen, prev);
            prev = gen;
        }
    }
    if (names.size() > kConceptCap)
        throw CapExceeded("concept count " + std::to_string(names.size()) + " exceeds cap " +
                          std::to_string(kConceptCap));

    // Provisional ids in name order for the closure computation.
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    std::map<std::string, int> pid;
    for (std::size_t i = 0; i < sorted.size(); ++i) pid[sorted[i]] = static_cast<int>(i);

    std::size_t m = sorted.size();
    std::vector<ConceptSet> reach(m, ConceptSet(m));
    for (std::size_t i = 0; i < m; ++i) reach[i].set(i);
    for (auto& [sub, sup] : edges) reach[static_cast<std::size_t>(pid[sub])].set(static_cast<std::size_t>(pid[sup]));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i)
            if (reach[i].test(k)) reach[i] |= reach[k];

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (reach[i].test(j) && reach[j].test(i))
                throw ValidationError("cycle among distinct concepts: '" + sorted[i] + "' and '" +
                                      sorted[j] + "'");

    // Unique maximum / minimum, or synthetic bounds.
    std::vector<std::size_t> maximal, minimal;
    for (std::size_t i = 0; i < m; ++i) {
        if (reach[i].count() == 1) maximal.push_back(i);
        bool has_lower = false;
        for (std::size_t j = 0; j < m && !has_lower; ++j)
            if (j != i && reach[j].test(i)) has_lower = true;
        if (!has_lower) minimal.push_back(i);
    }
    bool synth_top = maximal.size() != 1;
    bool synth_bot = minimal.size() != 1;
    std::string top_name = synth_top ? "_top" : sorted[maximal[0]];
    std::string bot_name = synth_bot ? "_bot" : sorted[minimal[0]];
    if (!synth_top && !synth_bot && top_name == bot_name && m > 1)
        throw ValidationError("order relation is degenerate");

    // Final id assignment: top first, bottom last, the rest in name order.
    Lattice lat;
    lat.names_.push_back(top_name);
    lat.synthetic_.push_back(synth_top ? 1 : 0);
    for (const auto& nm : sorted)
        if (nm != top_name && nm != bot_name) {
            lat.names_.push_back(nm);
            lat.synthetic_.push_back(0);
        }
    if (lat.names_.size() != 1 || synth_bot || bot_name != top_name) {
        lat.names_.push_back(bot_name);
        lat.synthetic_.push_back(synth_bot ? 1 : 0);
    }
    std::size_t n = lat.names_.size();
    if (n > kConceptCap)
        throw CapExceeded("concept count " + std::to_string(n) + " exceeds cap " +
                          std::to_string(kConceptCap));
    for (std::size_t i = 0; i < n; ++i) lat.by_name_[lat.names_[i]] = static_cast<ConceptId>(i);

    lat.up_.assign(n, ConceptSet(n));
    for (std::size_t i = 0; i < n; ++i) lat.up_[i].set(i);
    auto fid = [&](const std::string& nm) { return static_cast<std::size_t>(lat.by_name_.at(nm)); };
    for (auto& [sub, sup] : edges) lat.up_[fid(sub)].set(fid(sup));
    if (synth_top)
        for (auto i : maximal) lat.up_[fid(sorted[i])].set(0);
    if (synth_bot)
        for (auto i : minimal) lat.up_[n - 1].set(fid(sorted[i]));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (lat.up_[i].test(k)) lat.up_[i] |= lat.up_[k];

    lat.down_.assign(n, ConceptSet(n));
    for (std::size_t i = 0; i < n; ++i)
        lat.up_[i].for_each([&](std::size_t j) { lat.down_[j].set(i); });

    // Sanity: bounds ended up where the id convention expects them.
    for (std::size_t i = 0; i < n; ++i)
        if (!lat.up_[i].test(0) || !lat.down_[i].test(n - 1))
            throw ValidationError("internal error: bound concepts misplaced");

    // Lattice property: unique lub and glb for every pair.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (lat.lub(static_cast<ConceptId>(i), static_cast<ConceptId>(j)) < 0)
                throw ValidationError("poset is not a lattice: no unique least upper bound for '" +
                                      lat.names_[i] + "' and '" + lat.names_[j] + "'");
            if (lat.glb(static_cast<ConceptId>(i), static_cast<ConceptId>(j)) < 0)
                throw ValidationError("poset is not a lattice: no unique greatest lower bound for '" +
                                      lat.names_[i] + "' and '" + lat.names_[j] + "'");
        }
    return lat;
}

// All filters of the lattice, enumerated in a deterministic order.
// Intended for small lattices (tests, admissibility checks); throws once
// `cap` filters have been produced.
inline std::vector<Filter> enumerate_filters(const Lattice& lat, std::size_t cap = 1u << 20) {
    std::vector<ConceptId> order = lat.topo_ancestors_first();
    std::vector<Filter> out;
    ConceptSet cur(lat.size());
    // Decide membership element by element, ancestors first; a concept may
    // only be included when all its strict ancestors already are.
    auto rec = [&](auto&& self, std::size_t pos) -> void {
        if (pos == order.size()) {
            if (cur.any()) {
                if (out.size() >= cap) throw CapExceeded("filter enumeration cap exceeded");
                out.push_back(Filter{cur});
            }
            return;
        }
        std::size_t c = static_cast<std::size_t>(order[pos]);
        self(self, pos + 1);  // exclude c
        ConceptSet anc = lat.up(static_cast<ConceptId>(c));
        anc.reset(c);
        if (anc.subset_of(cur)) {  // include c
            cur.set(c);
            self(self, pos + 1);
            cur.reset(c);
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace latmatch
