#pragma once

#include <random>
#include <string>
#include <vector>

#include "latmatch/lattice.hpp"
#include "latmatch/measure.hpp"
#include "latmatch/weighting.hpp"

namespace latmatch::testsupport {

inline std::string data_path(const std::string& name) {
    return std::string(LATMATCH_DATA_DIR) + "/" + name;
}

inline Lattice lattice_from(const std::string& doc) {
    return build_lattice(parse_knowledge_base(doc));
}

// Lattice with a named middle poset between synthesized-or-explicit bounds.
// `edges` are (sub, super) pairs between middle elements.
inline Lattice middle_lattice(std::size_t middle,
                              const std::vector<std::pair<int, int>>& edges) {
    std::string doc = "concept T\nconcept Z\n";
    for (std::size_t i = 0; i < middle; ++i) {
        std::string name = "m" + std::to_string(i);
        doc += "concept " + name + "\naxiom " + name + " <= T\naxiom Z <= " + name + "\n";
    }
    if (middle == 0) doc += "axiom Z <= T\n";
    for (auto [sub, sup] : edges)
        doc += "axiom m" + std::to_string(sub) + " <= m" + std::to_string(sup) + "\n";
    return lattice_from(doc);
}

// All lattices with at most `max_elems` elements (labeled, not up to
// isomorphism): every poset on the middle elements plus bounds, filtered by
// the lattice property. Includes the 1- and 2-element lattices.
inline std::vector<Lattice> all_small_lattices(std::size_t max_elems) {
    std::vector<Lattice> out;
    out.push_back(lattice_from("concept only\n"));
    if (max_elems < 2) return out;
    for (std::size_t middle = 0; middle + 2 <= max_elems; ++middle) {
        std::size_t pairs = middle * (middle - 1) / 2;
        for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
            // Bits choose orientation-free edges i<j; direction sub=j, sup=i
            // keeps the relation antisymmetric and acyclic.
            std::vector<std::pair<int, int>> edges;
            std::size_t bit = 0;
            for (std::size_t i = 0; i < middle; ++i)
                for (std::size_t j = i + 1; j < middle; ++j, ++bit)
                    if ((mask >> bit) & 1) edges.emplace_back(static_cast<int>(j), static_cast<int>(i));
            try {
                out.push_back(middle_lattice(middle, edges));
            } catch (const ValidationError&) {
                // not a lattice (or transitivity made a pair equal); skip
            }
        }
    }
    return out;
}

// Random lattice with at most max_elems elements; retries until the sampled
// middle poset forms a lattice with the bounds.
inline Lattice random_lattice(std::mt19937_64& rng, std::size_t max_elems,
                              std::size_t max_filters = 0) {
    for (;;) {
        std::uniform_int_distribution<std::size_t> mid(0, max_elems - 2);
        std::size_t middle = mid(rng);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < middle; ++i)
            for (std::size_t j = i + 1; j < middle; ++j)
                if (coin(rng) < 0.35) edges.emplace_back(static_cast<int>(j), static_cast<int>(i));
        try {
            Lattice lat = middle_lattice(middle, edges);
            if (max_filters && enumerate_filters(lat, max_filters + 1).size() > max_filters)
                continue;
            return lat;
        } catch (const ValidationError&) {
            continue;
        } catch (const CapExceeded&) {
            continue;
        }
    }
}

inline Weighting random_weighting(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<long> num(1, 50);
    std::vector<Rat> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(Rat(num(rng)));
    return Weighting::from_values(std::move(w), /*normalize=*/true);
}

inline Filter random_filter(std::mt19937_64& rng, const Lattice& lat) {
    std::uniform_int_distribution<std::size_t> pick(0, lat.size() - 1);
    ConceptSet gens(lat.size());
    std::size_t count = 1 + pick(rng) % 3;
    for (std::size_t i = 0; i < count; ++i) gens.set(pick(rng));
    return filter_close(lat, gens);
}

}  // namespace latmatch::testsupport
