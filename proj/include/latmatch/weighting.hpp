#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "latmatch/lattice.hpp"
#include "latmatch/rational.hpp"

namespace latmatch {

// Strictly positive per-concept weights, normalized to sum exactly 1.
class Weighting {
  public:
    static Weighting uniform(std::size_t n) {
        std::vector<Rat> w(n, Rat(1, static_cast<unsigned long>(n)));
        return Weighting(std::move(w));
    }

    // `normalize` divides by the actual sum; otherwise a sum different from 1
    // is rejected.
    static Weighting from_values(std::vector<Rat> w, bool normalize = false) {
        if (w.empty()) throw ValidationError("weighting over zero concepts");
        Rat sum = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] <= 0)
                throw ValidationError("weight of concept " + std::to_string(i) +
                                      " is not strictly positive");
            sum += w[i];
        }
        if (sum != 1) {
            if (!normalize)
                throw ValidationError("weights sum to " + to_string(sum) +
                                      ", expected 1 (pass normalize to rescale)");
            for (auto& x : w) x /= sum;
        }
        return Weighting(std::move(w));
    }

    std::size_t size() const { return w_.size(); }
    const Rat& of(ConceptId c) const { return w_[static_cast<std::size_t>(c)]; }

    Rat weight_of(const ConceptSet& s) const {
        Rat sum = 0;
        s.for_each([&](std::size_t i) { sum += w_[i]; });
        return sum;
    }
    Rat weight_of(const Filter& f) const { return weight_of(f.members); }

    bool operator==(const Weighting& o) const { return w_ == o.w_; }

  private:
    explicit Weighting(std::vector<Rat> w) : w_(std::move(w)) {}
    std::vector<Rat> w_;
};

// Weights file: one `weight <concept> <p>/<q>` line per concept.
inline Weighting load_weights(std::string_view text, const Lattice& lat, bool normalize = false) {
    std::vector<Rat> w(lat.size(), Rat(0));
    std::vector<char> seen(lat.size(), 0);
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] != "weight" || tok.size() != 3)
            throw ParseError(lineno, "expected 'weight <concept> <value>'");
        ConceptId c;
        try {
            c = lat.id_of(tok[1]);
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        }
        if (seen[static_cast<std::size_t>(c)])
            throw ParseError(lineno, "duplicate weight for concept '" + tok[1] + "'");
        seen[static_cast<std::size_t>(c)] = 1;
        Rat v = parse_rational(tok[2]);
        if (v <= 0) throw ParseError(lineno, "weight for '" + tok[1] + "' must be positive");
        w[static_cast<std::size_t>(c)] = v;
    }
    for (std::size_t i = 0; i < lat.size(); ++i)
        if (!seen[i]) throw ValidationError("no weight given for concept '" + lat.name(static_cast<ConceptId>(i)) + "'");
    return Weighting::from_values(std::move(w), normalize);
}

inline std::string serialize_weights(const Lattice& lat, const Weighting& w) {
    std::string out;
    for (std::size_t i = 0; i < lat.size(); ++i)
        out += "weight " + lat.name(static_cast<ConceptId>(i)) + " " +
               to_string(w.of(static_cast<ConceptId>(i))) + "\n";
    return out;
}

}  // namespace latmatch
