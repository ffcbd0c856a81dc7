#pragma once

#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "latmatch/errors.hpp"
#include "latmatch/kb.hpp"
#include "latmatch/measure.hpp"

namespace latmatch {

// Directed graph of concepts: lattice edges carry degree exactly 1 and must
// be acyclic; extra edges carry a degree in (0,1] and may close cycles.
class EnrichedGraph {
  public:
    struct Edge {
        int from, to;
        double degree;
        bool lattice_edge;
    };

    int node(const std::string& name) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        int id = static_cast<int>(names_.size());
        by_name_.emplace(name, id);
        names_.push_back(name);
        adj_.emplace_back();
        return id;
    }
    int id_of(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw ValidationError("unknown graph node '" + name + "'");
        return it->second;
    }
    bool has(const std::string& name) const { return by_name_.count(name) != 0; }
    std::size_t size() const { return names_.size(); }
    const std::string& name(int id) const { return names_[static_cast<std::size_t>(id)]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }
    const Edge& edge(int idx) const { return edges_[static_cast<std::size_t>(idx)]; }

    void add_edge(const std::string& from, const std::string& to, double degree,
                  bool lattice_edge) {
        if (lattice_edge && degree != 1.0)
            throw ValidationError("lattice edges carry degree exactly 1");
        if (!(degree > 0.0 && degree <= 1.0))
            throw ValidationError("edge degree must lie in (0,1]");
        int f = node(from), t = node(to);
        adj_[static_cast<std::size_t>(f)].push_back(static_cast<int>(edges_.size()));
        edges_.push_back(Edge{f, t, degree, lattice_edge});
    }

    // The lattice-edge subgraph must be acyclic.
    void validate() const {
        std::vector<int> color(size(), 0);
        auto dfs = [&](auto&& self, int v) -> void {
            color[static_cast<std::size_t>(v)] = 1;
            for (int ei : adj_[static_cast<std::size_t>(v)]) {
                const Edge& e = edges_[static_cast<std::size_t>(ei)];
                if (!e.lattice_edge) continue;
                if (color[static_cast<std::size_t>(e.to)] == 1)
                    throw ValidationError("lattice edges contain a cycle through '" +
                                          names_[static_cast<std::size_t>(e.to)] + "'");
                if (color[static_cast<std::size_t>(e.to)] == 0) self(self, e.to);
            }
            color[static_cast<std::size_t>(v)] = 2;
        };
        for (std::size_t v = 0; v < size(); ++v)
            if (color[v] == 0) dfs(dfs, static_cast<int>(v));
    }

  private:
    std::vector<std::string> names_;
    std::map<std::string, int> by_name_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;  // outgoing edge indices per node
};

// Graph file: `edge <from> <to>` and `xedge <from> <to> <degree>` lines.
inline EnrichedGraph parse_graph(std::string_view text) {
    EnrichedGraph g;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "edge" && tok.size() == 3)
                g.add_edge(tok[1], tok[2], 1.0, true);
            else if (tok[0] == "xedge" && tok.size() == 4)
                g.add_edge(tok[1], tok[2], std::stod(tok[3]), false);
            else
                throw ValidationError("expected 'edge <a> <b>' or 'xedge <a> <b> <degree>'");
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        } catch (const std::exception&) {
            throw ParseError(lineno, "malformed degree");
        }
    }
    g.validate();
    return g;
}

// Graded membership map; absent nodes have grade 0.
struct FuzzySet {
    std::map<int, double> membership;

    double grade(int node) const {
        auto it = membership.find(node);
        return it == membership.end() ? 0.0 : it->second;
    }
};

inline FuzzySet fuzzy_intersect(const FuzzySet& f, const FuzzySet& g) {
    FuzzySet out;
    for (const auto& [node, grade] : f.membership) {
        double other = g.grade(node);
        double m = grade < other ? grade : other;
        if (m > 0) out.membership.emplace(node, m);
    }
    return out;
}

// Extends a crisp property set along the graph: the grade of a reachable
// node is the maximum path degree product from any source. Degrees lie in
// (0,1], so a best-first search settles nodes in decreasing grade order
// (the multiplicative form of a shortest-path run on -log degrees).
inline FuzzySet extend_profile(const EnrichedGraph& g, const std::vector<int>& sources) {
    if (sources.empty()) throw ValidationError("empty property set");
    std::vector<double> grade(g.size(), 0.0);
    std::priority_queue<std::pair<double, int>> pq;
    for (int s : sources) {
        if (s < 0 || static_cast<std::size_t>(s) >= g.size())
            throw ValidationError("source node outside the graph");
        grade[static_cast<std::size_t>(s)] = 1.0;
        pq.emplace(1.0, s);
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d < grade[static_cast<std::size_t>(v)]) continue;
        for (int ei : g.adjacency()[static_cast<std::size_t>(v)]) {
            const auto& e = g.edge(ei);
            double nd = d * e.degree;
            if (nd > grade[static_cast<std::size_t>(e.to)]) {
                grade[static_cast<std::size_t>(e.to)] = nd;
                pq.emplace(nd, e.to);
            }
        }
    }
    FuzzySet out;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (grade[v] > 0) out.membership.emplace(static_cast<int>(v), grade[v]);
    return out;
}

inline FuzzySet extend_profile(const EnrichedGraph& g, const std::vector<std::string>& names) {
    std::vector<int> ids;
    for (const auto& n : names) ids.push_back(g.id_of(n));
    return extend_profile(g, ids);
}

// Weighted size of a fuzzy set: sum of grade * weight per member. Weights
// are per-node and need not be normalized (unit weights are common here).
inline double fuzzy_weight(const std::vector<double>& node_weights, const FuzzySet& f) {
    double sum = 0;
    for (const auto& [node, grade] : f.membership)
        sum += grade * node_weights[static_cast<std::size_t>(node)];
    return sum;
}

// Matching value between fuzzy sets: weight of the min-intersection over the
// weight of the requested side. Reduces to the crisp measure when every
// grade is 1.
inline double fuzzy_match(const std::vector<double>& node_weights, const FuzzySet& given,
                          const FuzzySet& requested) {
    double denom = fuzzy_weight(node_weights, requested);
    if (denom <= 0) throw ValidationError("requested fuzzy set has zero weight");
    return fuzzy_weight(node_weights, fuzzy_intersect(given, requested)) / denom;
}

}  // namespace latmatch
