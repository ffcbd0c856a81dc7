#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "latmatch/lattice.hpp"

namespace latmatch {

// A named profile instance: the concepts directly asserted for it. Its
// representing filter is the upward closure of the asserted set.
struct Profile {
    std::string id;
    std::vector<ConceptId> asserted;
};

inline Filter representing_filter(const Lattice& lat, const Profile& p) {
    return filter_close(lat, p.asserted);
}

// Profiles file: `profile <id> : <name> [, <name> ...]` lines.
inline std::vector<Profile> parse_profiles(std::string_view text, const Lattice& lat) {
    std::vector<Profile> out;
    std::set<std::string> ids;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
        if (detail::split_ws(line).empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(lineno, "expected 'profile <id> : <name>[, <name> ...]'");
        auto head = detail::split_ws(line.substr(0, colon));
        if (head.size() != 2 || head[0] != "profile")
            throw ParseError(lineno, "expected 'profile <id> : <name>[, <name> ...]'");
        Profile p;
        p.id = head[1];
        if (!ids.insert(p.id).second) throw ParseError(lineno, "duplicate profile id '" + p.id + "'");
        std::string rest(line.substr(colon + 1));
        std::string cur;
        auto flush = [&] {
            auto tok = detail::split_ws(cur);
            cur.clear();
            if (tok.size() != 1) throw ParseError(lineno, "malformed concept list");
            try {
                p.asserted.push_back(lat.id_of(tok[0]));
            } catch (const ValidationError& e) {
                throw ParseError(lineno, e.what());
            }
        };
        for (char c : rest) {
            if (c == ',')
                flush();
            else
                cur.push_back(c);
        }
        flush();
        if (p.asserted.empty()) throw ParseError(lineno, "profile '" + p.id + "' asserts nothing");
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace latmatch
