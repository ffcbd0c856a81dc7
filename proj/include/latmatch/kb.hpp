#pragma once

#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "latmatch/errors.hpp"

namespace latmatch {

// A parsed knowledge-base document. Line format:
//
//   concept <name>
//   axiom <sub> <= <super>
//   blowup <base> <role> { v1, v2, ... }
//   # comment
//
// Declarations may appear in any order; references are resolved after the
// whole document has been read. Names starting with '_' are reserved for
// synthetic lattice elements.
struct BlowupDirective {
    std::string base;
    std::string role;
    std::vector<std::string> values;
    std::size_t line = 0;
};

struct TBoxDocument {
    std::vector<std::string> concepts;                        // declaration order
    std::vector<std::pair<std::string, std::string>> axioms;  // sub <= super
    std::vector<BlowupDirective> blowups;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline bool valid_name(std::string_view s) {
    if (s.empty() || s[0] == '_') return false;
    for (char c : s)
        if (c == '<' || c == '>' || c == '|' || c == ',' || c == '{' || c == '}' || c == '#')
            return false;
    return true;
}

}  // namespace detail

inline TBoxDocument parse_knowledge_base(std::string_view text) {
    TBoxDocument doc;
    std::set<std::string> declared;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    std::vector<std::pair<std::size_t, std::string>> referenced;  // (line, name)

    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;

        if (tok[0] == "concept") {
            if (tok.size() != 2) throw ParseError(lineno, "expected 'concept <name>'");
            if (!detail::valid_name(tok[1]))
                throw ParseError(lineno, "invalid concept name '" + tok[1] + "'");
            if (!declared.insert(tok[1]).second)
                throw ParseError(lineno, "duplicate concept name '" + tok[1] + "'");
            doc.concepts.push_back(tok[1]);
        } else if (tok[0] == "axiom") {
            if (tok.size() != 4 || tok[2] != "<=")
                throw ParseError(lineno, "expected 'axiom <name> <= <name>'");
            referenced.emplace_back(lineno, tok[1]);
            referenced.emplace_back(lineno, tok[3]);
            doc.axioms.emplace_back(tok[1], tok[3]);
        } else if (tok[0] == "blowup") {
            // blowup <base> <role> { v1, v2, ... }
            std::string rest(line);
            auto lb = rest.find('{');
            auto rb = rest.find('}');
            if (lb == std::string::npos || rb == std::string::npos || rb < lb)
                throw ParseError(lineno, "expected 'blowup <base> <role> { v1, v2, ... }'");
            auto head = detail::split_ws(std::string_view(rest).substr(0, lb));
            if (head.size() != 3)
                throw ParseError(lineno, "expected 'blowup <base> <role> { v1, v2, ... }'");
            BlowupDirective b;
            b.base = head[1];
            b.role = head[2];
            b.line = lineno;
            if (!detail::valid_name(b.role))
                throw ParseError(lineno, "invalid role name '" + b.role + "'");
            std::string vals = rest.substr(lb + 1, rb - lb - 1);
            std::string cur;
            auto flush = [&] {
                auto t = detail::split_ws(cur);
                cur.clear();
                if (t.size() > 1) throw ParseError(lineno, "blow-up value contains whitespace");
                if (t.empty()) throw ParseError(lineno, "empty blow-up value");
                if (!detail::valid_name(t[0]))
                    throw ParseError(lineno, "invalid blow-up value '" + t[0] + "'");
                b.values.push_back(t[0]);
            };
            for (char c : vals) {
                if (c == ',')
                    flush();
                else
                    cur.push_back(c);
            }
            if (!detail::split_ws(cur).empty()) flush();
            if (b.values.empty()) throw ParseError(lineno, "blow-up value list is empty");
            referenced.emplace_back(lineno, b.base);
            doc.blowups.push_back(std::move(b));
        } else {
            throw ParseError(lineno, "unknown directive '" + tok[0] + "'");
        }
    }

    if (doc.concepts.empty()) throw ParseError(0, "no concepts declared");
    for (auto& [ln, name] : referenced)
        if (!declared.count(name))
            throw ParseError(ln, "reference to undeclared concept '" + name + "'");
    return doc;
}

}  // namespace latmatch
