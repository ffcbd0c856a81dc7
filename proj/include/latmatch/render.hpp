#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "latmatch/maxent.hpp"
#include "latmatch/rational.hpp"

namespace latmatch {

enum class OutputMode { Table, Machine };

// Probabilities are printed as 9-decimal fixed point.
inline std::string fixed9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x);
    return std::string(buf);
}

// Human-aligned table: columns padded to the widest cell.
inline void render_table(std::ostream& out, const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c].size() > width[c]) width[c] = row[c].size();
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size())
                out << std::string(width[c] - row[c].size() + 1, ' ');
        }
        out << "\n";
    };
    emit(header);
    for (const auto& row : rows) emit(row);
}

// Machine mode: one record per line, tab-separated key=value fields after a
// record type tag. Stable across releases.
inline void machine_record(std::ostream& out, const std::string& type,
                           const std::vector<std::pair<std::string, std::string>>& fields) {
    out << type;
    for (const auto& [k, v] : fields) out << "\t" << k << "=" << v;
    out << "\n";
}

// 9-decimal strings for a probability vector whose formatted values sum to
// exactly 1.000000000 (largest-remainder rounding of the display digits).
inline std::vector<std::string> format_probability_vector(const std::vector<double>& p) {
    const long long unit = 1000000000LL;
    std::vector<long long> base(p.size());
    std::vector<std::pair<double, std::size_t>> frac(p.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double scaled = p[i] * static_cast<double>(unit);
        base[i] = static_cast<long long>(scaled);
        if (base[i] < 0) base[i] = 0;
        frac[i] = {scaled - static_cast<double>(base[i]), i};
        assigned += base[i];
    }
    long long remainder = unit - assigned;
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long long r = 0; r < remainder && r < static_cast<long long>(p.size()); ++r)
        base[frac[static_cast<std::size_t>(r)].second] += 1;
    std::vector<std::string> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld.%09lld", base[i] / unit, base[i] % unit);
        out[i] = buf;
    }
    return out;
}

// World label for a PModel row: atom names, negated ones prefixed with '!'.
inline std::string world_label(const std::vector<std::string>& atoms, std::uint32_t world) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!out.empty()) out += " ";
        if (!((world >> i) & 1)) out += "!";
        out += atoms[i];
    }
    return out;
}

}  // namespace latmatch
