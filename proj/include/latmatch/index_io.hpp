#pragma once

#include <filesystem>
#include <iomanip>
#include <sstream>

#include "latmatch/io.hpp"
#include "latmatch/match_index.hpp"

namespace latmatch {

inline constexpr const char* kIndexFormatVersion = "1";

namespace detail_idx {

inline std::string with_metadata(const std::string& body) {
    std::ostringstream meta;
    meta << "# latmatch-index v" << kIndexFormatVersion << " checksum=" << std::hex
         << std::setw(16) << std::setfill('0') << fnv1a64(body) << "\n";
    return meta.str() + body;
}

// Strips and verifies the metadata line, returning the body.
inline std::string check_metadata(const std::string& content, const std::string& what) {
    auto nl = content.find('\n');
    if (nl == std::string::npos) throw IoError(what + ": missing metadata line");
    std::string meta = content.substr(0, nl);
    std::string body = content.substr(nl + 1);
    std::istringstream in(meta);
    std::string hash_tag, version;
    in >> hash_tag >> hash_tag;  // "#", then "latmatch-index"
    if (hash_tag != "latmatch-index") throw IoError(what + ": not a latmatch index table");
    in >> version;
    if (version != std::string("v") + kIndexFormatVersion)
        throw IoError(what + ": format version mismatch (" + version + ")");
    std::string checksum;
    in >> checksum;
    if (checksum.rfind("checksum=", 0) != 0) throw IoError(what + ": missing checksum");
    std::ostringstream expect;
    expect << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(body);
    if (checksum.substr(9) != expect.str()) throw IoError(what + ": checksum failure");
    return body;
}

inline std::vector<std::vector<std::string>> parse_table(const std::string& body,
                                                         const std::vector<std::string>& header,
                                                         const std::string& what) {
    std::istringstream in(body);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == '\t')
                cells.push_back(cur), cur.clear();
            else if (c != '\r')
                cur.push_back(c);
        }
        cells.push_back(cur);
        if (first) {
            if (cells != header) throw IoError(what + ": unexpected header row");
            first = false;
            continue;
        }
        if (cells.size() != header.size()) throw IoError(what + ": malformed row '" + line + "'");
        rows.push_back(std::move(cells));
    }
    if (first) throw IoError(what + ": missing header row");
    return rows;
}

}  // namespace detail_idx

// The two relational tables the index persists to. ProfileRecords has one
// row per (required filter, fitness) record with the better/equal/worse
// counts and the descending next-chain; MatchingProfiles has one row per
// (required filter, given profile) with the profile chain per given filter.
inline std::string render_profile_records(const MatchIndex& index) {
    std::ostringstream out;
    out << "ID\tRequiredFilter\tFitness\tGreaterFitness\tEqualFitness\tLesserFitness\tNextID\n";
    const Lattice& lat = index.lattice();
    long id = 0;
    for (std::size_t c = 0; c < index.filters().size(); ++c) {
        const auto& records = index.columns()[c];
        std::string col_label = filter_label(lat, index.filters()[c]);
        for (std::size_t r = 0; r < records.size(); ++r) {
            ++id;
            out << id << "\t" << col_label << "\t" << to_string(records[r].fitness) << "\t"
                << records[r].n_greater << "\t" << records[r].n_equal << "\t"
                << records[r].n_lesser << "\t";
            if (r + 1 < records.size())
                out << (id + 1);
            else
                out << "null";
            out << "\n";
        }
    }
    return out.str();
}

inline std::string render_matching_profiles(const MatchIndex& index) {
    std::ostringstream out;
    out << "ID\tRequiredFilter\tRequiredProfile\tGivenFilter\tGivenProfile\tFitness\tNextID\n";
    const Lattice& lat = index.lattice();
    long id = 0;
    for (std::size_t c = 0; c < index.filters().size(); ++c) {
        std::string col_label = filter_label(lat, index.filters()[c]);
        std::string required_profile = "-";
        for (const auto& ip : index.profiles())
            if (ip.filter == static_cast<int>(c)) {
                required_profile = ip.id;
                break;
            }
        for (const auto& rec : index.columns()[c]) {
            for (int rf : rec.row_filters) {
                std::vector<const IndexProfile*> here;
                for (int pi : rec.profiles) {
                    const auto& ip = index.profiles()[static_cast<std::size_t>(pi)];
                    if (ip.filter == rf) here.push_back(&ip);
                }
                for (std::size_t i = 0; i < here.size(); ++i) {
                    ++id;
                    out << id << "\t" << col_label << "\t" << required_profile << "\t"
                        << filter_label(lat, index.filters()[static_cast<std::size_t>(rf)]) << "\t"
                        << here[i]->id << "\t" << to_string(rec.fitness) << "\t";
                    if (i + 1 < here.size())
                        out << (id + 1);
                    else
                        out << "null";
                    out << "\n";
                }
            }
        }
    }
    return out.str();
}

// Persists the index as a directory: the knowledge base and weights it was
// built against plus the two table files.
inline void save_index(const MatchIndex& index, const std::string& path) {
    namespace fs = std::filesystem;
    fs::create_directories(path);
    write_file(fs::path(path) / "kb.kb", index.lattice().to_document());
    write_file(fs::path(path) / "weights.tsv",
               serialize_weights(index.lattice(), index.weighting()));
    write_file(fs::path(path) / "profile_records.tsv",
               detail_idx::with_metadata(render_profile_records(index)));
    write_file(fs::path(path) / "matching_profiles.tsv",
               detail_idx::with_metadata(render_matching_profiles(index)));
}

namespace detail_idx {

inline long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(what + ": malformed number '" + s + "'");
    }
}

}  // namespace detail_idx

// Loads a persisted index and validates both tables against the recomputed
// matching values: the reconstruction must be bit-identical in query
// behaviour, so any mismatch, dangling NextID or chain cycle is an error.
inline MatchIndex load_index(const std::string& path) {
    namespace fs = std::filesystem;
    TBoxDocument doc = parse_knowledge_base(read_file(fs::path(path) / "kb.kb"));
    auto owned = std::make_shared<const Lattice>(build_lattice(doc));
    const Lattice& lat = *owned;
    Weighting w = load_weights(read_file(fs::path(path) / "weights.tsv"), lat);

    std::string records_body = detail_idx::check_metadata(
        read_file(fs::path(path) / "profile_records.tsv"), "profile_records.tsv");
    std::string profiles_body = detail_idx::check_metadata(
        read_file(fs::path(path) / "matching_profiles.tsv"), "matching_profiles.tsv");

    auto record_rows = detail_idx::parse_table(
        records_body,
        {"ID", "RequiredFilter", "Fitness", "GreaterFitness", "EqualFitness", "LesserFitness",
         "NextID"},
        "profile_records.tsv");
    auto profile_rows = detail_idx::parse_table(
        profiles_body,
        {"ID", "RequiredFilter", "RequiredProfile", "GivenFilter", "GivenProfile", "Fitness",
         "NextID"},
        "matching_profiles.tsv");

    // NextID sanity for both tables: targets exist, chains are acyclic.
    for (auto* rows : {&record_rows, &profile_rows}) {
        std::set<long> ids;
        for (const auto& row : *rows) ids.insert(detail_idx::parse_long(row[0], "table"));
        std::map<long, long> next;
        for (const auto& row : *rows) {
            if (row.back() == "null") continue;
            long target = detail_idx::parse_long(row.back(), "table");
            if (!ids.count(target))
                throw IoError("dangling NextID " + row.back() + " in persisted table");
            next[detail_idx::parse_long(row[0], "table")] = target;
        }
        std::map<long, int> color;  // 0 unseen, 1 in progress, 2 done
        for (const auto& [start, target] : next) {
            (void)target;
            if (color[start] == 2) continue;
            long cur = start;
            std::vector<long> trail;
            for (;;) {
                if (color[cur] == 1) throw IoError("NextID chain contains a cycle");
                if (color[cur] == 2) break;
                color[cur] = 1;
                trail.push_back(cur);
                auto it = next.find(cur);
                if (it == next.end()) break;
                cur = it->second;
            }
            for (long t : trail) color[t] = 2;
        }
    }

    // Profiles and their filters from MatchingProfiles.
    std::map<std::string, Filter> profile_filters;
    for (const auto& row : profile_rows) {
        Filter f = parse_filter(lat, row[3]);
        auto it = profile_filters.find(row[4]);
        if (it == profile_filters.end())
            profile_filters.emplace(row[4], f);
        else if (it->second != f)
            throw IoError("profile '" + row[4] + "' listed with two different filters");
    }
    std::vector<Profile> profiles;
    for (const auto& [id, f] : profile_filters) {
        Profile p;
        p.id = id;
        for (ConceptId g : filter_generators(lat, f)) p.asserted.push_back(g);
        profiles.push_back(std::move(p));
    }

    MatchIndex rebuilt = build_index(lat, w, profiles);
    // The tables must reproduce the rebuilt index exactly; stored fitness
    // values in particular must equal the recomputed matching values.
    if (render_profile_records(rebuilt) != records_body)
        throw IoError("profile_records.tsv does not match the recomputed index");
    if (render_matching_profiles(rebuilt) != profiles_body)
        throw IoError("matching_profiles.tsv does not match the recomputed index");

    rebuilt.owned_lat_ = owned;
    return rebuilt;
}

}  // namespace latmatch
