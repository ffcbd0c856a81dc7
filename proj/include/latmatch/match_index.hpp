#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "latmatch/measure.hpp"
#include "latmatch/profile.hpp"

namespace latmatch {

// One fitness level of a column: the number of profiles strictly better,
// equal and strictly worse, the row filters sitting at this fitness and the
// ordered profile list. Records of a column are kept in strictly descending
// fitness order; vector order realizes the next/prev chain.
struct ProfileRecord {
    Rat fitness;
    std::size_t n_greater = 0;
    std::size_t n_equal = 0;
    std::size_t n_lesser = 0;
    std::vector<int> row_filters;  // indices into MatchIndex::filters()
    std::vector<int> profiles;     // indices into MatchIndex::profiles(), id-sorted

    bool operator==(const ProfileRecord& o) const {
        return fitness == o.fitness && n_greater == o.n_greater && n_equal == o.n_equal &&
               n_lesser == o.n_lesser && row_filters == o.row_filters && profiles == o.profiles;
    }
};

struct IndexProfile {
    std::string id;
    int filter = -1;

    bool operator==(const IndexProfile& o) const { return id == o.id && filter == o.filter; }
};

struct TopKResult {
    std::vector<std::pair<std::string, Rat>> entries;  // descending fitness, id-sorted in ties
    std::size_t lambda = 0;
    Rat threshold;  // fitness of the last included group
    bool virtual_column = false;
};

struct GapCandidate {
    ConceptSet extension;                  // concepts added to the representing filter
    std::vector<std::string> supporting;   // requested profiles unlocked, id-sorted
};

struct GapResult {
    std::vector<GapCandidate> candidates;
    bool truncated = false;  // selection cap was hit; results may be partial
};

// Precomputed matching values between the distinct representing filters of a
// profile population, with per-column profile records. Rows and columns both
// range over the distinct profile filters, canonically sorted; required
// filters outside the population are served by virtual columns computed on
// the fly. Immutable after construction.
class MatchIndex {
  public:
    MatchIndex(const Lattice& lat, Weighting w) : lat_(&lat), w_(std::move(w)) {
        if (w_.size() != lat.size())
            throw ValidationError("weighting does not match the lattice");
    }

    // Loaded indexes own their lattice; built ones borrow the caller's.
    MatchIndex(std::shared_ptr<const Lattice> lat, Weighting w)
        : lat_(lat.get()), w_(std::move(w)), owned_lat_(std::move(lat)) {
        if (w_.size() != lat_->size())
            throw ValidationError("weighting does not match the lattice");
    }

    // Take shared ownership of the lattice the index was built against, for
    // callers whose lattice value would not outlive the index.
    void adopt_lattice(std::shared_ptr<const Lattice> lat) {
        if (lat.get() != lat_) throw ValidationError("adopt_lattice: lattice mismatch");
        owned_lat_ = std::move(lat);
    }

    const Lattice& lattice() const { return *lat_; }
    const Weighting& weighting() const { return w_; }
    const std::vector<Filter>& filters() const { return filters_; }
    const std::vector<IndexProfile>& profiles() const { return profiles_; }
    const std::vector<std::vector<ProfileRecord>>& columns() const { return columns_; }
    const Rat& fitness(int row, int col) const {
        return fitness_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
    std::optional<int> filter_index(const Filter& f) const {
        auto it = filter_index_.find(f.members);
        if (it == filter_index_.end()) return std::nullopt;
        return it->second;
    }
    bool has_profile(const std::string& id) const {
        return std::any_of(profiles_.begin(), profiles_.end(),
                           [&](const IndexProfile& p) { return p.id == id; });
    }

    bool operator==(const MatchIndex& o) const {
        return filters_ == o.filters_ && fitness_ == o.fitness_ && columns_ == o.columns_ &&
               profiles_ == o.profiles_;
    }

    // Column records for an arbitrary required filter. Known filters return
    // the precomputed chain.
    std::vector<ProfileRecord> column_for(const Filter& required, bool* is_virtual = nullptr) const {
        if (auto idx = filter_index(required)) {
            if (is_virtual) *is_virtual = false;
            return columns_[static_cast<std::size_t>(*idx)];
        }
        if (is_virtual) *is_virtual = true;
        std::vector<Rat> col(filters_.size());
        for (std::size_t r = 0; r < filters_.size(); ++r)
            col[r] = match_value(w_, filters_[r], required);
        return build_records(col);
    }

    friend MatchIndex build_index(const Lattice& lat, const Weighting& w,
                                  const std::vector<Profile>& ps);
    friend MatchIndex add_profile(const MatchIndex& index, const Profile& p);
    friend MatchIndex load_index(const std::string& path);

  private:
    std::vector<ProfileRecord> build_records(const std::vector<Rat>& col) const {
        std::map<Rat, ProfileRecord> groups;
        for (std::size_t r = 0; r < filters_.size(); ++r) {
            ProfileRecord& rec = groups[col[r]];
            rec.fitness = col[r];
            rec.row_filters.push_back(static_cast<int>(r));
        }
        std::vector<ProfileRecord> records;
        for (auto it = groups.rbegin(); it != groups.rend(); ++it) records.push_back(it->second);
        for (auto& rec : records)
            for (int rf : rec.row_filters)
                for (int p : profiles_of_filter_[static_cast<std::size_t>(rf)])
                    rec.profiles.push_back(p);
        finalize_counts(records);
        return records;
    }

    void finalize_counts(std::vector<ProfileRecord>& records) const {
        std::size_t total = profiles_.size();
        std::size_t above = 0;
        for (auto& rec : records) {
            std::sort(rec.profiles.begin(), rec.profiles.end(), [&](int a, int b) {
                return profiles_[static_cast<std::size_t>(a)].id <
                       profiles_[static_cast<std::size_t>(b)].id;
            });
            rec.n_equal = rec.profiles.size();
            rec.n_greater = above;
            above += rec.n_equal;
            rec.n_lesser = total - above;
        }
    }

    void rebuild_columns() {
        profiles_of_filter_.assign(filters_.size(), {});
        for (std::size_t p = 0; p < profiles_.size(); ++p)
            profiles_of_filter_[static_cast<std::size_t>(profiles_[p].filter)].push_back(
                static_cast<int>(p));
        columns_.clear();
        for (std::size_t c = 0; c < filters_.size(); ++c) {
            std::vector<Rat> col(filters_.size());
            for (std::size_t r = 0; r < filters_.size(); ++r) col[r] = fitness_[r][c];
            columns_.push_back(build_records(col));
        }
    }

    const Lattice* lat_;
    Weighting w_;
    std::shared_ptr<const Lattice> owned_lat_;
    std::vector<Filter> filters_;
    std::map<ConceptSet, int> filter_index_;
    std::vector<std::vector<Rat>> fitness_;  // [row][column]
    std::vector<std::vector<ProfileRecord>> columns_;
    std::vector<IndexProfile> profiles_;  // id-sorted
    std::vector<std::vector<int>> profiles_of_filter_;
};

inline MatchIndex build_index(const Lattice& lat, const Weighting& w,
                              const std::vector<Profile>& ps) {
    MatchIndex idx(lat, w);
    std::vector<std::pair<std::string, Filter>> named;
    for (const auto& p : ps) named.emplace_back(p.id, representing_filter(lat, p));
    std::sort(named.begin(), named.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < named.size(); ++i)
        if (named[i].first == named[i - 1].first)
            throw ValidationError("duplicate profile id '" + named[i].first + "'");

    std::vector<Filter> distinct;
    for (const auto& [id, f] : named) distinct.push_back(f);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    idx.filters_ = distinct;
    for (std::size_t i = 0; i < distinct.size(); ++i)
        idx.filter_index_.emplace(distinct[i].members, static_cast<int>(i));

    for (const auto& [id, f] : named)
        idx.profiles_.push_back(IndexProfile{id, *idx.filter_index(f)});

    idx.fitness_.assign(distinct.size(), std::vector<Rat>(distinct.size()));
    for (std::size_t r = 0; r < distinct.size(); ++r)
        for (std::size_t c = 0; c < distinct.size(); ++c)
            idx.fitness_[r][c] = match_value(w, distinct[r], distinct[c]);
    idx.rebuild_columns();
    return idx;
}

// Whole fitness groups are taken in descending order while fewer than k
// profiles rank strictly better; with a positive floor every group at or
// above the floor is also taken (floor 0 disables that branch). Boundary
// ties are always included, so lambda >= k whenever enough profiles exist.
inline TopKResult topk(const MatchIndex& index, const Filter& required, std::size_t k,
                       const Rat& floor = Rat(0)) {
    if (k == 0) throw ValidationError("k must be positive");
    if (floor < 0 || floor > 1) throw ValidationError("floor must lie in [0,1]");
    TopKResult out;
    auto records = index.column_for(required, &out.virtual_column);
    out.threshold = 0;
    for (const auto& rec : records) {
        bool by_rank = rec.n_greater < k;
        bool by_floor = floor > 0 && rec.fitness >= floor;
        if (!by_rank && !by_floor) break;
        for (int p : rec.profiles)
            out.entries.emplace_back(index.profiles()[static_cast<std::size_t>(p)].id,
                                     rec.fitness);
        out.threshold = rec.fitness;
        out.lambda += rec.n_equal;
    }
    return out;
}

// Largest threshold t such that at least l of the known filters match the
// required filter with value >= t.
inline Rat threshold_for(const MatchIndex& index, const Filter& required, std::size_t l) {
    if (l == 0) throw ValidationError("l must be positive");
    if (l > index.filters().size())
        throw ValidationError("fewer than " + std::to_string(l) + " filters exist");
    std::vector<Rat> values;
    if (auto idx = index.filter_index(required)) {
        for (std::size_t r = 0; r < index.filters().size(); ++r)
            values.push_back(index.fitness(static_cast<int>(r), *idx));
    } else {
        for (const auto& f : index.filters())
            values.push_back(match_value(index.weighting(), f, required));
    }
    std::sort(values.begin(), values.end(), std::greater<Rat>());
    return values[l - 1];
}

inline MatchIndex add_profile(const MatchIndex& index, const Profile& p) {
    if (index.has_profile(p.id)) throw ValidationError("duplicate profile id '" + p.id + "'");
    MatchIndex out = index;
    Filter f = representing_filter(out.lattice(), p);

    if (!out.filter_index(f)) {
        // Insert the new filter at its canonical position and remap indices.
        auto pos_it = std::lower_bound(out.filters_.begin(), out.filters_.end(), f);
        int pos = static_cast<int>(pos_it - out.filters_.begin());
        out.filters_.insert(pos_it, f);
        out.filter_index_.clear();
        for (std::size_t i = 0; i < out.filters_.size(); ++i)
            out.filter_index_.emplace(out.filters_[i].members, static_cast<int>(i));
        for (auto& ip : out.profiles_)
            if (ip.filter >= pos) ++ip.filter;
        std::vector<Rat> new_row(out.filters_.size()), new_col(out.filters_.size());
        for (std::size_t c = 0; c < out.filters_.size(); ++c)
            new_row[c] = match_value(out.w_, f, out.filters_[c]);
        for (std::size_t r = 0; r < out.filters_.size(); ++r)
            new_col[r] = match_value(out.w_, out.filters_[r], f);
        for (std::size_t r = 0; r < out.fitness_.size(); ++r) {
            auto& row = out.fitness_[r];
            std::size_t cc = static_cast<std::size_t>(r >= static_cast<std::size_t>(pos) ? r + 1 : r);
            row.insert(row.begin() + pos, new_col[cc]);
        }
        std::vector<Rat> row_with_self = new_row;
        out.fitness_.insert(out.fitness_.begin() + pos, std::move(row_with_self));
    }
    IndexProfile ip{p.id, *out.filter_index(f)};
    auto ins = std::lower_bound(out.profiles_.begin(), out.profiles_.end(), ip,
                                [](const IndexProfile& a, const IndexProfile& b) {
                                    return a.id < b.id;
                                });
    out.profiles_.insert(ins, ip);
    // Counts, chains and profile lists are rebuilt from the updated matrix;
    // the expensive part (the matching values) is touched only for the new
    // row and column.
    out.rebuild_columns();
    return out;
}

namespace detail_gap {

struct RankedGroup {
    Rat value;
    std::vector<int> profiles;
};

// Descending fitness groups of arbitrary (profile -> value) data.
inline std::vector<RankedGroup> group_desc(const std::vector<Rat>& per_profile) {
    std::map<Rat, std::vector<int>> groups;
    for (std::size_t i = 0; i < per_profile.size(); ++i)
        groups[per_profile[i]].push_back(static_cast<int>(i));
    std::vector<RankedGroup> out;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it)
        out.push_back({it->first, it->second});
    return out;
}

}  // namespace detail_gap

// Requested profiles (id != p.id) covered by the extended filter: those whose
// column places it among the top k.
inline std::vector<int> gap_coverage(const MatchIndex& index, const std::string& pid,
                                     const Filter& extended, std::size_t k) {
    std::vector<int> covered;
    for (std::size_t c = 0; c < index.filters().size(); ++c) {
        const Filter& g = index.filters()[c];
        Rat v = match_value(index.weighting(), extended, g);
        std::size_t better = 0;
        for (const auto& rec : index.columns()[c]) {
            if (rec.fitness > v)
                better += rec.n_equal;
            else
                break;
        }
        if (better >= k) continue;
        for (std::size_t p = 0; p < index.profiles().size(); ++p)
            if (index.profiles()[p].filter == static_cast<int>(c) &&
                index.profiles()[p].id != pid)
                covered.push_back(static_cast<int>(p));
    }
    std::sort(covered.begin(), covered.end());
    return covered;
}

// (k,l)-gap query: minimal filter extensions placing the profile in the
// top-k answers of at least l requested profiles. Candidates are generated
// from the top-l requested profiles via top-k difference sets, reduced
// concept by concept, verified by re-querying, and filtered to the
// inclusion-minimal ones. `selection_cap` bounds the generation step.
inline GapResult gap_query(const MatchIndex& index, const Profile& p, std::size_t k,
                           std::size_t l, std::size_t selection_cap = 100000) {
    if (k == 0 || l == 0) throw ValidationError("k and l must be positive");
    const Lattice& lat = index.lattice();
    Filter fp = representing_filter(lat, p);
    GapResult out;

    std::vector<int> eligible;  // requested-profile candidates
    for (std::size_t i = 0; i < index.profiles().size(); ++i)
        if (index.profiles()[i].id != p.id) eligible.push_back(static_cast<int>(i));
    if (eligible.size() < l)
        throw ValidationError("only " + std::to_string(eligible.size()) +
                              " requested profiles available, need " + std::to_string(l));

    auto covered_count = [&](const ConceptSet& ext) {
        Filter extended{fp.members | ext};
        return gap_coverage(index, p.id, extended, k);
    };

    // Already good enough: the empty extension is the unique minimal answer.
    if (auto base = covered_count(lat.empty_set()); base.size() >= l) {
        GapCandidate c{lat.empty_set(), {}};
        for (int q : base) c.supporting.push_back(index.profiles()[static_cast<std::size_t>(q)].id);
        out.candidates.push_back(std::move(c));
        return out;
    }

    // Step 1: top-l requested profiles by how well p fits them.
    std::vector<Rat> fit_to(index.profiles().size(), Rat(0));
    for (int i : eligible)
        fit_to[static_cast<std::size_t>(i)] =
            match_value(index.weighting(), fp,
                        index.filters()[static_cast<std::size_t>(
                            index.profiles()[static_cast<std::size_t>(i)].filter)]);
    std::vector<Rat> eligible_values;
    for (int i : eligible) eligible_values.push_back(fit_to[static_cast<std::size_t>(i)]);
    auto groups = detail_gap::group_desc(eligible_values);
    std::vector<int> targets;  // indices into `eligible`
    for (const auto& g : groups) {
        if (targets.size() >= l) break;
        for (int local : g.profiles) targets.push_back(local);
    }

    // Steps 2-3: per requested profile, the difference sets of its top-k
    // members, kept inclusion-minimal.
    std::vector<std::vector<ConceptSet>> diffs;
    for (int local : targets) {
        int prof = eligible[static_cast<std::size_t>(local)];
        int col = index.profiles()[static_cast<std::size_t>(prof)].filter;
        std::vector<ConceptSet> ds;
        for (const auto& rec : index.columns()[static_cast<std::size_t>(col)]) {
            if (rec.n_greater >= k) break;
            for (int rf : rec.row_filters) {
                ConceptSet d = index.filters()[static_cast<std::size_t>(rf)].members - fp.members;
                if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
            }
        }
        // Drop dominated differences.
        std::vector<ConceptSet> minimal;
        for (const auto& d : ds) {
            bool dominated = false;
            for (const auto& e : ds)
                if (e != d && e.subset_of(d)) dominated = true;
            if (!dominated) minimal.push_back(d);
        }
        std::sort(minimal.begin(), minimal.end());
        diffs.push_back(std::move(minimal));
    }

    // Steps 4-5: unions over one difference per l chosen requested profiles.
    std::set<ConceptSet> raw;
    std::size_t selections = 0;
    auto enumerate = [&](auto&& self, std::size_t from, std::size_t chosen,
                         const ConceptSet& acc) -> void {
        if (out.truncated) return;
        if (chosen == l) {
            ++selections;
            if (selections > selection_cap) {
                out.truncated = true;
                return;
            }
            raw.insert(acc);
            return;
        }
        if (from >= diffs.size() || diffs.size() - from < l - chosen) return;
        for (std::size_t i = from; i + (l - chosen) <= diffs.size(); ++i)
            for (const auto& d : diffs[i]) self(self, i + 1, chosen + 1, acc | d);
    };
    enumerate(enumerate, 0, 0, ConceptSet(lat.size()));

    // Verify, shrink concept by concept, keep the inclusion-minimal ones.
    std::set<ConceptSet> reduced;
    for (ConceptSet ext : raw) {
        if (covered_count(ext).size() < l) continue;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t c : ext.members()) {
                ConceptSet trial = ext;
                trial.reset(c);
                if (!lat.is_upward_closed(fp.members | trial)) continue;
                if (covered_count(trial).size() >= l) {
                    ext = trial;
                    changed = true;
                    break;
                }
            }
        }
        reduced.insert(ext);
    }
    std::vector<ConceptSet> minimal;
    for (const auto& e : reduced) {
        bool dominated = false;
        for (const auto& f : reduced)
            if (f != e && f.subset_of(e)) dominated = true;
        if (!dominated) minimal.push_back(e);
    }
    std::sort(minimal.begin(), minimal.end());
    for (const auto& e : minimal) {
        GapCandidate c{e, {}};
        for (int q : covered_count(e))
            c.supporting.push_back(index.profiles()[static_cast<std::size_t>(q)].id);
        out.candidates.push_back(std::move(c));
    }
    return out;
}

}  // namespace latmatch
