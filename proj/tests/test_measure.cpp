#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latmatch/io.hpp"
#include "latmatch/measure.hpp"
#include "support.hpp"

using namespace latmatch;
using testsupport::data_path;
using testsupport::lattice_from;

namespace {

struct Fig1 {
    Lattice lat = lattice_from(read_file(data_path("fig1.kb")));
    Weighting w = load_weights(read_file(data_path("fig1.weights")), lat);
    Filter of(const std::string& label) const { return parse_filter(lat, label); }
};

const std::vector<std::string> kFig1Filters = {"<C1>", "<C2>",    "<C3>", "<C2|C3>",
                                               "<C4>", "<C2|C4>", "<C5>"};

// Row label is the given filter, column label the requested one.
const char* kTable1[7][7] = {
    {"1", "1/4", "1/3", "1/6", "1/6", "1/9", "1/10"},
    {"1", "1", "1/3", "2/3", "1/6", "4/9", "2/5"},
    {"1", "1/4", "1", "1/2", "1/2", "1/3", "3/10"},
    {"1", "1", "1", "1", "1/2", "2/3", "3/5"},
    {"1", "1/4", "1", "1/2", "1", "2/3", "3/5"},
    {"1", "1", "1", "1", "1", "1", "9/10"},
    {"1", "1", "1", "1", "1", "1", "1"},
};

}  // namespace

TEST_CASE("weighting") {
    Fig1 fix;
    SECTION("weight of the full lattice is 1") {
        CHECK(fix.w.weight_of(fix.lat.full_set()) == 1);
    }
    SECTION("empty set weighs 0") { CHECK(fix.w.weight_of(fix.lat.empty_set()) == 0); }
    SECTION("{C1, C2} weighs 2/5") {
        ConceptSet s(fix.lat.size());
        s.set(static_cast<std::size_t>(fix.lat.id_of("C1")));
        s.set(static_cast<std::size_t>(fix.lat.id_of("C2")));
        CHECK(fix.w.weight_of(s) == Rat(2, 5));
    }
    SECTION("loader rejects non-positive weights") {
        CHECK_THROWS_AS(load_weights("weight C1 0\n", fix.lat), ParseError);
    }
    SECTION("loader rejects missing concepts") {
        CHECK_THROWS_AS(load_weights("weight C1 1\n", fix.lat), ValidationError);
    }
    SECTION("sum other than 1 needs the normalize flag") {
        std::string text;
        for (auto n : {"C1", "C2", "C3", "C4", "C5"}) text += std::string("weight ") + n + " 2\n";
        CHECK_THROWS_AS(load_weights(text, fix.lat, false), ValidationError);
        Weighting w = load_weights(text, fix.lat, true);
        CHECK(w.of(0) == Rat(1, 5));
    }
    SECTION("duplicate weight line is rejected") {
        CHECK_THROWS_AS(load_weights("weight C1 1/2\nweight C1 1/2\n", fix.lat), ParseError);
    }
}

TEST_CASE("matching measure reproduces the demo table") {
    Fig1 fix;
    for (std::size_t r = 0; r < 7; ++r)
        for (std::size_t c = 0; c < 7; ++c) {
            Rat got = match_value(fix.w, fix.of(kFig1Filters[r]), fix.of(kFig1Filters[c]));
            INFO("row " << kFig1Filters[r] << " col " << kFig1Filters[c]);
            CHECK(got == parse_rational(kTable1[r][c]));
        }
}

TEST_CASE("matching measure properties") {
    Fig1 fix;
    SECTION("identity on every filter") {
        for (const auto& f : enumerate_filters(fix.lat))
            CHECK(match_value(fix.w, f, f) == 1);
    }
    SECTION("1 exactly when requested is contained in given") {
        auto filters = enumerate_filters(fix.lat);
        for (const auto& f : filters)
            for (const auto& g : filters)
                CHECK((match_value(fix.w, f, g) == 1) == g.subset_of(f));
    }
    SECTION("equal weights give the cardinality measure") {
        std::mt19937_64 rng(11);
        for (int t = 0; t < 100; ++t) {
            Lattice lat = testsupport::random_lattice(rng, 8);
            Weighting w = Weighting::uniform(lat.size());
            Filter f = testsupport::random_filter(rng, lat);
            Filter g = testsupport::random_filter(rng, lat);
            Rat expect(static_cast<long>((f.members & g.members).count()),
                       static_cast<long>(g.members.count()));
            expect.canonicalize();
            CHECK(match_value(w, f, g) == expect);
        }
    }
    SECTION("over-qualification witness") {
        Filter g = fix.of("<C2|C3>");
        CHECK(match_value(fix.w, fix.of("<C3>"), g) == Rat(1, 2));
        CHECK(match_value(fix.w, fix.of("<C4>"), g) == Rat(1, 2));
        CHECK(match_value(fix.w, g, fix.of("<C3>")) == 1);
        CHECK(match_value(fix.w, g, fix.of("<C4>")) == Rat(1, 2));
    }
}

TEST_CASE("eight measure properties on random draws") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        Lattice lat = testsupport::random_lattice(rng, 8);
        Weighting w = testsupport::random_weighting(rng, lat.size());
        Filter f = testsupport::random_filter(rng, lat);
        Filter f1 = testsupport::random_filter(rng, lat);
        Filter f2 = testsupport::random_filter(rng, lat);
        Filter g = testsupport::random_filter(rng, lat);
        auto mu = [&](const Filter& a, const Filter& b) { return match_value(w, a, b); };
        // (1)
        if (g.subset_of(f)) CHECK(mu(f, g) == 1);
        // (2)
        CHECK(mu(f, g) == mu(Filter{f.members & g.members}, g));
        // (3)
        (g.members - f.members).for_each([&](std::size_t c) {
            ConceptSet reduced = g.members;
            reduced.reset(c);
            if (reduced.any() && lat.is_upward_closed(reduced))
                CHECK(mu(f, g) < mu(f, Filter{reduced}));
        });
        for (std::size_t c = 0; c < lat.size(); ++c) {
            ConceptSet fc = f.members, gc = g.members;
            fc.set(c);
            gc.set(c);
            if (!lat.is_upward_closed(fc) || !lat.is_upward_closed(gc)) continue;
            // (4)
            CHECK(mu(f, g) <= mu(Filter{fc}, Filter{gc}));
        }
        // (5)
        if (mu(f1, g) < mu(f2, g)) {
            ((g.members - f1.members) - f2.members).for_each([&](std::size_t c) {
                ConceptSet a = f1.members, b = f2.members;
                a.set(c);
                b.set(c);
                if (lat.is_upward_closed(a) && lat.is_upward_closed(b))
                    CHECK(mu(Filter{a}, g) < mu(Filter{b}, g));
            });
        }
        // (6)
        if ((f.members & f1.members & g.members) == (f.members & f2.members & g.members)) {
            Filter i1{f1.members & g.members}, i2{f2.members & g.members};
            CHECK((mu(f1, g) > mu(f2, g)) == (mu(f, i1) < mu(f, i2)));
        }
        // (7)
        {
            Filter g1 = testsupport::random_filter(rng, lat);
            Filter g2 = testsupport::random_filter(rng, lat);
            if ((f.members & g1.members) == (f.members & g2.members) && mu(f, g1) < mu(f, g2)) {
                (g1.members & g2.members).for_each([&](std::size_t c) {
                    ConceptSet fc = f.members;
                    fc.set(c);
                    if (lat.is_upward_closed(fc))
                        CHECK(mu(Filter{fc}, g1) < mu(Filter{fc}, g2));
                });
            }
        }
        // (8)
        {
            Filter g2 = testsupport::random_filter(rng, lat);
            if ((g2.members & f1.members) == (g.members & f1.members) &&
                (g2.members & f2.members) == (g.members & f2.members) && mu(f1, g) < mu(f2, g))
                CHECK(mu(f1, g2) < mu(f2, g2));
        }
    }
}

TEST_CASE("matching value terms") {
    Fig1 fix;
    SECTION("term of a strict pair") {
        MatchValueTerm t = mvt_of(fix.lat, fix.of("<C2>"), fix.of("<C2|C3>"));
        CHECK_FALSE(t.one);
        CHECK(t.numerator == fix.of("<C2>").members);
        CHECK(t.denominator == fix.of("<C2|C3>").members);
    }
    SECTION("requested inside given collapses to 1") {
        CHECK(mvt_of(fix.lat, fix.of("<C5>"), fix.of("<C1>")).one);
    }
    SECTION("bottom term") {
        MatchValueTerm t = mvt_of(fix.lat, fix.of("<C1>"), fix.of("<C5>"));
        CHECK(t == mvt_bottom(fix.lat));
        for (const auto& u : enumerate_mvts(fix.lat, enumerate_filters(fix.lat)))
            CHECK(mvt_leq(t, u));
    }
    SECTION("the demo lattice has 19 terms") {
        CHECK(enumerate_mvts(fix.lat, enumerate_filters(fix.lat)).size() == 19);
    }
}

TEST_CASE("term order") {
    Fig1 fix;
    auto term = [&](const std::string& f, const std::string& g) {
        return mvt_of(fix.lat, fix.of(f), fix.of(g));
    };
    SECTION("a/(a+b+c) <= (a+c)/(a+b+c)") {
        CHECK(mvt_leq(term("<C1>", "<C2|C3>"), term("<C3>", "<C2|C3>")));
        CHECK_FALSE(mvt_leq(term("<C3>", "<C2|C3>"), term("<C1>", "<C2|C3>")));
    }
    SECTION("a/(a+b) and a/(a+c) are incomparable") {
        MatchValueTerm v1 = term("<C1>", "<C2>");
        MatchValueTerm v2 = term("<C1>", "<C3>");
        CHECK_FALSE(mvt_leq(v1, v2));
        CHECK_FALSE(mvt_leq(v2, v1));
    }
    SECTION("reflexive") {
        for (const auto& v : enumerate_mvts(fix.lat, enumerate_filters(fix.lat)))
            CHECK(mvt_leq(v, v));
    }
    SECTION("sampling never contradicts the closed form") {
        auto mvts = enumerate_mvts(fix.lat, enumerate_filters(fix.lat));
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<long> weight(1, 1000);
        bool ok = true;
        for (int s = 0; s < 200 && ok; ++s) {
            std::vector<Rat> w;
            for (std::size_t i = 0; i < fix.lat.size(); ++i) w.push_back(Rat(weight(rng)));
            Weighting sub = Weighting::from_values(w, true);
            for (const auto& v1 : mvts)
                for (const auto& v2 : mvts)
                    if (mvt_leq(v1, v2) && !(mvt_evaluate(sub, v1) <= mvt_evaluate(sub, v2)))
                        ok = false;
        }
        CHECK(ok);
    }
}

TEST_CASE("term join and meet") {
    Fig1 fix;
    auto term = [&](const std::string& f, const std::string& g) {
        return mvt_of(fix.lat, fix.of(f), fix.of(g));
    };
    SECTION("join of (a+b)/(a+b+c) and (a+c)/(a+b+c) is 1") {
        CHECK(mvt_join(fix.lat, term("<C2>", "<C2|C3>"), term("<C3>", "<C2|C3>")).one);
    }
    SECTION("meet of (a+b)/(a+b+c) and (a+c)/(a+c+d) is a/(a+c+d)") {
        MatchValueTerm m = mvt_meet(fix.lat, term("<C2>", "<C2|C3>"), term("<C3>", "<C4>"));
        CHECK(m == term("<C1>", "<C4>"));
    }
    SECTION("lattice identities") {
        for (const auto& v : enumerate_mvts(fix.lat, enumerate_filters(fix.lat))) {
            CHECK(mvt_join(fix.lat, v, mvt_one(fix.lat)).one);
            CHECK(mvt_meet(fix.lat, v, v) == v);
            CHECK(mvt_join(fix.lat, v, v) == v);
        }
    }
    SECTION("agree with brute force over all lattices with up to 5 elements") {
        for (const Lattice& lat : testsupport::all_small_lattices(5)) {
            auto filters = enumerate_filters(lat);
            auto mvts = enumerate_mvts(lat, filters);
            for (const auto& v1 : mvts)
                for (const auto& v2 : mvts) {
                    MatchValueTerm best_join = mvt_one(lat);
                    bool have_join = false;
                    for (const auto& u : mvts) {
                        if (!mvt_leq(v1, u) || !mvt_leq(v2, u)) continue;
                        if (!have_join || mvt_leq(u, best_join)) best_join = u, have_join = true;
                    }
                    MatchValueTerm best_meet = mvt_bottom(lat);
                    bool have_meet = false;
                    for (const auto& u : mvts) {
                        if (!mvt_leq(u, v1) || !mvt_leq(u, v2)) continue;
                        if (!have_meet || mvt_leq(best_meet, u)) best_meet = u, have_meet = true;
                    }
                    REQUIRE(have_join);
                    REQUIRE(have_meet);
                    CHECK(mvt_join(lat, v1, v2) == best_join);
                    CHECK(mvt_meet(lat, v1, v2) == best_meet);
                }
        }
    }
}

TEST_CASE("admissible relations") {
    Fig1 fix;
    auto filters = enumerate_filters(fix.lat);

    SECTION("containment pairs alone give the image {1}") {
        AdmissibleRelation r;
        for (const auto& f : filters)
            for (const auto& g : filters)
                if (g.subset_of(f)) r.pairs.emplace_back(f, g);
        auto image = admissible_mvt_filter(fix.lat, r, filters);
        REQUIRE(image.size() == 1);
        CHECK(image[0].one);
    }
    SECTION("the full relation gives the whole term set") {
        AdmissibleRelation r;
        for (const auto& f : filters)
            for (const auto& g : filters) r.pairs.emplace_back(f, g);
        CHECK(admissible_mvt_filter(fix.lat, r, filters).size() == 19);
    }
    SECTION("missing containment pair is condition (1)") {
        AdmissibleRelation r;  // empty
        auto v = check_admissible(fix.lat, r, filters);
        REQUIRE(v.has_value());
        CHECK(v->condition == 1);
    }
    SECTION("random admissible closures have upward closed images") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 5; ++trial) {
            AdmissibleRelation r;
            for (const auto& f : filters)
                for (const auto& g : filters)
                    if (g.subset_of(f)) r.pairs.emplace_back(f, g);
            std::uniform_int_distribution<std::size_t> pick(0, filters.size() - 1);
            r.pairs.emplace_back(filters[pick(rng)], filters[pick(rng)]);
            // Close under conditions (2) and (3) to a fixpoint.
            bool grew = true;
            while (grew) {
                grew = false;
                auto snapshot = r.pairs;
                for (const auto& [f, g] : snapshot) {
                    (g.members - f.members).for_each([&](std::size_t c) {
                        ConceptSet reduced = g.members;
                        reduced.reset(c);
                        if (reduced.none() || !fix.lat.is_upward_closed(reduced)) return;
                        if (!r.contains(f, Filter{reduced})) {
                            r.pairs.emplace_back(f, Filter{reduced});
                            grew = true;
                        }
                    });
                    for (std::size_t c = 0; c < fix.lat.size(); ++c) {
                        ConceptSet fc = f.members, gc = g.members;
                        fc.set(c);
                        gc.set(c);
                        if (!fix.lat.is_upward_closed(fc) || !fix.lat.is_upward_closed(gc))
                            continue;
                        if (!r.contains(Filter{fc}, Filter{gc})) {
                            r.pairs.emplace_back(Filter{fc}, Filter{gc});
                            grew = true;
                        }
                    }
                }
            }
            CHECK_NOTHROW(admissible_mvt_filter(fix.lat, r, filters));
        }
    }
}
