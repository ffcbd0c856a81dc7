#include <catch2/catch_amalgamated.hpp>

#include "latmatch/io.hpp"
#include "latmatch/lattice.hpp"
#include "latmatch/profile.hpp"
#include "support.hpp"

using namespace latmatch;
using testsupport::data_path;
using testsupport::lattice_from;

TEST_CASE("knowledge base parsing") {
    SECTION("demo document has 5 concepts and 5 axioms") {
        TBoxDocument doc = parse_knowledge_base(read_file(data_path("fig1.kb")));
        CHECK(doc.concepts.size() == 5);
        CHECK(doc.axioms.size() == 5);
    }
    SECTION("empty document is rejected") {
        CHECK_THROWS_WITH(parse_knowledge_base(""), Catch::Matchers::ContainsSubstring("no concepts"));
    }
    SECTION("undeclared reference is reported with its name") {
        CHECK_THROWS_WITH(parse_knowledge_base("concept Y\naxiom X <= Y\n"),
                          Catch::Matchers::ContainsSubstring("'X'"));
    }
    SECTION("duplicate concept") {
        CHECK_THROWS_AS(parse_knowledge_base("concept A\nconcept A\n"), ParseError);
    }
    SECTION("declaration order does not matter") {
        CHECK_NOTHROW(parse_knowledge_base("axiom A <= B\nconcept A\nconcept B\n"));
    }
    SECTION("reserved names are rejected") {
        CHECK_THROWS_AS(parse_knowledge_base("concept _top\n"), ParseError);
    }
}

TEST_CASE("lattice construction") {
    Lattice lat = lattice_from(read_file(data_path("fig1.kb")));

    SECTION("five elements, C1 top, C5 bottom, C2 parallel C3, C4 below C3") {
        REQUIRE(lat.size() == 5);
        CHECK(lat.name(lat.top()) == "C1");
        CHECK(lat.name(lat.bottom()) == "C5");
        ConceptId c2 = lat.id_of("C2"), c3 = lat.id_of("C3"), c4 = lat.id_of("C4");
        CHECK_FALSE(lat.leq(c2, c3));
        CHECK_FALSE(lat.leq(c3, c2));
        CHECK(lat.leq(c4, c3));
    }
    SECTION("single concept gives the one-element lattice") {
        Lattice one = lattice_from("concept A\n");
        CHECK(one.size() == 1);
        CHECK(one.top() == one.bottom());
    }
    SECTION("cycles are rejected") {
        CHECK_THROWS_WITH(lattice_from("concept A\nconcept B\naxiom A <= B\naxiom B <= A\n"),
                          Catch::Matchers::ContainsSubstring("cycle"));
    }
    SECTION("non-lattice posets are rejected with a witness pair") {
        // Two maximal and two minimal middle elements in a 2x2 crown.
        std::string doc = "concept A\nconcept B\nconcept C\nconcept D\n";
        doc += "axiom A <= C\naxiom A <= D\naxiom B <= C\naxiom B <= D\n";
        CHECK_THROWS_WITH(lattice_from(doc), Catch::Matchers::ContainsSubstring("not a lattice"));
    }
    SECTION("synthetic bounds appear only when needed") {
        Lattice two = lattice_from("concept A\nconcept B\n");
        REQUIRE(two.size() == 4);
        CHECK(two.name(two.top()) == "_top");
        CHECK(two.name(two.bottom()) == "_bot");
        CHECK(two.is_synthetic(two.top()));
        CHECK_FALSE(lat.is_synthetic(lat.top()));
    }
    SECTION("deterministic under declaration order") {
        std::string shuffled =
            "axiom C5 <= C4\nconcept C5\nconcept C3\naxiom C4 <= C3\nconcept C1\n"
            "concept C4\naxiom C3 <= C1\nconcept C2\naxiom C2 <= C1\naxiom C5 <= C2\n";
        Lattice lat2 = lattice_from(shuffled);
        REQUIRE(lat2.size() == lat.size());
        for (std::size_t i = 0; i < lat.size(); ++i) {
            CHECK(lat2.name(static_cast<ConceptId>(i)) == lat.name(static_cast<ConceptId>(i)));
            for (std::size_t j = 0; j < lat.size(); ++j)
                CHECK(lat2.leq(static_cast<ConceptId>(i), static_cast<ConceptId>(j)) ==
                      lat.leq(static_cast<ConceptId>(i), static_cast<ConceptId>(j)));
        }
    }
    SECTION("round trips through its document form") {
        Lattice lat2 = lattice_from(lat.to_document());
        REQUIRE(lat2.size() == lat.size());
        for (std::size_t i = 0; i < lat.size(); ++i)
            CHECK(lat2.name(static_cast<ConceptId>(i)) == lat.name(static_cast<ConceptId>(i)));
    }
}

TEST_CASE("blow-up expansion") {
    std::string doc =
        "concept skill\nconcept programming\naxiom programming <= skill\n"
        "blowup programming experience { 1, 2, 3 }\n";
    Lattice lat = lattice_from(doc);

    SECTION("one concept per value, later values more specific") {
        ConceptId p = lat.id_of("programming");
        ConceptId e1 = lat.id_of("programming.experience.1");
        ConceptId e2 = lat.id_of("programming.experience.2");
        ConceptId e3 = lat.id_of("programming.experience.3");
        CHECK(lat.leq(e3, e2));
        CHECK(lat.leq(e2, e1));
        CHECK(lat.leq(e1, p));
        CHECK_FALSE(lat.leq(e1, e2));
    }
    SECTION("expansion equals the hand-expanded axiom set") {
        std::string hand =
            "concept skill\nconcept programming\naxiom programming <= skill\n"
            "concept programming.experience.1\nconcept programming.experience.2\n"
            "concept programming.experience.3\n"
            "axiom programming.experience.1 <= programming\n"
            "axiom programming.experience.2 <= programming.experience.1\n"
            "axiom programming.experience.3 <= programming.experience.2\n";
        Lattice expanded = lattice_from(hand);
        REQUIRE(expanded.size() == lat.size());
        for (std::size_t i = 0; i < lat.size(); ++i)
            for (std::size_t j = 0; j < lat.size(); ++j)
                CHECK(lat.leq(static_cast<ConceptId>(i), static_cast<ConceptId>(j)) ==
                      expanded.leq(lat.id_of(expanded.name(static_cast<ConceptId>(i))),
                                   lat.id_of(expanded.name(static_cast<ConceptId>(j)))));
    }
    SECTION("two roles give independent chains") {
        std::string two =
            "concept programming\n"
            "blowup programming experience { 1, 2 }\nblowup programming area { web, hpc }\n";
        Lattice l2 = lattice_from(two);
        CHECK_FALSE(l2.leq(l2.id_of("programming.experience.2"), l2.id_of("programming.area.web")));
        CHECK_FALSE(l2.leq(l2.id_of("programming.area.web"), l2.id_of("programming.experience.2")));
    }
}

TEST_CASE("filters") {
    Lattice lat = lattice_from(read_file(data_path("fig1.kb")));
    auto close = [&](std::vector<std::string> names) {
        std::vector<ConceptId> ids;
        for (auto& n : names) ids.push_back(lat.id_of(n));
        return filter_close(lat, ids);
    };

    SECTION("closure of C4 is {C1, C3, C4}") {
        Filter f = close({"C4"});
        CHECK(f.count() == 3);
        CHECK(f.members.test(static_cast<std::size_t>(lat.id_of("C1"))));
        CHECK(f.members.test(static_cast<std::size_t>(lat.id_of("C3"))));
        CHECK(f.members.test(static_cast<std::size_t>(lat.id_of("C4"))));
    }
    SECTION("closure of the top is itself") {
        CHECK(close({"C1"}).count() == 1);
    }
    SECTION("closure of {C2, C4} has four members") {
        CHECK(close({"C2", "C4"}).count() == 4);
    }
    SECTION("empty generator set is rejected") {
        CHECK_THROWS_AS(filter_close(lat, ConceptSet(lat.size())), ValidationError);
    }
    SECTION("the demo lattice has exactly 7 filters") {
        auto filters = enumerate_filters(lat);
        CHECK(filters.size() == 7);
        for (const auto& f : filters) CHECK(lat.is_upward_closed(f.members));
    }
    SECTION("labels use minimal generators, sorted") {
        CHECK(filter_label(lat, close({"C4", "C2"})) == "<C2|C4>");
        CHECK(filter_label(lat, close({"C1"})) == "<C1>");
        Filter parsed = parse_filter(lat, "<C2|C4>");
        CHECK(parsed == close({"C2", "C4"}));
    }
    SECTION("closure is the smallest filter containing the generators") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 30; ++trial) {
            Lattice rl = testsupport::random_lattice(rng, 8);
            Filter f = testsupport::random_filter(rng, rl);
            auto filters = enumerate_filters(rl);
            ConceptSet gens(rl.size());
            f.members.for_each([&](std::size_t c) { gens.set(c); });
            for (const auto& g : filters)
                if (gens.subset_of(g.members)) CHECK(f.members.subset_of(g.members));
        }
    }
}

TEST_CASE("profiles") {
    Lattice lat = lattice_from(read_file(data_path("dexa.kb")));
    auto profiles = parse_profiles(read_file(data_path("dexa.profiles")), lat);
    REQUIRE(profiles.size() == 4);
    CHECK(profiles[0].id == "B");
    CHECK(representing_filter(lat, profiles[0]).count() == 3);
    CHECK_THROWS_AS(parse_profiles("profile P : Nope\n", lat), ParseError);
    CHECK_THROWS_AS(parse_profiles("profile P : C1\nprofile P : C2\n", lat), ParseError);
}
