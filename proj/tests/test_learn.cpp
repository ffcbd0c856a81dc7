#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latmatch/io.hpp"
#include "latmatch/learn.hpp"
#include "support.hpp"

using namespace latmatch;
using testsupport::data_path;
using testsupport::lattice_from;

namespace {

// Full expert matrix induced by a weighting.
ExpertMatrix induced_matrix(const Lattice& lat, const Weighting& w) {
    ExpertMatrix h(lat);
    auto filters = enumerate_filters(lat);
    for (const auto& f : filters)
        for (const auto& g : filters) h.set(f, g, match_value(w, f, g));
    return h;
}

InequalitySystem system_of(std::size_t n_vars, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& rows) {
    InequalitySystem sys;
    sys.n_vars = n_vars;
    for (const auto& [lhs, rhs] : rows)
        sys.items.push_back(LinearInequality::from_sides(n_vars, lhs, rhs));
    return sys;
}

// The four-inequality worked system over five variables (0-based indices).
const std::vector<std::pair<std::vector<int>, std::vector<int>>> kWorked = {
    {{0, 1}, {2, 3}},
    {{1, 2}, {4}},
    {{3, 4}, {0, 2}},
    {{2}, {1}},
};

}  // namespace

TEST_CASE("relevance partition") {
    Lattice lat = lattice_from(read_file(data_path("fig1.kb")));
    auto of = [&](const std::string& l) { return parse_filter(lat, l); };
    SECTION("candidates with equal intersections share a class") {
        auto classes =
            relevance_partition(lat, of("<C2|C3>"), {of("<C3>"), of("<C4>")});
        REQUIRE(classes.size() == 1);
        CHECK(classes[0].size() == 2);
    }
    SECTION("the full lattice separates all candidates") {
        auto filters = enumerate_filters(lat);
        auto classes = relevance_partition(lat, of("<C5>"), filters);
        CHECK(classes.size() == filters.size());
    }
    SECTION("no candidates, no classes") {
        CHECK(relevance_partition(lat, of("<C1>"), {}).empty());
    }
}

TEST_CASE("plausibility check") {
    Lattice lat = lattice_from(read_file(data_path("fig1.kb")));
    SECTION("matrices induced by a weighting pass") {
        std::mt19937_64 rng(31);
        for (int t = 0; t < 5; ++t) {
            Lattice rl = testsupport::random_lattice(rng, 7, 16);
            Weighting w = testsupport::random_weighting(rng, rl.size());
            CHECK(check_plausibility(induced_matrix(rl, w)).empty());
        }
    }
    SECTION("value below 1 on a contained pair violates constraint (1)") {
        ExpertMatrix h(lat);
        h.set(parse_filter(lat, "<C5>"), parse_filter(lat, "<C2>"), Rat(1, 2));
        auto rep = check_plausibility(h);
        REQUIRE_FALSE(rep.empty());
        CHECK(rep.violations[0].constraint == 1);
    }
    SECTION("worked chain: extending both given profiles must keep the order") {
        // Top A with direct successors B, C, D, E; requested G = {A,B,C,D}.
        std::string doc = "concept A\n";
        for (auto n : {"B", "C", "D", "E"})
            doc += std::string("concept ") + n + "\naxiom " + n + " <= A\n";
        Lattice al = lattice_from(doc);
        auto f = [&](const std::string& l) { return parse_filter(al, l); };
        ExpertMatrix h(al);
        Filter g = f("<B|C|D>");
        h.set(f("<B|E>"), g, Rat(3, 10));
        h.set(f("<C|E>"), g, Rat(4, 10));
        h.set(f("<B|D|E>"), g, Rat(6, 10));
        h.set(f("<C|D|E>"), g, Rat(5, 10));  // breaks the required order
        auto rep = check_plausibility(h);
        REQUIRE_FALSE(rep.empty());
        CHECK(rep.violations[0].constraint == 5);
    }
    SECTION("violations are data, not errors") {
        ExpertMatrix h(lat);
        h.set(parse_filter(lat, "<C5>"), parse_filter(lat, "<C2>"), Rat(1, 2));
        CHECK_NOTHROW(check_plausibility(h));
        CHECK_THROWS_AS(derive_inequalities(h, lat), ValidationError);
    }
}

TEST_CASE("inequality derivation") {
    // Four incomparable skills below a root, synthetic bottom.
    std::string doc = "concept R\n";
    for (auto n : {"P", "Q", "S"}) doc += std::string("concept ") + n + "\naxiom " + n + " <= R\n";
    Lattice lat = lattice_from(doc);  // R top, P,Q,S middle, _bot synthetic
    REQUIRE(lat.size() == 5);
    auto f = [&](const std::string& l) { return parse_filter(lat, l); };
    Filter whole = f("<_bot>");

    SECTION("rule for a shared requested filter") {
        ExpertMatrix h(lat);
        h.set(f("<P>"), whole, Rat(1, 4));
        h.set(f("<Q>"), whole, Rat(1, 2));
        InequalitySystem sys = derive_inequalities(h, lat);
        REQUIRE(sys.items.size() == 1);
        CHECK(render_inequality(sys.items[0], &lat) == "P < Q");
    }
    SECTION("rule for a shared given filter reverses the direction") {
        ExpertMatrix h(lat);
        h.set(f("<R>"), f("<P>"), Rat(1, 4));
        h.set(f("<R>"), f("<Q>"), Rat(1, 2));
        InequalitySystem sys = derive_inequalities(h, lat);
        REQUIRE(sys.items.size() == 1);
        // lower h on <P> means <P> weighs more, so Q < P
        CHECK(render_inequality(sys.items[0], &lat) == "Q < P");
    }
    SECTION("equal values generate nothing") {
        ExpertMatrix h(lat);
        h.set(f("<P>"), whole, Rat(1, 4));
        h.set(f("<Q>"), whole, Rat(1, 4));
        CHECK(derive_inequalities(h, lat).items.empty());
    }
    SECTION("nested intersections cancel away") {
        ExpertMatrix h(lat);
        h.set(f("<P>"), whole, Rat(1, 4));
        h.set(f("<P|Q>"), whole, Rat(1, 2));
        CHECK(derive_inequalities(h, lat).items.empty());
    }
}

TEST_CASE("realisability decision") {
    SECTION("the worked four-inequality system is not realisable") {
        InequalitySystem sys = system_of(5, kWorked);
        RealisabilityResult res = decide_realisability(sys);
        REQUIRE_FALSE(res.realisable);
        CHECK(verify_certificate(sys, res.certificate));
    }
    SECTION("its first three inequalities are realisable") {
        InequalitySystem sys = system_of(5, {kWorked[0], kWorked[1], kWorked[2]});
        RealisabilityResult res = decide_realisability(sys);
        REQUIRE(res.realisable);
        CHECK(verify_witness(sys, res.witness));
        // The published sample point satisfies the subsystem as well.
        std::vector<Rat> sample = {Rat(5, 2), Rat(1), Rat(4), Rat(1), Rat(21, 4)};
        CHECK(verify_witness(sys, sample));
    }
    SECTION("the modified third inequality keeps the system non-realisable") {
        auto rows = kWorked;
        rows[2] = {{3, 4}, {0, 1, 2}};
        InequalitySystem sys = system_of(5, rows);
        RealisabilityResult res = decide_realisability(sys);
        REQUIRE_FALSE(res.realisable);
        CHECK(verify_certificate(sys, res.certificate));
    }
    SECTION("zero-variable contradictions are certified directly") {
        InequalitySystem sys;
        sys.n_vars = 3;
        sys.items.push_back(LinearInequality::from_sides(3, {}, {}));
        RealisabilityResult res = decide_realisability(sys);
        REQUIRE_FALSE(res.realisable);
        CHECK(verify_certificate(sys, res.certificate));
    }
    SECTION("agrees with the margin LP on random systems") {
        std::mt19937_64 rng(41);
        std::uniform_int_distribution<int> nv(2, 6), ni(1, 10), side(0, 2);
        for (int t = 0; t < 200; ++t) {
            std::size_t n = static_cast<std::size_t>(nv(rng));
            InequalitySystem sys;
            sys.n_vars = n;
            int rows = ni(rng);
            for (int r = 0; r < rows; ++r) {
                std::vector<int> lhs, rhs;
                for (std::size_t v = 0; v < n; ++v) {
                    int pick = side(rng);
                    if (pick == 1) lhs.push_back(static_cast<int>(v));
                    if (pick == 2) rhs.push_back(static_cast<int>(v));
                }
                if (lhs.empty() && rhs.empty()) continue;
                sys.items.push_back(LinearInequality::from_sides(n, lhs, rhs));
            }
            RealisabilityResult fm = decide_realisability(sys);
            detail_lp::MarginLp lp = detail_lp::solve_margin_lp(sys, kDefaultMargin);
            CHECK(fm.realisable == lp.feasible);
            if (fm.realisable)
                CHECK(verify_witness(sys, fm.witness));
            else
                CHECK(verify_certificate(sys, fm.certificate));
            if (!lp.feasible) CHECK(verify_certificate(sys, lp.certificate));
        }
    }
    SECTION("adding one variable to both sides never changes the verdict") {
        std::mt19937_64 rng(43);
        std::uniform_int_distribution<int> nv(3, 6), ni(2, 8), side(0, 2);
        std::uniform_int_distribution<std::size_t> anyvar(0, 5);
        for (int t = 0; t < 100; ++t) {
            std::size_t n = static_cast<std::size_t>(nv(rng));
            InequalitySystem sys, padded;
            sys.n_vars = padded.n_vars = n;
            int rows = ni(rng);
            for (int r = 0; r < rows; ++r) {
                std::vector<int> lhs, rhs;
                for (std::size_t v = 0; v < n; ++v) {
                    int pick = side(rng);
                    if (pick == 1) lhs.push_back(static_cast<int>(v));
                    if (pick == 2) rhs.push_back(static_cast<int>(v));
                }
                if (lhs.empty() || rhs.empty()) continue;
                sys.items.push_back(LinearInequality::from_sides(n, lhs, rhs));
                int extra = static_cast<int>(anyvar(rng) % n);
                std::vector<int> plhs = lhs, prhs = rhs;
                plhs.push_back(extra);
                prhs.push_back(extra);
                padded.items.push_back(LinearInequality::from_sides(n, plhs, prhs));
            }
            if (sys.items.empty()) continue;
            // The padded variable cancels, so the systems coincide term-wise
            // and the verdicts agree.
            CHECK(sys.items == padded.items);
            CHECK(decide_realisability(sys).realisable ==
                  decide_realisability(padded).realisable);
        }
    }
}

TEST_CASE("weight extraction") {
    SECTION("a single constraint orders the two concepts") {
        Lattice lat = testsupport::middle_lattice(2, {});
        InequalitySystem sys = system_of(2, {{{0}, {1}}});
        Weighting w = extract_weights(sys, lat);
        CHECK(w.of(1) < w.of(2));  // concept ids 1 and 2 are the middle pair
        Rat sum = 0;
        for (std::size_t i = 0; i < lat.size(); ++i) {
            CHECK(w.of(static_cast<ConceptId>(i)) > 0);
            sum += w.of(static_cast<ConceptId>(i));
        }
        CHECK(sum == 1);
    }
    SECTION("an empty system gives the uniform weighting") {
        Lattice lat = testsupport::middle_lattice(3, {});
        InequalitySystem sys;
        sys.n_vars = 3;
        Weighting w = extract_weights(sys, lat);
        for (std::size_t i = 0; i < lat.size(); ++i)
            CHECK(w.of(static_cast<ConceptId>(i)) == Rat(1, 5));
    }
    SECTION("infeasible systems raise with a verifiable certificate") {
        Lattice lat = testsupport::middle_lattice(2, {});
        InequalitySystem sys = system_of(2, {{{0}, {1}}, {{1}, {0}}});
        try {
            extract_weights(sys, lat);
            FAIL("expected InfeasibleSystem");
        } catch (const InfeasibleSystem& e) {
            CHECK(verify_certificate(sys, e.certificate));
        }
    }
}

TEST_CASE("learning round trip") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 10; ++t) {
        Lattice lat = testsupport::random_lattice(rng, 8, 24);
        Weighting hidden = testsupport::random_weighting(rng, lat.size());
        ExpertMatrix h = induced_matrix(lat, hidden);
        LearnResult res = learn_weights(h, lat);
        REQUIRE(res.plausibility.empty());
        REQUIRE(res.realisability.realisable);
        REQUIRE(res.weights.has_value());
        CHECK(res.ranking.empty());
        CHECK(verify_witness(res.system, res.realisability.witness));
    }
}

TEST_CASE("ranking verification flags unseparated pairs") {
    Lattice lat = lattice_from(read_file(data_path("fig1.kb")));
    ExpertMatrix h(lat);
    Filter whole = parse_filter(lat, "<C5>");
    h.set(parse_filter(lat, "<C2>"), whole, Rat(2, 5));
    h.set(parse_filter(lat, "<C3>"), whole, Rat(3, 10));
    Weighting equal = Weighting::uniform(lat.size());
    RankingReport rep = verify_ranking(equal, h);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].condition == 1);
}

TEST_CASE("expert matrix io") {
    Lattice lat = lattice_from(read_file(data_path("five.kb")));
    ExpertMatrix h = load_expert_matrix(read_file(data_path("expert_bad.csv")), lat);
    CHECK(h.entry_count() == 8);
    CHECK_THROWS_AS(load_expert_matrix("nope\n", lat), ParseError);
    CHECK_THROWS_AS(load_expert_matrix("given,requested,value\n<x1>,<x2>,2\n", lat), ParseError);
    SECTION("the shipped sparse matrix passes plausibility yet is non-realisable") {
        LearnResult res = learn_weights(h, lat);
        CHECK(res.plausibility.empty());
        REQUIRE_FALSE(res.realisability.realisable);
        CHECK(verify_certificate(res.system, res.realisability.certificate));
        // The four worked inequalities all appear in the derived system.
        for (const auto& [lhs, rhs] : kWorked) {
            LinearInequality want = LinearInequality::from_sides(5, lhs, rhs);
            CHECK(std::find(res.system.items.begin(), res.system.items.end(), want) !=
                  res.system.items.end());
        }
    }
}
