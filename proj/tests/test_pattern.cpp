#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "aqs/oracles.hpp"
#include "aqs/pattern.hpp"

using namespace aqs;

namespace {

std::vector<VertexId> orbit_of(const std::vector<std::vector<VertexId>>& orbits,
                               const VertexId& v) {
    for (const auto& orbit : orbits)
        if (std::find(orbit.begin(), orbit.end(), v) != orbit.end()) return orbit;
    return {};
}

}  // namespace

TEST_CASE("interior lattice vertices share a code") {
    const InfiniteGraph z = lattice_graph(1);
    const PatternCode a = canonical_code(ball(z, vertex(0), 1));
    const PatternCode b = canonical_code(ball(z, vertex(17), 1));
    REQUIRE(a == b);
    REQUIRE(a.radius == 1);
}

TEST_CASE("leaf and backbone patterns differ") {
    const InfiniteGraph g = pendant_chain(2);
    const PatternCode leaf = canonical_code(ball(g, pendant_vertex(0, 1), 1));
    const PatternCode backbone = canonical_code(ball(g, vertex(0), 1));
    REQUIRE(leaf != backbone);
}

TEST_CASE("codes are complete against the brute-force oracle") {
    const auto corpus = make_rooted_corpus(555, 60, 8, true);
    std::vector<PatternCode> codes;
    for (const auto& b : corpus) codes.push_back(canonical_code(b));
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = i + 1; j < corpus.size(); ++j)
            REQUIRE((codes[i] == codes[j]) == brute_force_rooted_iso(corpus[i], corpus[j]));
}

TEST_CASE("code hex round trip") {
    const InfiniteGraph g = pendant_chain(3);
    const PatternCode code = canonical_code(ball(g, vertex(2), 2));
    const PatternCode back = PatternCode::from_hex(code.hex());
    REQUIRE(back == code);
    REQUIRE(back.radius == 2);
}

TEST_CASE("ball size guard in canonicalization") {
    const InfiniteGraph z2 = lattice_graph(2);
    REQUIRE(ball(z2, vertex(0, 0), 6).size() == 85);
    REQUIRE_THROWS_AS(canonical_code(ball(z2, vertex(0, 0), 6)), LimitExceeded);
    CanonLimits wide;
    wide.max_vertices = 90;
    REQUIRE_NOTHROW(canonical_code(ball(z2, vertex(0, 0), 6), wide));
}

TEST_CASE("root-fixing orbits on the line") {
    const InfiniteGraph z = lattice_graph(1);
    const auto orbits = root_fixing_orbits(ball(z, vertex(0), 1));
    REQUIRE(orbits.size() == 2);
    REQUIRE(orbit_of(orbits, vertex(0)) == std::vector<VertexId>{vertex(0)});
    REQUIRE(orbit_of(orbits, vertex(-1)) == std::vector<VertexId>{vertex(-1), vertex(1)});
}

TEST_CASE("pendant-chain orbits at radius 1 and 2") {
    const InfiniteGraph g = pendant_chain(2);
    // The radius-1 ball at a backbone vertex is a 4-satellite star: all four
    // satellites form one orbit, leaves included.
    const auto o1 = root_fixing_orbits(ball(g, vertex(0), 1));
    REQUIRE(o1.size() == 2);
    REQUIRE(orbit_of(o1, pendant_vertex(0, 1)).size() == 4);
    REQUIRE(orbit_of(o1, pendant_vertex(0, 1)) == orbit_of(o1, vertex(1)));

    // At radius 2 the leaves of the root separate from the backbone neighbors.
    const auto o2 = root_fixing_orbits(ball(g, vertex(0), 2));
    REQUIRE(orbit_of(o2, pendant_vertex(0, 1)) ==
            std::vector<VertexId>{pendant_vertex(0, 1), pendant_vertex(0, 2)});
    REQUIRE(orbit_of(o2, vertex(-1)) == std::vector<VertexId>{vertex(-1), vertex(1)});
}

TEST_CASE("asymmetric rooted graph has singleton orbits") {
    // Root with three branches of distinct lengths.
    RootedBall b;
    b.radius = 8;
    for (int i = 0; i < 7; ++i) b.verts.push_back(vertex(i));
    b.finalize_edges({{0, 1}, {0, 2}, {2, 3}, {0, 4}, {4, 5}, {5, 6}});
    b.dist = {0, 1, 1, 2, 1, 2, 3};
    b.color.assign(7, 0);
    const auto orbits = root_fixing_orbits(b);
    REQUIRE(orbits.size() == 7);
}

TEST_CASE("orbits agree with the exhaustive automorphism oracle") {
    const auto corpus = make_rooted_corpus(808, 25, 7, true);
    for (const auto& b : corpus) {
        const auto canon = canonicalize(b);
        const auto reference = brute_force_orbit_ids(b);
        for (std::size_t u = 0; u < b.size(); ++u)
            for (std::size_t v = 0; v < b.size(); ++v)
                REQUIRE((canon.orbit_id[u] == canon.orbit_id[v]) ==
                        (reference[u] == reference[v]));
    }
    const InfiniteGraph dec = decorated_lattice(make_rational(1, 2), 271828);
    for (int a = -3; a <= 3; ++a)
        for (int bb = -3; bb <= 3; ++bb) {
            const RootedBall ballv = ball(dec, vertex(a, bb), 1);
            const auto canon = canonicalize(ballv);
            const auto reference = brute_force_orbit_ids(ballv);
            for (std::size_t u = 0; u < ballv.size(); ++u)
                for (std::size_t v = 0; v < ballv.size(); ++v)
                    REQUIRE((canon.orbit_id[u] == canon.orbit_id[v]) ==
                            (reference[u] == reference[v]));
        }
}

TEST_CASE("census partitions windows") {
    const InfiniteGraph z = lattice_graph(1);
    const Window q = folner_window(z, 12);
    const PatternCensus census = pattern_census(z, q, 1);
    REQUIRE(census.classes.size() == 1);
    REQUIRE(census.classes.begin()->second.count == q.size());

    const InfiniteGraph g = pendant_chain(2);
    const Window qp = folner_window(g, 10);
    REQUIRE(pattern_census(g, qp, 0).classes.size() == 1);
    const PatternCensus c1 = pattern_census(g, qp, 1);
    REQUIRE(c1.classes.size() == 2);
    std::multiset<std::size_t> counts;
    for (const auto& [code, e] : c1.classes) counts.insert(e.count);
    REQUIRE(counts == std::multiset<std::size_t>{21, 42});

    for (int r : {0, 1, 2}) {
        for (int n : {4, 9}) {
            const Window w = folner_window(g, n);
            const PatternCensus c = pattern_census(g, w, r);
            std::size_t total = 0;
            for (const auto& [code, e] : c.classes) total += e.count;
            REQUIRE(total == w.size());
        }
    }
}

TEST_CASE("vertex-transitive generators have one class at every radius") {
    for (int dim : {1, 2}) {
        const InfiniteGraph g = lattice_graph(dim);
        const Window q = folner_window(g, 4);
        for (int r : {0, 1, 2, 3})
            REQUIRE(pattern_census(g, q, r).classes.size() == 1);
    }
}

TEST_CASE("frequency tables") {
    const InfiniteGraph z2 = lattice_graph(2);
    const FrequencyTable t2 = frequency_table(z2, {2, 4, 8}, 1);
    for (const auto& lv : t2.levels) {
        REQUIRE(lv.census.classes.size() == 1);
        REQUIRE(census_frequency(lv.census, lv.census.classes.begin()->first) == Rational(1));
    }
    REQUIRE(t2.convergence_indicator == Rational(0));

    const InfiniteGraph g = pendant_chain(2);
    const FrequencyTable tp = frequency_table(g, {5, 10, 20}, 1);
    for (const auto& lv : tp.levels) {
        std::multiset<Rational> freqs;
        for (const auto& [code, e] : lv.census.classes)
            freqs.insert(census_frequency(lv.census, code));
        REQUIRE(freqs == std::multiset<Rational>{make_rational(1, 3), make_rational(2, 3)});
    }
    REQUIRE(tp.convergence_indicator == Rational(0));

    REQUIRE_THROWS_AS(frequency_table(g, {10, 5}, 1), ConfigError);
}

TEST_CASE("decorated-lattice frequencies settle along a doubling schedule") {
    const InfiniteGraph g = decorated_lattice(make_rational(1, 2), 90210);
    const FrequencyTable t = frequency_table(g, {50, 100, 200}, 1);
    const double indicator = to_double(t.convergence_indicator);
    REQUIRE(indicator <= 10.0 / std::sqrt(200.0));
    std::ostringstream os;
    write_frequency_csv(t, os);
    REQUIRE(os.str().starts_with("level,code,count,frequency\n"));
}

TEST_CASE("plane ball orbits match the dihedral count") {
    // The L1 ball of radius 4: the root-fixing automorphisms are the 8
    // square symmetries, so the orbits are root + one per {|x|,|y|} shape:
    // r=1: {1,0}; r=2: {2,0},{1,1}; r=3: {3,0},{2,1}; r=4: {4,0},{3,1},{2,2}.
    const InfiniteGraph z2 = lattice_graph(2);
    const auto orbits = root_fixing_orbits(ball(z2, vertex(0, 0), 4));
    REQUIRE(orbits.size() == 9);
    const auto code_a = canonical_code(ball(z2, vertex(0, 0), 4));
    const auto code_b = canonical_code(ball(z2, vertex(7, -3), 4));
    REQUIRE(code_a == code_b);
}

TEST_CASE("codes stay complete on a larger corpus") {
    const auto corpus = make_rooted_corpus(31415, 30, 11, false);
    std::vector<PatternCode> codes;
    for (const auto& b : corpus) codes.push_back(canonical_code(b));
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = i + 1; j < corpus.size(); ++j)
            REQUIRE((codes[i] == codes[j]) == brute_force_rooted_iso(corpus[i], corpus[j]));
}
