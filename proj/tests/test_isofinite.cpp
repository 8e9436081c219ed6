#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fglab/height.hpp"
#include "fglab/isofinite.hpp"
#include "fglab/ptypical.hpp"

using namespace fglab;

namespace {

const std::vector<std::string> X{"x"};

TruncSeries S(const Ring& r, int n, const char* e) { return TruncSeries::parse_expr(r, X, n, e); }

long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

} // namespace

TEST_CASE("level one") {
    auto H21 = honda_fgl(2, 1, 2);
    auto L = bud_isomorphisms(H21, H21, 1);
    REQUIRE(L.count() == 1);
    CHECK(L.isomorphisms()[0] == S(H21.ring(), 2, "x"));
    CHECK(L.verified);

    auto H31 = honda_fgl(3, 1, 3);
    auto L3 = bud_isomorphisms(H31, H31, 1);
    REQUIRE(L3.count() == 2);
    CHECK(L3.isomorphisms()[0] == S(H31.ring(), 3, "x"));
    CHECK(L3.isomorphisms()[1] == S(H31.ring(), 3, "2*x"));

    auto H22 = honda_fgl(2, 2, 4);
    CHECK(bud_isomorphisms(H22, H22, 1).count() == 1);
    Ring f4 = finite_field_ring(2, 2);
    auto H22f4 = extend_scalars(H22, f4);
    auto L4 = bud_isomorphisms(H22f4, H22f4, 1);
    CHECK(L4.count() == 3);
    // b_0^3 = 1
    for (auto& node : L4.top()) CHECK(f4->is_one(f4->pow(node.b[0], 3)));
}

TEST_CASE("stabilizer orders") {
    struct Case {
        long p;
        int n, m;
    };
    for (Case c : {Case{2, 1, 1}, Case{3, 1, 1}, Case{2, 2, 2}}) {
        for (int k = 1; k <= 3; ++k) {
            auto H = honda_fgl(c.p, c.n, static_cast<int>(ipow(c.p, k + c.n - 1)));
            auto grp = automorphism_group(H, k, c.m);
            const long pn = ipow(c.p, c.n);
            CHECK(static_cast<long>(grp.order()) == (pn - 1) * ipow(pn, k - 1));
            CHECK(grp.identity >= 0);
            CHECK(grp.closed);
            CHECK(grp.inverses);
            CHECK(grp.associative);
            CHECK(grp.stabilizer_relation);
            // each element of the previous level has p^n lifts
            for (size_t j = 1; j < grp.level_counts.size(); ++j)
                CHECK(grp.level_counts[j] == grp.level_counts[j - 1] * static_cast<size_t>(pn));
        }
    }
    // order 6 for (honda(3,1), k = 2) and 12 for (honda(2,2), k = 2, m = 2)
    CHECK(automorphism_group(honda_fgl(3, 1, 9), 2, 1).order() == 6);
    CHECK(automorphism_group(honda_fgl(2, 2, 8), 2, 2).order() == 12);
    // over GF(2) only the F_2-points of the height 2 stabilizer appear
    auto small = automorphism_group(honda_fgl(2, 2, 8), 2, 1);
    CHECK(small.order() == 2);
    CHECK(small.closed);
}

TEST_CASE("composition is compatible with truncation") {
    auto H = honda_fgl(3, 1, 27);
    auto g3 = automorphism_group(H, 3, 1);
    auto g2 = automorphism_group(H, 2, 1);
    for (size_t i = 0; i < g3.order(); i += 5)
        for (size_t j = 0; j < g3.order(); j += 3) {
            TruncSeries a = g3.elements[i], b = g3.elements[j];
            TruncSeries lhs = series_compose(a, b).truncate(8);
            TruncSeries rhs = series_compose(a.truncate(8), b.truncate(8));
            CHECK(lhs == rhs);
            bool found = false;
            for (auto& e : g2.elements) found = found || e == lhs;
            CHECK(found);
        }
}

TEST_CASE("splitting degree and the height dichotomy") {
    auto H22 = honda_fgl(2, 2, 4);
    CHECK(minimal_splitting_degree(H22, H22, 1) == 1);
    CHECK(minimal_splitting_degree(H22, H22, 1, SplitMode::Complete) == 2);
    CHECK(minimal_splitting_degree(honda_fgl(2, 3, 8), honda_fgl(2, 3, 8), 1, SplitMode::Complete) == 3);
    auto H31 = honda_fgl(3, 1, 9);
    CHECK(minimal_splitting_degree(H31, H31, 2) == 1);
    for (long p : {2L, 3L, 5L}) {
        Ring fp = finite_field_ring(p, 1);
        auto M = ptypical_reduction(multiplicative_fgl(make_ring(RingSpec::plocal(p)), static_cast<int>(p)), p, fp);
        CHECK(*p_series_analyze(M, p).height == 1);
        CHECK(minimal_splitting_degree(M, honda_fgl(p, 1, static_cast<int>(p)), 1) == 1);
    }
    auto mixed = bud_isomorphisms(honda_fgl(2, 1, 4), honda_fgl(2, 2, 4), 1);
    CHECK(mixed.count() == 0);
    CHECK(mixed.reason == "strict heights 1 and 2 differ");
    CHECK_THROWS_AS(minimal_splitting_degree(honda_fgl(2, 1, 4), honda_fgl(2, 2, 4), 1), HeightMismatch);

    // the multiplicative coordinate itself is not 2-typical
    auto M2 = multiplicative_fgl(make_ring("GF(2)"), 4);
    CHECK_THROWS_AS(bud_isomorphisms(M2, M2, 1), NotPTypicalCoordinate);
    CHECK_THROWS_AS(bud_isomorphisms(honda_fgl(2, 2, 4), honda_fgl(2, 2, 4), 2), BoundMismatch);
}

TEST_CASE("isomorphisms between distinct laws") {
    // a twisted Honda law: conjugate by b x with b in GF(4), then compare with the original
    Ring f4 = finite_field_ring(2, 2);
    auto H = extend_scalars(honda_fgl(2, 2, 8), f4);
    Value w = f4->parse("w");
    auto G = coordinate_change(H, series_scale(TruncSeries::variable(f4, X, 8, 0), w));
    auto lv = bud_isomorphisms(G, H, 2);
    CHECK(lv.count() == 12);
    CHECK(lv.verified);
    // torsor: composing with an isomorphism gives a bijection with the automorphisms
    auto aut = automorphism_group(honda_fgl(2, 2, 8), 2, 2);
    CHECK(aut.order() == lv.count());
}
