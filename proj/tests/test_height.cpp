#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fglab/height.hpp"
#include "fglab/ptypical.hpp"

using namespace fglab;

namespace {

const std::vector<std::string> X{"x"};
const std::vector<std::string> XY{"x", "y"};

TruncSeries S(const Ring& r, const std::vector<std::string>& v, int n, const char* e) {
    return TruncSeries::parse_expr(r, v, n, e);
}

} // namespace

TEST_CASE("heights of standard laws") {
    for (int64_t p : {2, 3, 5}) {
        Ring f = make_ring(RingSpec::prime_field(p));
        const int N = static_cast<int>(p * p * p);
        auto M = p_series_analyze(multiplicative_fgl(f, N), p);
        REQUIRE(M.height);
        CHECK(*M.height == 1);
        CHECK(f->is_one(M.vn));
        CHECK(M.vn_degree == p - 1);
        auto A = p_series_analyze(additive_fgl(f, N), p);
        CHECK_FALSE(A.height);
        CHECK(A.hmax == 3);
        CHECK(A.height_str() == ">=3");
    }
    for (auto [p, n] : {std::pair<int64_t, int>{2, 1}, {2, 2}, {3, 2}, {5, 1}}) {
        int N = 1;
        for (int i = 0; i < 2 * n; ++i) N *= static_cast<int>(p);
        auto H = p_series_analyze(honda_fgl(p, n, N), p);
        REQUIRE(H.height);
        CHECK(*H.height == n);
        CHECK(H.height_str() == std::to_string(n));
        CHECK(H.p_series.ring()->is_one(H.vn));
    }
    // Honda of height 3 truncated below x^8 looks additive
    CHECK_FALSE(p_series_analyze(honda_fgl(2, 3, 7), 2).height);
}

TEST_CASE("characteristic handling") {
    Ring z = make_ring("ZZ");
    CHECK_THROWS_AS(p_series_analyze(multiplicative_fgl(z, 6), 3), WrongCharacteristic);
    auto red = reduce_mod_p(multiplicative_fgl(z, 9), 3);
    CHECK(red.ring()->name() == "GF(3)");
    CHECK(*p_series_analyze(red, 3).height == 1);
    auto U = universal_p_typical(2, 8);
    CHECK(reduce_mod_p(U.law, 2).ring()->name() == "GF(2)[u1:1,u2:3,u3:7]");
    CHECK_THROWS_AS(reduce_mod_p(U.law, 3), WrongCharacteristic);
    CHECK_THROWS_AS(p_series_analyze(multiplicative_fgl(make_ring("ZZ/4"), 4), 2), WrongCharacteristic);
}

TEST_CASE("ideal chain of the universal p-typical law") {
    for (int64_t p : {2, 3}) {
        const int N = p == 2 ? 8 : 9;
        auto G = reduce_mod_p(universal_p_typical(p, N).law, p);
        CHECK_THROWS_AS(p_series_analyze(G, p), UnsupportedBase);
        auto d = p_series_analyze(G, p, true);
        CHECK_FALSE(d.field);
        CHECK(d.height_str() == "ideal chain");
        std::vector<std::vector<std::string>> want{{"p"}, {"p", "u1"}, {"p", "u1", "u2"}};
        if (p == 2) want.push_back({"p", "u1", "u2", "u3"});
        CHECK(d.ideal_chain == want);
    }
    // x+y+xy over GF(2)[a:0] is not p-typical: v_1 = 1 + ... is a unit, the chain ends
    Ring r = make_ring("GF(2)[a:0]");
    auto d = p_series_analyze(FormalGroupLaw{S(r, XY, 4, "x+y+x*y"), false}, 2, true);
    CHECK(d.ideal_chain.back().back() == "1");
}

TEST_CASE("Frobenius twist and factorization") {
    Ring f2 = make_ring("GF(2)");
    auto M = multiplicative_fgl(f2, 8);
    auto tw = frobenius_twist(M);
    CHECK(tw.twist.F == M.F);
    CHECK(tw.frobenius_is_hom);
    Ring f4 = make_ring("GF(2^2)");
    FormalGroupLaw G{S(f4, XY, 8, "x+y+w*x*y"), false};
    auto t4 = frobenius_twist(G);
    CHECK(t4.twist.F == S(f4, XY, 8, "x+y+w^2*x*y"));
    CHECK(t4.twist.F == S(f4, XY, 8, "x+y+(w+1)*x*y"));
    CHECK(t4.frobenius_is_hom);
    CHECK_FALSE(check_homomorphism(S(f4, X, 8, "x^2"), G, G).is_hom);

    CHECK(frobenius_factor(S(f2, X, 8, "x^2")) == S(f2, X, 4, "x"));
    CHECK(frobenius_factor(S(f2, X, 8, "x^4")) == S(f2, X, 4, "x^2"));
    CHECK_THROWS_AS(frobenius_factor(S(f2, X, 8, "x")), NonvanishingDerivative);
    // factor inverts precomposition with x^p
    std::mt19937_64 rng(7);
    Ring f3 = make_ring("GF(3)");
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TruncSeries::Entry> t;
        for (int k = 1; k <= 6; ++k) t.emplace_back(pack_exponents({k}), f3->from_int(static_cast<long>(rng() % 3)));
        TruncSeries g = TruncSeries::from_terms(f3, X, 6, t);
        TruncSeries gp = series_compose(g.truncate(6), S(f3, X, 18, "x^3"));
        CHECK(frobenius_factor(gp) == g);
    }
}

TEST_CASE("Verschiebung") {
    for (auto [p, n] : {std::pair<int64_t, int>{2, 1}, {2, 2}, {3, 1}}) {
        int N = 1;
        for (int i = 0; i < 2 * n; ++i) N *= static_cast<int>(p);
        auto H = honda_fgl(p, n, N);
        TruncSeries V = verschiebung_series(H, n);
        int pn = 1;
        for (int i = 0; i < n; ++i) pn *= static_cast<int>(p);
        CHECK(V.bound() == N / pn);
        CHECK(V == S(H.ring(), X, V.bound(), "x"));
        CHECK_THROWS_AS(verschiebung_series(H, n + 1), HeightTooSmall);
    }
    Ring f5 = make_ring("GF(5)");
    CHECK(verschiebung_series(multiplicative_fgl(f5, 25), 1) == S(f5, X, 5, "x"));
    for (int64_t p : {2, 3}) {
        const int N = p == 2 ? 16 : 27;
        auto G = reduce_mod_p(universal_p_typical(p, N).law, p);
        TruncSeries V = verschiebung_series(G, 1);
        std::vector<Value> u;
        for (int i = 0; i < G.ring()->ngens(); ++i) u.push_back(G.ring()->gen(i));
        CHECK(verschiebung_matches(G, V, 1, u));
        CHECK_FALSE(verschiebung_matches(G, V, 1, std::vector<Value>(u.size(), G.ring()->one())));
    }
}

TEST_CASE("v_n under coordinate changes") {
    std::mt19937_64 rng(11);
    for (const char* spec : {"GF(2^2)", "GF(3^2)", "GF(5)"}) {
        Ring f = make_ring(spec);
        auto elems = enumerate_field(f);
        const int64_t p = f->spec().p;
        for (int n : {1, 2}) {
            if (p == 5 && n == 2) continue;
            int N = 1;
            for (int i = 0; i < n + 1; ++i) N *= static_cast<int>(p);
            auto H = fgl_change_ring(honda_fgl(p, n, N), f);
            for (int trial = 0; trial < 4; ++trial) {
                Value c;
                do c = elems[rng() % elems.size()];
                while (f->is_zero(c));
                std::vector<TruncSeries::Entry> t{{pack_exponents({1}), c}};
                for (int k = 2; k <= N; ++k) t.emplace_back(pack_exponents({k}), elems[rng() % elems.size()]);
                TruncSeries phi = TruncSeries::from_terms(f, X, N, t);
                auto G = coordinate_change(H, phi);
                auto d = p_series_analyze(G, p);
                REQUIRE(d.height);
                CHECK(*d.height == n);
                CHECK(f->eq(d.vn, f->pow(c, d.vn_degree)));
                for (auto& [k, a] : d.p_series.terms()) CHECK(key_degree(k) % (d.vn_degree + 1) == 0);
            }
        }
    }
}
