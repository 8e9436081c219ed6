#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fglab/series.hpp"

using namespace fglab;

namespace {

const std::vector<std::string> X{"x"};
const std::vector<std::string> XY{"x", "y"};

TruncSeries S(const Ring& r, const std::vector<std::string>& v, int n, const char* e) {
    return TruncSeries::parse_expr(r, v, n, e);
}

// Random univariate series with zero constant term and linear coefficient `lin`.
TruncSeries random_series(std::mt19937_64& rng, const Ring& r, int n, long lin, int range) {
    std::vector<TruncSeries::Entry> t;
    t.emplace_back(pack_exponents({1}), r->from_int(lin));
    for (int k = 2; k <= n; ++k)
        if (rng() % 3) t.emplace_back(pack_exponents({k}), r->from_int(static_cast<long>(rng() % (2 * range + 1)) - range));
    return TruncSeries::from_terms(r, X, n, std::move(t));
}

} // namespace

TEST_CASE("multiplication") {
    Ring z = make_ring("ZZ");
    CHECK(series_mul(S(z, X, 4, "1+x"), S(z, X, 4, "1-x")) == S(z, X, 4, "1-x^2"));
    CHECK(series_mul(S(z, X, 4, "x^4"), S(z, X, 4, "x")).is_zero());
    CHECK(series_pow(S(z, XY, 3, "x+y"), 2).expr() == "y^2+2*x*y+x^2");
    CHECK_THROWS_AS(series_mul(S(z, X, 4, "x"), S(z, X, 5, "x")), BoundMismatch);
    CHECK_THROWS_AS(series_mul(S(z, X, 4, "x"), S(make_ring("QQ"), X, 4, "x")), RingMismatch);
}

TEST_CASE("composition") {
    Ring z = make_ring("ZZ");
    CHECK(series_compose(S(z, X, 5, "x+x^2"), S(z, X, 5, "x^2")) == S(z, X, 5, "x^2+x^4"));
    TruncSeries f = S(z, X, 6, "x+3*x^2-x^5");
    CHECK(series_compose(f, S(z, X, 6, "x")) == f);
    CHECK(series_compose(S(z, X, 3, "x^2"), S(z, XY, 3, "x+y")) == S(z, XY, 3, "x^2+2*x*y+y^2"));
    CHECK_THROWS_AS(series_compose(f, S(z, X, 6, "1+x")), NonzeroConstantTerm);
    CHECK_THROWS_AS(series_compose(S(z, X, 3, "x"), S(z, X, 6, "x")), BoundMismatch);
}

TEST_CASE("reversion") {
    Ring z = make_ring("ZZ");
    CHECK(series_reversion(S(z, X, 4, "x")) == S(z, X, 4, "x"));
    CHECK(series_reversion(S(z, X, 4, "x+x^2")) == S(z, X, 4, "x-x^2+2*x^3-5*x^4"));
    Ring q = make_ring("QQ");
    CHECK(series_reversion(S(q, X, 5, "3*x")) == S(q, X, 5, "x/3"));
    CHECK_THROWS_AS(series_reversion(S(z, X, 4, "2*x")), NonUnitLinearCoefficient);
}

TEST_CASE("partial derivatives") {
    Ring z = make_ring("ZZ");
    CHECK(series_partial(S(z, XY, 4, "x^2*y+x*y^2"), "x") == S(z, XY, 4, "2*x*y+y^2"));
    CHECK(series_partial(S(z, XY, 4, "7"), "x").is_zero());
    TruncSeries d = series_partial(S(z, XY, 4, "x+x*y"), "x");
    CHECK(series_set_zero(d, 0) == S(z, XY, 4, "1+y"));
    CHECK(d.reliable_bound() == 3);
    CHECK_THROWS_AS(series_partial(d, "t"), UnknownVariable);
}

TEST_CASE("serialization round trip") {
    Ring r = make_ring("ZZ_(3)[u1:2]");
    TruncSeries f = S(r, XY, 5, "x+y+u1/8*(x^2*y+x*y^2)-x^5");
    std::string text = f.str();
    CHECK(text.substr(0, 13) == "5; vars=x,y\nt");
    CHECK(TruncSeries::parse(r, text) == f);
    CHECK(text.find("term 2,1: 1/8*u1") != std::string::npos);
}

TEST_CASE("reversion round trip on random series") {
    std::mt19937_64 rng(99);
    for (const char* spec : {"GF(5)", "ZZ"}) {
        Ring r = make_ring(spec);
        for (int i = 0; i < 100; ++i) {
            int n = 2 + static_cast<int>(rng() % 12);
            long lin = r->kind() == RingKind::Integers ? (rng() % 2 ? 1 : -1) : 1 + static_cast<long>(rng() % 4);
            TruncSeries f = random_series(rng, r, n, lin, 5);
            TruncSeries g = series_reversion(f);
            TruncSeries x = TruncSeries::variable(r, X, n, 0);
            CHECK(series_compose(f, g) == x);
            CHECK(series_compose(g, f) == x);
        }
    }
}

TEST_CASE("composition associativity and Leibniz rule") {
    std::mt19937_64 rng(5);
    Ring r = make_ring("GF(7)");
    Ring z = make_ring("ZZ");
    for (int i = 0; i < 30; ++i) {
        int n = 3 + static_cast<int>(rng() % 8);
        TruncSeries f = random_series(rng, r, n, 1 + static_cast<long>(rng() % 6), 3);
        TruncSeries g = random_series(rng, r, n, 1 + static_cast<long>(rng() % 6), 3);
        TruncSeries h = random_series(rng, r, n, 1 + static_cast<long>(rng() % 6), 3);
        CHECK(series_compose(series_compose(f, g), h) == series_compose(f, series_compose(g, h)));
        TruncSeries a = random_series(rng, z, n, 2, 4), b = random_series(rng, z, n, 3, 4);
        TruncSeries lhs = series_partial(series_mul(a, b), 0);
        TruncSeries rhs = series_add(series_mul(a, series_partial(b, 0)), series_mul(b, series_partial(a, 0)));
        CHECK(lhs.truncate(n - 1) == rhs.truncate(n - 1));
    }
}

TEST_CASE("truncation coherence") {
    std::mt19937_64 rng(17);
    Ring z = make_ring("ZZ");
    for (int i = 0; i < 30; ++i) {
        int n = 6 + static_cast<int>(rng() % 6), m = 2 + static_cast<int>(rng() % 4);
        TruncSeries f = random_series(rng, z, n, 1, 3), g = random_series(rng, z, n, 1, 3);
        CHECK(series_mul(f, g).truncate(m) == series_mul(f.truncate(m), g.truncate(m)));
        CHECK(series_compose(f, g).truncate(m) == series_compose(f.truncate(m), g.truncate(m)));
        CHECK(series_reversion(f).truncate(m) == series_reversion(f.truncate(m)));
        CHECK(series_inverse(series_add(f, S(z, X, n, "1"))).truncate(m) ==
              series_inverse(series_add(f.truncate(m), S(z, X, m, "1"))));
    }
}

TEST_CASE("substitution into bivariate series") {
    Ring z = make_ring("ZZ");
    TruncSeries F = S(z, XY, 6, "x+y+x*y");
    TruncSeries a = S(z, X, 6, "x+x^2"), b = S(z, X, 6, "2*x");
    // (x+x^2) + 2x + (x+x^2)(2x)
    CHECK(series_substitute(F, {a, b}) == S(z, X, 6, "3*x+3*x^2+2*x^3"));
    const std::vector<std::string> XYZ{"x", "y", "z"};
    TruncSeries Fxy = series_reindex(F, XYZ, {0, 1});
    TruncSeries z3 = TruncSeries::variable(z, XYZ, 6, 2);
    TruncSeries lhs = series_substitute(F, {Fxy, z3});
    CHECK(lhs == S(z, XYZ, 6, "x+y+z+x*y+x*z+y*z+x*y*z"));
    CHECK(series_substitute(F, {a, TruncSeries(z, X, 6)}) == a);
}
