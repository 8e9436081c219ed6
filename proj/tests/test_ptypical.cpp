#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fglab/ptypical.hpp"

using namespace fglab;

namespace {

const std::vector<std::string> X{"x"};
const std::vector<std::string> XY{"x", "y"};

TruncSeries S(const Ring& r, const std::vector<std::string>& v, int n, const char* e) {
    return TruncSeries::parse_expr(r, v, n, e);
}

Value Q(const Ring& r, long a, long b) {
    mpq_class q(a, b);
    q.canonicalize();
    return r->from_rational(q);
}

} // namespace

TEST_CASE("low-degree universal laws") {
    auto U2 = universal_p_typical(2, 2);
    Ring V2 = U2.law.ring();
    CHECK(V2->name() == "ZZ_(2)[u1:1]");
    CHECK(U2.law.F == S(V2, XY, 2, "x+y+u1*x*y"));
    CHECK(U2.p_series_identity);
    CHECK(U2.grading_ok);

    auto U3 = universal_p_typical(3, 3);
    Ring V3 = U3.law.ring();
    TruncSeries c3 = series_scale(S(V3, XY, 3, "u1*x^2*y+u1*x*y^2"), Q(V3, 1, 8));
    CHECK(U3.law.F == series_add(S(V3, XY, 3, "x+y"), c3));
    CHECK(U3.p_series_identity);

    // below p the law is additive
    auto U5 = universal_p_typical(5, 4);
    CHECK(U5.law.F == S(U5.law.ring(), XY, 4, "x+y"));
}

TEST_CASE("log coefficients") {
    // Hand solution of the recursion at p = 2: l_1 = -u1/2, l_2 = -u2/14 + u1^3/28.
    LogData a = ptypical_log(2, 2, Convention::Araki);
    const Ring& R = a.ring;
    CHECK(R->eq(a.coefficients[1], R->parse("-u1/2")));
    CHECK(R->eq(a.coefficients[2], R->add(R->mul(R->parse("u2"), Q(R, -1, 14)), R->mul(R->parse("u1^3"), Q(R, 1, 28)))));
    LogData h = ptypical_log(3, 2, Convention::Hazewinkel);
    const Ring& H = h.ring;
    CHECK(H->eq(h.coefficients[1], H->parse("u1/3")));
    CHECK(H->eq(h.coefficients[2], H->add(H->parse("u2/3"), H->parse("u1^4/9"))));
}

TEST_CASE("integrality and p-series at moderate bounds") {
    for (auto [p, N] : {std::pair<int64_t, int>{2, 9}, {3, 10}, {5, 6}}) {
        auto U = universal_p_typical(p, N);
        CHECK(U.p_series_identity);
        CHECK(U.grading_ok);
        CHECK(validate_fgl(U.law.F).ok());
        auto H = universal_p_typical(p, N, Convention::Hazewinkel);
        CHECK(H.p_series_identity);
        CHECK(H.grading_ok);
    }
}

TEST_CASE("Hazewinkel and Araki laws agree up to a change of generators") {
    auto log_series = [](const LogData& d, int N) {
        std::vector<TruncSeries::Entry> t;
        long e = 1;
        for (auto& c : d.coefficients) {
            t.emplace_back(pack_exponents({static_cast<int>(e)}), c);
            e *= d.p;
        }
        return TruncSeries::from_terms(d.ring, X, N, t);
    };
    // With the same symbols, exp_A(log_H(x)) is integral in low degrees only.
    for (auto [p, N] : {std::pair<int64_t, int>{2, 7}, {3, 9}}) {
        const int r = ptypical_rank(p, N);
        LogData a = ptypical_log(p, r, Convention::Araki), h = ptypical_log(p, r, Convention::Hazewinkel);
        TruncSeries iso = series_compose(series_reversion(log_series(a, N)), log_series(h, N));
        for (auto& [k, c] : iso.terms())
            for (auto& [m, q] : poly_terms(a.ring, c)) CHECK(is_p_integral(std::get<mpq_class>(q), p));
        auto A = universal_p_typical(p, N), Hz = universal_p_typical(p, N, Convention::Hazewinkel);
        CHECK(check_homomorphism(series_change_ring(iso, A.law.ring()), Hz.law, A.law).is_hom);
    }
    {
        LogData a = ptypical_log(2, 3, Convention::Araki), h = ptypical_log(2, 3, Convention::Hazewinkel);
        TruncSeries iso = series_compose(series_reversion(log_series(a, 8)), log_series(h, 8));
        CHECK_FALSE(is_p_integral(std::get<mpq_class>(poly_terms(a.ring, series_coeff(iso, 8))[1].second), 2));
    }
    // The Araki generators as integral polynomials in the Hazewinkel ones: sigma(u_n) solves
    // l^A_n(sigma u) = l^H_n(u), and sigma^* F_A = F_H.
    for (auto [p, N] : {std::pair<int64_t, int>{2, 16}, {3, 18}}) {
        const int r = ptypical_rank(p, N);
        LogData h = ptypical_log(p, r, Convention::Hazewinkel);
        const Ring& R = h.ring;
        std::vector<Value> sigma;
        for (int n = 1; n <= r; ++n) {
            long pn = 1;
            for (int i = 0; i < n; ++i) pn *= p;
            mpz_class c = mpz_class(p);
            mpz_class big;
            mpz_ui_pow_ui(big.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(pn));
            Value v = R->mul(h.coefficients[static_cast<size_t>(n)], R->from_int(c - big));
            long pi = 1;
            for (int i = 1; i < n; ++i) {
                pi *= p;
                v = R->sub(v, R->mul(h.coefficients[static_cast<size_t>(i)], R->pow(sigma[static_cast<size_t>(n - i - 1)], pi)));
            }
            for (auto& [m, q] : poly_terms(R, v)) CHECK(is_p_integral(std::get<mpq_class>(q), p));
            // linear term is a unit times u_n
            Mono un;
            un[n - 1] = 1;
            bool unit_linear = false;
            for (auto& [m, q] : poly_terms(R, v))
                if (m == un) unit_linear = p_valuation(std::get<mpq_class>(q), p) == 0;
            CHECK(unit_linear);
            sigma.push_back(v);
        }
        auto A = universal_p_typical(p, N), Hz = universal_p_typical(p, N, Convention::Hazewinkel);
        Ring V = A.law.ring();
        std::vector<Value> images;
        for (auto& s : sigma) images.push_back(convert(R, s, V));
        CHECK(specialize(A.law, V, images).F == Hz.law.F);
    }
}

TEST_CASE("p-typicality") {
    Ring z2 = make_ring("ZZ_(2)");
    CHECK(p_typicality_test(additive_fgl(z2, 8), 2, 8).p_typical);
    auto rep = p_typicality_test(multiplicative_fgl(z2, 8), 2, 8);
    CHECK(rep.route == "logarithm");
    CHECK_FALSE(rep.p_typical);
    REQUIRE(rep.tests.size() == 3);
    CHECK(rep.tests[0].ell == 3);
    CHECK_FALSE(rep.tests[0].vanishes);
    CHECK(rep.tests[0].detail == "log coefficient at degree 3");

    // the same verdicts after reduction, by the root-of-unity testers
    Ring f2 = make_ring("GF(2)");
    auto rep2 = p_typicality_test(multiplicative_fgl(f2, 8), 2, 8);
    CHECK(rep2.route == "roots-of-unity");
    CHECK_FALSE(rep2.p_typical);
    CHECK(rep2.tests[0].detail == "f_3 nonzero at degree 3");
    CHECK(p_typicality_test(additive_fgl(f2, 8), 2, 8).p_typical);

    // universal laws with integer u-values, over ZZ_(p) and after reduction
    for (int64_t p : {2, 3}) {
        const int N = p == 2 ? 8 : 9;
        auto U = universal_p_typical(p, N);
        Ring zp = make_ring(RingSpec::plocal(p)), fp = make_ring(RingSpec::prime_field(p));
        std::vector<Value> vals;
        for (int i = 0; i < U.law.ring()->ngens(); ++i) vals.push_back(zp->from_int(i + 1));
        FormalGroupLaw G = specialize(U.law, zp, vals);
        CHECK(p_typicality_test(G, p, N).p_typical);
        CHECK(p_typicality_test(fgl_change_ring(G, fp), p, N).p_typical);
        CHECK(p_typicality_test(U.law, p, N).p_typical);
    }
    // extension-field bases embed into the splitting field
    Ring f4 = make_ring("GF(2^2)");
    CHECK_FALSE(p_typicality_test(multiplicative_fgl(f4, 6), 2, 6).p_typical);
    CHECK_THROWS_AS(p_typicality_test(multiplicative_fgl(make_ring("ZZ/4"), 4), 2, 4), UnsupportedBase);
}

TEST_CASE("Cartier typification") {
    Ring z2 = make_ring("ZZ_(2)");
    auto A = cartier_typify(additive_fgl(z2, 6), 2);
    CHECK(A.eG.F == additive_fgl(z2, 6).F);
    CHECK(A.phi == S(z2, X, 6, "x"));

    // log(1+x) without x^3/3: log_e = x - x^2/2 - x^4/4
    auto M = cartier_typify(multiplicative_fgl(z2, 4), 2);
    Ring q = make_ring("QQ");
    TruncSeries le = logarithm(M.eG);
    CHECK(q->eq(series_coeff(le, 1), q->one()));
    CHECK(q->eq(series_coeff(le, 2), Q(q, -1, 2)));
    CHECK(q->is_zero(series_coeff(le, 3)));
    CHECK(q->eq(series_coeff(le, 4), Q(q, -1, 4)));
    CHECK(M.phi_is_hom);
    CHECK(M.eG_p_typical);

    for (int64_t p : {2, 3}) {
        Ring zp = make_ring(RingSpec::plocal(p));
        auto T = cartier_typify(multiplicative_fgl(zp, 12), p);
        CHECK(T.phi_is_hom);
        CHECK(T.eG_p_typical);
        // idempotence
        auto T2 = cartier_typify(T.eG, p);
        CHECK(T2.eG.F == T.eG.F);
        CHECK(T2.phi == S(zp, X, 12, "x"));
        // the reduction passes the root-of-unity testers
        Ring fp = make_ring(RingSpec::prime_field(p));
        CHECK(p_typicality_test(fgl_change_ring(T.eG, fp), p, 5).p_typical);
    }

    // naturality along a specialization a -> 3
    Ring za = make_ring("ZZ_(2)[a:1]");
    FormalGroupLaw G{S(za, XY, 8, "x+y+a*x*y"), true};
    auto TG = cartier_typify(G, 2);
    CHECK(TG.phi_is_hom);
    auto spec = specialize(TG.eG, z2, {z2->from_int(3)});
    auto direct = cartier_typify(FormalGroupLaw{S(z2, XY, 8, "x+y+3*x*y"), false}, 2);
    CHECK(spec.F == direct.eG.F);

    CHECK_THROWS_AS(cartier_typify(multiplicative_fgl(make_ring("GF(2)"), 4), 2), UnsupportedBase);
}

TEST_CASE("Honda laws") {
    Ring f2 = make_ring("GF(2)");
    FormalGroupLaw H = honda_fgl(2, 1, 8);
    CHECK(H.F.truncate(2) == S(f2, XY, 2, "x+y+x*y"));
    CHECK(n_series(H, 2) == S(f2, X, 8, "x^2"));
    CHECK(n_series(honda_fgl(3, 1, 9), 3) == S(make_ring("GF(3)"), X, 9, "x^3"));
    CHECK(n_series(honda_fgl(2, 2, 16), 2) == S(f2, X, 16, "x^4"));
    // height 2 is additive below degree 4
    CHECK(honda_fgl(2, 2, 3).F == S(f2, XY, 3, "x+y"));
}

TEST_CASE("right unit") {
    for (int64_t p : {2, 3}) {
        auto R = right_unit_images(p, p == 2 ? 8 : 9);
        const Ring& T = R.ring;
        CHECK(R.integral);
        CHECK(R.counit_ok);
        CHECK(R.isomorphism_ok);
        Value expect = T->add(T->parse("u1"), T->mul(T->from_int(p - (p == 2 ? 4 : 27)), T->parse("t1")));
        CHECK(T->eq(R.eta_u[1], expect));
    }
    // the second image at p = 2 by hand: eta(l_2) = l_2 + l_1 t1^2 + t2 with l_1 = -u1/2
    auto R = right_unit_images(2, 4);
    Ring T = make_ring(rationalization(R.ring->spec()));
    Value eta1 = convert(R.ring, R.eta_u[1], T), eta2 = convert(R.ring, R.eta_u[2], T);
    Value l1 = T->parse("-u1/2"), l2 = T->add(T->mul(T->parse("u2"), Q(T, -1, 14)), T->mul(T->parse("u1^3"), Q(T, 1, 28)));
    Value el1 = T->add(l1, T->parse("t1"));
    Value el2 = T->add(T->add(l2, T->mul(l1, T->parse("t1^2"))), T->parse("t2"));
    Value want = T->sub(T->mul(T->from_int(-14), el2), T->mul(el1, T->pow(eta1, 2)));
    CHECK(T->eq(eta2, want));
}

TEST_CASE("Lubin-Tate buds") {
    auto L = lubin_tate_bud(2, 2, 3, 4);
    CHECK(L.law.ring()->name() == "ZZ/2^3[u1:1]");
    CHECK(L.special_fiber_is_honda);
    Ring f2 = make_ring("GF(2)");
    CHECK(n_series(specialize(L.law, f2, {f2->zero()}), 2) == S(f2, X, 4, "x^4"));
    for (int64_t p : {2, 3}) {
        auto L1 = lubin_tate_bud(p, 1, 4, static_cast<int>(p * p));
        const Ring& R = L1.law.ring();
        CHECK(L1.special_fiber_is_honda);
        CHECK(n_series(L1.law, p) == araki_series(L1.law, p, {R->one()}, R->from_int(p)));
    }
    auto L3 = lubin_tate_bud(2, 2, 2, 8, 2);
    CHECK(L3.special_fiber_is_honda);
    // everything to zero mod p gives the additive law
    auto U = universal_p_typical(3, 9);
    Ring f3 = make_ring("GF(3)");
    CHECK(specialize(U.law, f3, {f3->zero(), f3->zero()}).F == S(f3, XY, 9, "x+y"));
}
