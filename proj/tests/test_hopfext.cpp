#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fglab/hopfext.hpp"
#include "fglab/ptypical.hpp"

using namespace fglab;

namespace {

const std::vector<std::string> X{"x"};

Value P(const Ring& r, const char* e) { return r->parse(e); }

void check_all(const GradedHopfAlgebroid& H) {
    for (auto& c : H.checks) {
        INFO(H.name << ": " << c.axiom << " " << c.detail);
        CHECK(c.ok);
    }
    CHECK(H.verified());
}

long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

} // namespace

TEST_CASE("universal bud") {
    for (int n = 2; n <= 7; ++n) {
        UniversalBud U = universal_bud(n);
        CHECK(validate_fgl(U.law.F).ok());
        CHECK(grading_check(U.law).ok);
        const Ring& A = U.law.ring();
        // modulo decomposables F = x + y + sum x_{k-1} C_k
        for (int k = 2; k <= n; ++k) {
            TruncSeries C = symmetric_cocycle(k, A);
            Value g = A->gen(k - 2);
            for (int i = 1; i < k; ++i) {
                Value c = U.law.F.coeff({i, k - i});
                Value lin = A->zero();
                for (auto& [m, q] : poly_terms(A, c))
                    if (m == poly_terms(A, g)[0].first) lin = q;
                CHECK(A->base()->eq(lin, convert(A, C.coeff({i, k - i}), A->base())));
            }
        }
    }
    CHECK(universal_bud(2).law.F == TruncSeries::parse_expr(universal_bud(2).law.ring(), {"x", "y"}, 2, "x+y+x1*x*y"));

    // every integral bud is a unique specialization: transported multiplicative laws
    std::mt19937_64 rng(2);
    Ring Z = make_ring("ZZ");
    for (int n : {3, 5, 6}) {
        UniversalBud U = universal_bud(n);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<TruncSeries::Entry> t{{pack_exponents({1}), Z->one()}};
            for (int e = 2; e <= n; ++e) t.emplace_back(pack_exponents({e}), Z->from_int(static_cast<long>(rng() % 7) - 3));
            TruncSeries phi = TruncSeries::from_terms(Z, X, n, t);
            FormalGroupLaw G = coordinate_change(multiplicative_fgl(Z, n), phi);
            std::vector<Value> c = bud_coordinates(U, G.F);
            CHECK(specialize(U.law, Z, c).F == G.F);
        }
    }
}

TEST_CASE("bud algebroid") {
    auto B2 = build_bud_algebroid(2, 4);
    const Ring& G = B2.H.Gamma;
    CHECK(G->eq(B2.H.eta_R[0], P(G, "x1-2*a1")));
    Ring G2 = B2.H.chain_ring(2);
    CHECK(G2->eq(B2.H.delta[0], P(G2, "a1_1+a1_2")));
    CHECK(G->eq(B2.H.antipode[0], P(G, "-a1")));
    check_all(B2.H);

    for (int n = 3; n <= 5; ++n) {
        auto B = build_bud_algebroid(n, n);
        check_all(B.H);
        // only a_{n-1} switched on: x_{n-1} -> x_{n-1} - d_n a_{n-1}, lower coordinates fixed
        const Ring& Gn = B.H.Gamma;
        std::vector<Value> img;
        for (int i = 0; i < n - 1; ++i) img.push_back(Gn->gen(i));
        for (int i = 1; i < n; ++i) img.push_back(i == n - 1 ? Gn->gen(n - 2 + i) : Gn->zero());
        for (int i = 0; i < n - 1; ++i) {
            Value got = evaluate(Gn, B.H.eta_R[static_cast<size_t>(i)], Gn, img);
            Value want = Gn->gen(i);
            if (i == n - 2) want = Gn->sub(want, Gn->mul(Gn->from_int(cocycle_divisor(n)), Gn->gen(n - 2 + n - 1)));
            CHECK(Gn->eq(got, want));
        }
        // Delta(a_1) is primitive in every bud algebroid
        Ring R2 = B.H.chain_ring(2);
        CHECK(R2->eq(B.H.delta[0], R2->add(R2->gen(n - 1), R2->gen(2 * (n - 1)))));
    }
}

TEST_CASE("cobar complex and Ext of the bud algebroid") {
    auto B = build_bud_algebroid(2, 6);
    CobarComplex C = cobar_complex(B.H, {}, 3, 6);
    CHECK(C.d_squared_zero);
    // d(x1) = -2 a1
    const IntMatrix& d0 = C.d.at({0, 1});
    REQUIRE(d0.rows == 1);
    REQUIRE(d0.cols == 1);
    CHECK(d0(0, 0) == -2);
    CHECK(C.render(1, C.cells(1, 1)[0]) == "[a1]");

    ExtChart E = ext_chart(C);
    CHECK(E.group_str(E.at(0, 0)) == "Z");
    CHECK(E.group_str(E.at(1, 1)) == "Z/2");
    for (int t = 1; t <= 6; ++t) CHECK(E.at(0, t).is_zero());
    ClassOrder a1 = class_order(C, 1, 1, P(C.rings[1], "a1"));
    CHECK(a1.cocycle);
    CHECK(a1.order == 2);
    CHECK_FALSE(class_order(C, 1, 2, P(C.rings[1], "a1^2")).cocycle);

    // 2-primary parts agree with the computation modulo 2^6
    ExtChart E2 = ext_chart(B.H, {}, 3, 6, ExtOptions{2, 6, false});
    for (auto& [st, g] : E.groups) {
        std::vector<mpz_class> two;
        for (auto& d : g.torsion) {
            mpz_class q = 1, r = d;
            while (r % 2 == 0) {
                r /= 2;
                q *= 2;
            }
            if (q > 1) two.push_back(q);
        }
        std::sort(two.begin(), two.end());
        CHECK(E2.at(st.first, st.second).torsion == two);
        CHECK(E2.at(st.first, st.second).free_rank == g.free_rank);
    }

    // stability under T
    ExtChart E7 = ext_chart(build_bud_algebroid(2, 7).H, {}, 3, 7);
    for (auto& [st, g] : E.groups) CHECK(E7.group_str(E7.at(st.first, st.second)) == E.group_str(g));

    // the higher buds keep d o d = 0
    for (int n = 3; n <= 4; ++n) CHECK(cobar_complex(build_bud_algebroid(n, 5).H, {}, 2, 5).d_squared_zero);
}

TEST_CASE("p-typical algebroid") {
    for (int64_t p : {2, 3, 5}) {
        const int T = p == 2 ? 7 : p == 3 ? 8 : 4;
        GradedHopfAlgebroid H = build_ptypical_algebroid(p, T);
        check_all(H);
        const Ring& G = H.Gamma;
        CHECK(G->eq(H.eta_R[0], G->add(G->gen(0), G->mul(G->from_int(mpz_class(p) - ipow(p, static_cast<int>(p))), G->gen(H.base_gens())))));
        Ring G2 = H.chain_ring(2);
        const int r = H.base_gens();
        CHECK(G2->eq(H.delta[0], G2->add(G2->gen(r), G2->gen(2 * r))));
        for (int k = 1; k <= r; ++k) CHECK(G->spec().gens[static_cast<size_t>(r + k - 1)].degree == ipow(p, k) - 1);
        if (r >= 2) {
            // Delta(t2) = t2 + t1 (x) t1^p + 1 (x) t2 - u1/(1 - p^{p-1}) * sum binom(p,i)/p t1^i (x) t1^{p-i}
            Value want = G2->add(G2->add(G2->gen(r + 1), G2->gen(2 * r + 1)), G2->mul(G2->gen(r), G2->pow(G2->gen(2 * r), static_cast<long>(p))));
            mpq_class unit(1, 1 - ipow(p, static_cast<int>(p - 1)));
            unit.canonicalize();
            Value b = G2->zero();
            for (int i = 1; i < p; ++i) {
                mpz_class bin;
                mpz_bin_uiui(bin.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(i));
                b = G2->add(b, G2->mul(G2->from_int(bin / p), G2->mul(G2->pow(G2->gen(r), i), G2->pow(G2->gen(2 * r), static_cast<long>(p - i)))));
            }
            want = G2->sub(want, G2->mul(G2->mul(G2->from_rational(unit), G2->gen(0)), b));
            CHECK(G2->eq(H.delta[1], want));
        }
    }
    CHECK_THROWS_AS(build_ptypical_algebroid(4, 5), NonPrimeModulus);
}

TEST_CASE("Ext of the p-typical algebroid") {
    const int T = 10;
    GradedHopfAlgebroid H = build_ptypical_algebroid(3, T);
    CobarComplex C = cobar_complex(H, {}, 2, T, ExtOptions{0, 4, false});
    CHECK(C.d_squared_zero);
    ExtChart E = ext_chart(C);
    CHECK(E.precision() == "mod 3^4");
    CHECK(E.group_str(E.at(0, 0)) == "Z_(3)");
    for (int t = 1; t <= T; ++t) CHECK(E.at(0, t).is_zero());
    // t1 spans an order 3 class in Ext^{1,2}
    CHECK(E.group_str(E.at(1, 2)) == "Z/3");
    ClassOrder t1 = class_order(C, 1, 2, P(C.rings[1], "t1"));
    CHECK(t1.cocycle);
    CHECK(t1.order == 3);
    CHECK_FALSE(t1.beyond_precision);
    // Ext^{1,2k} = Z/3^{1 + v_3(k)}
    CHECK(E.group_str(E.at(1, 6)) == "Z/9");
    for (int t : {4, 8, 10}) CHECK(E.group_str(E.at(1, t)) == "Z/3");
    for (int t : {1, 3, 5, 7, 9}) CHECK(E.at(1, t).is_zero());

    // stable under K + 1 and T + 1
    ExtChart E5 = ext_chart(H, {}, 2, T, ExtOptions{0, 5, false});
    ExtChart ET = ext_chart(build_ptypical_algebroid(3, T + 1), {}, 2, T + 1, ExtOptions{0, 4, false});
    for (auto& [st, g] : E.groups) {
        CHECK(E5.group_str(E5.at(st.first, st.second)) == E.group_str(g));
        CHECK(ET.group_str(ET.at(st.first, st.second)) == E.group_str(g));
    }
    CHECK_NOTHROW(ext_chart(H, {}, 2, T, ExtOptions{0, 4, true}));

    CHECK_THROWS_AS(cobar_complex(H, {}, 1, T), InvalidArgument);
    CHECK_THROWS_AS(cobar_complex(H, {}, 1, T + 1, ExtOptions{0, 4, false}), DegreeOverflow);
}

TEST_CASE("quotient comodules") {
    GradedHopfAlgebroid H = build_ptypical_algebroid(3, 10);
    // Ext^0(A/p) = F_3[u1]
    ExtChart E = ext_chart(H, GradedComodule{0, true, {}}, 1, 10);
    for (int t = 0; t <= 10; ++t) CHECK(E.at(0, t).free_rank == (t % 2 == 0 ? 1 : 0));
    CHECK(E.group_str(E.at(1, 2)) == "F3");
    // A/(p, u1): u2 is invariant
    ExtChart E2 = ext_chart(H, GradedComodule{0, true, {"u1"}}, 1, 10);
    CHECK(E2.at(0, 8).free_rank == 1);
    CHECK(E2.at(0, 2).free_rank == 0);
    CHECK_THROWS_AS(cobar_complex(H, GradedComodule{0, false, {"u1"}}, 1, 10, ExtOptions{0, 3, false}), InvalidArgument);
    // a shift moves the chart
    ExtChart S = ext_chart(H, GradedComodule{2, true, {}}, 1, 10);
    for (int t = 2; t <= 10; ++t) CHECK(S.at(0, t).free_rank == E.at(0, t - 2).free_rank);
    CHECK(GradedComodule{2, true, {"u1"}}.str() == "A/(p,u1)[2]");
}
