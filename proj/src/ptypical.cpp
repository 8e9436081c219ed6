#include "fglab/ptypical.hpp"

#include <numeric>

namespace fglab {

namespace {

const std::vector<std::string> kX{"x"};
const std::vector<std::string> kXY{"x", "y"};

int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

mpz_class zpow(int64_t b, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(e));
    return r;
}

std::vector<GenSpec> u_gens(int64_t p, int r, const char* name = "u") {
    std::vector<GenSpec> g;
    for (int k = 1; k <= r; ++k) g.push_back({name + std::to_string(k), static_cast<int>(ipow(p, k) - 1), false});
    return g;
}

// Calls fn(monomial, rational) for every rational coefficient inside v.
template <class Fn>
void for_each_rational(const Ring& R, const Value& v, Fn&& fn) {
    for (auto& [m, c] : poly_terms(R, v))
        if (std::holds_alternative<mpq_class>(c)) fn(m, std::get<mpq_class>(c));
}

// Throws IntegralityFailure naming the first coefficient with negative p-adic valuation.
void require_integral(const TruncSeries& f, int64_t p, const std::string& what) {
    const Ring& R = f.ring();
    const bool poly = R->kind() == RingKind::GradedPolynomial;
    for (auto& [k, c] : f.terms())
        for_each_rational(R, c, [&](const Mono& m, const mpq_class& q) {
            long v = p_valuation(q, p);
            if (v < 0)
                throw IntegralityFailure(what + ": coefficient of " + render_key(k, f.vars()) + " at " +
                                         (poly ? render_mono(R->spec(), m) : std::string("1")) + " has valuation " +
                                         std::to_string(v));
        });
}

bool value_integral(const Ring& R, const Value& v, int64_t p) {
    bool ok = true;
    for_each_rational(R, v, [&](const Mono&, const mpq_class& q) { ok = ok && p_valuation(q, p) >= 0; });
    return ok;
}

TruncSeries monomial_series(const Ring& R, const std::vector<std::string>& vars, int N, int e, const Value& c) {
    std::vector<TruncSeries::Entry> t;
    if (e <= N) t.emplace_back(pack_exponents({e}), c);
    return TruncSeries::from_terms(R, vars, N, std::move(t));
}

// exp(log x + log y) for a univariate logarithm.
TruncSeries law_from_log(const TruncSeries& log) {
    TruncSeries ex = series_reversion(log);
    TruncSeries sum = series_add(embed_univariate(log, kXY, 0), embed_univariate(log, kXY, 1));
    return series_compose(ex, sum);
}

// p-power-degree part of a univariate series.
TruncSeries p_power_part(const TruncSeries& f, int64_t p) {
    std::vector<TruncSeries::Entry> out;
    for (auto& [k, c] : f.terms()) {
        int64_t d = key_degree(k);
        while (d % p == 0) d /= p;
        if (d == 1) out.emplace_back(k, c);
    }
    return f.with_terms(std::move(out));
}

int multiplicative_order(int64_t p, int64_t ell) {
    int d = 1;
    int64_t x = p % ell;
    while (x != 1) {
        x = x * p % ell;
        ++d;
    }
    return d;
}

std::vector<int64_t> primes_up_to(int64_t n) {
    std::vector<int64_t> out;
    for (int64_t q = 2; q <= n; ++q)
        if (is_prime(q)) out.push_back(q);
    return out;
}

constexpr uint64_t kEmbeddingCap = 1u << 20;

} // namespace

int ptypical_rank(int64_t p, int N) {
    int r = 0;
    for (int64_t q = p; q <= N; q *= p) ++r;
    return r;
}

RingSpec ptypical_ring_spec(int64_t p, int r, const RingSpec& base) {
    if (r == 0) return base;
    if (r > kMaxGens) throw DegreeOverflow("too many generators");
    return RingSpec::polynomial(base, u_gens(p, r));
}

LogData ptypical_log(int64_t p, int r, Convention c) {
    if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p));
    LogData out;
    out.p = p;
    out.convention = c;
    out.ring = make_ring(ptypical_ring_spec(p, r, RingSpec::rationals()));
    const Ring& Q = out.ring;
    out.coefficients.push_back(Q->one());
    for (int n = 1; n <= r; ++n) {
        // sum_{i<n} l_i u_{n-i}^{p^i}
        Value s = Q->zero();
        for (int i = 0; i < n; ++i)
            s = Q->add(s, Q->mul(out.coefficients[static_cast<size_t>(i)], Q->pow(Q->gen(n - i - 1), static_cast<long>(ipow(p, i)))));
        mpz_class denom = c == Convention::Araki ? mpz_class(p) - zpow(p, ipow(p, n)) : mpz_class(p);
        mpq_class inv(1, denom);
        inv.canonicalize();
        out.coefficients.push_back(Q->mul(s, Q->from_rational(inv)));
    }
    return out;
}

TruncSeries araki_series(const FormalGroupLaw& G, int64_t p, const std::vector<Value>& u, const Value& v0) {
    const Ring& R = G.ring();
    const int N = G.bound();
    TruncSeries acc = monomial_series(R, kX, N, 1, v0);
    for (size_t i = 0; i < u.size(); ++i) {
        int64_t e = ipow(p, static_cast<int>(i) + 1);
        if (e > N) break;
        acc = formal_sum(G, acc, monomial_series(R, kX, N, static_cast<int>(e), u[i]));
    }
    return acc;
}

PTypicalLaw universal_p_typical(int64_t p, int N, Convention c) {
    if (N < 2) throw InvalidArgument("bound must be at least 2");
    const int r = ptypical_rank(p, N);
    PTypicalLaw out;
    out.log = ptypical_log(p, r, c);
    const Ring& Q = out.log.ring;
    std::vector<TruncSeries::Entry> lt;
    for (int i = 0; i <= r; ++i) lt.emplace_back(pack_exponents({static_cast<int>(ipow(p, i))}), out.log.coefficients[static_cast<size_t>(i)]);
    TruncSeries log = TruncSeries::from_terms(Q, kX, N, std::move(lt));
    TruncSeries FQ = law_from_log(log);
    require_integral(FQ, p, "universal p-typical law");

    Ring V = make_ring(ptypical_ring_spec(p, r, RingSpec::plocal(p)));
    out.law = FormalGroupLaw{series_change_ring(FQ, V), true};
    out.p_series = n_series(out.law, p);
    std::vector<Value> u;
    for (int i = 0; i < r; ++i) u.push_back(V->gen(i));
    TruncSeries rhs = araki_series(out.law, p, u, V->from_int(p));
    if (c == Convention::Araki) {
        out.p_series_identity = out.p_series == rhs;
    } else {
        Ring Vp = make_ring(ptypical_ring_spec(p, r, RingSpec::prime_field(p)));
        out.p_series_identity = series_change_ring(out.p_series, Vp) == series_change_ring(rhs, Vp);
    }
    out.grading_ok = grading_check(out.law).ok;
    return out;
}

// ---------------------------------------------------------------- typicality

FormalGroupLaw extend_scalars(const FormalGroupLaw& G, const Ring& L) {
    const Ring& R = G.ring();
    if (R->kind() != RingKind::FiniteField || (L->kind() == RingKind::FiniteField && R->spec() == L->spec()))
        return fgl_change_ring(G, L);
    if (field_order(L) > kEmbeddingCap) throw CapExceeded("embedding into " + L->name());
    Value w = field_embedding(R, L);
    std::vector<Value> wp{L->one()};
    for (int i = 1; i < R->spec().m; ++i) wp.push_back(L->mul(wp.back(), w));
    return FormalGroupLaw{series_map(G.F, L, [&](const Value& c) {
                              const Ext& e = std::get<Ext>(c);
                              Value acc = L->zero();
                              for (size_t i = 0; i < e.size(); ++i)
                                  if (e[i]) acc = L->add(acc, L->mul(L->from_int(mpz_class(static_cast<long>(e[i]))), wp[i]));
                              return acc;
                          }),
                          G.graded};
}

TruncSeries typicality_tester(const FormalGroupLaw& G, int64_t ell) {
    const Ring& R = G.ring();
    const RingSpec& s = R->spec();
    if (s.kind != RingKind::PrimeField && s.kind != RingKind::FiniteField)
        throw UnsupportedBase("roots-of-unity route needs a finite field, got " + R->name());
    if (!is_prime(ell) || ell == s.p) throw InvalidArgument("tester prime must differ from the characteristic");
    const int m = s.kind == RingKind::FiniteField ? s.m : 1;
    const int m2 = std::lcm(m, multiplicative_order(s.p, ell));
    const mpz_class q = zpow(s.p, m2);
    if (m > 1 && q > kEmbeddingCap) throw CapExceeded("field of order " + q.get_str() + " for mu_" + std::to_string(ell));
    if (q > mpz_class(1) << 40) throw CapExceeded("field of order " + q.get_str() + " for mu_" + std::to_string(ell));

    Ring L = make_ring(m2 == 1 ? RingSpec::prime_field(s.p) : RingSpec::finite_field(s.p, m2));
    FormalGroupLaw GL = extend_scalars(G, L);
    Value zeta;
    if (m2 == 1) {
        for (long a = 2; a < s.p; ++a) {
            Value z = L->from_int(a);
            if (L->is_one(L->pow(z, ell))) {
                zeta = z;
                break;
            }
        }
    } else {
        mpz_class e = (q - 1) / ell;
        zeta = L->pow(L->parse("w"), e.get_si());
    }
    const int N = G.bound();
    TruncSeries sum = TruncSeries::variable(L, kX, N, 0);
    Value zk = L->one();
    for (int64_t k = 1; k < ell; ++k) {
        zk = L->mul(zk, zeta);
        sum = formal_sum(GL, sum, monomial_series(L, kX, N, 1, zk));
    }
    return series_compose(n_series_inverse(GL, ell), sum);
}

TypicalityReport p_typicality_test(const FormalGroupLaw& G, int64_t p, int max_ell) {
    const Ring& R = G.ring();
    TypicalityReport rep;
    const int64_t top = std::min<int64_t>(max_ell, G.bound());
    if (R->torsion_free()) {
        rep.route = "logarithm";
        TruncSeries lg = logarithm(G);
        for (int64_t ell : primes_up_to(top)) {
            if (ell == p) continue;
            TypicalityResult t{ell, true, ""};
            for (auto& [k, c] : lg.terms())
                if (key_degree(k) % ell == 0) {
                    t.vanishes = false;
                    t.detail = "log coefficient at degree " + std::to_string(key_degree(k));
                    break;
                }
            rep.p_typical = rep.p_typical && t.vanishes;
            rep.tests.push_back(std::move(t));
        }
        return rep;
    }
    const RingSpec& s = R->spec();
    if (s.kind != RingKind::PrimeField && s.kind != RingKind::FiniteField)
        throw UnsupportedBase("p-typicality needs a torsion-free base or a finite field, got " + R->name());
    if (s.p != p) throw WrongCharacteristic(R->name() + " does not have characteristic " + std::to_string(p));
    rep.route = "roots-of-unity";
    for (int64_t ell : primes_up_to(top)) {
        if (ell == p) continue;
        TruncSeries f = typicality_tester(G, ell);
        TypicalityResult t{ell, f.is_zero(), ""};
        const int m = s.kind == RingKind::FiniteField ? s.m : 1;
        if (t.vanishes)
            t.detail = "over GF(" + std::to_string(p) + "^" + std::to_string(std::lcm(m, multiplicative_order(p, ell))) + ")";
        else
            t.detail = "f_" + std::to_string(ell) + " nonzero at degree " + std::to_string(f.min_degree());
        rep.p_typical = rep.p_typical && t.vanishes;
        rep.tests.push_back(std::move(t));
    }
    return rep;
}

// ---------------------------------------------------------------- Cartier

Typification cartier_typify(const FormalGroupLaw& G, int64_t p) {
    const Ring& R = G.ring();
    if (!R->torsion_free()) throw UnsupportedBase("typification is implemented for torsion-free bases only, got " + R->name());
    TruncSeries lg = logarithm(G);
    TruncSeries le = p_power_part(lg, p);
    TruncSeries eQ = law_from_log(le);
    TruncSeries phiQ = series_compose(series_reversion(le), lg);
    require_integral(eQ, p, "typified law");
    require_integral(phiQ, p, "typifying isomorphism");
    Typification out;
    // Prime-to-p denominators surface as NonInvertibleDenominator here.
    out.eG = FormalGroupLaw{series_change_ring(eQ, R), G.graded};
    out.phi = series_change_ring(phiQ, R);
    out.phi_is_hom = check_homomorphism(out.phi, G, out.eG).is_hom;
    out.eG_p_typical = p_typicality_test(out.eG, p, out.eG.bound()).p_typical;
    return out;
}

// ---------------------------------------------------------------- Honda

FormalGroupLaw honda_fgl(int64_t p, int n, int N) {
    if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p));
    if (n < 1) throw InvalidArgument("height must be at least 1");
    if (N < 2) throw InvalidArgument("bound must be at least 2");
    Ring Q = make_ring("QQ");
    std::vector<TruncSeries::Entry> lt;
    mpz_class den = 1;
    for (mpz_class e = 1; e <= N; e *= zpow(p, n), den *= p)
        lt.emplace_back(pack_exponents({static_cast<int>(e.get_si())}), Q->from_rational(mpq_class(1, den)));
    TruncSeries FQ = law_from_log(TruncSeries::from_terms(Q, kX, N, std::move(lt)));
    require_integral(FQ, p, "Honda law");
    Ring Fp = make_ring(RingSpec::prime_field(p));
    FormalGroupLaw H{series_change_ring(FQ, Fp), false};
    TruncSeries want = monomial_series(Fp, kX, N, static_cast<int>(std::min<int64_t>(ipow(p, n), N + 1)), Fp->one());
    if (!(n_series(H, p) == want)) throw IntegralityFailure("Honda p-series is not x^{p^n}");
    return H;
}

// ---------------------------------------------------------------- right unit

RightUnit right_unit_images(int64_t p, int N) {
    RightUnit out;
    out.p = p;
    const int r = ptypical_rank(p, std::max(N, 2));
    out.r = r;
    if (2 * r > kMaxGens) throw DegreeOverflow("too many generators for the right unit");
    LogData ld = ptypical_log(p, r, Convention::Araki);
    std::vector<GenSpec> gens = u_gens(p, r);
    for (auto& g : u_gens(p, r, "t")) gens.push_back(g);
    Ring TQ = make_ring(RingSpec::polynomial(RingSpec::rationals(), gens));
    out.ring = make_ring(RingSpec::polynomial(RingSpec::plocal(p), gens));
    const Ring& T = out.ring;
    out.eta_u.assign(static_cast<size_t>(r) + 1, T->zero());
    if (r == 0) {
        out.integral = out.counit_ok = out.isomorphism_ok = true;
        return out;
    }
    std::vector<Value> u_in_tq;
    for (int i = 0; i < r; ++i) u_in_tq.push_back(TQ->gen(i));
    auto t = [&](int j) { return j == 0 ? TQ->one() : TQ->gen(r + j - 1); };
    std::vector<Value> l(static_cast<size_t>(r) + 1), el(static_cast<size_t>(r) + 1), eu(static_cast<size_t>(r) + 1);
    for (int i = 0; i <= r; ++i) l[static_cast<size_t>(i)] = evaluate(ld.ring, ld.coefficients[static_cast<size_t>(i)], TQ, u_in_tq);
    for (int n = 1; n <= r; ++n) {
        Value s = TQ->zero();
        for (int i = 0; i <= n; ++i) s = TQ->add(s, TQ->mul(l[static_cast<size_t>(i)], TQ->pow(t(n - i), static_cast<long>(ipow(p, i)))));
        el[static_cast<size_t>(n)] = s;
        Value v = TQ->mul(s, TQ->from_int(mpz_class(p) - zpow(p, ipow(p, n))));
        for (int i = 1; i < n; ++i)
            v = TQ->sub(v, TQ->mul(el[static_cast<size_t>(i)], TQ->pow(eu[static_cast<size_t>(n - i)], static_cast<long>(ipow(p, i)))));
        eu[static_cast<size_t>(n)] = v;
    }
    out.integral = true;
    for (int n = 1; n <= r; ++n) out.integral = out.integral && value_integral(TQ, eu[static_cast<size_t>(n)], p);
    if (!out.integral) throw IntegralityFailure("right unit image is not p-integral");
    for (int n = 1; n <= r; ++n) out.eta_u[static_cast<size_t>(n)] = convert(TQ, eu[static_cast<size_t>(n)], T);

    std::vector<Value> counit;
    for (int i = 0; i < r; ++i) counit.push_back(T->gen(i));
    for (int i = 0; i < r; ++i) counit.push_back(T->zero());
    out.counit_ok = true;
    for (int n = 1; n <= r; ++n) out.counit_ok = out.counit_ok && T->eq(evaluate(T, out.eta_u[static_cast<size_t>(n)], T, counit), T->gen(n - 1));

    PTypicalLaw U = universal_p_typical(p, std::max(N, 2));
    std::vector<Value> left, right;
    for (int i = 0; i < r; ++i) {
        left.push_back(T->gen(i));
        right.push_back(out.eta_u[static_cast<size_t>(i) + 1]);
    }
    FormalGroupLaw FL = specialize(U.law, T, left), FR = specialize(U.law, T, right);
    const int M = FL.bound();
    TruncSeries g = TruncSeries::variable(T, kX, M, 0);
    for (int j = 1; j <= r; ++j) g = formal_sum(FL, g, monomial_series(T, kX, M, static_cast<int>(ipow(p, j)), T->gen(r + j - 1)));
    out.isomorphism_ok = check_homomorphism(g, FR, FL).is_hom;
    return out;
}

// ---------------------------------------------------------------- Lubin-Tate

FormalGroupLaw specialize(const FormalGroupLaw& G, const Ring& to, const std::vector<Value>& images) {
    const Ring& from = G.ring();
    return FormalGroupLaw{series_map(G.F, to, [&](const Value& c) { return evaluate(from, c, to, images); }), false};
}

LubinTate lubin_tate_bud(int64_t p, int n, int K, int N, int m) {
    if (n < 1) throw InvalidArgument("height must be at least 1");
    PTypicalLaw U = universal_p_typical(p, N);
    const int r = ptypical_rank(p, N);
    RingSpec base = witt_ring(p, m, K);
    Ring T = make_ring(n > 1 ? RingSpec::polynomial(base, u_gens(p, n - 1)) : base);
    std::vector<Value> images;
    for (int k = 1; k <= r; ++k) images.push_back(k < n ? T->gen(k - 1) : k == n ? T->one() : T->zero());
    LubinTate out;
    out.law = specialize(U.law, T, images);

    Ring Fq = make_ring(residue_field(base));
    FormalGroupLaw fiber;
    if (n > 1) {
        std::vector<Value> zeros(static_cast<size_t>(n - 1), Fq->zero());
        fiber = specialize(out.law, Fq, zeros);
    } else {
        fiber = fgl_change_ring(out.law, Fq);
    }
    FormalGroupLaw H = fgl_change_ring(honda_fgl(p, n, N), Fq);
    out.special_fiber_is_honda = fiber.F == H.F;
    return out;
}

} // namespace fglab
