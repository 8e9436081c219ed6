#include "fglab/hopfext.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "fglab/ptypical.hpp"

namespace fglab {

namespace {

const std::vector<std::string> kX{"x"};
const std::vector<std::string> kXY{"x", "y"};

int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Ring homomorphism out of a polynomial ring with cached generator powers.
class RingMap {
public:
    RingMap(Ring from, Ring to, std::vector<Value> images)
        : from_(std::move(from)), to_(std::move(to)), images_(std::move(images)), powers_(images_.size()) {}

    Value mono(const Mono& m) {
        Value x = to_->one();
        for (int i = 0; i < from_->ngens(); ++i)
            if (m[i]) x = to_->mul(x, power(i, m[i]));
        return x;
    }
    Value operator()(const Value& v) {
        Value acc = to_->zero();
        for (auto& [m, c] : poly_terms(from_, v)) to_->add_to(acc, to_->mul(convert(from_->base(), c, to_), mono(m)));
        return acc;
    }

private:
    const Value& power(int i, int e) {
        auto& P = powers_[static_cast<size_t>(i)];
        if (P.empty()) P.push_back(to_->one());
        while (static_cast<int>(P.size()) <= e) P.push_back(to_->mul(P.back(), images_[static_cast<size_t>(i)]));
        return P[static_cast<size_t>(e)];
    }

    Ring from_, to_;
    std::vector<Value> images_;
    std::vector<std::vector<Value>> powers_;
};

RingSpec chain_spec(const RingSpec& A, const std::vector<GenSpec>& extras, int s, const RingSpec& coefficients) {
    std::vector<GenSpec> gens = A.gens;
    for (int j = 1; j <= s; ++j)
        for (auto g : extras) {
            if (s > 1) g.name += "_" + std::to_string(j);
            gens.push_back(g);
        }
    if (gens.size() > static_cast<size_t>(kMaxGens))
        throw DegreeOverflow("A tensor Gamma^" + std::to_string(s) + " needs " + std::to_string(gens.size()) + " generators, more than " +
                             std::to_string(kMaxGens));
    return RingSpec::polynomial(coefficients, std::move(gens));
}

std::vector<GenSpec> extra_specs(const GradedHopfAlgebroid& H) {
    const auto& g = H.Gamma->spec().gens;
    return {g.begin() + H.base_gens(), g.end()};
}

bool homogeneous(const Ring& R, const Value& v, int degree) {
    for (auto& [m, c] : poly_terms(R, v))
        if (weighted_degree(R->spec(), m) != degree) return false;
    return true;
}

mpz_class as_integer(const Value& c) {
    if (auto* q = std::get_if<mpq_class>(&c)) {
        if (q->get_den() != 1) throw InvalidArgument("non-integral matrix entry");
        return q->get_num();
    }
    if (auto* i = std::get_if<int64_t>(&c)) return mpz_class(static_cast<long>(*i));
    throw InvalidArgument("unexpected coefficient payload");
}

// Chain rings A tensor Gamma^s (s <= S) over one coefficient ring, with the cofaces between them.
class Chains {
public:
    Chains(const GradedHopfAlgebroid& H, const Ring& coefficients, int S) : H_(H), nb_(H.base_gens()), ne_(H.extra_gens()) {
        for (int s = 0; s <= S; ++s) R_.push_back(H.chain_ring(s, coefficients));
        for (auto& v : H.eta_R) eta_.push_back(convert(H.Gamma, v, R_[1]));
        if (S >= 2)
            for (auto& v : H.delta) delta_.push_back(convert(H.chain_ring(2), v, R_[2]));
    }

    const Ring& ring(int s) const { return R_[static_cast<size_t>(s)]; }
    int slot_gen(int j, int e) const { return nb_ + (j - 1) * ne_ + e; }

    // Images in R_s of the A generators sitting in slot j, pushed to the far left.
    const std::vector<Value>& pushed(int s, int j) {
        auto key = std::make_pair(s, j);
        auto it = pushed_.find(key);
        if (it != pushed_.end()) return it->second;
        std::vector<Value> out;
        const Ring& R = ring(s);
        if (j == 1) {
            for (int i = 0; i < nb_; ++i) out.push_back(R->gen(i));
        } else {
            std::vector<Value> img = pushed(s, j - 1);
            for (int e = 0; e < ne_; ++e) img.push_back(R->gen(slot_gen(j - 1, e)));
            RingMap f(ring(1), R, img);
            for (auto& v : eta_) out.push_back(f(v));
        }
        return pushed_.emplace(key, std::move(out)).first->second;
    }

    // A Gamma tensor Gamma element in slots (j, j+1) of R_s.
    Value place_pair(int s, int j, const Value& v) {
        std::vector<Value> img = pushed(s, j);
        for (int e = 0; e < ne_; ++e) img.push_back(ring(s)->gen(slot_gen(j, e)));
        for (int e = 0; e < ne_; ++e) img.push_back(ring(s)->gen(slot_gen(j + 1, e)));
        return RingMap(ring(2), ring(s), img)(v);
    }

    // Generator images of the coface d^i: R_s -> R_{s+1}.
    std::vector<Value> coface(int s, int i) {
        const Ring& T = ring(s + 1);
        std::vector<Value> img;
        if (i == 0) {
            img = pushed(s + 1, 2);
        } else {
            for (int k = 0; k < nb_; ++k) img.push_back(T->gen(k));
        }
        for (int j = 1; j <= s; ++j)
            for (int e = 0; e < ne_; ++e) {
                if (i == 0 || j > i) img.push_back(T->gen(slot_gen(j + 1, e)));
                else if (j < i || i == s + 1) img.push_back(T->gen(slot_gen(j, e)));
                else img.push_back(place_pair(s + 1, j, delta_[static_cast<size_t>(e)]));
            }
        return img;
    }

    const std::vector<Value>& eta() const { return eta_; }
    const std::vector<Value>& delta() const { return delta_; }

private:
    const GradedHopfAlgebroid& H_;
    int nb_, ne_;
    std::vector<Ring> R_;
    std::vector<Value> eta_, delta_;
    std::map<std::pair<int, int>, std::vector<Value>> pushed_;
};

// All monomials of weighted degree d in the listed generators.
void monomials(const RingSpec& spec, const std::vector<int>& gens, size_t at, int d, Mono& cur, std::vector<Mono>& out) {
    if (d == 0) {
        out.push_back(cur);
        return;
    }
    if (at == gens.size()) return;
    const int g = gens[at];
    const int deg = spec.gens[static_cast<size_t>(g)].degree;
    for (int e = 0; e * deg <= d; ++e) {
        cur[g] = static_cast<int16_t>(e);
        monomials(spec, gens, at + 1, d - e * deg, cur, out);
        if (deg == 0) break;
    }
    cur[g] = 0;
}

std::vector<Mono> monomials(const RingSpec& spec, const std::vector<int>& gens, int d) {
    std::vector<Mono> out;
    if (d < 0) return out;
    Mono cur;
    monomials(spec, gens, 0, d, cur, out);
    return out;
}

} // namespace

// ---------------------------------------------------------------- universal bud

UniversalBud universal_bud(int n) {
    if (n < 2) throw InvalidArgument("the universal bud needs n >= 2");
    if (n - 1 > kMaxGens) throw DegreeOverflow("too many bud coordinates");
    std::vector<GenSpec> gens;
    for (int i = 1; i < n; ++i) gens.push_back({"x" + std::to_string(i), i, false});
    Ring A = make_ring(RingSpec::polynomial(RingSpec::integers(), gens));
    UniversalBud U;
    U.n = n;
    U.lambda.resize(static_cast<size_t>(n) + 1);
    TruncSeries F = TruncSeries::parse_expr(A, kXY, 1, "x+y");
    for (int k = 2; k <= n; ++k) {
        // a rational extension from the logarithm of the (k-1)-bud
        TruncSeries L = logarithm(FormalGroupLaw{F, true});
        const Ring& Q = L.ring();
        TruncSeries Lk = TruncSeries::from_terms(Q, kX, k, L.terms());
        TruncSeries sum = series_add(embed_univariate(Lk, kXY, 0), embed_univariate(Lk, kXY, 1));
        TruncSeries G = series_compose(series_reversion(Lk), sum);

        // Bezout coefficients for the cocycle coefficients kappa_i
        std::vector<mpz_class> kappa, lambda;
        mpz_class g = 0;
        for (int i = 1; i < k; ++i) {
            mpz_class b;
            mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(i));
            kappa.push_back(b / cocycle_divisor(k));
        }
        for (auto& c : kappa) {
            mpz_class ng, s, t;
            mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
            for (auto& l : lambda) l *= s;
            lambda.push_back(t);
            g = ng;
        }
        if (g != 1) throw IntegralityFailure("cocycle coefficients are not coprime in degree " + std::to_string(k));

        // gamma[mono][i-1] = rational coefficient of mono * x^i y^{k-i}
        std::map<std::vector<int16_t>, std::pair<Mono, std::vector<mpq_class>>> gamma;
        for (auto& [key, c] : G.terms()) {
            if (key_degree(key) != k) continue;
            const int i = key_exponent(key, 0);
            for (auto& [m, q] : poly_terms(Q, c)) {
                auto& slot = gamma[{m.e.begin(), m.e.end()}];
                slot.first = m;
                slot.second.resize(static_cast<size_t>(k - 1));
                slot.second[static_cast<size_t>(i - 1)] = std::get<mpq_class>(q);
            }
        }
        std::vector<std::vector<std::pair<Mono, Value>>> coeff(static_cast<size_t>(k - 1));
        for (auto& [key, entry] : gamma) {
            auto& [m, gam] = entry;
            mpq_class c = 0;
            for (size_t i = 0; i < gam.size(); ++i) c -= mpq_class(lambda[i]) * gam[i];
            for (size_t i = 0; i < gam.size(); ++i) {
                mpq_class v = gam[i] + c * mpq_class(kappa[i]);
                v.canonicalize();
                if (v.get_den() != 1)
                    throw IntegralityFailure("no integral extension in degree " + std::to_string(k) + " at " + render_mono(Q->spec(), m));
                if (v != 0) coeff[i].emplace_back(m, A->base()->from_rational(v));
            }
        }
        std::vector<TruncSeries::Entry> terms = F.terms();
        Mono top;
        top[k - 2] = 1;
        for (int i = 1; i < k; ++i) {
            auto c = coeff[static_cast<size_t>(i - 1)];
            c.emplace_back(top, A->base()->from_int(kappa[static_cast<size_t>(i - 1)]));
            terms.emplace_back(pack_exponents({i, k - i}), make_poly(A, std::move(c)));
        }
        F = TruncSeries::from_terms(A, kXY, k, std::move(terms));
        U.lambda[static_cast<size_t>(k)] = lambda;
    }
    U.law = FormalGroupLaw{F, true};
    return U;
}

std::vector<Value> bud_coordinates(const UniversalBud& U, const TruncSeries& G) {
    const Ring& R = G.ring();
    if (G.bound() < U.n) throw BoundMismatch("an " + std::to_string(U.n) + "-bud is needed");
    std::vector<Value> out;
    for (int k = 2; k <= U.n; ++k) {
        Value c = R->zero();
        const auto& lambda = U.lambda[static_cast<size_t>(k)];
        for (int i = 1; i < k; ++i) c = R->add(c, R->mul(R->from_int(lambda[static_cast<size_t>(i - 1)]), G.coeff({i, k - i})));
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------- algebroids

bool GradedHopfAlgebroid::verified() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const AlgebroidCheck& c) { return c.ok; });
}

Ring GradedHopfAlgebroid::chain_ring(int s, const Ring& coefficients) const {
    const RingSpec& base = coefficients ? coefficients->spec() : *A->spec().base;
    return make_ring(chain_spec(A->spec(), extra_specs(*this), s, base));
}

std::vector<AlgebroidCheck> verify_algebroid(const GradedHopfAlgebroid& H) {
    std::vector<AlgebroidCheck> out;
    Chains C(H, H.A->base(), 3);
    const Ring& G = C.ring(1);
    const Ring& G2 = C.ring(2);
    const int nb = H.base_gens(), ne = H.extra_gens();
    const auto& spec = G->spec();
    auto add = [&](std::string axiom, bool ok, std::string detail = {}) { out.push_back({std::move(axiom), ok, std::move(detail)}); };
    auto first_bad = [&](auto&& pred, int count, auto&& name) {
        for (int i = 0; i < count; ++i)
            if (!pred(i)) return std::string(name(i));
        return std::string();
    };
    auto gen_name = [&](int g) { return spec.gens[static_cast<size_t>(g)].name; };
    auto deg = [&](int g) { return spec.gens[static_cast<size_t>(g)].degree; };

    std::string bad = first_bad([&](int i) { return homogeneous(G, C.eta()[static_cast<size_t>(i)], deg(i)); }, nb,
                                [&](int i) { return "eta_R(" + gen_name(i) + ")"; });
    bad += first_bad([&](int e) { return homogeneous(G2, C.delta()[static_cast<size_t>(e)], deg(nb + e)); }, ne,
                     [&](int e) { return " Delta(" + gen_name(nb + e) + ")"; });
    bad += first_bad([&](int e) { return homogeneous(G, H.antipode[static_cast<size_t>(e)], deg(nb + e)); }, ne,
                     [&](int e) { return " c(" + gen_name(nb + e) + ")"; });
    add("degree-preserving", bad.empty(), bad);

    // epsilon: extras to zero
    std::vector<Value> eps;
    for (int i = 0; i < nb; ++i) eps.push_back(G->gen(i));
    for (int e = 0; e < ne; ++e) eps.push_back(G->zero());
    RingMap epsilon(G, G, eps);
    bad = first_bad([&](int i) { return G->eq(epsilon(C.eta()[static_cast<size_t>(i)]), G->gen(i)); }, nb,
                    [&](int i) { return "eps(eta_R(" + gen_name(i) + "))"; });
    add("counit of the units", bad.empty(), bad);

    // (id tensor eps) Delta and (eps tensor id) Delta
    std::vector<Value> left, right;
    for (int i = 0; i < nb; ++i) {
        left.push_back(G->gen(i));
        right.push_back(G->gen(i));
    }
    for (int e = 0; e < ne; ++e) {
        left.push_back(G->gen(nb + e));
        right.push_back(G->zero());
    }
    for (int e = 0; e < ne; ++e) {
        left.push_back(G->zero());
        right.push_back(G->gen(nb + e));
    }
    RingMap id_eps(G2, G, left), eps_id(G2, G, right);
    bad = first_bad(
        [&](int e) {
            const Value& d = C.delta()[static_cast<size_t>(e)];
            return G->eq(id_eps(d), G->gen(nb + e)) && G->eq(eps_id(d), G->gen(nb + e));
        },
        ne, [&](int e) { return "Delta(" + gen_name(nb + e) + ")"; });
    add("counit laws", bad.empty(), bad);

    // (Delta tensor id) Delta = (id tensor Delta) Delta, as cofaces d^1 d^1 = d^2 d^1
    RingMap d1(G2, C.ring(3), C.coface(2, 1)), d2(G2, C.ring(3), C.coface(2, 2));
    bad = first_bad([&](int e) { return C.ring(3)->eq(d1(C.delta()[static_cast<size_t>(e)]), d2(C.delta()[static_cast<size_t>(e)])); },
                    ne, [&](int e) { return "Delta(" + gen_name(nb + e) + ")"; });
    add("coassociativity", bad.empty(), bad);

    // antipode: c(x) = eta_R(x), c(e) from the table
    std::vector<Value> cimg = C.eta();
    for (auto& v : H.antipode) cimg.push_back(convert(H.Gamma, v, G));
    RingMap c(G, G, cimg);
    bad = first_bad([&](int g) { return G->eq(c(c(G->gen(g))), G->gen(g)); }, nb + ne, [&](int g) { return "c(c(" + gen_name(g) + "))"; });
    add("antipode is an involution", bad.empty(), bad);

    std::vector<Value> mu_c_id = C.eta(), mu_id_c;
    for (int i = 0; i < nb; ++i) mu_id_c.push_back(G->gen(i));
    for (int e = 0; e < ne; ++e) {
        mu_c_id.push_back(cimg[static_cast<size_t>(nb + e)]);
        mu_id_c.push_back(G->gen(nb + e));
    }
    for (int e = 0; e < ne; ++e) {
        mu_c_id.push_back(G->gen(nb + e));
        mu_id_c.push_back(cimg[static_cast<size_t>(nb + e)]);
    }
    RingMap f1(G2, G, mu_c_id), f2(G2, G, mu_id_c);
    bad = first_bad(
        [&](int e) {
            const Value& d = C.delta()[static_cast<size_t>(e)];
            return G->is_zero(f1(d)) && G->is_zero(f2(d));
        },
        ne, [&](int e) { return "Delta(" + gen_name(nb + e) + ")"; });
    add("antipode laws", bad.empty(), bad);
    return out;
}

BudAlgebroid build_bud_algebroid(int n, int T) {
    if (T < 0) throw InvalidArgument("negative degree bound");
    BudAlgebroid out;
    out.bud = universal_bud(n);
    GradedHopfAlgebroid& H = out.H;
    H.name = "bud(" + std::to_string(n) + ")";
    H.T = T;
    H.A = out.bud.law.ring();
    std::vector<GenSpec> extras;
    for (int i = 1; i < n; ++i) extras.push_back({"a" + std::to_string(i), i, false});
    H.Gamma = make_ring(chain_spec(H.A->spec(), extras, 1, RingSpec::integers()));
    const Ring& G = H.Gamma;
    const int nb = H.base_gens();

    // phi = x + a_1 x^2 + ... + a_{n-1} x^n acting on the universal bud
    auto universal_iso = [&](const Ring& R, int first) {
        std::vector<TruncSeries::Entry> t{{pack_exponents({1}), R->one()}};
        for (int i = 1; i < n; ++i) t.emplace_back(pack_exponents({i + 1}), R->gen(first + i - 1));
        return TruncSeries::from_terms(R, kX, n, std::move(t));
    };
    FormalGroupLaw F{series_change_ring(out.bud.law.F, G), true};
    TruncSeries phi = universal_iso(G, nb);
    FormalGroupLaw moved = coordinate_change(F, phi);
    H.eta_R = bud_coordinates(out.bud, moved.F);

    Ring G2 = H.chain_ring(2);
    TruncSeries comp = series_compose(universal_iso(G2, nb), universal_iso(G2, nb + n - 1));
    TruncSeries inv = series_reversion(phi);
    for (int i = 1; i < n; ++i) {
        H.delta.push_back(series_coeff(comp, i + 1));
        H.antipode.push_back(series_coeff(inv, i + 1));
    }

    H.checks = verify_algebroid(H);
    FormalGroupLaw classified = specialize(out.bud.law, G, H.eta_R);
    H.checks.push_back({"right unit classifies the transported bud", classified.F == moved.F, {}});
    H.checks.push_back({"universal bud axioms", validate_fgl(out.bud.law.F).ok(), validate_fgl(out.bud.law.F).str()});
    return out;
}

GradedHopfAlgebroid build_ptypical_algebroid(int64_t p, int T) {
    if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p));
    if (T < p - 1) throw InvalidArgument("the degree bound must reach deg u_1 = p - 1");
    const int r = ptypical_rank(p, T + 1);
    GradedHopfAlgebroid H;
    H.name = "ptypical(" + std::to_string(p) + ")";
    H.p = p;
    H.T = T;
    H.A = make_ring(ptypical_ring_spec(p, r, RingSpec::plocal(p)));
    std::vector<GenSpec> extras;
    for (int k = 1; k <= r; ++k) extras.push_back({"t" + std::to_string(k), static_cast<int>(ipow(p, k) - 1), false});
    H.Gamma = make_ring(chain_spec(H.A->spec(), extras, 1, RingSpec::plocal(p)));
    const Ring& G = H.Gamma;

    RightUnit ru = right_unit_images(p, T + 1);
    for (int k = 1; k <= r; ++k) H.eta_R.push_back(convert(ru.ring, ru.eta_u[static_cast<size_t>(k)], G));

    // Delta(t) and c(t) from logarithms over QQ, with l_0 = t_0 = 1:
    //   sum_{i+m=n} l_i Delta(t_m)^{p^i} = sum_{i+j+k=n} l_i t'_j^{p^i} t''_k^{p^{i+j}}
    //   sum_{i+j+k=n} l_i t_j^{p^i} c(t_k)^{p^{i+j}} = l_n
    LogData ld = ptypical_log(p, r, Convention::Araki);
    Ring Q2 = H.chain_ring(2, make_ring(RingSpec::rationals()));
    Ring Q1 = H.chain_ring(1, make_ring(RingSpec::rationals()));
    auto logs = [&](const Ring& R) {
        std::vector<Value> u;
        for (int i = 0; i < r; ++i) u.push_back(R->gen(i));
        std::vector<Value> l;
        for (auto& c : ld.coefficients) l.push_back(evaluate(ld.ring, c, R, u));
        return l;
    };
    std::vector<Value> l2 = logs(Q2), l1 = logs(Q1);
    auto tv = [&](const Ring& R, int slot, int j) { return j == 0 ? R->one() : R->gen(r + (slot - 1) * r + j - 1); };
    auto pw = [&](const Ring& R, const Value& v, int e) { return R->pow(v, static_cast<long>(ipow(p, e))); };

    std::vector<Value> D{Q2->one()}, Cn{Q1->one()};
    for (int n = 1; n <= r; ++n) {
        Value d = Q2->zero();
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                int k = n - i - j;
                d = Q2->add(d, Q2->mul(l2[static_cast<size_t>(i)], Q2->mul(pw(Q2, tv(Q2, 1, j), i), pw(Q2, tv(Q2, 2, k), i + j))));
            }
        for (int i = 1; i <= n; ++i) d = Q2->sub(d, Q2->mul(l2[static_cast<size_t>(i)], pw(Q2, D[static_cast<size_t>(n - i)], i)));
        D.push_back(d);

        Value c = l1[static_cast<size_t>(n)];
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                int k = n - i - j;
                if (k == n) continue;
                c = Q1->sub(c, Q1->mul(l1[static_cast<size_t>(i)], Q1->mul(pw(Q1, tv(Q1, 1, j), i), pw(Q1, Cn[static_cast<size_t>(k)], i + j))));
            }
        Cn.push_back(c);
    }
    auto integral = [&](const Ring& R, const Value& v, const std::string& what) {
        for (auto& [m, q] : poly_terms(R, v))
            if (!is_p_integral(std::get<mpq_class>(q), p))
                throw IntegralityFailure(what + ": coefficient of " + render_mono(R->spec(), m) + " is not " + std::to_string(p) + "-integral");
    };
    Ring G2 = H.chain_ring(2);
    for (int n = 1; n <= r; ++n) {
        integral(Q2, D[static_cast<size_t>(n)], "Delta(t" + std::to_string(n) + ")");
        integral(Q1, Cn[static_cast<size_t>(n)], "c(t" + std::to_string(n) + ")");
        H.delta.push_back(convert(Q2, D[static_cast<size_t>(n)], G2));
        H.antipode.push_back(convert(Q1, Cn[static_cast<size_t>(n)], G));
    }

    H.checks = verify_algebroid(H);
    H.checks.push_back({"right unit from the universal p-typical law", ru.integral && ru.counit_ok && ru.isomorphism_ok, {}});
    return H;
}

// ---------------------------------------------------------------- comodules and the cobar complex

std::string GradedComodule::str() const {
    std::string ideal;
    if (mod_p) ideal = "p";
    for (auto& k : killed) ideal += (ideal.empty() ? "" : ",") + k;
    std::string out = ideal.empty() ? "A" : "A/(" + ideal + ")";
    if (shift) out += "[" + std::to_string(shift) + "]";
    return out;
}

const std::vector<Mono>& CobarComplex::cells(int s, int t) const {
    static const std::vector<Mono> empty;
    auto it = basis.find({s, t});
    return it == basis.end() ? empty : it->second;
}

std::string CobarComplex::render(int s, const Mono& m) const {
    const int nb = H->base_gens(), ne = H->extra_gens();
    Mono a;
    for (int i = 0; i < nb; ++i) a[i] = m[i];
    std::string head = a.is_one() ? "" : render_mono(H->A->spec(), a);
    if (s == 0) return head.empty() ? "1" : head;
    std::string bar = "[";
    for (int j = 1; j <= s; ++j) {
        Mono g;
        for (int e = 0; e < ne; ++e) g[nb + e] = m[nb + (j - 1) * ne + e];
        bar += (j > 1 ? "|" : "") + render_mono(H->Gamma->spec(), g);
    }
    bar += "]";
    return head.empty() ? bar : head + " " + bar;
}

std::vector<mpz_class> CobarComplex::coordinates(int s, int t, const Value& v) const {
    const auto& B = cells(s, t);
    std::vector<mpz_class> out(B.size());
    for (auto& [m, c] : poly_terms(rings[static_cast<size_t>(s)], v)) {
        auto it = std::find(B.begin(), B.end(), m);
        if (it == B.end())
            throw InvalidArgument(render(s, m) + " is not a cell of C^{" + std::to_string(s) + "," + std::to_string(t) + "}");
        out[static_cast<size_t>(it - B.begin())] = as_integer(c);
    }
    return out;
}

CobarComplex cobar_complex(const GradedHopfAlgebroid& H, const GradedComodule& M, int s_max, int T, const ExtOptions& opts) {
    if (s_max < 0 || T < 0) throw InvalidArgument("negative range");
    if (T > H.T) throw DegreeOverflow("T = " + std::to_string(T) + " exceeds the algebroid bound " + std::to_string(H.T));
    CobarComplex C;
    C.H = &H;
    C.M = M;
    C.s_max = s_max;
    C.T = T;
    C.p = H.p ? H.p : opts.p;
    if (opts.p && H.p && opts.p != H.p) throw InvalidArgument("the algebroid is fixed at p = " + std::to_string(H.p));
    if (M.mod_p) {
        if (!C.p || !is_prime(C.p)) throw InvalidArgument("A/(p) needs a prime p");
        C.coefficients = Coefficients::PrimeField;
        C.K = 1;
        C.base = make_ring(RingSpec::prime_field(C.p));
    } else if (opts.K > 0) {
        if (!C.p || !is_prime(C.p)) throw InvalidArgument("precision needs a prime p");
        C.coefficients = Coefficients::PAdic;
        C.K = opts.K;
        C.base = make_ring(RingSpec::mod_prime_power(C.p, opts.K));
    } else {
        if (H.p) throw InvalidArgument("coefficients in ZZ_(p) need a precision K");
        C.base = make_ring(RingSpec::integers());
    }

    Chains ch(H, C.base, s_max + 1);
    for (int s = 0; s <= s_max + 1; ++s) C.rings.push_back(ch.ring(s));
    const int nb = H.base_gens(), ne = H.extra_gens();
    const RingSpec& A = H.A->spec();

    std::vector<bool> killed(static_cast<size_t>(nb), false);
    for (auto& k : M.killed) {
        auto it = std::find_if(A.gens.begin(), A.gens.end(), [&](const GenSpec& g) { return g.name == k; });
        if (it == A.gens.end()) throw UnknownVariable(k);
        killed[static_cast<size_t>(it - A.gens.begin())] = true;
    }
    auto reduce = [&](const Ring& R, const Value& v) {
        std::vector<std::pair<Mono, Value>> keep;
        for (auto& [m, c] : poly_terms(R, v)) {
            bool dead = false;
            for (int i = 0; i < nb; ++i) dead = dead || (killed[static_cast<size_t>(i)] && m[i] > 0);
            if (!dead) keep.emplace_back(m, c);
        }
        return make_poly(R, std::move(keep));
    };
    for (int i = 0; i < nb; ++i)
        if (killed[static_cast<size_t>(i)] && !C.rings[1]->is_zero(reduce(C.rings[1], ch.eta()[static_cast<size_t>(i)])))
            throw InvalidArgument("the ideal of " + M.str() + " is not invariant: eta_R(" + A.gens[static_cast<size_t>(i)].name +
                                  ") = " + C.rings[1]->render(ch.eta()[static_cast<size_t>(i)]));

    // cells
    std::vector<int> agens;
    for (int i = 0; i < nb; ++i)
        if (!killed[static_cast<size_t>(i)]) agens.push_back(i);
    for (int s = 0; s <= s_max + 1; ++s) {
        const RingSpec& spec = C.rings[static_cast<size_t>(s)]->spec();
        std::vector<std::vector<int>> slot(static_cast<size_t>(s) + 1);
        for (int j = 1; j <= s; ++j)
            for (int e = 0; e < ne; ++e) slot[static_cast<size_t>(j)].push_back(nb + (j - 1) * ne + e);
        std::vector<int> a_in_s = agens;
        for (int t = 0; t <= T; ++t) {
            const int w = t - M.shift;
            std::vector<Mono> cells;
            // distribute w over the A part and s nonempty slots
            std::function<void(int, int, Mono)> fill = [&](int j, int left, Mono cur) {
                if (j > s) {
                    for (auto& a : monomials(spec, a_in_s, left)) cells.push_back(cur + a);
                    return;
                }
                for (int d = 1; d <= left; ++d)
                    for (auto& m : monomials(spec, slot[static_cast<size_t>(j)], d)) fill(j + 1, left - d, cur + m);
            };
            if (w >= 0) fill(1, w, Mono{});
            std::sort(cells.begin(), cells.end(), [&](const Mono& a, const Mono& b) { return mono_less(spec, b, a); });
            C.basis[{s, t}] = std::move(cells);
        }
    }

    // differentials
    for (int s = 0; s <= s_max; ++s) {
        const Ring& S = C.rings[static_cast<size_t>(s)];
        const Ring& R = C.rings[static_cast<size_t>(s) + 1];
        std::vector<RingMap> faces;
        for (int i = 0; i <= s + 1; ++i) faces.emplace_back(S, R, ch.coface(s, i));
        for (int t = 0; t <= T; ++t) {
            const auto& src = C.cells(s, t);
            const auto& dst = C.cells(s + 1, t);
            std::unordered_map<Mono, size_t, MonoHash> index;
            for (size_t i = 0; i < dst.size(); ++i) index.emplace(dst[i], i);
            IntMatrix D(dst.size(), src.size());
            for (size_t col = 0; col < src.size(); ++col) {
                Value v = R->zero();
                for (int i = 0; i <= s + 1; ++i) {
                    Value f = faces[static_cast<size_t>(i)].mono(src[col]);
                    v = i % 2 ? R->sub(v, f) : R->add(v, f);
                }
                for (auto& [m, c] : poly_terms(R, reduce(R, v))) {
                    auto it = index.find(m);
                    if (it == index.end())
                        throw InvalidArgument("cobar differential leaves the normalized complex at " + C.render(s + 1, m));
                    D(it->second, col) = as_integer(c);
                }
            }
            C.d[{s, t}] = std::move(D);
        }
    }

    C.d_squared_zero = true;
    for (int s = 0; s < s_max; ++s)
        for (int t = 0; t <= T; ++t) {
            IntMatrix P = C.d.at({s + 1, t}) * C.d.at({s, t});
            bool zero = C.coefficients == Coefficients::Integers ? P.is_zero() : ModMatrix::reduce(P, C.p, C.K).is_zero();
            C.d_squared_zero = C.d_squared_zero && zero;
        }
    return C;
}

// ---------------------------------------------------------------- Ext

namespace {

struct Divisors {
    size_t rank = 0;
    std::vector<mpz_class> nonunit; // divisors > 1
};

Divisors divisors_of(const CobarComplex& C, int s, int t) {
    Divisors out;
    if (s < 0) return out;
    const IntMatrix& D = C.d.at({s, t});
    if (C.coefficients == Coefficients::Integers) {
        SmithForm S = smith_form(D);
        out.rank = S.rank();
        for (auto& d : S.divisors)
            if (d != 1) out.nonunit.push_back(d);
    } else {
        ModSmithForm S = smith_mod_prime_power(ModMatrix::reduce(D, C.p, C.K));
        out.rank = S.rank();
        for (int e : S.valuations)
            if (e > 0) out.nonunit.push_back(mpz_class(static_cast<long>(ipow(C.p, e))));
    }
    return out;
}

} // namespace

const ExtGroup& ExtChart::at(int s, int t) const {
    static const ExtGroup zero;
    auto it = groups.find({s, t});
    return it == groups.end() ? zero : it->second;
}

std::string ExtChart::group_str(const ExtGroup& g) const {
    if (g.is_zero()) return "0";
    std::vector<std::string> parts;
    if (g.free_rank) {
        std::string f = coefficients == Coefficients::Integers ? "Z"
                        : coefficients == Coefficients::PAdic ? "Z_(" + std::to_string(p) + ")"
                                                               : "F" + std::to_string(p);
        parts.push_back(g.free_rank == 1 ? f : f + "^" + std::to_string(g.free_rank));
    }
    for (auto& d : g.torsion) parts.push_back("Z/" + d.get_str());
    std::string out;
    for (auto& s : parts) out += (out.empty() ? "" : "+") + s;
    return out;
}

std::string ExtChart::precision() const {
    if (coefficients == Coefficients::PAdic) return "mod " + std::to_string(p) + "^" + std::to_string(K);
    return "exact";
}

std::string ExtChart::table() const {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> head{"s\\t"};
    for (int t = 0; t <= T; ++t) head.push_back(std::to_string(t));
    cells.push_back(head);
    for (int s = s_max; s >= 0; --s) {
        std::vector<std::string> row{std::to_string(s)};
        for (int t = 0; t <= T; ++t) {
            const ExtGroup& g = at(s, t);
            row.push_back(g.is_zero() ? "." : group_str(g));
        }
        cells.push_back(row);
    }
    std::vector<size_t> width(head.size(), 0);
    for (auto& r : cells)
        for (size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
    std::ostringstream out;
    for (auto& r : cells) {
        std::string line;
        for (size_t j = 0; j < r.size(); ++j) {
            if (j) line += "  ";
            line += std::string(width[j] - r[j].size(), ' ') + r[j];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    }
    return out.str();
}

ExtChart ext_chart(const CobarComplex& C, bool strict) {
    ExtChart out;
    out.s_max = C.s_max;
    out.T = C.T;
    out.coefficients = C.coefficients;
    out.p = C.p;
    out.K = C.K;
    out.d_squared_zero = C.d_squared_zero;
    for (int t = 0; t <= C.T; ++t) {
        Divisors prev = divisors_of(C, -1, t);
        for (int s = 0; s <= C.s_max; ++s) {
            Divisors cur = divisors_of(C, s, t);
            ExtGroup g;
            g.free_rank = static_cast<int>(C.cells(s, t).size() - cur.rank - prev.rank);
            g.torsion = prev.nonunit;
            if (strict && C.coefficients == Coefficients::PAdic && s > 0 && g.free_rank > 0)
                throw PrecisionExhausted("Ext^{" + std::to_string(s) + "," + std::to_string(t) + "} has summands not resolved below " +
                                         std::to_string(C.p) + "^" + std::to_string(C.K) + "; try a larger K");
            out.groups[{s, t}] = std::move(g);
            prev = std::move(cur);
        }
    }
    return out;
}

ExtChart ext_chart(const GradedHopfAlgebroid& H, const GradedComodule& M, int s_max, int T, const ExtOptions& opts) {
    return ext_chart(cobar_complex(H, M, s_max, T, opts), opts.strict);
}

ClassOrder class_order(const CobarComplex& C, int s, int t, const Value& element) {
    if (s < 0 || s > C.s_max || t < 0 || t > C.T) throw InvalidArgument("bidegree out of range");
    ClassOrder out;
    std::vector<mpz_class> v = C.coordinates(s, t, element);
    const IntMatrix& D = C.d.at({s, t});
    const bool exact = C.coefficients == Coefficients::Integers;
    const mpz_class q = exact ? mpz_class(0) : mpz_class(static_cast<long>(ipow(C.p, C.K)));
    out.cocycle = true;
    for (size_t i = 0; i < D.rows; ++i) {
        mpz_class acc = 0;
        for (size_t j = 0; j < D.cols; ++j) acc += D(i, j) * v[j];
        if (exact ? acc != 0 : acc % q != 0) out.cocycle = false;
    }
    if (!out.cocycle) return out;

    IntMatrix prevD = s > 0 ? C.d.at({s - 1, t}) : IntMatrix(v.size(), 0);
    if (exact) {
        SmithForm S = smith_form(prevD, true);
        mpz_class order = 1;
        for (size_t i = 0; i < v.size(); ++i) {
            mpz_class w = 0;
            for (size_t j = 0; j < v.size(); ++j) w += S.left(i, j) * v[j];
            if (w == 0) continue;
            if (i >= S.rank()) {
                out.infinite = true;
                continue;
            }
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), S.divisors[i].get_mpz_t(), w.get_mpz_t());
            mpz_class need = S.divisors[i] / g;
            mpz_lcm(order.get_mpz_t(), order.get_mpz_t(), need.get_mpz_t());
        }
        out.order = out.infinite ? mpz_class(0) : order;
        return out;
    }
    ModMatrix M = ModMatrix::reduce(prevD, C.p, C.K);
    ModSmithForm S = smith_mod_prime_power(M, true);
    int exponent = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        mpz_class w = 0;
        for (size_t j = 0; j < v.size(); ++j) w += mpz_class(static_cast<long>(S.left(i, j))) * v[j];
        mpz_fdiv_r(w.get_mpz_t(), w.get_mpz_t(), q.get_mpz_t());
        if (w == 0) continue;
        int val = mod_valuation(w.get_si(), C.p, C.K);
        if (i >= S.rank()) {
            out.beyond_precision = C.coefficients == Coefficients::PAdic;
            exponent = std::max(exponent, C.K - val);
        } else {
            exponent = std::max(exponent, S.valuations[i] - val);
        }
    }
    out.order = mpz_class(static_cast<long>(ipow(C.p, exponent)));
    return out;
}

} // namespace fglab
