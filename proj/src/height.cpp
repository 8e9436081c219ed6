#include "fglab/height.hpp"

#include "fglab/ptypical.hpp"

namespace fglab {

namespace {

const std::vector<std::string> kX{"x"};

void require_char_p(const Ring& R, int64_t p) {
    if (R->characteristic() != p)
        throw WrongCharacteristic(R->name() + " does not have characteristic " + std::to_string(p));
}

int64_t char_prime(const Ring& R) {
    mpz_class c = R->characteristic();
    if (c == 0 || !c.fits_slong_p() || !is_prime(c.get_si()))
        throw WrongCharacteristic(R->name() + " is not of prime characteristic");
    return c.get_si();
}

bool is_scalar_field(const Ring& R) {
    return R->kind() == RingKind::PrimeField || R->kind() == RingKind::FiniteField;
}

// Index of the generator when v = unit * generator, otherwise -1.
int unit_times_generator(const Ring& R, const Value& v) {
    auto terms = poly_terms(R, v);
    if (terms.size() != 1 || !R->base()->is_unit(terms[0].second)) return -1;
    const Mono& m = terms[0].first;
    int which = -1;
    for (int i = 0; i < R->ngens(); ++i) {
        if (m[i] == 0) continue;
        if (m[i] != 1 || which >= 0) return -1;
        which = i;
    }
    return which;
}

} // namespace

std::string PSeriesData::height_str() const {
    if (!field) return "ideal chain";
    return height ? std::to_string(*height) : ">=" + std::to_string(hmax);
}

FormalGroupLaw reduce_mod_p(const FormalGroupLaw& G, int64_t p) {
    const Ring& R = G.ring();
    if (R->characteristic() == p) return G;
    const RingSpec& s = R->spec();
    const RingSpec& base = s.kind == RingKind::GradedPolynomial ? *s.base : s;
    RingSpec target;
    if (base.kind == RingKind::Integers) {
        target = change_base(s, RingSpec::prime_field(p));
    } else {
        if (base.p != p) throw WrongCharacteristic(R->name() + " has no reduction modulo " + std::to_string(p));
        target = residue_field(s);
    }
    return FormalGroupLaw{series_change_ring(G.F, make_ring(target)), G.graded};
}

PSeriesData p_series_analyze(const FormalGroupLaw& G, int64_t p, bool ptypical_coordinate) {
    const Ring& R = G.ring();
    require_char_p(R, p);
    PSeriesData out;
    out.p = p;
    const int N = G.bound();
    for (int64_t q = p; q <= N; q *= p) ++out.hmax;
    out.p_series = n_series(G, p);
    out.coefficients.assign(static_cast<size_t>(N) + 1, R->zero());
    for (auto& [k, c] : out.p_series.terms()) out.coefficients[static_cast<size_t>(key_degree(k))] = c;
    out.field = is_scalar_field(R);
    out.vn = R->zero();

    if (out.field) {
        int first = out.p_series.min_degree();
        if (first > N) return out;
        int h = 0;
        int64_t q = 1;
        while (q < first) {
            q *= p;
            ++h;
        }
        if (q != first) throw InvalidArgument("[p](x) starts in degree " + std::to_string(first) + ", not a power of p");
        for (auto& [k, c] : out.p_series.terms())
            if (key_degree(k) % q != 0)
                throw InvalidArgument("[p](x) has a term x^" + std::to_string(key_degree(k)) + " outside x^{p^h}");
        out.height = h;
        out.vn = out.coefficients[static_cast<size_t>(q)];
        out.vn_degree = static_cast<int>(q - 1);
        return out;
    }

    if (!ptypical_coordinate)
        throw UnsupportedBase("height over " + R->name() + " needs a p-typical coordinate (ideal chain)");
    if (R->kind() != RingKind::GradedPolynomial) throw UnsupportedBase(R->name());
    std::vector<Value> images;
    for (int i = 0; i < R->ngens(); ++i) images.push_back(R->gen(i));
    std::vector<std::string> gens{"p"};
    out.ideal_chain.push_back(gens);
    int64_t q = 1;
    for (int n = 1; n <= out.hmax; ++n) {
        q *= p;
        Value a = evaluate(R, out.coefficients[static_cast<size_t>(q)], R, images);
        if (!R->is_zero(a)) {
            if (R->is_unit(a)) {
                gens.push_back(R->render(a));
                out.ideal_chain.push_back(gens);
                break;
            }
            int g = unit_times_generator(R, a);
            if (g < 0) throw NotPTypicalCoordinate("v_" + std::to_string(n) + " = " + R->render(a) + " modulo I_" + std::to_string(n));
            gens.push_back(R->spec().gens[static_cast<size_t>(g)].name);
            images[static_cast<size_t>(g)] = R->zero();
        }
        out.ideal_chain.push_back(gens);
    }
    return out;
}

FrobeniusTwist frobenius_twist(const FormalGroupLaw& G) {
    const Ring& R = G.ring();
    const int64_t p = char_prime(R);
    FrobeniusTwist out;
    out.twist = FormalGroupLaw{series_map(G.F, R, [&](const Value& c) { return R->pow(c, p); }), G.graded};
    TruncSeries frob = series_pow(TruncSeries::variable(R, kX, G.bound(), 0), static_cast<int>(p));
    out.frobenius_is_hom = check_homomorphism(frob, G, out.twist).is_hom;
    return out;
}

TruncSeries frobenius_factor(const TruncSeries& phi) {
    const Ring& R = phi.ring();
    const int64_t p = char_prime(R);
    if (phi.nvars() != 1) throw InvalidArgument("frobenius_factor needs a univariate series");
    std::vector<TruncSeries::Entry> out;
    for (auto& [k, c] : phi.terms()) {
        int e = key_degree(k);
        if (e % p != 0) throw NonvanishingDerivative("term x^" + std::to_string(e) + " has exponent prime to " + std::to_string(p));
        out.emplace_back(pack_exponents({static_cast<int>(e / p)}), c);
    }
    return TruncSeries::from_terms(R, phi.vars(), static_cast<int>(phi.bound() / p), std::move(out));
}

TruncSeries verschiebung_series(const FormalGroupLaw& G, int n) {
    const int64_t p = char_prime(G.ring());
    TruncSeries V = n_series(G, p);
    for (int i = 0; i < n; ++i) {
        try {
            V = frobenius_factor(V);
        } catch (const NonvanishingDerivative& e) {
            throw HeightTooSmall("[p] does not factor through x^{p^" + std::to_string(i + 1) + "}: " + e.what());
        }
    }
    return V;
}

bool verschiebung_matches(const FormalGroupLaw& G, const TruncSeries& V, int n, const std::vector<Value>& u) {
    const int64_t p = char_prime(G.ring());
    if (n < 1 || static_cast<size_t>(n) > u.size()) throw InvalidArgument("need u_n");
    FormalGroupLaw cut{G.F.truncate(V.bound()), G.graded};
    std::vector<Value> rest(u.begin() + n, u.end());
    return araki_series(cut, p, rest, u[static_cast<size_t>(n - 1)]) == V;
}

} // namespace fglab
