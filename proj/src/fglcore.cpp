#include "fglab/fglcore.hpp"

#include <sstream>

namespace fglab {

namespace {

const std::vector<std::string> kXY{"x", "y"};
const std::vector<std::string> kXYZ{"x", "y", "z"};

// Lowest-degree monomial where a and b differ, or "" when equal.
std::string first_difference(const TruncSeries& a, const TruncSeries& b) {
    TruncSeries d = series_sub(a, b);
    if (d.is_zero()) return "";
    return render_key(d.terms().front().first, d.vars());
}

} // namespace

std::string render_key(SeriesKey k, const std::vector<std::string>& vars) {
    std::string out;
    for (size_t i = 0; i < vars.size(); ++i) {
        int e = key_exponent(k, static_cast<int>(i));
        if (!e) continue;
        if (!out.empty()) out += "*";
        out += vars[i];
        if (e > 1) out += "^" + std::to_string(e);
    }
    return out.empty() ? "1" : out;
}

TruncSeries embed_univariate(const TruncSeries& phi, const std::vector<std::string>& vars, int var) {
    return series_reindex(phi, vars, {var});
}

std::string ValidationReport::str() const {
    if (failures.empty()) return "ok";
    std::string out;
    for (auto& f : failures) {
        if (!out.empty()) out += "; ";
        out += f.axiom + " fails at " + f.monomial;
    }
    return out;
}

ValidationReport validate_fgl(const TruncSeries& F) {
    ValidationReport rep;
    if (F.nvars() != 2) throw InvalidArgument("a formal group law has two variables");
    const Ring& R = F.ring();
    const int N = F.bound();
    TruncSeries x = TruncSeries::variable(R, F.vars(), N, 0);
    TruncSeries y = TruncSeries::variable(R, F.vars(), N, 1);
    std::string m = first_difference(series_set_zero(F, 1), x);
    if (m.empty()) m = first_difference(series_set_zero(F, 0), y);
    if (!m.empty()) rep.failures.push_back({"unit", m});
    m = first_difference(series_reindex(F, F.vars(), {1, 0}), F);
    if (!m.empty()) rep.failures.push_back({"commutativity", m});
    std::vector<std::string> v3 = {F.vars()[0], F.vars()[1], "z"};
    if (v3[2] == v3[0] || v3[2] == v3[1]) v3[2] = "w_";
    TruncSeries Fxy = series_reindex(F, v3, {0, 1});
    TruncSeries Fyz = series_reindex(F, v3, {1, 2});
    TruncSeries X = TruncSeries::variable(R, v3, N, 0);
    TruncSeries Z = TruncSeries::variable(R, v3, N, 2);
    TruncSeries lhs = series_substitute(F, {Fxy, Z});
    TruncSeries rhs = series_substitute(F, {X, Fyz});
    m = first_difference(lhs, rhs);
    if (!m.empty()) rep.failures.push_back({"associativity", m});
    return rep;
}

FormalGroupLaw make_fgl(TruncSeries F, bool graded) {
    ValidationReport rep = validate_fgl(F);
    if (!rep.ok()) throw InvalidArgument("not a formal group law bud: " + rep.str());
    return FormalGroupLaw{std::move(F), graded};
}

FormalGroupLaw additive_fgl(const Ring& r, int bound) {
    return FormalGroupLaw{TruncSeries::parse_expr(r, kXY, bound, "x+y"), false};
}

FormalGroupLaw multiplicative_fgl(const Ring& r, int bound) {
    return FormalGroupLaw{TruncSeries::parse_expr(r, kXY, bound, "x+y+x*y"), false};
}

FormalGroupLaw fgl_change_ring(const FormalGroupLaw& G, const Ring& to) {
    return FormalGroupLaw{series_change_ring(G.F, to), G.graded};
}

std::string write_fgl(const FormalGroupLaw& G) {
    std::ostringstream out;
    out << "ring=" << G.ring()->name() << "; bound=" << G.bound() << "; grading=" << (G.graded ? "declared" : "none")
        << "\n"
        << G.F.str() << "\n";
    return out.str();
}

FormalGroupLaw read_fgl(std::string_view text) {
    auto nl = text.find('\n');
    if (nl == std::string_view::npos) throw ParseError("FGL file needs a header line");
    std::string header(text.substr(0, nl));
    std::string ring_spec, grading = "none";
    int bound = -1;
    std::istringstream hs(header);
    std::string field;
    while (std::getline(hs, field, ';')) {
        auto b = field.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        field = field.substr(b);
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError("bad header field '" + field + "'");
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "ring")
            ring_spec = val;
        else if (key == "bound")
            bound = std::stoi(val);
        else if (key == "grading")
            grading = val;
        else
            throw ParseError("unknown header field '" + key + "'");
    }
    if (ring_spec.empty() || bound < 0) throw ParseError("header needs ring= and bound=");
    Ring R = make_ring(ring_spec);
    TruncSeries F = TruncSeries::parse(R, text.substr(nl + 1));
    if (F.bound() != bound) throw BoundMismatch("header bound differs from series bound");
    return make_fgl(std::move(F), grading == "declared");
}

// ---------------------------------------------------------------- cocycles

long cocycle_divisor(int n) {
    auto [p, k] = prime_power(n);
    return p ? static_cast<long>(p) : 1;
}

TruncSeries symmetric_cocycle(int n, const Ring& r) {
    if (n < 2) throw InvalidArgument("cocycles start in degree 2");
    mpz_class d = cocycle_divisor(n);
    std::vector<TruncSeries::Entry> t;
    mpz_class binom;
    for (int i = 1; i < n; ++i) {
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(i));
        if (binom % d != 0) throw IntegralityFailure("binomial not divisible by d_n");
        t.emplace_back(pack_exponents({i, n - i}), r->from_int(binom / d));
    }
    return TruncSeries::from_terms(r, kXY, n, std::move(t));
}

TruncSeries symmetric_cocycle(int n) { return symmetric_cocycle(n, make_ring("ZZ")); }

// ---------------------------------------------------------------- n-series

TruncSeries formal_sum(const FormalGroupLaw& G, const TruncSeries& a, const TruncSeries& b) {
    const FormalGroupLaw* g = &G;
    FormalGroupLaw cut;
    if (G.bound() > a.bound()) {
        cut = FormalGroupLaw{G.F.truncate(a.bound()), G.graded};
        g = &cut;
    }
    return series_substitute(g->F, {a, b});
}

TruncSeries formal_inverse(const FormalGroupLaw& G) {
    const Ring& R = G.ring();
    const int N = G.bound();
    const std::vector<std::string> X{"x"};
    TruncSeries x = TruncSeries::variable(R, X, N, 0);
    TruncSeries iota = series_neg(x);
    TruncSeries Fy = series_partial(G.F, 1);
    // Newton on y in F(x, y) = 0.
    for (int prec = 1; prec < N;) {
        prec = std::min(2 * prec + 1, N);
        TruncSeries xi = x.truncate(prec), ii = iota.truncate(prec);
        TruncSeries val = series_substitute(G.F.truncate(prec), {xi, ii});
        TruncSeries der = series_substitute(Fy.truncate(prec), {xi, ii});
        ii = series_sub(ii, series_mul(val, series_inverse(der)));
        iota = TruncSeries::from_terms(R, X, N, ii.terms());
    }
    return iota;
}

TruncSeries n_series(const FormalGroupLaw& G, long n) {
    const Ring& R = G.ring();
    const int N = G.bound();
    const std::vector<std::string> X{"x"};
    TruncSeries x = TruncSeries::variable(R, X, N, 0);
    if (n < 0) return series_compose(formal_inverse(G), n_series(G, -n));
    TruncSeries r(R, X, N);
    if (n == 0) return r;
    int top = 63;
    while (!((n >> top) & 1)) --top;
    for (int b = top; b >= 0; --b) {
        if (!r.is_zero()) r = formal_sum(G, r, r);
        if ((n >> b) & 1) r = r.is_zero() ? x : formal_sum(G, r, x);
    }
    return r;
}

TruncSeries n_series_inverse(const FormalGroupLaw& G, long n) {
    const Ring& R = G.ring();
    if (!R->is_unit(R->from_int(n))) throw NonUnitDenominator(std::to_string(n) + " is not a unit in " + R->name());
    return series_reversion(n_series(G, n));
}

// ---------------------------------------------------------------- coordinates

FormalGroupLaw coordinate_change(const FormalGroupLaw& G, const TruncSeries& phi) {
    const Ring& R = G.ring();
    Value a1 = series_coeff(phi, 1);
    if (!R->is_unit(a1)) throw NonUnitLinearCoefficient(R->render(a1));
    TruncSeries inv = series_reversion(phi);
    TruncSeries px = embed_univariate(phi, G.F.vars(), 0);
    TruncSeries py = embed_univariate(phi, G.F.vars(), 1);
    TruncSeries inner = series_substitute(G.F, {px, py});
    return FormalGroupLaw{series_compose(inv, inner), G.graded};
}

TruncSeries invariant_differential(const FormalGroupLaw& G) {
    TruncSeries Fx = series_set_zero(series_partial(G.F, 0), 0);
    TruncSeries d = series_reindex(Fx, {"x"}, {0, 0});
    d.set_reliable_bound(G.bound() - 1);
    return series_inverse(d);
}

TruncSeries logarithm(const FormalGroupLaw& G, bool rationalize) {
    TruncSeries f = invariant_differential(G);
    Ring R = G.ring();
    if (rationalize && R->torsion_free()) {
        R = make_ring(rationalization(R->spec()));
        f = series_change_ring(f, R);
    }
    std::vector<TruncSeries::Entry> out;
    for (auto& [k, c] : f.terms()) {
        int e = key_exponent(k, 0) + 1;
        if (e > G.bound()) continue;
        out.emplace_back(pack_exponents({e}), R->divide_by_integer(c, mpz_class(e)));
    }
    return TruncSeries::from_terms(R, {"x"}, G.bound(), std::move(out));
}

TruncSeries exponential(const FormalGroupLaw& G, bool rationalize) {
    return series_reversion(logarithm(G, rationalize));
}

HomCheck check_homomorphism(const TruncSeries& phi_in, const FormalGroupLaw& G, const FormalGroupLaw& H) {
    const int N = std::min({phi_in.bound(), G.bound(), H.bound()});
    TruncSeries phi = phi_in.truncate(N);
    TruncSeries F = G.F.truncate(N), F2 = H.F.truncate(N);
    HomCheck out;
    out.derivative = series_coeff(phi, 1);
    if (!phi.is_zero() && phi.terms()[0].first == 0) {
        out.first_failure = "1";
        return out;
    }
    TruncSeries lhs = series_compose(phi, F);
    TruncSeries px = embed_univariate(phi, F.vars(), 0);
    TruncSeries py = embed_univariate(phi, F.vars(), 1);
    TruncSeries rhs = series_substitute(F2, {px, py});
    out.first_failure = first_difference(lhs, rhs);
    out.is_hom = out.first_failure.empty();
    return out;
}

GradingReport grading_check(const FormalGroupLaw& G) {
    GradingReport rep;
    const Ring& R = G.ring();
    const bool poly = R->kind() == RingKind::GradedPolynomial;
    for (auto& [k, c] : G.F.terms()) {
        int want = key_degree(k) - 1;
        for (auto& [m, coef] : poly_terms(R, c)) {
            int have = poly ? weighted_degree(R->spec(), m) : 0;
            if (have != want) {
                std::string mono = poly ? render_mono(R->spec(), m) : "1";
                rep.failures.push_back("coefficient of " + render_key(k, G.F.vars()) + ": " + mono + " has degree " +
                                       std::to_string(have) + ", expected " + std::to_string(want));
            }
        }
    }
    // Symbolic check with a fresh central unit: lambda^{-1} F(lambda x, lambda y) must equal
    // F with every generator scaled by lambda^{degree}.
    RingSpec base = poly ? *R->spec().base : R->spec();
    std::vector<GenSpec> gens = poly ? R->spec().gens : std::vector<GenSpec>{};
    if (static_cast<int>(gens.size()) >= kMaxGens) throw DegreeOverflow("no room for the grading unit");
    gens.push_back({"lambda_", 0, true});
    Ring L = make_ring(RingSpec::polynomial(base, gens, poly ? R->spec().relations : std::vector<std::string>{}));
    const int lam = static_cast<int>(gens.size()) - 1;
    Value lambda = L->gen(lam);
    TruncSeries FL = series_change_ring(G.F, L);
    TruncSeries lx = series_scale(TruncSeries::variable(L, FL.vars(), FL.bound(), 0), lambda);
    TruncSeries ly = series_scale(TruncSeries::variable(L, FL.vars(), FL.bound(), 1), lambda);
    TruncSeries lhs = series_scale(series_substitute(FL, {lx, ly}), L->inv(lambda));
    std::vector<Value> images;
    for (int i = 0; i < lam; ++i) images.push_back(L->mul(L->gen(i), L->pow(lambda, R->spec().gens[static_cast<size_t>(i)].degree)));
    TruncSeries rhs = series_map(FL, L, [&](const Value& c) {
        Value acc = L->zero();
        for (auto& [m, coef] : poly_terms(L, c)) {
            Value t = monomial(L, Mono{}, coef);
            for (int i = 0; i < lam; ++i)
                if (m[i]) t = L->mul(t, L->pow(images[static_cast<size_t>(i)], m[i]));
            acc = L->add(acc, t);
        }
        return acc;
    });
    bool symbolic_ok = series_sub(lhs, rhs).is_zero();
    rep.ok = rep.failures.empty() && symbolic_ok;
    if (!symbolic_ok && rep.failures.empty()) rep.failures.push_back("lambda-conjugation mismatch");
    return rep;
}

} // namespace fglab
