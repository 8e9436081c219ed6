#include "fglab/localcoh.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <regex>
#include <sstream>
#include <unordered_map>

#include "fglab/errors.hpp"

namespace fglab {

namespace {

MultiDeg operator+(MultiDeg a, const MultiDeg& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

MultiDeg operator-(MultiDeg a, const MultiDeg& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

MultiDeg scaled(MultiDeg a, int k) {
    for (auto& x : a) x *= k;
    return a;
}

bool dominates(const MultiDeg& d, const std::vector<std::optional<int>>& lo) {
    for (size_t i = 0; i < d.size(); ++i)
        if (lo[i] && d[i] < *lo[i]) return false;
    return true;
}

std::string deg_str(const MultiDeg& d) {
    std::string s = "(";
    for (size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + ")";
}

int64_t mulmod(int64_t a, int64_t b, int64_t q) { return static_cast<int64_t>(static_cast<__int128>(a) * b % q); }

ModMatrix zero_matrix(size_t r, size_t c, const GradedRing& R) { return ModMatrix(r, c, R.p, R.K); }

ModMatrix identity(size_t n, const GradedRing& R) { return identity_mod(n, R.p, R.K); }

// Howell span of the whole ambient module.
ModSpan full_span(size_t n, int64_t p, int K) {
    ModSpan S(p, K, n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<int64_t> v(n, 0);
        v[i] = 1;
        S.add(std::move(v));
    }
    return S;
}

int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

// X with V X = Y modulo N, column by column; V must be onto modulo N.
ModMatrix lift_through(const ModMatrix& V, const ModSpan& N, const ModMatrix& Y) {
    const size_t m = V.rows, n = V.cols;
    ModSpan big(V.p, V.K, m + n);
    for (auto& r : N.rows()) {
        std::vector<int64_t> v(m + n, 0);
        std::copy(r.begin(), r.end(), v.begin());
        big.add(std::move(v));
    }
    for (size_t j = 0; j < n; ++j) {
        std::vector<int64_t> v(m + n, 0);
        for (size_t i = 0; i < m; ++i) v[i] = V(i, j);
        v[m + j] = 1;
        big.add(std::move(v));
    }
    ModMatrix X(n, Y.cols, V.p, V.K);
    for (size_t c = 0; c < Y.cols; ++c) {
        std::vector<int64_t> y(m + n, 0);
        for (size_t i = 0; i < m; ++i) y[i] = Y(i, c);
        y = big.reduce(std::move(y));
        for (size_t i = 0; i < m; ++i)
            if (y[i]) throw InvalidArgument("transport through a non-surjective stage map");
        for (size_t j = 0; j < n; ++j) X(j, c) = y[m + j] ? V.q - y[m + j] : 0;
    }
    return X;
}

bool injective(const ModMatrix& f, const FinMod& src, const FinMod& tgt) {
    return kernel_mod(f, tgt.rel).length() == src.rel.length();
}

bool surjective(const ModMatrix& f, const FinMod& src, const FinMod& tgt) {
    return image_mod(f, src.full(), tgt.rel).length() == static_cast<int>(tgt.dim()) * tgt.rel.K();
}

// Monomial exponents and multidegree of a monomial in Lambda[u_1..u_N].
MultiDeg mono_deg(const GradedRing& R, const Mono& m) {
    MultiDeg d = R.zero();
    for (int v = 0; v < R.nvars(); ++v)
        if (m[v]) d = d + scaled(R.shift(v), m[v]);
    return d;
}

struct Element {
    Value value;
    MultiDeg deg;
    std::vector<std::pair<Mono, int64_t>> terms;
    int p_valuation = -1; // for a constant: its valuation (K for zero)
    bool unit = false;
};

std::vector<std::pair<Mono, int64_t>> int_terms(const Ring& P, const Value& v) {
    std::vector<std::pair<Mono, int64_t>> out;
    for (auto& [m, c] : poly_terms(P, v)) out.emplace_back(m, std::get<int64_t>(c));
    return out;
}

Element make_element(const GradedRing& R, const Ring& P, const Value& v) {
    Element e;
    e.value = v;
    e.terms = int_terms(P, v);
    if (e.terms.empty()) {
        e.deg = R.zero();
        e.p_valuation = R.K;
        return e;
    }
    e.deg = mono_deg(R, e.terms[0].first);
    for (auto& [m, c] : e.terms)
        if (mono_deg(R, m) != e.deg) throw InvalidArgument("ideal generator " + P->render(v) + " is not homogeneous");
    if (e.terms.size() == 1 && e.terms[0].first.is_one()) {
        e.p_valuation = mod_valuation(e.terms[0].second, R.p, R.K);
        e.unit = e.p_valuation == 0;
    }
    return e;
}

// Multiplication by an element from piece(d).
ModMatrix act_element(const DegreewiseModule& M, const Element& x, const MultiDeg& d) {
    const GradedRing& R = M.ring();
    const size_t n = M.piece(d).dim(), m = M.piece(d + x.deg).dim();
    ModMatrix out = zero_matrix(m, n, R);
    for (auto& [mono, c] : x.terms) {
        ModMatrix A = M.act_mono(mono, d);
        for (size_t i = 0; i < out.a.size(); ++i) out.a[i] = (out.a[i] + mulmod(A.a[i], c, out.q)) % out.q;
    }
    return out;
}

Element power(const GradedRing& R, const Ring& P, const Element& x, int k) { return make_element(R, P, P->pow(x.value, k)); }

} // namespace

// ---------------------------------------------------------------- rings and groups

MultiDeg GradedRing::shift(int var) const {
    MultiDeg d = zero();
    if (var < core) d[0] = degrees[static_cast<size_t>(var)];
    else d[static_cast<size_t>(var - core) + 1] = 1;
    return d;
}

int GradedRing::internal(const MultiDeg& d) const {
    int t = d[0];
    for (int j = 0; j < nfree(); ++j) t += d[static_cast<size_t>(j) + 1] * degrees[static_cast<size_t>(core + j)];
    return t;
}

int GradedRing::index(const std::string& name) const {
    for (int i = 0; i < nvars(); ++i)
        if (names[static_cast<size_t>(i)] == name) return i;
    throw UnknownVariable(name);
}

Ring GradedRing::poly() const {
    std::vector<GenSpec> gens;
    for (int i = 0; i < nvars(); ++i) gens.push_back({names[static_cast<size_t>(i)], degrees[static_cast<size_t>(i)], false});
    return make_ring(RingSpec::polynomial(RingSpec::mod_prime_power(p, K), gens));
}

std::string GradedRing::str() const {
    std::string s = "Z/" + std::to_string(p) + (K > 1 ? "^" + std::to_string(K) : "") + "[";
    for (int i = 0; i < nvars(); ++i) s += (i ? "," : "") + names[static_cast<size_t>(i)];
    return s + "]";
}

GradedRing v_truncation(int64_t p, int K, int N, int core) {
    if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p));
    if (K < 1) throw InvalidArgument("precision K must be positive");
    if (N < 0 || N > kMaxGens || core < 0 || core > N) throw InvalidArgument("bad variable counts");
    GradedRing R;
    R.p = p;
    R.K = K;
    R.core = core;
    int64_t pk = 1;
    for (int k = 1; k <= N; ++k) {
        pk *= p;
        if (pk - 1 > std::numeric_limits<int>::max() / 64) throw DegreeOverflow("degree of u" + std::to_string(k));
        R.names.push_back("u" + std::to_string(k));
        R.degrees.push_back(static_cast<int>(pk - 1));
    }
    return R;
}

ModSpan FinMod::full() const { return full_span(dim(), rel.p(), rel.K()); }

int GroupType::length() const {
    int l = 0;
    for (int e : exps) l += e;
    return l;
}

std::string GroupType::str(int64_t p) const {
    if (exps.empty()) return "0";
    std::string s;
    size_t i = 0;
    while (i < exps.size()) {
        size_t j = i;
        while (j < exps.size() && exps[j] == exps[i]) ++j;
        std::string one = "Z/" + std::to_string(p) + (exps[i] > 1 ? "^" + std::to_string(exps[i]) : "");
        if (!s.empty()) s += "+";
        s += (j - i > 1) ? "(" + one + ")^" + std::to_string(j - i) : one;
        i = j;
    }
    return s;
}

GroupType group_type(const FinMod& M) { return GroupType{quotient_type(M.full(), M.rel)}; }

GroupType operator+(GroupType a, const GroupType& b) {
    a.exps.insert(a.exps.end(), b.exps.begin(), b.exps.end());
    std::sort(a.exps.rbegin(), a.exps.rend());
    return a;
}

ModMatrix DegreewiseModule::act_mono(const Mono& m, const MultiDeg& d) const {
    const GradedRing& R = ring();
    ModMatrix A = identity(piece(d).dim(), R);
    MultiDeg cur = d;
    for (int v = 0; v < R.nvars(); ++v)
        for (int e = 0; e < m[v]; ++e) {
            A = act(v, cur) * A;
            cur = cur + R.shift(v);
        }
    return A;
}

// ---------------------------------------------------------------- presented modules

struct GradedModule::Basis {
    std::vector<std::unordered_map<Mono, int, MonoHash>> index; // per generator, by core monomial
    std::vector<std::pair<int, Mono>> elems;
    FinMod mod;
};

namespace {

// Core monomials of the given internal degree.
void core_monomials(const GradedRing& R, int var, int t, Mono& cur, std::vector<Mono>& out) {
    if (t == 0) {
        out.push_back(cur);
        return;
    }
    if (var == R.core || t < 0) return;
    const int deg = R.degrees[static_cast<size_t>(var)];
    for (int e = 0; e * deg <= t; ++e) {
        cur[var] = static_cast<int16_t>(e);
        core_monomials(R, var + 1, t - e * deg, cur, out);
    }
    cur[var] = 0;
}

std::vector<Mono> core_monomials(const GradedRing& R, int t) {
    std::vector<Mono> out;
    Mono cur;
    core_monomials(R, 0, t, cur, out);
    return out;
}

Mono core_part(const GradedRing& R, Mono m) {
    for (int v = R.core; v < R.nvars(); ++v) m[v] = 0;
    return m;
}

} // namespace

GradedModule::GradedModule(GradedRing R, std::vector<MultiDeg> generators, std::vector<std::vector<Value>> relations, bool lifted,
                           std::string name)
    : R_(std::move(R)), P_(R_.poly()), gens_(std::move(generators)), rels_(std::move(relations)), lifted_(lifted), name_(std::move(name)) {
    for (auto& g : gens_) {
        if (g.size() != R_.zero().size()) throw InvalidArgument("generator degree has the wrong shape");
        settle_ = std::max(settle_, R_.internal(g));
    }
    for (auto& rel : rels_) {
        if (rel.size() != gens_.size()) throw InvalidArgument("relation length does not match the generators");
        std::optional<MultiDeg> deg;
        for (size_t g = 0; g < gens_.size(); ++g)
            for (auto& [m, c] : poly_terms(P_, rel[g])) {
                MultiDeg d = gens_[g] + mono_deg(R_, m);
                if (deg && *deg != d) throw InvalidArgument("relation is not homogeneous");
                deg = d;
            }
        rel_degs_.push_back(deg ? *deg : R_.zero());
        if (deg) settle_ = std::max(settle_, R_.internal(*deg));
    }
    if (name_.empty()) name_ = "module over " + R_.str();
}

std::shared_ptr<GradedModule> GradedModule::quotient(const GradedRing& R, const std::vector<std::string>& elements, bool lifted) {
    std::vector<std::vector<Value>> rels;
    for (auto& v : parse_ideal(R, elements)) rels.push_back({v});
    std::string name = "R";
    if (!elements.empty()) {
        name += "/(";
        for (size_t i = 0; i < elements.size(); ++i) name += (i ? "," : "") + elements[i];
        name += ")";
    }
    return std::make_shared<GradedModule>(R, std::vector<MultiDeg>{R.zero()}, std::move(rels), lifted, name);
}

const GradedModule::Basis& GradedModule::basis(const MultiDeg& d) const {
    auto it = cache_.find(d);
    if (it != cache_.end()) return *it->second;
    auto B = std::make_shared<Basis>();
    B->index.resize(gens_.size());
    for (size_t g = 0; g < gens_.size(); ++g) {
        MultiDeg rest = d - gens_[g];
        bool ok = true;
        for (size_t j = 1; j < rest.size(); ++j) ok = ok && rest[j] >= 0;
        if (!ok) continue;
        for (auto& m : core_monomials(R_, rest[0])) {
            B->index[g].emplace(m, static_cast<int>(B->elems.size()));
            B->elems.emplace_back(static_cast<int>(g), m);
        }
    }
    const size_t n = B->elems.size();
    B->mod.rel = ModSpan(R_.p, R_.K, n);
    for (size_t r = 0; r < rels_.size(); ++r) {
        MultiDeg rest = d - rel_degs_[r];
        bool ok = true;
        for (size_t j = 1; j < rest.size(); ++j) ok = ok && rest[j] >= 0;
        if (!ok) continue;
        for (auto& mu : core_monomials(R_, rest[0])) {
            std::vector<int64_t> v(n, 0);
            bool any = false;
            for (size_t g = 0; g < gens_.size(); ++g)
                for (auto& [nu, c] : int_terms(P_, rels_[r][g])) {
                    auto f = B->index[g].find(core_part(R_, mu + nu));
                    if (f == B->index[g].end()) continue;
                    auto& slot = v[static_cast<size_t>(f->second)];
                    slot = (slot + c) % B->mod.rel.q();
                    any = true;
                }
            if (any) B->mod.rel.add(std::move(v));
        }
    }
    return *cache_.emplace(d, std::move(B)).first->second;
}

FinMod GradedModule::piece(const MultiDeg& d) const { return basis(d).mod; }

ModMatrix GradedModule::act_mono(const Mono& m, const MultiDeg& d) const {
    const Basis& src = basis(d);
    const Basis& tgt = basis(d + mono_deg(R_, m));
    const Mono mc = core_part(R_, m);
    ModMatrix A = zero_matrix(tgt.elems.size(), src.elems.size(), R_);
    for (size_t j = 0; j < src.elems.size(); ++j) {
        auto& [g, mono] = src.elems[j];
        auto f = tgt.index[static_cast<size_t>(g)].find(mono + mc);
        if (f != tgt.index[static_cast<size_t>(g)].end()) A(static_cast<size_t>(f->second), j) = 1;
    }
    return A;
}

ModMatrix GradedModule::act(int var, const MultiDeg& d) const {
    Mono m;
    m[var] = 1;
    return act_mono(m, d);
}

std::vector<std::optional<int>> GradedModule::lower() const {
    std::vector<std::optional<int>> lo(R_.zero().size());
    for (auto& g : gens_)
        for (size_t i = 0; i < g.size(); ++i) lo[i] = lo[i] ? std::min(*lo[i], g[i]) : g[i];
    if (gens_.empty())
        for (auto& x : lo) x = 0;
    return lo;
}

// ---------------------------------------------------------------- localization and quotients

namespace {

class Localized : public DegreewiseModule {
public:
    Localized(ModulePtr M, int var, int window) : M_(std::move(M)), v_(var), window_(window), sv_(M_->ring().shift(var)) {}

    const GradedRing& ring() const override { return M_->ring(); }
    FinMod piece(const MultiDeg& d) const override { return M_->piece(d + scaled(sv_, stage(d))); }
    std::vector<std::optional<int>> lower() const override {
        auto lo = M_->lower();
        const GradedRing& R = ring();
        if (v_ < R.core) lo[0].reset();
        else lo[static_cast<size_t>(v_ - R.core) + 1].reset();
        return lo;
    }
    int settle_degree() const override { return M_->settle_degree(); }
    std::string str() const override { return M_->str() + "[" + ring().names[static_cast<size_t>(v_)] + "^-1]"; }

    int stage(const MultiDeg& d) const {
        auto it = stage_.find(d);
        if (it != stage_.end()) return it->second;
        const GradedRing& R = ring();
        const int deg = R.degrees[static_cast<size_t>(v_)];
        int j0 = std::max(0, ceil_div(M_->settle_degree() - R.internal(d), deg));
        auto lo = M_->lower();
        const size_t c = v_ < R.core ? 0 : static_cast<size_t>(v_ - R.core) + 1;
        if (lo[c]) j0 = std::max(j0, ceil_div(*lo[c] - d[c], v_ < R.core ? deg : 1));
        int run = 0;
        for (int j = j0; j <= j0 + 64 + window_; ++j) {
            const MultiDeg a = d + scaled(sv_, j);
            const FinMod P = M_->piece(a), Q = M_->piece(a + sv_);
            const ModMatrix A = M_->act(v_, a);
            if (injective(A, P, Q) && surjective(A, P, Q)) {
                if (++run == window_) {
                    const int s = j - window_ + 1;
                    stage_.emplace(d, s);
                    return s;
                }
            } else {
                run = 0;
            }
        }
        throw NonStabilizing("localization " + str() + " at degree " + deg_str(d));
    }

    // u^k from degree a.
    ModMatrix vpow(const MultiDeg& a, int k) const {
        Mono m;
        m[v_] = static_cast<int16_t>(k);
        return M_->act_mono(m, a);
    }

    // Moves an element of stage j at degree d to the canonical stage of d.
    ModMatrix to_canonical(const ModMatrix& Y, const MultiDeg& d, int j) const {
        const int c = stage(d);
        if (c >= j) return vpow(d + scaled(sv_, j), c - j) * Y;
        const ModMatrix V = vpow(d + scaled(sv_, c), j - c);
        return lift_through(V, M_->piece(d + scaled(sv_, j)).rel, Y);
    }

    ModMatrix act(int var, const MultiDeg& d) const override {
        auto key = std::make_pair(var, d);
        auto it = act_.find(key);
        if (it != act_.end()) return it->second;
        const int j = stage(d);
        const MultiDeg e = d + ring().shift(var);
        ModMatrix A = to_canonical(M_->act(var, d + scaled(sv_, j)), e, j);
        return act_.emplace(key, A).first->second;
    }

    ModMatrix unit(const MultiDeg& d) const { return vpow(d, stage(d)); }

private:
    ModulePtr M_;
    int v_, window_;
    MultiDeg sv_;
    mutable std::map<MultiDeg, int> stage_;
    mutable std::map<std::pair<int, MultiDeg>, ModMatrix> act_;
};

// A module with the same ambient pieces as M and extra relations per degree.
class Enlarged : public DegreewiseModule {
public:
    using Extra = std::function<ModSpan(const MultiDeg&, const FinMod&)>;
    Enlarged(ModulePtr M, Extra extra, std::string name, bool lifted, int settle_bump)
        : M_(std::move(M)), extra_(std::move(extra)), name_(std::move(name)), lifted_(lifted), bump_(settle_bump) {}

    const GradedRing& ring() const override { return M_->ring(); }
    FinMod piece(const MultiDeg& d) const override {
        auto it = cache_.find(d);
        if (it != cache_.end()) return it->second;
        FinMod P = M_->piece(d);
        P.rel.add(extra_(d, P));
        return cache_.emplace(d, P).first->second;
    }
    ModMatrix act(int var, const MultiDeg& d) const override { return M_->act(var, d); }
    ModMatrix act_mono(const Mono& m, const MultiDeg& d) const override { return M_->act_mono(m, d); }
    std::vector<std::optional<int>> lower() const override { return M_->lower(); }
    int settle_degree() const override { return M_->settle_degree() + bump_; }
    bool lifted() const override { return lifted_; }
    std::string str() const override { return name_; }

private:
    ModulePtr M_;
    Extra extra_;
    std::string name_;
    bool lifted_;
    int bump_;
    mutable std::map<MultiDeg, FinMod> cache_;
};

} // namespace

ModulePtr localize(const ModulePtr& M, int var, int window) {
    if (var < 0 || var >= M->ring().nvars()) throw InvalidArgument("no such variable");
    return std::make_shared<Localized>(M, var, window);
}

ModMatrix localization_unit(const ModulePtr& localized, const MultiDeg& d) {
    auto* L = dynamic_cast<const Localized*>(localized.get());
    if (!L) throw InvalidArgument("not a localized module");
    return L->unit(d);
}

ModulePtr quotient_by(const ModulePtr& M, const std::vector<int>& vars, bool with_p) {
    const GradedRing& R = M->ring();
    std::string name = M->str() + "/(";
    bool first = true;
    if (with_p) {
        name += "p";
        first = false;
    }
    int bump = 0;
    for (int v : vars) {
        name += (first ? "" : ",") + R.names[static_cast<size_t>(v)];
        first = false;
        bump = std::max(bump, R.degrees[static_cast<size_t>(v)]);
    }
    name += ")";
    auto extra = [M, vars, with_p](const MultiDeg& d, const FinMod& P) {
        const GradedRing& R = M->ring();
        ModSpan S(R.p, R.K, P.dim());
        if (with_p)
            for (size_t i = 0; i < P.dim(); ++i) {
                std::vector<int64_t> v(P.dim(), 0);
                v[i] = R.p % S.q();
                S.add(std::move(v));
            }
        for (int v : vars) {
            const MultiDeg src = d - R.shift(v);
            if (!dominates(src, M->lower())) continue;
            const FinMod Q = M->piece(src);
            S.add(image_mod(M->act(v, src), Q.full(), ModSpan(R.p, R.K, P.dim())));
        }
        return S;
    };
    return std::make_shared<Enlarged>(M, extra, name, M->lifted() && !with_p, bump);
}

ModulePtr localization_cokernel(const ModulePtr& M, const ModulePtr& localized) {
    auto* L = dynamic_cast<const Localized*>(localized.get());
    if (!L) throw InvalidArgument("not a localized module");
    auto extra = [M, localized, L](const MultiDeg& d, const FinMod& P) {
        const GradedRing& R = M->ring();
        if (!dominates(d, M->lower())) return ModSpan(R.p, R.K, P.dim());
        return image_mod(L->unit(d), M->piece(d).full(), ModSpan(R.p, R.K, P.dim()));
    };
    return std::make_shared<Enlarged>(localized, extra, localized->str() + "/" + M->str(), false, 0);
}

std::vector<Value> parse_ideal(const GradedRing& R, const std::vector<std::string>& gens) {
    Ring P = R.poly();
    static const std::regex pword("\\bp\\b");
    std::vector<Value> out;
    for (auto& g : gens) out.push_back(P->parse(std::regex_replace(g, pword, std::to_string(R.p))));
    return out;
}

// ---------------------------------------------------------------- stage complexes

namespace {

struct Homology {
    ModSpan Z, B; // cycles and boundaries in the ambient of one cohomological degree
    GroupType type() const { return GroupType{quotient_type(Z, B)}; }
    int length() const { return Z.length() - B.length(); }
};

// Hom(K(x^k), M) at one multidegree block, or K(x) (x) M when koszul is set.
struct StageComplex {
    int r = 0;
    std::vector<std::vector<int>> masks;          // by cohomological degree
    std::vector<std::map<int, size_t>> offset;    // by degree: mask -> offset
    std::vector<std::map<int, MultiDeg>> where;   // by degree: mask -> multidegree of the summand
    std::vector<size_t> dims;
    std::vector<ModSpan> N;
    std::vector<ModMatrix> D;                     // D[s]: C^s -> C^{s+1} (cochain) or C_s -> C_{s-1}
    std::vector<Homology> H;
};

MultiDeg mask_deg(const std::vector<Element>& X, int mask, const MultiDeg& zero) {
    MultiDeg d = zero;
    for (size_t i = 0; i < X.size(); ++i)
        if (mask >> i & 1) d = d + X[i].deg;
    return d;
}

int sign_before(int mask, int j) { return __builtin_popcount(static_cast<unsigned>(mask & ((1 << j) - 1))) % 2 ? -1 : 1; }

// X holds the k-th powers already.
StageComplex build_complex(const DegreewiseModule& M, const std::vector<Element>& X, const MultiDeg& d, bool koszul) {
    const GradedRing& R = M.ring();
    StageComplex C;
    C.r = static_cast<int>(X.size());
    const int r = C.r;
    C.masks.resize(static_cast<size_t>(r) + 1);
    C.offset.resize(C.masks.size());
    C.where.resize(C.masks.size());
    C.dims.assign(C.masks.size(), 0);
    const auto lo = M.lower();
    std::vector<std::vector<FinMod>> pieces(C.masks.size());
    for (int mask = 0; mask < (1 << r); ++mask) {
        const size_t s = static_cast<size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
        const MultiDeg at = koszul ? d - mask_deg(X, mask, R.zero()) : d + mask_deg(X, mask, R.zero());
        FinMod P = dominates(at, lo) ? M.piece(at) : FinMod{ModSpan(R.p, R.K, 0)};
        C.masks[s].push_back(mask);
        C.offset[s][mask] = C.dims[s];
        C.where[s][mask] = at;
        C.dims[s] += P.dim();
        pieces[s].push_back(std::move(P));
    }
    for (size_t s = 0; s <= static_cast<size_t>(r); ++s) {
        ModSpan N(R.p, R.K, C.dims[s]);
        for (size_t i = 0; i < C.masks[s].size(); ++i) {
            const size_t off = C.offset[s][C.masks[s][i]];
            for (auto& row : pieces[s][i].rel.rows()) {
                std::vector<int64_t> v(C.dims[s], 0);
                std::copy(row.begin(), row.end(), v.begin() + static_cast<std::ptrdiff_t>(off));
                N.add(std::move(v));
            }
        }
        C.N.push_back(std::move(N));
    }
    // differentials
    C.D.resize(C.masks.size());
    for (size_t s = 0; s <= static_cast<size_t>(r); ++s) {
        const size_t t = koszul ? s - 1 : s + 1;
        if ((koszul && s == 0) || (!koszul && s == static_cast<size_t>(r))) continue;
        ModMatrix D = zero_matrix(C.dims[t], C.dims[s], R);
        for (int mask : C.masks[s]) {
            const MultiDeg& at = C.where[s][mask];
            if (!dominates(at, lo)) continue;
            for (int j = 0; j < r; ++j) {
                const bool in = mask >> j & 1;
                if (koszul != in) continue;
                const int other = mask ^ (1 << j);
                if (!dominates(C.where[t][other], lo)) continue;
                const ModMatrix A = act_element(M, X[static_cast<size_t>(j)], at);
                const int sg = sign_before(koszul ? other : mask, j);
                const size_t ro = C.offset[t][other], co = C.offset[s][mask];
                for (size_t a = 0; a < A.rows; ++a)
                    for (size_t b = 0; b < A.cols; ++b)
                        if (A(a, b)) D(ro + a, co + b) = sg > 0 ? A(a, b) : (D.q - A(a, b)) % D.q;
            }
        }
        C.D[s] = std::move(D);
    }
    // homology
    for (size_t s = 0; s <= static_cast<size_t>(r); ++s) {
        Homology h;
        const bool has_out = koszul ? s > 0 : s < static_cast<size_t>(r);
        if (has_out) h.Z = kernel_mod(C.D[s], C.N[koszul ? s - 1 : s + 1]);
        else h.Z = full_span(C.dims[s], R.p, R.K);
        const bool has_in = koszul ? s < static_cast<size_t>(r) : s > 0;
        if (has_in) {
            const size_t u = koszul ? s + 1 : s - 1;
            h.B = image_mod(C.D[u], full_span(C.dims[u], R.p, R.K), C.N[s]);
        } else {
            h.B = C.N[s];
        }
        C.H.push_back(std::move(h));
    }
    return C;
}

// Chain map in one cohomological degree, given blockwise on summands.
ModMatrix assemble(const StageComplex& src, const StageComplex& tgt, size_t s, const std::function<int(int)>& tgt_mask_of,
                   const std::function<ModMatrix(int, const MultiDeg&)>& block, const GradedRing& R, const std::vector<std::optional<int>>& lo,
                   const std::vector<std::optional<int>>& lo_tgt) {
    ModMatrix T = zero_matrix(tgt.dims[s], src.dims[s], R);
    for (int mask : src.masks[s]) {
        const int tm = tgt_mask_of(mask);
        if (tm < 0) continue;
        const MultiDeg& at = src.where[s].at(mask);
        if (!dominates(at, lo) || !dominates(tgt.where[s].at(tm), lo_tgt)) continue;
        ModMatrix A = block(mask, at);
        const size_t ro = tgt.offset[s].at(tm), co = src.offset[s].at(mask);
        for (size_t a = 0; a < A.rows; ++a)
            for (size_t b = 0; b < A.cols; ++b) T(ro + a, co + b) = A(a, b);
    }
    return T;
}

// Image of H(src) in H(tgt) under T: its length, and whether T is an isomorphism on homology.
struct InducedMap {
    int image = 0;
    bool iso = false;
    bool zero = true;
};

InducedMap induced(const ModMatrix& T, const Homology& src, const Homology& tgt) {
    InducedMap m;
    m.image = image_mod(T, src.Z, tgt.B).length() - tgt.B.length();
    m.zero = m.image == 0;
    m.iso = m.image == src.length() && m.image == tgt.length();
    return m;
}

std::optional<mpz_class> integer_value(const GradedRing& R, const std::string& g) {
    static const std::regex pword("\\bp\\b");
    try {
        Ring Z = make_ring("ZZ");
        return std::get<mpq_class>(Z->parse(std::regex_replace(g, pword, std::to_string(R.p)))).get_num();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

struct IdealData {
    std::vector<Element> X;
    bool shift = false; // a lifted module with a power of p in I
    std::string text;
};

IdealData prepare_ideal(const DegreewiseModule& M, const std::vector<std::string>& I, bool total) {
    const GradedRing& R = M.ring();
    Ring P = R.poly();
    IdealData data;
    for (size_t i = 0; i < I.size(); ++i) data.text += (i ? "," : "") + I[i];
    bool unit = false;
    std::vector<Element> all;
    for (auto& v : parse_ideal(R, I)) all.push_back(make_element(R, P, v));
    for (size_t i = 0; i < all.size(); ++i) {
        const Element& e = all[i];
        unit = unit || e.unit;
        // an integer multiple of p stays nonzero in the lifted model even when p^K kills it
        const auto n = integer_value(R, I[i]);
        if (M.lifted() && n && *n != 0 && *n % R.p == 0) {
            data.shift = true;
            continue;
        }
        // p is nilpotent on a torsion module and local cohomology only sees the radical
        if (e.p_valuation > 0) continue;
        data.X.push_back(e);
    }
    if (data.X.size() > 12) throw InvalidArgument("too many ideal generators");
    if (unit) return data;
    // which variables have a pure power in I, and which occur at all
    std::vector<bool> power(static_cast<size_t>(R.nvars()), false), occurs(power);
    for (auto& e : data.X)
        for (auto& [m, c] : e.terms) {
            int nz = 0, var = -1;
            for (int v = 0; v < R.nvars(); ++v)
                if (m[v]) {
                    occurs[static_cast<size_t>(v)] = true;
                    ++nz;
                    var = v;
                }
            if (e.terms.size() == 1 && nz == 1 && mod_valuation(c, R.p, R.K) == 0) power[static_cast<size_t>(var)] = true;
        }
    for (int v = 0; v < R.nvars(); ++v) {
        const bool needed = total || (v < R.core && std::any_of(occurs.begin(), occurs.begin() + R.core, [](bool b) { return b; }));
        if (needed && !power[static_cast<size_t>(v)])
            throw UnsupportedIdeal("(" + data.text + ") must contain a power of " + R.names[static_cast<size_t>(v)] +
                                   " for degreewise finite local cohomology");
    }
    for (auto& e : data.X)
        for (int j = 1; j < static_cast<int>(e.deg.size()); ++j)
            if (e.deg[static_cast<size_t>(j)] < 0 || e.deg[0] < 0) throw UnsupportedIdeal("negative generator degree");
    return data;
}

std::vector<Element> powers(const GradedRing& R, const std::vector<Element>& X, int k) {
    Ring P = R.poly();
    std::vector<Element> out;
    for (auto& x : X) out.push_back(power(R, P, x, k));
    return out;
}

// Blocks of the stage-k complex at internal degree t: multidegrees d whose top summand
// d + k deg(x_1...x_r) lies in the support.
std::vector<MultiDeg> blocks_at(const DegreewiseModule& M, const MultiDeg& top_shift, int t, bool koszul) {
    const GradedRing& R = M.ring();
    auto lo = M.lower();
    std::vector<int> low(lo.size());
    for (size_t i = 0; i < lo.size(); ++i) {
        if (!lo[i]) throw UnsupportedIdeal("module " + M.str() + " is unbounded below in a grading direction");
        low[i] = *lo[i] - (koszul ? 0 : top_shift[i]);
    }
    std::vector<MultiDeg> out;
    MultiDeg d = R.zero();
    const int nf = R.nfree();
    std::function<void(int, int)> rec = [&](int j, int budget) {
        // budget = t - d[0] - sum of assigned free contributions
        if (j == nf) {
            if (budget == 0) out.push_back(d);
            return;
        }
        const int deg = R.degrees[static_cast<size_t>(R.core + j)];
        int rest_min = 0;
        for (int i = j + 1; i < nf; ++i) rest_min += low[static_cast<size_t>(i) + 1] * R.degrees[static_cast<size_t>(R.core + i)];
        for (int e = low[static_cast<size_t>(j) + 1]; e * deg + rest_min <= budget; ++e) {
            d[static_cast<size_t>(j) + 1] = e;
            rec(j + 1, budget - e * deg);
        }
    };
    int free_min = 0;
    for (int i = 0; i < nf; ++i) free_min += low[static_cast<size_t>(i) + 1] * R.degrees[static_cast<size_t>(R.core + i)];
    // without core variables the first coordinate only takes generator values
    const int hi0 = R.core > 0 ? t - free_min : std::min(t - free_min, std::max(low[0], M.settle_degree()));
    for (int t0 = low[0]; t0 <= hi0; ++t0) {
        d[0] = t0;
        rec(0, t - t0);
    }
    return out;
}

int stage_bound(const DegreewiseModule& M, const std::vector<Element>& X, int t, const MultiDeg* d) {
    const GradedRing& R = M.ring();
    int k = 1;
    int minpos = 0;
    bool torsion_p = false;
    for (auto& x : X) {
        const int it = R.internal(x.deg);
        if (it > 0) minpos = minpos ? std::min(minpos, it) : it;
        if (x.p_valuation > 0) torsion_p = true;
    }
    if (torsion_p) k = std::max(k, R.K);
    auto lo = M.lower();
    int lo_t = 0;
    bool bounded = true;
    for (auto& l : lo) bounded = bounded && l.has_value();
    if (bounded) {
        MultiDeg l(lo.size());
        for (size_t i = 0; i < lo.size(); ++i) l[i] = *lo[i];
        lo_t = R.internal(l);
    }
    if (minpos > 0) {
        k = std::max(k, ceil_div(M.settle_degree() - t, minpos) + 1);
        if (bounded) k = std::max(k, ceil_div(lo_t - t, minpos) + 1);
    }
    if (d)
        for (size_t c = 1; c < d->size(); ++c)
            if (lo[c]) k = std::max(k, *lo[c] - (*d)[c] + 1);
    return k;
}

struct StageResult {
    int stage = 0;
    std::map<MultiDeg, StageComplex> blocks;
};

// Runs the colimit until `window` consecutive transition maps are isomorphisms.
StageResult stabilize(const DegreewiseModule& M, const std::vector<Element>& X, const std::function<std::vector<MultiDeg>(int)>& blocks_of,
                      int k0, const LocalCohOptions& opts, const std::string& what) {
    const GradedRing& R = M.ring();
    const auto lo = M.lower();
    auto build = [&](int k) {
        StageResult S;
        S.stage = k;
        const auto Xk = powers(R, X, k);
        for (auto& d : blocks_of(k)) S.blocks.emplace(d, build_complex(M, Xk, d, false));
        return S;
    };
    StageResult cur = build(k0), first = cur;
    int run = 0;
    for (int k = k0; k <= k0 + opts.max_extra_stages; ++k) {
        StageResult next = build(k + 1);
        bool stable = true;
        for (auto& [d, C] : next.blocks) {
            auto it = cur.blocks.find(d);
            for (size_t s = 0; s < C.H.size() && stable; ++s) {
                if (it == cur.blocks.end()) {
                    stable = C.H[s].length() == 0;
                    continue;
                }
                const StageComplex& A = it->second;
                ModMatrix T = assemble(
                    A, C, s, [](int m) { return m; },
                    [&](int mask, const MultiDeg& at) {
                        Value v = R.poly()->one();
                        for (size_t i = 0; i < X.size(); ++i)
                            if (mask >> i & 1) v = R.poly()->mul(v, X[i].value);
                        return act_element(M, make_element(R, R.poly(), v), at);
                    },
                    R, lo, lo);
                stable = induced(T, A.H[s], C.H[s]).iso;
            }
            if (!stable) break;
        }
        if (stable) {
            if (run == 0) first = cur;
            if (++run == opts.window) return first;
        } else {
            run = 0;
        }
        cur = std::move(next);
    }
    throw NonStabilizing(what + ": no window of " + std::to_string(opts.window) + " stable stages after stage " + std::to_string(k0));
}

GroupType total_type(const StageResult& S, size_t s) {
    GroupType g;
    for (auto& [d, C] : S.blocks)
        if (s < C.H.size()) g = g + C.H[s].type();
    return g;
}

} // namespace

// ---------------------------------------------------------------- Koszul homology

LocalCohResult koszul_homology(const ModulePtr& M, const std::vector<std::string>& u, int t_lo, int t_hi) {
    const GradedRing& R = M->ring();
    Ring P = R.poly();
    std::vector<Element> X;
    for (auto& v : parse_ideal(R, u)) X.push_back(make_element(R, P, v));
    LocalCohResult out;
    out.p = R.p;
    out.K = R.K;
    out.module = M->str();
    for (size_t i = 0; i < u.size(); ++i) out.ideal += (i ? "," : "") + u[i];
    for (int t = t_lo; t <= t_hi; ++t) {
        std::vector<GroupType> g(X.size() + 1);
        for (auto& d : blocks_at(*M, R.zero(), t, true)) {
            StageComplex C = build_complex(*M, X, d, true);
            for (size_t s = 0; s < C.H.size(); ++s) g[s] = g[s] + C.H[s].type();
        }
        for (size_t s = 0; s < g.size(); ++s) out.entries.push_back({static_cast<int>(s), {}, t, g[s], 0});
    }
    return out;
}

LocalCohResult koszul_homology(const ModulePtr& M, const std::vector<std::string>& u, const std::vector<MultiDeg>& degrees) {
    const GradedRing& R = M->ring();
    Ring P = R.poly();
    std::vector<Element> X;
    for (auto& v : parse_ideal(R, u)) X.push_back(make_element(R, P, v));
    LocalCohResult out;
    out.p = R.p;
    out.K = R.K;
    out.module = M->str();
    for (size_t i = 0; i < u.size(); ++i) out.ideal += (i ? "," : "") + u[i];
    for (auto& d : degrees) {
        StageComplex C = build_complex(*M, X, d, true);
        for (size_t s = 0; s < C.H.size(); ++s) out.entries.push_back({static_cast<int>(s), d, R.internal(d), C.H[s].type(), 0});
    }
    return out;
}

// ---------------------------------------------------------------- local cohomology

LocalCohResult local_cohomology(const ModulePtr& M, const std::vector<std::string>& I, int t_lo, int t_hi, const LocalCohOptions& opts) {
    const GradedRing& R = M->ring();
    IdealData ideal = prepare_ideal(*M, I, true);
    LocalCohResult out;
    out.p = R.p;
    out.K = R.K;
    out.module = M->str();
    out.ideal = ideal.text;
    const int top = static_cast<int>(ideal.X.size()) + (ideal.shift ? 1 : 0);
    MultiDeg all = R.zero();
    for (auto& x : ideal.X) all = all + x.deg;
    for (int t = t_lo; t <= t_hi; ++t) {
        auto blocks_of = [&](int k) { return blocks_at(*M, scaled(all, k), t, false); };
        StageResult S = stabilize(*M, ideal.X, blocks_of, stage_bound(*M, ideal.X, t, nullptr), opts,
                                  "local cohomology of " + M->str() + " at degree " + std::to_string(t));
        for (int s = 0; s <= top; ++s) {
            const int sc = s - (ideal.shift ? 1 : 0);
            GroupType g = sc >= 0 ? total_type(S, static_cast<size_t>(sc)) : GroupType{};
            out.entries.push_back({s, {}, t, g, S.stage});
        }
    }
    return out;
}

namespace {

StageResult block_colimit(const DegreewiseModule& M, const IdealData& ideal, const MultiDeg& d, const LocalCohOptions& opts) {
    auto blocks_of = [&](int) { return std::vector<MultiDeg>{d}; };
    return stabilize(M, ideal.X, blocks_of, stage_bound(M, ideal.X, M.ring().internal(d), &d), opts,
                     "local cohomology of " + M.str() + " at " + deg_str(d));
}

StageComplex block_at_stage(const DegreewiseModule& M, const IdealData& ideal, const MultiDeg& d, int k) {
    return build_complex(M, powers(M.ring(), ideal.X, k), d, false);
}

} // namespace

LocalCohResult local_cohomology(const ModulePtr& M, const std::vector<std::string>& I, const std::vector<MultiDeg>& degrees,
                                const LocalCohOptions& opts) {
    const GradedRing& R = M->ring();
    IdealData ideal = prepare_ideal(*M, I, false);
    LocalCohResult out;
    out.p = R.p;
    out.K = R.K;
    out.module = M->str();
    out.ideal = ideal.text;
    const int top = static_cast<int>(ideal.X.size()) + (ideal.shift ? 1 : 0);
    for (auto& d : degrees) {
        StageResult S = block_colimit(*M, ideal, d, opts);
        const StageComplex& C = S.blocks.begin()->second;
        for (int s = 0; s <= top; ++s) {
            const int sc = s - (ideal.shift ? 1 : 0);
            GroupType g = sc >= 0 ? C.H[static_cast<size_t>(sc)].type() : GroupType{};
            out.entries.push_back({s, d, R.internal(d), g, S.stage});
        }
    }
    return out;
}

const DegreeGroup* LocalCohResult::find(int s, int t) const {
    for (auto& e : entries)
        if (e.s == s && e.t == t && e.degree.empty()) return &e;
    return nullptr;
}

const DegreeGroup* LocalCohResult::find(int s, const MultiDeg& d) const {
    for (auto& e : entries)
        if (e.s == s && e.degree == d) return &e;
    return nullptr;
}

std::string LocalCohResult::table() const {
    std::ostringstream os;
    os << "module " << module << "  ideal (" << ideal << ")  precision " << p << "^" << K << "\n";
    int smax = 0;
    for (auto& e : entries) smax = std::max(smax, e.s);
    std::vector<std::string> rows;
    std::map<std::string, std::vector<std::string>> cells;
    std::vector<std::string> order;
    for (auto& e : entries) {
        std::string key = e.degree.empty() ? std::to_string(e.t) : deg_str(e.degree);
        if (!cells.count(key)) {
            order.push_back(key);
            cells[key].assign(static_cast<size_t>(smax) + 1, "0");
        }
        cells[key][static_cast<size_t>(e.s)] = e.group.str(p);
    }
    std::vector<size_t> width(static_cast<size_t>(smax) + 2, 6);
    for (auto& k : order) width[0] = std::max(width[0], k.size());
    for (auto& [k, c] : cells)
        for (size_t s = 0; s < c.size(); ++s) width[s + 1] = std::max(width[s + 1], c[s].size());
    auto pad = [](const std::string& s, size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    os << pad("degree", width[0]);
    for (int s = 0; s <= smax; ++s) os << "  " << pad("s=" + std::to_string(s), width[static_cast<size_t>(s) + 1]);
    os << "\n";
    for (auto& k : order) {
        os << pad(k, width[0]);
        for (int s = 0; s <= smax; ++s) os << "  " << pad(cells[k][static_cast<size_t>(s)], width[static_cast<size_t>(s) + 1]);
        os << "\n";
    }
    return os.str();
}

std::vector<MultiDeg> degree_box(const GradedRing& R, int D, int core_lo, int core_hi) {
    std::vector<MultiDeg> out;
    MultiDeg d = R.zero();
    std::function<void(int)> rec = [&](int j) {
        if (j == R.nfree()) {
            if (std::abs(R.internal(d)) <= D) out.push_back(d);
            return;
        }
        const int deg = R.degrees[static_cast<size_t>(R.core + j)];
        for (int e = -(D / deg); e <= D / deg; ++e) {
            d[static_cast<size_t>(j) + 1] = e;
            rec(j + 1);
        }
        d[static_cast<size_t>(j) + 1] = 0;
    };
    for (int t0 = core_lo; t0 <= core_hi; ++t0) {
        d[0] = t0;
        rec(0);
    }
    return out;
}

// ---------------------------------------------------------------- chromatic chain

bool ChromaticChain::ok() const {
    if (!regular) return false;
    for (auto& l : links)
        if (!l.injective || !l.exact) return false;
    return std::all_of(top_matches.begin(), top_matches.end(), [](bool b) { return b; });
}

std::string ChromaticChain::table() const {
    std::ostringstream os;
    os << "chromatic chain over " << R.str() << ", sequence (p";
    for (int i = 1; i < m; ++i) os << "," << R.names[static_cast<size_t>(i - 1)];
    os << "), " << degrees.size() << " multidegrees with |degree| <= " << D << "\n";
    os << "regular: " << (regular ? "yes" : "no") << "\n";
    for (auto& l : links)
        os << "link " << l.n << " (" << l.element << "): injective " << (l.injective ? "yes" : "no") << ", exact " << (l.exact ? "yes" : "no")
           << "\n";
    for (size_t n = 0; n < top_matches.size(); ++n)
        os << "H^s_{I_" << n + 1 << "}(R): concentrated in s = " << n + 1 << " and equal to O/I_" << n + 1 << "^oo: " << (top_matches[n] ? "yes" : "no")
           << "\n";
    return os.str();
}

ChromaticChain chromatic_chain(const GradedRing& R, int m, int D) {
    if (R.core != 0) throw InvalidArgument("chromatic chains need a ring with only free variables");
    if (m < 1 || m - 1 > R.nvars()) throw InvalidArgument("sequence longer than the variables");
    ChromaticChain C;
    C.R = R;
    C.m = m;
    C.D = D;
    C.degrees = degree_box(R, D, 0, 0);
    auto lifted = GradedModule::quotient(R, {}, true);

    // regularity: p-torsion-free pieces, then u_1..u_{m-1} regular on R/p via Koszul homology
    bool regular = true;
    for (auto& d : C.degrees) {
        GroupType g = group_type(lifted->piece(d));
        regular = regular && std::all_of(g.exps.begin(), g.exps.end(), [&](int e) { return e == R.K; });
    }
    std::vector<std::string> us;
    for (int i = 1; i < m; ++i) us.push_back(R.names[static_cast<size_t>(i - 1)]);
    if (!us.empty()) {
        auto Rp = GradedModule::quotient(R, {"p"});
        for (auto& e : koszul_homology(Rp, us, C.degrees).entries)
            if (e.s > 0 && !e.group.is_zero()) regular = false;
    }
    C.regular = regular;
    if (!regular) throw NotRegular("(p," + [&] {
        std::string s;
        for (auto& u : us) s += u + ",";
        return s;
    }() + ") on " + R.str());

    // link 0 at precision K: R/p^K -> p^-K R / p^K R = R/p^2K -> R/p^K
    {
        ChromaticLink L;
        L.n = 0;
        L.element = "p";
        int64_t pK = 1;
        for (int i = 0; i < R.K; ++i) pK *= R.p;
        for (auto& d : C.degrees) {
            const size_t n = lifted->piece(d).dim();
            ModMatrix f(n, n, R.p, 2 * R.K);
            for (size_t i = 0; i < n; ++i) f(i, i) = pK;
            ModSpan zero(R.p, 2 * R.K, n), pKspan = full_span(n, R.p, 2 * R.K).scaled(R.K);
            FinMod A{pKspan}, B{zero}, Cq{pKspan};
            L.injective = L.injective && injective(f, A, B);
            // kernel of B -> C is p^K B, which is the image of A
            L.exact = L.exact && kernel_mod(identity_mod(n, R.p, 2 * R.K), Cq.rel).length() == image_mod(f, A.full(), zero).length() &&
                      A.length() - B.length() + Cq.length() == 0;
            ++L.degrees;
        }
        C.links.push_back(L);
    }
    ModulePtr cur = GradedModule::quotient(R, {}, false);
    C.modules.push_back(cur);
    for (int n = 1; n < m; ++n) {
        ChromaticLink L;
        L.n = n;
        L.element = R.names[static_cast<size_t>(n - 1)];
        ModulePtr loc = localize(cur, n - 1);
        ModulePtr next = localization_cokernel(cur, loc);
        for (auto& d : C.degrees) {
            const FinMod A = cur->piece(d), B = loc->piece(d), Q = next->piece(d);
            const ModMatrix f = dominates(d, cur->lower()) ? localization_unit(loc, d) : zero_matrix(B.dim(), A.dim(), R);
            const bool inj = injective(f, A, B);
            L.injective = L.injective && inj;
            L.exact = L.exact && inj && A.length() - B.length() + Q.length() == 0;
            ++L.degrees;
        }
        C.links.push_back(L);
        C.localized.push_back(loc);
        C.modules.push_back(next);
        cur = next;
    }
    // top local cohomology of the lifted ring
    for (int n = 1; n <= m; ++n) {
        std::vector<std::string> I{"p"};
        for (int i = 1; i < n; ++i) I.push_back(R.names[static_cast<size_t>(i - 1)]);
        LocalCohResult H = local_cohomology(lifted, I, C.degrees);
        bool ok = true;
        for (auto& e : H.entries) {
            if (e.s != n) ok = ok && e.group.is_zero();
            else ok = ok && e.group == group_type(C.modules[static_cast<size_t>(n) - 1]->piece(e.degree));
        }
        C.top_matches.push_back(ok);
    }
    return C;
}

// ---------------------------------------------------------------- Landweber

std::string LandweberReport::str() const {
    std::ostringstream os;
    for (size_t n = 0; n < injective.size(); ++n)
        os << "n=" << n << ": M/I_nM " << (quotient_zero[n] ? "zero" : "nonzero") << ", v_" << n << " " << (injective[n] ? "injective" : "not injective")
           << "\n";
    switch (verdict) {
    case LandweberVerdict::RegularAndFinite: os << "verdict: regular-and-finite (I_" << n << "M = M)\n"; break;
    case LandweberVerdict::RegularNotFinite: os << "verdict: regular-not-finite\n"; break;
    case LandweberVerdict::FailsAt: os << "verdict: fails-at-" << n << "\n"; break;
    }
    return os.str();
}

LandweberReport landweber_check(const ModulePtr& M, int H, const std::vector<MultiDeg>& degrees) {
    const GradedRing& R = M->ring();
    LandweberReport rep;
    bool decided = false;
    for (int n = 0; n <= H; ++n) {
        std::vector<int> vars;
        for (int i = 0; i < n - 1 && i < R.nvars(); ++i) vars.push_back(i);
        ModulePtr Q = n == 0 ? M : quotient_by(M, vars, true);
        bool zero = true, inj = true;
        for (auto& d : degrees) {
            const FinMod P = Q->piece(d);
            zero = zero && P.is_zero();
            if (n == 0) {
                GroupType g = group_type(P);
                inj = inj && std::all_of(g.exps.begin(), g.exps.end(), [&](int e) { return e == R.K; });
            } else if (n - 1 < R.nvars()) {
                const int v = n - 1;
                inj = inj && injective(Q->act(v, d), P, Q->piece(d + R.shift(v)));
            } else {
                inj = inj && P.is_zero();
            }
        }
        rep.quotient_zero.push_back(zero);
        rep.injective.push_back(inj);
        if (decided) continue;
        if (zero) {
            rep.verdict = LandweberVerdict::RegularAndFinite;
            rep.n = n;
            decided = true;
        } else if (!inj) {
            rep.verdict = LandweberVerdict::FailsAt;
            rep.n = n;
            decided = true;
        }
    }
    if (!decided) rep.verdict = LandweberVerdict::RegularNotFinite;
    return rep;
}

// ---------------------------------------------------------------- transitions

std::string TransitionReport::table() const {
    std::ostringstream os;
    os << "transition maps H^s_{I_{n+1}}(M) -> H^s_{I_n}(M), r = " << r << ", m = " << m << "\n";
    std::map<std::pair<int, int>, std::pair<int, int>> summary; // (n, s) -> (nonzero source groups, nonzero maps)
    for (auto& e : entries) {
        auto& c = summary[{e.n, e.s}];
        ++c.first;
        if (!e.zero) ++c.second;
    }
    for (auto& [ns, c] : summary)
        os << "n=" << ns.first << " s=" << ns.second << ": " << c.first << " degrees with nonzero source, " << c.second << " nonzero maps"
           << (ns.first > r ? "" : " (n <= r, no verdict)") << "\n";
    os << "verdict for n > r: " << (all_zero_above_r ? "zero" : "nonzero") << "\n";
    return os.str();
}

TransitionReport transition_zero_check(const ModulePtr& M, int r, int m, int s_max, int D) {
    const GradedRing& R = M->ring();
    if (R.core != r) throw InvalidArgument("the module must be induced from its first r variables (core = r)");
    if (m > R.nvars() + 1 || m < 2) throw InvalidArgument("m out of range for the ring");
    TransitionReport rep;
    rep.r = r;
    rep.m = m;
    const LocalCohOptions opts;
    const auto lo = M->lower();
    const auto degrees = degree_box(R, D, -D, D);
    for (int n = 1; n < m; ++n) {
        std::vector<std::string> In{"p"}, In1{"p"};
        for (int i = 1; i < n; ++i) In.push_back(R.names[static_cast<size_t>(i - 1)]);
        for (int i = 1; i <= n; ++i) In1.push_back(R.names[static_cast<size_t>(i - 1)]);
        IdealData src, tgt;
        try {
            src = prepare_ideal(*M, In1, false);
            tgt = prepare_ideal(*M, In, false);
        } catch (const UnsupportedIdeal&) {
            continue; // a core variable split between inside and outside: not degreewise finite
        }
        const size_t last = src.X.size() - 1; // u_n is the last generator of the source ideal
        for (auto& d : degrees) {
            if (std::abs(R.internal(d)) > D) continue;
            StageResult A = block_colimit(*M, src, d, opts), B = block_colimit(*M, tgt, d, opts);
            const int k = std::max(A.stage, B.stage);
            StageComplex Sc = block_at_stage(*M, src, d, k), Tc = block_at_stage(*M, tgt, d, k);
            const int shift = src.shift ? 1 : 0;
            for (int s = 0; s <= s_max; ++s) {
                const int sc = s - shift;
                if (sc < 0 || sc >= static_cast<int>(Sc.H.size())) continue;
                const Homology& hs = Sc.H[static_cast<size_t>(sc)];
                if (hs.length() == 0) continue;
                TransitionEntry e;
                e.n = n;
                e.s = s;
                e.degree = d;
                e.t = R.internal(d);
                if (sc < static_cast<int>(Tc.H.size())) {
                    const Homology& ht = Tc.H[static_cast<size_t>(sc)];
                    ModMatrix T = assemble(
                        Sc, Tc, static_cast<size_t>(sc), [&](int mask) { return (mask >> last & 1) ? -1 : mask; },
                        [&](int, const MultiDeg& at) { return identity(M->piece(at).dim(), R); }, R, lo, lo);
                    for (auto& z : hs.Z.rows()) {
                        if (hs.B.contains(z)) continue;
                        std::vector<int64_t> y(T.rows, 0);
                        for (size_t i = 0; i < T.rows; ++i)
                            for (size_t j = 0; j < T.cols; ++j) y[i] = (y[i] + mulmod(T(i, j), z[j], T.q)) % T.q;
                        y = ht.B.reduce(std::move(y));
                        if (std::any_of(y.begin(), y.end(), [](int64_t v) { return v != 0; })) e.zero = false;
                        e.matrix.push_back(std::move(y));
                    }
                }
                if (n > r && !e.zero) rep.all_zero_above_r = false;
                rep.entries.push_back(std::move(e));
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------- completion and fracture

namespace {

class Completed : public DegreewiseModule {
public:
    Completed(ModulePtr M, IdealData ideal, int window) : M_(std::move(M)), I_(std::move(ideal)), window_(window) {}

    const GradedRing& ring() const override { return M_->ring(); }
    ModMatrix act(int var, const MultiDeg& d) const override { return M_->act(var, d); }
    ModMatrix act_mono(const Mono& m, const MultiDeg& d) const override { return M_->act_mono(m, d); }
    std::vector<std::optional<int>> lower() const override { return M_->lower(); }
    int settle_degree() const override { return M_->settle_degree(); }
    bool lifted() const override { return M_->lifted(); }
    std::string str() const override { return M_->str() + "^(" + I_.text + ")"; }

    // (I^k M)_d
    ModSpan power_part(const MultiDeg& d, int k) const {
        const GradedRing& R = ring();
        const FinMod P = M_->piece(d);
        ModSpan S(R.p, R.K, P.dim());
        const auto lo = M_->lower();
        std::vector<int> a(I_.X.size(), 0);
        std::function<void(size_t, int)> rec = [&](size_t i, int left) {
            if (i + 1 == a.size() || a.empty()) {
                if (!a.empty()) a[i] = left;
                else if (left > 0) return;
                Value v = R.poly()->one();
                MultiDeg deg = R.zero();
                for (size_t j = 0; j < a.size(); ++j) {
                    v = R.poly()->mul(v, R.poly()->pow(I_.X[j].value, a[j]));
                    deg = deg + scaled(I_.X[j].deg, a[j]);
                }
                const MultiDeg src = d - deg;
                if (!dominates(src, lo)) return;
                S.add(image_mod(act_element(*M_, make_element(R, R.poly(), v), src), M_->piece(src).full(), ModSpan(R.p, R.K, P.dim())));
                return;
            }
            for (int e = 0; e <= left; ++e) {
                a[i] = e;
                rec(i + 1, left - e);
            }
        };
        rec(0, k);
        return S;
    }

    FinMod piece(const MultiDeg& d) const override {
        auto it = cache_.find(d);
        if (it != cache_.end()) return it->second;
        const GradedRing& R = ring();
        int k0 = 1;
        int minpos = 0;
        for (auto& x : I_.X) {
            const int it2 = R.internal(x.deg);
            if (it2 > 0) minpos = minpos ? std::min(minpos, it2) : it2;
            if (x.p_valuation > 0) k0 = std::max(k0, R.K);
        }
        auto lo = M_->lower();
        bool bounded = std::all_of(lo.begin(), lo.end(), [](const std::optional<int>& x) { return x.has_value(); });
        if (minpos > 0 && bounded) {
            MultiDeg l(lo.size());
            for (size_t i = 0; i < lo.size(); ++i) l[i] = *lo[i];
            k0 = std::max(k0, ceil_div(R.internal(d) - R.internal(l), minpos) + 1);
        }
        int run = 0, prev = -1;
        for (int k = k0; k <= k0 + 64 + window_; ++k) {
            const int len = power_part(d, k).length();
            run = len == prev ? run + 1 : 0;
            prev = len;
            if (run == window_) {
                FinMod P = M_->piece(d);
                P.rel.add(power_part(d, k));
                return cache_.emplace(d, P).first->second;
            }
        }
        throw NonStabilizing("completion " + str() + " at " + deg_str(d));
    }

private:
    ModulePtr M_;
    IdealData I_;
    int window_;
    mutable std::map<MultiDeg, FinMod> cache_;
};

} // namespace

ModulePtr complete(const ModulePtr& M, const std::vector<std::string>& I, int window) {
    const GradedRing& R = M->ring();
    IdealData ideal;
    Ring P = R.poly();
    for (size_t i = 0; i < I.size(); ++i) ideal.text += (i ? "," : "") + I[i];
    for (auto& v : parse_ideal(R, I)) ideal.X.push_back(make_element(R, P, v));
    return std::make_shared<Completed>(M, ideal, window);
}

std::string FractureReport::table() const {
    std::ostringstream os;
    int n_iso = 0;
    for (auto& e : entries) n_iso += e.iso ? 1 : 0;
    os << "H^s_I(M) -> H^s_I(M^) isomorphism in " << n_iso << " of " << entries.size() << " (s, degree) cells\n";
    for (auto& e : entries)
        if (!e.iso) os << "  s=" << e.s << " degree " << deg_str(e.degree) << ": " << e.local.exps.size() << " vs " << e.completed.exps.size() << " summands\n";
    os << "verdict: " << (iso ? "isomorphism" : "not an isomorphism") << "\n";
    return os.str();
}

FractureReport fracture_check(const ModulePtr& M, const std::vector<std::string>& I, const std::vector<MultiDeg>& degrees,
                              const LocalCohOptions& opts) {
    const GradedRing& R = M->ring();
    ModulePtr C = complete(M, I, opts.window);
    IdealData a = prepare_ideal(*M, I, false), b = prepare_ideal(*C, I, false);
    const auto lo = M->lower();
    FractureReport rep;
    for (auto& d : degrees) {
        StageResult A = block_colimit(*M, a, d, opts), B = block_colimit(*C, b, d, opts);
        const int k = std::max(A.stage, B.stage);
        StageComplex Sa = block_at_stage(*M, a, d, k), Sb = block_at_stage(*C, b, d, k);
        if (a.shift) rep.entries.push_back({0, d, R.internal(d), {}, {}, true});
        for (size_t s = 0; s < Sa.H.size(); ++s) {
            ModMatrix T = assemble(
                Sa, Sb, s, [](int mask) { return mask; }, [&](int, const MultiDeg& at) { return identity(M->piece(at).dim(), R); }, R, lo, lo);
            FractureEntry e;
            e.s = static_cast<int>(s) + (a.shift ? 1 : 0);
            e.degree = d;
            e.t = R.internal(d);
            e.local = Sa.H[s].type();
            e.completed = Sb.H[s].type();
            e.iso = induced(T, Sa.H[s], Sb.H[s]).iso;
            rep.iso = rep.iso && e.iso;
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

} // namespace fglab
