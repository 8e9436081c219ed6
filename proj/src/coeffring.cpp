#include "fglab/coeffring.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>

namespace fglab {

// ---------------------------------------------------------------- monomials

bool Mono::is_one() const {
    for (auto x : e)
        if (x != 0) return false;
    return true;
}

Mono operator+(Mono a, const Mono& b) {
    for (int i = 0; i < kMaxGens; ++i) a[i] = static_cast<int16_t>(a[i] + b[i]);
    return a;
}

Mono operator-(Mono a, const Mono& b) {
    for (int i = 0; i < kMaxGens; ++i) a[i] = static_cast<int16_t>(a[i] - b[i]);
    return a;
}

size_t MonoHash::operator()(const Mono& m) const noexcept {
    uint64_t h = 1469598103934665603ULL;
    for (auto x : m.e) {
        h ^= static_cast<uint16_t>(x);
        h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h);
}

// ---------------------------------------------------------------- integers

bool is_prime(int64_t n) {
    if (n < 2) return false;
    mpz_class z(static_cast<long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 40) > 0;
}

std::pair<int64_t, int> prime_power(int64_t n) {
    if (n < 2) return {0, 0};
    for (int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int K = 0;
        while (n % p == 0) {
            n /= p;
            ++K;
        }
        if (n != 1) return {0, 0};
        return {p, K};
    }
    return {n, 1};
}

static int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

static int64_t mulmod(int64_t a, int64_t b, int64_t q) {
    return static_cast<int64_t>((static_cast<unsigned __int128>(a) * static_cast<uint64_t>(b)) % static_cast<uint64_t>(q));
}

static int64_t mod_inverse(int64_t a, int64_t q) {
    int64_t g = q, x = 0, x1 = 1, a1 = ((a % q) + q) % q;
    while (a1) {
        int64_t t = g / a1;
        std::tie(g, a1) = std::make_pair(a1, g - t * a1);
        std::tie(x, x1) = std::make_pair(x1, x - t * x1);
    }
    if (g != 1) throw DivisionByNonUnit(std::to_string(a) + " mod " + std::to_string(q));
    return ((x % q) + q) % q;
}

static int64_t mod_of(const mpz_class& z, int64_t q) {
    mpz_class r = z % q;
    if (r < 0) r += q;
    return r.get_si();
}

long p_valuation(const mpq_class& x, int64_t p) {
    if (x == 0) return kInfiniteValuation;
    mpz_class P(static_cast<long>(p));
    auto val = [&](mpz_class z) {
        long v = 0;
        z = abs(z);
        while (z % P == 0) {
            z /= P;
            ++v;
        }
        return v;
    };
    return val(x.get_num()) - val(x.get_den());
}

// ---------------------------------------------------------------- polynomials mod p

using ZPoly = std::vector<int64_t>; // constant term first

static void trim(ZPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

static ZPoly zp_mod(ZPoly a, const ZPoly& f, int64_t p) {
    for (auto& c : a) c = ((c % p) + p) % p;
    trim(a);
    const size_t m = f.size() - 1;
    int64_t lead_inv = mod_inverse(f.back() % p, p);
    while (a.size() > m) {
        int64_t c = mulmod(a.back(), lead_inv, p);
        size_t shift = a.size() - 1 - m;
        for (size_t i = 0; i <= m; ++i) a[shift + i] = ((a[shift + i] - mulmod(c, f[i] % p, p)) % p + p) % p;
        trim(a);
    }
    return a;
}

static ZPoly zp_mul(const ZPoly& a, const ZPoly& b, const ZPoly& f, int64_t p) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    return zp_mod(r, f, p);
}

static ZPoly zp_pow(ZPoly a, mpz_class e, const ZPoly& f, int64_t p) {
    ZPoly r{1};
    r = zp_mod(r, f, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = zp_mul(r, a, f, p);
        a = zp_mul(a, a, f, p);
        e >>= 1;
    }
    return r;
}

static ZPoly zp_gcd(ZPoly a, ZPoly b, int64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        a = zp_mod(a, b, p);
        std::swap(a, b);
    }
    return a;
}

bool is_irreducible_mod_p(const std::vector<int64_t>& f_in, int64_t p) {
    ZPoly f = f_in;
    for (auto& c : f) c = ((c % p) + p) % p;
    trim(f);
    if (f.size() < 2) return false;
    const int m = static_cast<int>(f.size()) - 1;
    ZPoly x{0, 1};
    ZPoly xp = zp_mod(x, f, p);
    for (int i = 1; i <= m / 2; ++i) {
        xp = zp_pow(xp, mpz_class(static_cast<long>(p)), f, p);
        ZPoly d = xp;
        d.resize(std::max<size_t>(d.size(), 2), 0);
        d[1] = ((d[1] - 1) % p + p) % p;
        trim(d);
        ZPoly g = zp_gcd(f, d, p);
        if (g.size() != 1) return false;
    }
    return true;
}

static std::vector<mpz_class> prime_factors(mpz_class n) {
    std::vector<mpz_class> out;
    for (mpz_class d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::vector<int64_t> canonical_modulus(int64_t p, int m) {
    if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p));
    mpz_class order;
    mpz_ui_pow_ui(order.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(m));
    order -= 1;
    auto factors = prime_factors(order);
    int64_t count = ipow(p, m);
    for (int64_t idx = 0; idx < count; ++idx) {
        ZPoly f(static_cast<size_t>(m) + 1, 0);
        int64_t t = idx;
        for (int i = 0; i < m; ++i) {
            f[static_cast<size_t>(i)] = t % p;
            t /= p;
        }
        f[static_cast<size_t>(m)] = 1;
        if (f[0] == 0) continue;
        if (!is_irreducible_mod_p(f, p)) continue;
        ZPoly x = zp_mod(ZPoly{0, 1}, f, p);
        bool primitive = true;
        for (auto& r : factors) {
            ZPoly y = zp_pow(x, order / r, f, p);
            if (y.size() == 1 && y[0] == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return f;
    }
    throw ReducibleModulusPolynomial("no primitive polynomial found");
}

// ---------------------------------------------------------------- specs

RingSpec RingSpec::integers() { return RingSpec{}; }

RingSpec RingSpec::rationals() {
    RingSpec s;
    s.kind = RingKind::Rationals;
    return s;
}

RingSpec RingSpec::plocal(int64_t p) {
    RingSpec s;
    s.kind = RingKind::PLocalRationals;
    s.p = p;
    return s;
}

RingSpec RingSpec::mod_prime_power(int64_t p, int K) {
    RingSpec s;
    s.kind = RingKind::ModPrimePower;
    s.p = p;
    s.K = K;
    return s;
}

RingSpec RingSpec::prime_field(int64_t p) {
    RingSpec s;
    s.kind = RingKind::PrimeField;
    s.p = p;
    return s;
}

RingSpec RingSpec::finite_field(int64_t p, int m, std::vector<int64_t> modulus) {
    RingSpec s;
    s.kind = RingKind::FiniteField;
    s.p = p;
    s.m = m;
    s.modulus = modulus.empty() ? canonical_modulus(p, m) : std::move(modulus);
    return s;
}

RingSpec RingSpec::galois_ring(int64_t p, int K, int m, std::vector<int64_t> modulus) {
    RingSpec s;
    s.kind = RingKind::GaloisRing;
    s.p = p;
    s.K = K;
    s.m = m;
    s.modulus = modulus.empty() ? canonical_modulus(p, m) : std::move(modulus);
    return s;
}

RingSpec RingSpec::polynomial(const RingSpec& base, std::vector<GenSpec> gens, std::vector<std::string> relations) {
    RingSpec s;
    s.kind = RingKind::GradedPolynomial;
    s.base = std::make_shared<const RingSpec>(base);
    s.gens = std::move(gens);
    s.relations = std::move(relations);
    return s;
}

static std::string render_zpoly(const std::vector<int64_t>& f, const char* var) {
    std::string out;
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) {
        int64_t c = f[static_cast<size_t>(i)];
        if (c == 0) continue;
        std::string t;
        if (i == 0) {
            t = std::to_string(c);
        } else {
            if (c != 1) t = std::to_string(c) + "*";
            t += var;
            if (i > 1) t += "^" + std::to_string(i);
        }
        if (!out.empty()) out += "+";
        out += t;
    }
    return out.empty() ? "0" : out;
}

std::string RingSpec::str() const {
    switch (kind) {
    case RingKind::Integers: return "ZZ";
    case RingKind::Rationals: return "QQ";
    case RingKind::PLocalRationals: return "ZZ_(" + std::to_string(p) + ")";
    case RingKind::ModPrimePower: return "ZZ/" + std::to_string(p) + "^" + std::to_string(K);
    case RingKind::PrimeField: return "GF(" + std::to_string(p) + ")";
    case RingKind::FiniteField:
        return "GF(" + std::to_string(p) + "^" + std::to_string(m) + ";" + render_zpoly(modulus, "w") + ")";
    case RingKind::GaloisRing:
        return "GR(" + std::to_string(p) + "^" + std::to_string(K) + "," + std::to_string(m) + ";" +
               render_zpoly(modulus, "w") + ")";
    case RingKind::GradedPolynomial: {
        std::string out = base->str() + "[";
        for (size_t i = 0; i < gens.size(); ++i) {
            if (i) out += ",";
            out += gens[i].name + ":" + std::to_string(gens[i].degree);
            if (gens[i].invertible) out += "!";
        }
        out += "]";
        if (!relations.empty()) {
            out += "/(";
            for (size_t i = 0; i < relations.size(); ++i) {
                if (i) out += ",";
                out += relations[i];
            }
            out += ")";
        }
        return out;
    }
    }
    return "?";
}

static std::string strip_spaces(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

static std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

static int64_t parse_int(const std::string& s) {
    if (s.empty()) throw ParseError("expected integer");
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (...) {
        throw ParseError("bad integer '" + s + "'");
    }
    if (pos != s.size()) throw ParseError("bad integer '" + s + "'");
    return v;
}

// "p^K" or a plain prime power.
static std::pair<int64_t, int> parse_prime_power(const std::string& s) {
    auto caret = s.find('^');
    if (caret != std::string::npos) {
        int64_t p = parse_int(s.substr(0, caret));
        int K = static_cast<int>(parse_int(s.substr(caret + 1)));
        return {p, K};
    }
    int64_t n = parse_int(s);
    auto pk = prime_power(n);
    if (pk.first == 0) throw NonPrimeModulus(s + " is not a prime power");
    return pk;
}

static std::vector<int64_t> parse_modulus(const std::string& s) {
    Ring zw = make_ring(RingSpec::polynomial(RingSpec::integers(), {{"w", 1, false}}));
    Value v = zw->parse(s);
    std::vector<int64_t> out;
    for (auto& t : as_poly(v).terms) {
        int e = t.mono[0];
        if (static_cast<int>(out.size()) <= e) out.resize(static_cast<size_t>(e) + 1, 0);
        out[static_cast<size_t>(e)] = std::get<mpq_class>(t.coef).get_num().get_si();
    }
    return out;
}

RingSpec RingSpec::parse(std::string_view text) {
    std::string s = strip_spaces(text);
    if (s.empty()) throw ParseError("empty ring spec");
    // Polynomial ring: BASE[gens]/(relations)
    int depth = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == '[' && depth == 0) {
            RingSpec base = parse(s.substr(0, i));
            size_t close = s.find(']', i);
            if (close == std::string::npos) throw ParseError("missing ']'");
            std::vector<GenSpec> gens;
            std::string inner = s.substr(i + 1, close - i - 1);
            if (!inner.empty()) {
                for (auto& g : split_top(inner, ',')) {
                    GenSpec gs;
                    std::string body = g;
                    if (!body.empty() && body.back() == '!') {
                        gs.invertible = true;
                        body.pop_back();
                    }
                    auto colon = body.find(':');
                    if (colon == std::string::npos) {
                        gs.name = body;
                    } else {
                        gs.name = body.substr(0, colon);
                        gs.degree = static_cast<int>(parse_int(body.substr(colon + 1)));
                    }
                    gens.push_back(gs);
                }
            }
            std::vector<std::string> rels;
            std::string rest = s.substr(close + 1);
            if (!rest.empty()) {
                if (rest.size() < 3 || rest[0] != '/' || rest[1] != '(' || rest.back() != ')')
                    throw ParseError("bad relation list '" + rest + "'");
                for (auto& r : split_top(rest.substr(2, rest.size() - 3), ',')) rels.push_back(r);
            }
            return polynomial(base, gens, rels);
        }
    }
    if (s == "ZZ") return integers();
    if (s == "QQ") return rationals();
    if (s.rfind("ZZ_(", 0) == 0 && s.back() == ')') return plocal(parse_int(s.substr(4, s.size() - 5)));
    if (s.rfind("ZZ/", 0) == 0) {
        auto [p, K] = parse_prime_power(s.substr(3));
        return mod_prime_power(p, K);
    }
    if (s.rfind("GF(", 0) == 0 && s.back() == ')') {
        std::string in = s.substr(3, s.size() - 4);
        auto semi = in.find(';');
        std::string q = in.substr(0, semi);
        auto [p, m] = parse_prime_power(q);
        if (semi == std::string::npos) {
            if (m == 1) return prime_field(p);
            return finite_field(p, m);
        }
        return finite_field(p, m, parse_modulus(in.substr(semi + 1)));
    }
    if (s.rfind("GR(", 0) == 0 && s.back() == ')') {
        std::string in = s.substr(3, s.size() - 4);
        auto semi = in.find(';');
        auto parts = split_top(in.substr(0, semi), ',');
        if (parts.size() != 2) throw ParseError("GR expects (p^K,m)");
        auto [p, K] = parse_prime_power(parts[0]);
        int m = static_cast<int>(parse_int(parts[1]));
        if (semi == std::string::npos) return galois_ring(p, K, m);
        return galois_ring(p, K, m, parse_modulus(in.substr(semi + 1)));
    }
    throw ParseError("unknown ring '" + s + "'");
}

// ---------------------------------------------------------------- shared helpers

Value RingImpl::pow(const Value& a, long e) const {
    if (e < 0) return pow(inv(a), -e);
    Value r = one(), b = a;
    while (e > 0) {
        if (e & 1) r = mul(r, b);
        e >>= 1;
        if (e) b = mul(b, b);
    }
    return r;
}

Value RingImpl::divide_by_integer(const Value& a, const mpz_class& n) const {
    Value d = from_int(n);
    if (!is_unit(d)) throw NonInvertibleDenominator(n.get_str(), "not a unit in " + name());
    return mul(a, inv(d));
}

Ring RingImpl::self() const { return self_.lock(); }

const Poly& as_poly(const Value& v) { return std::get<Poly>(v); }

// ---------------------------------------------------------------- ZZ, QQ, ZZ_(p)

namespace {

class RationalRing final : public RingImpl {
public:
    explicit RationalRing(RingSpec s) : RingImpl(std::move(s)), P_(static_cast<long>(spec_.p)) {}

    Value zero() const override { return mpq_class(0); }
    Value one() const override { return mpq_class(1); }
    Value from_int(const mpz_class& n) const override { return mpq_class(n); }
    Value from_rational(const mpq_class& q) const override {
        check_member(q);
        return q;
    }
    Value add(const Value& a, const Value& b) const override { return mpq_class(q(a) + q(b)); }
    Value neg(const Value& a) const override { return mpq_class(-q(a)); }
    Value mul(const Value& a, const Value& b) const override { return mpq_class(q(a) * q(b)); }
    void add_to(Value& acc, const Value& b) const override { std::get<mpq_class>(acc) += q(b); }
    void addmul(Value& acc, const Value& a, const Value& b) const override {
        mpq_class t = q(a) * q(b);
        std::get<mpq_class>(acc) += t;
    }
    bool is_zero(const Value& a) const override { return q(a) == 0; }
    bool eq(const Value& a, const Value& b) const override { return q(a) == q(b); }
    bool is_unit(const Value& a) const override {
        const mpq_class& x = q(a);
        switch (kind()) {
        case RingKind::Integers: return abs(x) == 1;
        case RingKind::Rationals: return x != 0;
        default: return x != 0 && x.get_num() % P_ != 0;
        }
    }
    Value inv(const Value& a) const override {
        if (!is_unit(a)) throw DivisionByNonUnit(render(a) + " in " + name());
        return mpq_class(1 / q(a));
    }
    Value divide_by_integer(const Value& a, const mpz_class& n) const override {
        if (n == 0) throw NonInvertibleDenominator("0", "division by zero");
        mpq_class r = q(a) / mpq_class(n);
        if (!member(r)) throw NonInvertibleDenominator(n.get_str(), "not invertible in " + name());
        return r;
    }
    mpz_class characteristic() const override { return 0; }
    int64_t residue_prime() const override { return spec_.p; }
    bool torsion_free() const override { return true; }
    bool is_field() const override { return kind() == RingKind::Rationals; }
    std::string render(const Value& a) const override { return q(a).get_str(); }

private:
    static const mpq_class& q(const Value& v) { return std::get<mpq_class>(v); }
    bool member(const mpq_class& x) const {
        if (kind() == RingKind::Integers) return x.get_den() == 1;
        if (kind() == RingKind::PLocalRationals) return x.get_den() % P_ != 0;
        return true;
    }
    void check_member(const mpq_class& x) const {
        if (!member(x)) throw NonInvertibleDenominator(x.get_den().get_str(), "denominator of " + x.get_str() + " in " + name());
    }
    mpz_class P_;
};

// ---------------------------------------------------------------- ZZ/p^K, GF(p)

class ResidueRing final : public RingImpl {
public:
    explicit ResidueRing(RingSpec s) : RingImpl(std::move(s)) {
        q_ = kind() == RingKind::PrimeField ? spec_.p : ipow(spec_.p, spec_.K);
    }
    Value zero() const override { return int64_t{0}; }
    Value one() const override { return int64_t{1 % q_}; }
    Value from_int(const mpz_class& n) const override { return mod_of(n, q_); }
    Value from_rational(const mpq_class& x) const override {
        int64_t d = mod_of(x.get_den(), q_);
        if (d % spec_.p == 0) throw NonInvertibleDenominator(x.get_den().get_str(), "not a unit mod " + std::to_string(q_));
        return mulmod(mod_of(x.get_num(), q_), mod_inverse(d, q_), q_);
    }
    Value add(const Value& a, const Value& b) const override {
        int64_t r = r_(a) + r_(b);
        return r >= q_ ? r - q_ : r;
    }
    Value neg(const Value& a) const override { return r_(a) == 0 ? int64_t{0} : q_ - r_(a); }
    Value mul(const Value& a, const Value& b) const override { return mulmod(r_(a), r_(b), q_); }
    void add_to(Value& acc, const Value& b) const override {
        int64_t& r = std::get<int64_t>(acc);
        r += r_(b);
        if (r >= q_) r -= q_;
    }
    void addmul(Value& acc, const Value& a, const Value& b) const override {
        int64_t& r = std::get<int64_t>(acc);
        r += mulmod(r_(a), r_(b), q_);
        if (r >= q_) r -= q_;
    }
    bool is_zero(const Value& a) const override { return r_(a) == 0; }
    bool eq(const Value& a, const Value& b) const override { return r_(a) == r_(b); }
    bool is_unit(const Value& a) const override { return r_(a) % spec_.p != 0; }
    Value inv(const Value& a) const override {
        if (!is_unit(a)) throw DivisionByNonUnit(render(a) + " in " + name());
        return mod_inverse(r_(a), q_);
    }
    Value divide_by_integer(const Value& a, const mpz_class& n) const override {
        int64_t d = mod_of(n, q_);
        if (d % spec_.p == 0) throw NonInvertibleDenominator(n.get_str(), "not a unit mod " + std::to_string(q_));
        return mulmod(r_(a), mod_inverse(d, q_), q_);
    }
    mpz_class characteristic() const override { return mpz_class(static_cast<long>(q_)); }
    int64_t residue_prime() const override { return spec_.p; }
    bool torsion_free() const override { return false; }
    bool is_field() const override { return q_ == spec_.p; }
    std::string render(const Value& a) const override { return std::to_string(r_(a)); }
    int64_t modulus() const { return q_; }

private:
    static int64_t r_(const Value& v) { return std::get<int64_t>(v); }
    int64_t q_;
};

// ---------------------------------------------------------------- GF(p^m), GR(p^K, m)

class ExtensionRing final : public RingImpl {
public:
    explicit ExtensionRing(RingSpec s) : RingImpl(std::move(s)) {
        m_ = spec_.m;
        q_ = kind() == RingKind::FiniteField ? spec_.p : ipow(spec_.p, spec_.K);
        f_ = spec_.modulus;
        for (auto& c : f_) c = ((c % q_) + q_) % q_;
    }
    Value zero() const override { return Ext(static_cast<size_t>(m_), 0); }
    Value one() const override {
        Ext e(static_cast<size_t>(m_), 0);
        e[0] = 1 % q_;
        return e;
    }
    Value from_int(const mpz_class& n) const override {
        Ext e(static_cast<size_t>(m_), 0);
        e[0] = mod_of(n, q_);
        return e;
    }
    Value from_rational(const mpq_class& x) const override {
        int64_t d = mod_of(x.get_den(), q_);
        if (d % spec_.p == 0) throw NonInvertibleDenominator(x.get_den().get_str(), "not a unit in " + name());
        Ext e(static_cast<size_t>(m_), 0);
        e[0] = mulmod(mod_of(x.get_num(), q_), mod_inverse(d, q_), q_);
        return e;
    }
    Value add(const Value& a, const Value& b) const override {
        Ext r = x(a);
        const Ext& y = x(b);
        for (int i = 0; i < m_; ++i) {
            r[i] += y[i];
            if (r[i] >= q_) r[i] -= q_;
        }
        return r;
    }
    void add_to(Value& acc, const Value& b) const override {
        Ext& r = std::get<Ext>(acc);
        const Ext& y = x(b);
        for (int i = 0; i < m_; ++i) {
            r[i] += y[i];
            if (r[i] >= q_) r[i] -= q_;
        }
    }
    Value neg(const Value& a) const override {
        Ext r = x(a);
        for (auto& c : r) c = c ? q_ - c : 0;
        return r;
    }
    Value mul(const Value& a, const Value& b) const override {
        const Ext &u = x(a), &v = x(b);
        std::vector<int64_t> t(static_cast<size_t>(2 * m_ - 1), 0);
        for (int i = 0; i < m_; ++i) {
            if (!u[i]) continue;
            for (int j = 0; j < m_; ++j) t[i + j] = (t[i + j] + mulmod(u[i], v[j], q_)) % q_;
        }
        for (int k = 2 * m_ - 2; k >= m_; --k) {
            int64_t c = t[k];
            if (!c) continue;
            t[k] = 0;
            for (int i = 0; i < m_; ++i) t[k - m_ + i] = ((t[k - m_ + i] - mulmod(c, f_[i], q_)) % q_ + q_) % q_;
        }
        t.resize(static_cast<size_t>(m_));
        return Ext(t.begin(), t.end());
    }
    bool is_zero(const Value& a) const override {
        for (auto c : x(a))
            if (c) return false;
        return true;
    }
    bool eq(const Value& a, const Value& b) const override { return x(a) == x(b); }
    bool is_unit(const Value& a) const override {
        for (auto c : x(a))
            if (c % spec_.p) return true;
        return false;
    }
    Value inv(const Value& a) const override {
        if (!is_unit(a)) throw DivisionByNonUnit(render(a) + " in " + name());
        // Inverse modulo p by Fermat, then Newton lifting to p^K.
        mpz_class e;
        mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(spec_.p), static_cast<unsigned long>(m_));
        e -= 2;
        Value b = one(), base = a;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) b = mul(b, base);
            base = mul(base, base);
            e >>= 1;
        }
        Value two = from_int(2);
        for (int it = 0; it < 64 && !is_one(mul(a, b)); ++it) b = mul(b, sub(two, mul(a, b)));
        return b;
    }
    mpz_class characteristic() const override { return mpz_class(static_cast<long>(q_)); }
    int64_t residue_prime() const override { return spec_.p; }
    bool torsion_free() const override { return false; }
    bool is_field() const override { return q_ == spec_.p; }
    std::string render(const Value& a) const override { return render_zpoly(x(a), "w"); }
    int lookup_name(std::string_view n) const override { return n == "w" ? 0 : -1; }
    Value named(int) const override {
        Ext e(static_cast<size_t>(m_), 0);
        if (m_ > 1) {
            e[1] = 1;
        } else {
            e[0] = ((-f_[0]) % q_ + q_) % q_;
        }
        return e;
    }
    int64_t modulus() const { return q_; }

private:
    static const Ext& x(const Value& v) { return std::get<Ext>(v); }
    int m_;
    int64_t q_;
    std::vector<int64_t> f_;
};

// ---------------------------------------------------------------- polynomial rings

struct Relation {
    Mono lead;
    std::vector<Term> tail; // lead = tail (already negated and normalized)
};

class PolyRing final : public RingImpl {
public:
    PolyRing(RingSpec s, Ring base) : RingImpl(std::move(s)), base_(std::move(base)) {
        n_ = static_cast<int>(spec_.gens.size());
    }

    void init_relations() {
        for (auto& text : spec_.relations) {
            Value v = parse(text);
            const Poly& P = as_poly(v);
            if (P.terms.empty()) continue;
            int wd = weighted_degree(spec_, P.terms[0].mono);
            for (auto& t : P.terms) {
                if (weighted_degree(spec_, t.mono) != wd)
                    throw InhomogeneousRelation(text);
                for (int i = 0; i < n_; ++i)
                    if (t.mono[i] < 0) throw InvalidArgument("relation uses a negative power: " + text);
            }
            // Invertible generators dividing every term are cancelled, so a^N = a
            // with a invertible becomes a^(N-1) = 1.
            Mono common;
            for (int i = 0; i < n_; ++i) {
                if (!spec_.gens[static_cast<size_t>(i)].invertible) continue;
                int lo = INT16_MAX;
                for (auto& t : P.terms) lo = std::min<int>(lo, t.mono[i]);
                common[i] = static_cast<int16_t>(lo);
            }
            Poly Q = P;
            for (auto& t : Q.terms) t.mono = t.mono - common;
            register_relation(Q, text);
        }
    }

    void register_relation(const Poly& P, const std::string& text) {
        {
            const Value& lc = P.terms[0].coef;
            if (!base_->is_unit(lc)) throw InvalidArgument("relation leading coefficient is not a unit: " + text);
            Value lci = base_->inv(lc);
            Relation r;
            r.lead = P.terms[0].mono;
            for (size_t i = 1; i < P.terms.size(); ++i)
                r.tail.push_back({P.terms[i].mono, base_->neg(base_->mul(P.terms[i].coef, lci))});
            if (r.tail.size() == 1 && r.tail[0].mono.is_one() && base_->is_one(r.tail[0].coef)) {
                int nz = 0, gi = -1;
                for (int i = 0; i < n_; ++i)
                    if (r.lead[i]) {
                        ++nz;
                        gi = i;
                    }
                if (nz == 1 && spec_.gens[static_cast<size_t>(gi)].invertible) period_[gi] = r.lead[gi];
            }
            rels_.push_back(std::move(r));
        }
    }

    Value zero() const override { return Poly{}; }
    Value one() const override { return constant(base_->one()); }
    Value from_int(const mpz_class& n) const override { return constant(base_->from_int(n)); }
    Value from_rational(const mpq_class& x) const override { return constant(base_->from_rational(x)); }
    Value constant(Value c) const {
        Poly p;
        if (!base_->is_zero(c)) p.terms.push_back({Mono{}, std::move(c)});
        return p;
    }

    Value add(const Value& a, const Value& b) const override {
        const auto &A = as_poly(a).terms, &B = as_poly(b).terms;
        Poly r;
        r.terms.reserve(A.size() + B.size());
        size_t i = 0, j = 0;
        while (i < A.size() || j < B.size()) {
            if (j == B.size() || (i < A.size() && mono_less(spec_, B[j].mono, A[i].mono))) {
                r.terms.push_back(A[i++]);
            } else if (i == A.size() || mono_less(spec_, A[i].mono, B[j].mono)) {
                r.terms.push_back(B[j++]);
            } else {
                Value c = base_->add(A[i].coef, B[j].coef);
                if (!base_->is_zero(c)) r.terms.push_back({A[i].mono, std::move(c)});
                ++i;
                ++j;
            }
        }
        return r;
    }
    Value neg(const Value& a) const override {
        Poly r = as_poly(a);
        for (auto& t : r.terms) t.coef = base_->neg(t.coef);
        return r;
    }
    Value mul(const Value& a, const Value& b) const override {
        const auto &A = as_poly(a).terms, &B = as_poly(b).terms;
        if (A.empty() || B.empty()) return Poly{};
        if (A.size() == 1 && A[0].mono.is_one()) return scale(b, A[0].coef);
        if (B.size() == 1 && B[0].mono.is_one()) return scale(a, B[0].coef);
        std::unordered_map<Mono, Value, MonoHash> acc;
        acc.reserve(A.size() * B.size());
        for (auto& s : A)
            for (auto& t : B) {
                Mono m = s.mono + t.mono;
                auto it = acc.find(m);
                if (it == acc.end())
                    acc.emplace(m, base_->mul(s.coef, t.coef));
                else
                    base_->addmul(it->second, s.coef, t.coef);
            }
        std::vector<Term> terms;
        terms.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (!base_->is_zero(c)) terms.push_back({m, std::move(c)});
        return normalize(std::move(terms), false);
    }
    Value scale(const Value& a, const Value& c) const {
        Poly r;
        for (auto& t : as_poly(a).terms) {
            Value x = base_->mul(t.coef, c);
            if (!base_->is_zero(x)) r.terms.push_back({t.mono, std::move(x)});
        }
        return r;
    }
    bool is_zero(const Value& a) const override { return as_poly(a).terms.empty(); }
    bool eq(const Value& a, const Value& b) const override {
        const auto &A = as_poly(a).terms, &B = as_poly(b).terms;
        if (A.size() != B.size()) return false;
        for (size_t i = 0; i < A.size(); ++i)
            if (!(A[i].mono == B[i].mono) || !base_->eq(A[i].coef, B[i].coef)) return false;
        return true;
    }
    bool monomial_unit(const Term& t) const {
        if (!base_->is_unit(t.coef)) return false;
        for (int i = 0; i < n_; ++i)
            if (t.mono[i] != 0 && !spec_.gens[static_cast<size_t>(i)].invertible) return false;
        return true;
    }
    bool coefficient_nilpotent(const Value& c) const {
        return !base_->torsion_free() && base_->characteristic() != 0 && !base_->is_unit(c) &&
               !base_->is_field();
    }
    bool is_unit(const Value& a) const override {
        const auto& T = as_poly(a).terms;
        if (T.empty()) return false;
        if (T.size() == 1) return monomial_unit(T[0]);
        // unit monomial plus nilpotent part (only over ZZ/p^K and Galois rings)
        int units = 0;
        for (auto& t : T) {
            if (monomial_unit(t))
                ++units;
            else if (!coefficient_nilpotent(t.coef))
                return false;
        }
        return units == 1;
    }
    Value inv(const Value& a) const override {
        if (!is_unit(a)) throw DivisionByNonUnit(render(a) + " in " + name());
        const auto& T = as_poly(a).terms;
        const Term* u = nullptr;
        for (auto& t : T)
            if (monomial_unit(t)) u = &t;
        Poly ui;
        ui.terms.push_back({Mono{} - u->mono, base_->inv(u->coef)});
        if (T.size() == 1) return normalize(std::move(ui.terms), false);
        // a = u (1 + n) with n nilpotent
        Value n = sub(mul(a, ui), one());
        Value r = one(), pw = one();
        for (int k = 1; k < 256; ++k) {
            pw = mul(pw, neg(n));
            if (is_zero(pw)) break;
            r = add(r, pw);
        }
        return mul(r, normalize(std::move(ui.terms), false));
    }
    Value divide_by_integer(const Value& a, const mpz_class& n) const override {
        Poly r;
        for (auto& t : as_poly(a).terms) {
            Value c = base_->divide_by_integer(t.coef, n);
            if (!base_->is_zero(c)) r.terms.push_back({t.mono, std::move(c)});
        }
        return r;
    }
    mpz_class characteristic() const override { return base_->characteristic(); }
    int64_t residue_prime() const override { return base_->residue_prime(); }
    bool torsion_free() const override { return base_->torsion_free(); }
    bool is_field() const override { return n_ == 0 && base_->is_field(); }

    std::string render(const Value& a) const override {
        const auto& T = as_poly(a).terms;
        if (T.empty()) return "0";
        bool ext = base_->kind() == RingKind::FiniteField || base_->kind() == RingKind::GaloisRing;
        std::string out;
        for (auto& t : T) {
            std::string c = base_->render(t.coef);
            std::string s;
            if (t.mono.is_one()) {
                s = ext && c.find_first_of("+w") != std::string::npos && c != "w" ? "(" + c + ")" : c;
            } else {
                std::string m = render_mono(spec_, t.mono);
                if (c == "1")
                    s = m;
                else if (c == "-1")
                    s = "-" + m;
                else if (ext && (c.find('+') != std::string::npos || c.find('*') != std::string::npos))
                    s = "(" + c + ")*" + m;
                else
                    s = c + "*" + m;
            }
            if (!out.empty() && s[0] != '-') out += "+";
            out += s;
        }
        return out;
    }

    int ngens() const override { return n_; }
    Value gen(int i) const override {
        Poly p;
        Mono m;
        m[i] = 1;
        p.terms.push_back({m, base_->one()});
        return normalize(std::move(p.terms), false);
    }
    Ring base() const override { return base_; }
    int lookup_name(std::string_view nm) const override {
        for (int i = 0; i < n_; ++i)
            if (spec_.gens[static_cast<size_t>(i)].name == nm) return i;
        int b = base_->lookup_name(nm);
        return b < 0 ? -1 : n_ + b;
    }
    Value named(int idx) const override {
        if (idx < n_) return gen(idx);
        return constant(base_->named(idx - n_));
    }

    // Sorts, merges, and reduces by the relations.
    Value normalize(std::vector<Term> terms, bool merge) const {
        if (has_period()) {
            for (auto& t : terms)
                for (int i = 0; i < n_; ++i)
                    if (period_[i]) t.mono[i] = static_cast<int16_t>(((t.mono[i] % period_[i]) + period_[i]) % period_[i]);
            merge = true;
        }
        if (merge) {
            std::unordered_map<Mono, Value, MonoHash> acc;
            for (auto& t : terms) {
                auto it = acc.find(t.mono);
                if (it == acc.end())
                    acc.emplace(t.mono, std::move(t.coef));
                else
                    base_->add_to(it->second, t.coef);
            }
            terms.clear();
            for (auto& [m, c] : acc)
                if (!base_->is_zero(c)) terms.push_back({m, std::move(c)});
        }
        if (!rels_.empty()) terms = reduce(std::move(terms));
        auto less = [this](const Term& x, const Term& y) { return mono_less(spec_, y.mono, x.mono); };
        std::sort(terms.begin(), terms.end(), less);
        return Poly{std::move(terms)};
    }

private:
    const Relation* reducer(const Mono& m) const {
        for (auto& r : rels_) {
            bool ok = true;
            for (int i = 0; i < n_ && ok; ++i) ok = m[i] >= r.lead[i];
            if (ok) return &r;
        }
        return nullptr;
    }
    std::vector<Term> reduce(std::vector<Term> terms) const {
        auto cmp = [this](const Mono& x, const Mono& y) { return mono_less(spec_, y, x); };
        std::map<Mono, Value, decltype(cmp)> work(cmp);
        for (auto& t : terms) {
            auto it = work.find(t.mono);
            if (it == work.end())
                work.emplace(t.mono, std::move(t.coef));
            else
                base_->add_to(it->second, t.coef);
        }
        std::vector<Term> out;
        while (!work.empty()) {
            auto it = work.begin();
            Mono m = it->first;
            Value c = std::move(it->second);
            work.erase(it);
            if (base_->is_zero(c)) continue;
            const Relation* r = reducer(m);
            if (!r) {
                out.push_back({m, std::move(c)});
                continue;
            }
            Mono q = m - r->lead;
            for (auto& t : r->tail) {
                Mono nm = q + t.mono;
                Value nc = base_->mul(c, t.coef);
                auto jt = work.find(nm);
                if (jt == work.end())
                    work.emplace(nm, std::move(nc));
                else
                    base_->add_to(jt->second, nc);
            }
        }
        return out;
    }

    bool has_period() const {
        for (int i = 0; i < n_; ++i)
            if (period_[i]) return true;
        return false;
    }

    Ring base_;
    int n_;
    std::vector<Relation> rels_;
    Mono period_; // a_i^period = 1 for invertible generators with such a relation
};

} // namespace

int weighted_degree(const RingSpec& spec, const Mono& m) {
    int d = 0;
    for (size_t i = 0; i < spec.gens.size(); ++i) d += m[static_cast<int>(i)] * spec.gens[i].degree;
    return d;
}

bool mono_less(const RingSpec& spec, const Mono& a, const Mono& b) {
    int wa = weighted_degree(spec, a), wb = weighted_degree(spec, b);
    if (wa != wb) return wa < wb;
    int ta = 0, tb = 0;
    for (int i = 0; i < kMaxGens; ++i) {
        ta += a[i];
        tb += b[i];
    }
    if (ta != tb) return ta < tb;
    for (int i = 0; i < kMaxGens; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

std::string render_mono(const RingSpec& spec, const Mono& m) {
    std::string out;
    for (size_t i = 0; i < spec.gens.size(); ++i) {
        int e = m[static_cast<int>(i)];
        if (!e) continue;
        if (!out.empty()) out += "*";
        out += spec.gens[i].name;
        if (e != 1) out += "^" + std::to_string(e);
    }
    return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------- construction

static bool valid_name(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

Ring make_ring(const RingSpec& spec) {
    std::shared_ptr<RingImpl> r;
    auto need_prime = [&](int64_t p) {
        if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p) + " is not prime");
    };
    switch (spec.kind) {
    case RingKind::Integers:
    case RingKind::Rationals: r = std::make_shared<RationalRing>(spec); break;
    case RingKind::PLocalRationals:
        need_prime(spec.p);
        r = std::make_shared<RationalRing>(spec);
        break;
    case RingKind::ModPrimePower:
    case RingKind::PrimeField:
        need_prime(spec.p);
        if (spec.K < 1) throw InvalidArgument("precision K must be at least 1");
        {
            long double q = 1;
            for (int i = 0; i < spec.K; ++i) q *= static_cast<long double>(spec.p);
            if (q > 4.0e18L) throw InvalidArgument("p^K exceeds 64-bit residues");
        }
        r = std::make_shared<ResidueRing>(spec);
        break;
    case RingKind::FiniteField:
    case RingKind::GaloisRing: {
        need_prime(spec.p);
        if (spec.m < 1 || spec.K < 1) throw InvalidArgument("m and K must be at least 1");
        if (static_cast<int>(spec.modulus.size()) != spec.m + 1 || spec.modulus.back() != 1)
            throw ReducibleModulusPolynomial("modulus must be monic of degree " + std::to_string(spec.m));
        if (!is_irreducible_mod_p(spec.modulus, spec.p))
            throw ReducibleModulusPolynomial(render_zpoly(spec.modulus, "w") + " mod " + std::to_string(spec.p));
        r = std::make_shared<ExtensionRing>(spec);
        break;
    }
    case RingKind::GradedPolynomial: {
        if (!spec.base || spec.base->kind == RingKind::GradedPolynomial)
            throw InvalidArgument("polynomial rings need a scalar base");
        if (spec.gens.size() > static_cast<size_t>(kMaxGens))
            throw DegreeOverflow("at most " + std::to_string(kMaxGens) + " generators");
        for (size_t i = 0; i < spec.gens.size(); ++i) {
            if (!valid_name(spec.gens[i].name)) throw InvalidArgument("bad generator name '" + spec.gens[i].name + "'");
            for (size_t j = 0; j < i; ++j)
                if (spec.gens[i].name == spec.gens[j].name)
                    throw InvalidArgument("duplicate generator " + spec.gens[i].name);
        }
        Ring base = make_ring(*spec.base);
        auto pr = std::make_shared<PolyRing>(spec, base);
        pr->self_ = pr;
        pr->init_relations();
        return pr;
    }
    }
    r->self_ = r;
    return r;
}

Ring make_ring(std::string_view spec_text) { return make_ring(RingSpec::parse(spec_text)); }

// ---------------------------------------------------------------- parsing elements

namespace {

class ExprParser {
public:
    ExprParser(const RingImpl& r, std::string_view s) : R(r), s_(s) {}

    Value run() {
        Value v = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError(what + " at position " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    Value expr() {
        Value v;
        if (eat('-'))
            v = R.neg(term());
        else {
            eat('+');
            v = term();
        }
        for (;;) {
            if (eat('+'))
                v = R.add(v, term());
            else if (eat('-'))
                v = R.sub(v, term());
            else
                return v;
        }
    }
    Value term() {
        Value v = factor();
        for (;;) {
            if (eat('*')) {
                v = R.mul(v, factor());
            } else if (eat('/')) {
                skip();
                size_t start = i_;
                Value d = factor();
                std::string lit(s_.substr(start, i_ - start));
                bool integer_literal = !lit.empty() && std::all_of(lit.begin(), lit.end(), [](char c) {
                    return std::isdigit(static_cast<unsigned char>(c));
                });
                if (integer_literal)
                    v = R.divide_by_integer(v, mpz_class(lit));
                else
                    v = R.div(v, d);
            } else {
                return v;
            }
        }
    }
    long exponent() {
        skip();
        bool paren = eat('(');
        bool negative = eat('-');
        skip();
        size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected exponent");
        long e = std::stol(std::string(s_.substr(start, i_ - start)));
        if (paren && !eat(')')) fail("expected ')'");
        return negative ? -e : e;
    }
    Value factor() {
        if (eat('-')) return R.neg(factor());
        Value base = atom();
        if (eat('^')) return R.pow(base, exponent());
        return base;
    }
    Value atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            Value v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            return R.from_int(mpz_class(std::string(s_.substr(start, i_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            std::string nm(s_.substr(start, i_ - start));
            int idx = R.lookup_name(nm);
            if (idx < 0) fail("unknown name '" + nm + "'");
            return R.named(idx);
        }
        fail(std::string("unexpected '") + c + "'");
    }

    const RingImpl& R;
    std::string_view s_;
    size_t i_ = 0;
};

} // namespace

Value RingImpl::parse(std::string_view text) const { return ExprParser(*this, text).run(); }

// ---------------------------------------------------------------- conversion

static bool same_ring(const Ring& a, const Ring& b) { return a == b || a->name() == b->name(); }

Value convert(const Ring& from, const Value& v, const Ring& to) {
    if (same_ring(from, to)) return v;
    if (from->kind() == RingKind::GradedPolynomial) {
        const auto& fs = from->spec();
        if (to->kind() == RingKind::GradedPolynomial) {
            const auto& ts = to->spec();
            std::vector<int> map(fs.gens.size(), -1);
            for (size_t i = 0; i < fs.gens.size(); ++i)
                for (size_t j = 0; j < ts.gens.size(); ++j)
                    if (fs.gens[i].name == ts.gens[j].name) map[i] = static_cast<int>(j);
            std::vector<std::pair<Mono, Value>> terms;
            for (auto& t : as_poly(v).terms) {
                Mono m;
                for (size_t i = 0; i < fs.gens.size(); ++i) {
                    int e = t.mono[static_cast<int>(i)];
                    if (!e) continue;
                    if (map[i] < 0) throw RingMismatch("generator " + fs.gens[i].name + " missing in " + to->name());
                    m[map[i]] = static_cast<int16_t>(e);
                }
                terms.emplace_back(m, convert(from->base(), t.coef, to->base()));
            }
            return make_poly(to, std::move(terms));
        }
        const auto& T = as_poly(v).terms;
        if (T.empty()) return to->zero();
        if (T.size() == 1 && T[0].mono.is_one()) return convert(from->base(), T[0].coef, to);
        throw RingMismatch("nonconstant element of " + from->name() + " into " + to->name());
    }
    if (to->kind() == RingKind::GradedPolynomial) {
        Value c = convert(from, v, to->base());
        std::vector<std::pair<Mono, Value>> terms;
        terms.emplace_back(Mono{}, std::move(c));
        return make_poly(to, std::move(terms));
    }
    if (std::holds_alternative<mpq_class>(v)) return to->from_rational(std::get<mpq_class>(v));
    mpz_class tc = to->characteristic();
    if (std::holds_alternative<int64_t>(v)) {
        mpz_class fc = from->characteristic();
        if (tc == 0 || fc % tc != 0) throw RingMismatch(from->name() + " does not map to " + to->name());
        return to->from_int(mpz_class(static_cast<long>(std::get<int64_t>(v))));
    }
    const Ext& x = std::get<Ext>(v);
    const auto &fs = from->spec(), &ts = to->spec();
    bool ext_target = ts.kind == RingKind::FiniteField || ts.kind == RingKind::GaloisRing;
    if (ext_target && ts.p == fs.p && ts.m == fs.m && tc != 0 && from->characteristic() % tc == 0) {
        for (size_t i = 0; i < ts.modulus.size(); ++i)
            if (((fs.modulus[i] - ts.modulus[i]) % ts.p) != 0) throw RingMismatch("incompatible moduli");
        Ext r(x.size());
        int64_t q = tc.get_si();
        for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] % q;
        return r;
    }
    bool constant = true;
    for (size_t i = 1; i < x.size(); ++i) constant = constant && x[i] == 0;
    if (constant && tc != 0 && from->characteristic() % tc == 0) return to->from_int(mpz_class(static_cast<long>(x[0])));
    throw RingMismatch(from->name() + " does not map to " + to->name());
}

std::vector<std::pair<Mono, Value>> poly_terms(const Ring& r, const Value& v) {
    std::vector<std::pair<Mono, Value>> out;
    if (r->kind() != RingKind::GradedPolynomial) {
        if (!r->is_zero(v)) out.emplace_back(Mono{}, v);
        return out;
    }
    for (auto& t : as_poly(v).terms) out.emplace_back(t.mono, t.coef);
    return out;
}

Value make_poly(const Ring& r, std::vector<std::pair<Mono, Value>> terms) {
    if (r->kind() != RingKind::GradedPolynomial) {
        Value acc = r->zero();
        for (auto& [m, c] : terms) {
            if (!m.is_one()) throw RingMismatch("monomial in scalar ring");
            r->add_to(acc, c);
        }
        return acc;
    }
    auto* pr = static_cast<const PolyRing*>(r.get());
    std::vector<Term> ts;
    ts.reserve(terms.size());
    for (auto& [m, c] : terms) ts.push_back({m, std::move(c)});
    return pr->normalize(std::move(ts), true);
}

Value monomial(const Ring& r, const Mono& m, const Value& c) {
    std::vector<std::pair<Mono, Value>> t;
    t.emplace_back(m, c);
    return make_poly(r, std::move(t));
}

Value evaluate(const Ring& from, const Value& v, const Ring& to, const std::vector<Value>& images) {
    if (from->kind() != RingKind::GradedPolynomial) return convert(from, v, to);
    const int n = from->ngens();
    if (static_cast<int>(images.size()) < n) throw InvalidArgument("missing generator images");
    std::vector<std::vector<Value>> powers(static_cast<size_t>(n));
    std::vector<std::vector<Value>> neg_powers(static_cast<size_t>(n));
    auto power = [&](int i, int e) -> const Value& {
        auto& P = e >= 0 ? powers[static_cast<size_t>(i)] : neg_powers[static_cast<size_t>(i)];
        int a = e >= 0 ? e : -e;
        if (P.empty()) P.push_back(to->one());
        while (static_cast<int>(P.size()) <= a) {
            const Value& g = e >= 0 ? images[static_cast<size_t>(i)] : to->inv(images[static_cast<size_t>(i)]);
            P.push_back(to->mul(P.back(), g));
        }
        return P[static_cast<size_t>(a)];
    };
    Value acc = to->zero();
    for (auto& t : as_poly(v).terms) {
        Value x = convert(from->base(), t.coef, to);
        for (int i = 0; i < n; ++i)
            if (t.mono[i]) x = to->mul(x, power(i, t.mono[i]));
        to->add_to(acc, x);
    }
    return acc;
}

// ---------------------------------------------------------------- towers

RingSpec witt_ring(int64_t p, int m, int K) {
    if (!is_prime(p)) throw NonPrimeModulus(std::to_string(p));
    if (m < 1 || K < 1) throw InvalidArgument("m and K must be at least 1");
    if (m == 1) return RingSpec::mod_prime_power(p, K);
    return RingSpec::galois_ring(p, K, m);
}

RingSpec residue_field(const RingSpec& s) {
    switch (s.kind) {
    case RingKind::PLocalRationals:
    case RingKind::ModPrimePower:
    case RingKind::PrimeField: return RingSpec::prime_field(s.p);
    case RingKind::FiniteField:
    case RingKind::GaloisRing: {
        std::vector<int64_t> f = s.modulus;
        for (auto& c : f) c = ((c % s.p) + s.p) % s.p;
        return RingSpec::finite_field(s.p, s.m, f);
    }
    case RingKind::GradedPolynomial: return change_base(s, residue_field(*s.base));
    default: throw UnsupportedBase(s.str() + " has no residue field");
    }
}

RingSpec rationalization(const RingSpec& s) {
    switch (s.kind) {
    case RingKind::Integers:
    case RingKind::Rationals:
    case RingKind::PLocalRationals: return RingSpec::rationals();
    case RingKind::GradedPolynomial: return change_base(s, rationalization(*s.base));
    default: throw UnsupportedBase(s.str() + " does not embed in a QQ-algebra");
    }
}

RingSpec change_base(const RingSpec& s, const RingSpec& nb) {
    if (s.kind != RingKind::GradedPolynomial) return nb;
    return RingSpec::polynomial(nb, s.gens, s.relations);
}

// ---------------------------------------------------------------- finite fields

uint64_t field_order(const Ring& f) {
    const auto& s = f->spec();
    if (!f->is_field() || f->kind() == RingKind::GradedPolynomial || f->kind() == RingKind::Rationals)
        throw InfiniteRing(f->name() + " is not a finite field");
    if (s.kind == RingKind::FiniteField || s.kind == RingKind::GaloisRing) return static_cast<uint64_t>(ipow(s.p, s.m));
    return static_cast<uint64_t>(s.p);
}

std::vector<Value> enumerate_field(const Ring& f) {
    uint64_t n = field_order(f);
    if (n > (1u << 24)) throw CapExceeded("field too large to enumerate");
    const auto& s = f->spec();
    std::vector<Value> out;
    out.reserve(n);
    if (s.kind == RingKind::FiniteField || s.kind == RingKind::GaloisRing) {
        for (uint64_t idx = 0; idx < n; ++idx) {
            Ext e(static_cast<size_t>(s.m), 0);
            uint64_t t = idx;
            for (int i = 0; i < s.m; ++i) {
                e[static_cast<size_t>(i)] = static_cast<int64_t>(t % static_cast<uint64_t>(s.p));
                t /= static_cast<uint64_t>(s.p);
            }
            out.push_back(std::move(e));
        }
    } else {
        for (uint64_t i = 0; i < n; ++i) out.push_back(static_cast<int64_t>(i));
    }
    return out;
}

uint64_t field_index(const Ring& f, const Value& v) {
    if (std::holds_alternative<int64_t>(v)) return static_cast<uint64_t>(std::get<int64_t>(v));
    const Ext& e = std::get<Ext>(v);
    uint64_t idx = 0;
    for (int i = static_cast<int>(e.size()) - 1; i >= 0; --i) idx = idx * static_cast<uint64_t>(f->spec().p) + static_cast<uint64_t>(e[static_cast<size_t>(i)]);
    return idx;
}

Value field_embedding(const Ring& small, const Ring& large) {
    const auto &ss = small->spec(), &ls = large->spec();
    if (ss.p != ls.p) throw RingMismatch("different characteristics");
    int sm = ss.kind == RingKind::FiniteField ? ss.m : 1;
    int lm = ls.kind == RingKind::FiniteField ? ls.m : 1;
    if (lm % sm) throw RingMismatch(small->name() + " does not embed in " + large->name());
    if (ss.kind != RingKind::FiniteField) return large->zero();
    for (auto& x : enumerate_field(large)) {
        Value acc = large->zero();
        for (int i = sm; i >= 0; --i)
            acc = large->add(large->mul(acc, x), large->from_int(mpz_class(static_cast<long>(ss.modulus[static_cast<size_t>(i)]))));
        if (large->is_zero(acc)) return x;
    }
    throw RingMismatch("no root of the modulus found");
}

} // namespace fglab
