#pragma once

#include <gmpxx.h>

#include <array>
#include <climits>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fglab/errors.hpp"

namespace fglab {

constexpr int kMaxGens = 16;

struct Mono {
    std::array<int16_t, kMaxGens> e{};

    int16_t& operator[](int i) { return e[static_cast<size_t>(i)]; }
    int16_t operator[](int i) const { return e[static_cast<size_t>(i)]; }
    bool operator==(const Mono&) const = default;
    bool is_one() const;
};

Mono operator+(Mono a, const Mono& b);
Mono operator-(Mono a, const Mono& b);

struct MonoHash {
    size_t operator()(const Mono& m) const noexcept;
};

// Payloads carry no ring pointer; the owning ring interprets them.
//   mpq_class            ZZ, QQ, ZZ_(p)   (integers stored with denominator 1)
//   int64_t              ZZ/p^K, GF(p)    (residue in [0, q))
//   Ext                  GF(p^m), GR(p^K,m): coefficients of 1, w, ..., w^{m-1}
//   Poly                 graded polynomial and Laurent rings
struct Term;
struct Poly {
    std::vector<Term> terms; // leading term first, no zero coefficients
};
using Ext = std::vector<int64_t>;
using Value = std::variant<mpq_class, int64_t, Ext, Poly>;
struct Term {
    Mono mono;
    Value coef;
};

enum class RingKind {
    Integers,
    Rationals,
    PLocalRationals,
    ModPrimePower,
    PrimeField,
    FiniteField,
    GaloisRing,
    GradedPolynomial,
};

struct GenSpec {
    std::string name;
    int degree = 0;
    bool invertible = false;
    bool operator==(const GenSpec&) const = default;
};

struct RingSpec {
    RingKind kind = RingKind::Integers;
    int64_t p = 0;
    int K = 1;
    int m = 1;
    std::vector<int64_t> modulus; // monic, constant term first, size m + 1
    std::shared_ptr<const RingSpec> base;
    std::vector<GenSpec> gens;
    std::vector<std::string> relations;

    static RingSpec integers();
    static RingSpec rationals();
    static RingSpec plocal(int64_t p);
    static RingSpec mod_prime_power(int64_t p, int K);
    static RingSpec prime_field(int64_t p);
    static RingSpec finite_field(int64_t p, int m, std::vector<int64_t> modulus = {});
    static RingSpec galois_ring(int64_t p, int K, int m, std::vector<int64_t> modulus = {});
    static RingSpec polynomial(const RingSpec& base, std::vector<GenSpec> gens,
                               std::vector<std::string> relations = {});

    static RingSpec parse(std::string_view text);
    std::string str() const;
    bool operator==(const RingSpec& o) const { return str() == o.str(); }
};

class RingImpl;
using Ring = std::shared_ptr<const RingImpl>;

class RingImpl {
public:
    explicit RingImpl(RingSpec spec) : spec_(std::move(spec)) {}
    virtual ~RingImpl() = default;

    const RingSpec& spec() const { return spec_; }
    RingKind kind() const { return spec_.kind; }
    std::string name() const { return spec_.str(); }

    virtual Value zero() const = 0;
    virtual Value one() const = 0;
    virtual Value from_int(const mpz_class& n) const = 0;
    // Throws NonInvertibleDenominator when the denominator is not a unit here.
    virtual Value from_rational(const mpq_class& q) const = 0;

    virtual Value add(const Value& a, const Value& b) const = 0;
    virtual Value neg(const Value& a) const = 0;
    virtual Value mul(const Value& a, const Value& b) const = 0;
    virtual void add_to(Value& acc, const Value& b) const { acc = add(acc, b); }
    virtual void addmul(Value& acc, const Value& a, const Value& b) const { add_to(acc, mul(a, b)); }
    Value sub(const Value& a, const Value& b) const { return add(a, neg(b)); }

    virtual bool is_zero(const Value& a) const = 0;
    virtual bool eq(const Value& a, const Value& b) const = 0;
    bool is_one(const Value& a) const { return eq(a, one()); }
    virtual bool is_unit(const Value& a) const = 0;
    virtual Value inv(const Value& a) const = 0; // DivisionByNonUnit
    Value div(const Value& a, const Value& b) const { return mul(a, inv(b)); }
    Value pow(const Value& a, long e) const;
    // Exact division by an integer; NonInvertibleDenominator when impossible.
    virtual Value divide_by_integer(const Value& a, const mpz_class& n) const;

    // 0 for characteristic zero, otherwise p^K.
    virtual mpz_class characteristic() const = 0;
    // The prime this ring is attached to (0 for ZZ and QQ).
    virtual int64_t residue_prime() const = 0;
    virtual bool torsion_free() const = 0;
    virtual bool is_field() const = 0;

    virtual std::string render(const Value& a) const = 0;
    Value parse(std::string_view text) const;

    // Polynomial rings expose their generators; scalar rings have none.
    virtual int ngens() const { return 0; }
    virtual Value gen(int) const { throw InvalidArgument("ring has no generators"); }
    virtual Ring base() const { return nullptr; }
    // Names accepted by parse() besides numbers (generators, and w for extensions).
    virtual int lookup_name(std::string_view) const { return -1; }
    virtual Value named(int) const { return zero(); }

    Ring self() const;

protected:
    RingSpec spec_;
    std::weak_ptr<const RingImpl> self_;
    friend Ring make_ring(const RingSpec& spec);
};

Ring make_ring(const RingSpec& spec);
Ring make_ring(std::string_view spec_text);

// Ring element with its ring attached, for ergonomic use in tests and the CLI.
class RingElement {
public:
    RingElement() = default;
    RingElement(Ring r, Value v) : ring_(std::move(r)), value_(std::move(v)) {}
    RingElement(Ring r, long n) : ring_(r), value_(r->from_int(n)) {}

    const Ring& ring() const { return ring_; }
    const Value& value() const { return value_; }
    std::string str() const { return ring_->render(value_); }

    RingElement operator+(const RingElement& o) const { return {ring_, ring_->add(value_, o.value_)}; }
    RingElement operator-(const RingElement& o) const { return {ring_, ring_->sub(value_, o.value_)}; }
    RingElement operator-() const { return {ring_, ring_->neg(value_)}; }
    RingElement operator*(const RingElement& o) const { return {ring_, ring_->mul(value_, o.value_)}; }
    bool operator==(const RingElement& o) const { return ring_->eq(value_, o.value_); }
    bool is_zero() const { return ring_->is_zero(value_); }

private:
    Ring ring_;
    Value value_;
};

// Conversion along the canonical maps of the tower: ZZ -> ZZ_(p) -> QQ, reduction
// ZZ_(p) -> ZZ/p^K -> ZZ/p^j, GR -> GF, constants into polynomial rings, and
// polynomial rings with matching generator names.
Value convert(const Ring& from, const Value& v, const Ring& to);

// Ring homomorphism out of a polynomial ring given generator images in `to`;
// coefficients go through convert().
Value evaluate(const Ring& from, const Value& v, const Ring& to, const std::vector<Value>& images);

constexpr long kInfiniteValuation = LONG_MAX;
long p_valuation(const mpq_class& x, int64_t p);
inline bool is_p_integral(const mpq_class& x, int64_t p) { return p_valuation(x, p) >= 0; }

bool is_prime(int64_t n);
// (p, K) with n = p^K, or (0, 0) when n is not a prime power.
std::pair<int64_t, int> prime_power(int64_t n);

// Least primitive monic polynomial of degree m over F_p (coefficients in base-p index order).
std::vector<int64_t> canonical_modulus(int64_t p, int m);
bool is_irreducible_mod_p(const std::vector<int64_t>& f, int64_t p);

RingSpec witt_ring(int64_t p, int m, int K);
RingSpec residue_field(const RingSpec& spec);
RingSpec rationalization(const RingSpec& spec);
RingSpec change_base(const RingSpec& spec, const RingSpec& new_base);

std::vector<Value> enumerate_field(const Ring& field);
// Index of an element in enumerate_field order.
uint64_t field_index(const Ring& field, const Value& v);
uint64_t field_order(const Ring& field);

// Image of the generator w of `small` inside `large` (first root in enumeration order).
Value field_embedding(const Ring& small, const Ring& large);

// Helpers for polynomial payloads.
const Poly& as_poly(const Value& v);
bool mono_less(const RingSpec& spec, const Mono& a, const Mono& b);
int weighted_degree(const RingSpec& spec, const Mono& m);
std::string render_mono(const RingSpec& spec, const Mono& m);
// Each term of a polynomial value as (monomial, coefficient).
std::vector<std::pair<Mono, Value>> poly_terms(const Ring& r, const Value& v);
Value make_poly(const Ring& r, std::vector<std::pair<Mono, Value>> terms);
Value monomial(const Ring& r, const Mono& m, const Value& c);

} // namespace fglab
