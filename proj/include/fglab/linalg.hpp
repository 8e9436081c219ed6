#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace fglab {

// Dense row-major integer matrix.
struct IntMatrix {
    size_t rows = 0, cols = 0;
    std::vector<mpz_class> a;

    IntMatrix() = default;
    IntMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c) {}
    mpz_class& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    const mpz_class& operator()(size_t i, size_t j) const { return a[i * cols + j]; }
    bool is_zero() const;
};

IntMatrix identity_matrix(size_t n);
IntMatrix operator*(const IntMatrix& A, const IntMatrix& B);

struct SmithForm {
    std::vector<mpz_class> divisors; // positive, each dividing the next
    IntMatrix left;                  // unimodular U with U A V diagonal, when requested
    size_t rank() const { return divisors.size(); }
};
SmithForm smith_form(const IntMatrix& A, bool want_left = false);

// Dense row-major matrix over ZZ/p^K with residues in [0, p^K).
struct ModMatrix {
    size_t rows = 0, cols = 0;
    int64_t p = 0;
    int K = 1;
    int64_t q = 1;
    std::vector<int64_t> a;

    ModMatrix() = default;
    ModMatrix(size_t r, size_t c, int64_t p, int K);
    int64_t& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    int64_t operator()(size_t i, size_t j) const { return a[i * cols + j]; }
    int64_t* row(size_t i) { return a.data() + i * cols; }
    const int64_t* row(size_t i) const { return a.data() + i * cols; }
    bool is_zero() const;
    static ModMatrix reduce(const IntMatrix& A, int64_t p, int K);
};

ModMatrix identity_mod(size_t n, int64_t p, int K);
ModMatrix operator*(const ModMatrix& A, const ModMatrix& B);

// p-adic valuation of a residue modulo p^K (K for zero).
int mod_valuation(int64_t v, int64_t p, int K);
int64_t mod_inverse(int64_t u, int64_t q);

// Elementary divisors p^e (e < K) of a matrix over the local ring ZZ/p^K. Row
// eliminations run through the SIMD modular axpy kernel.
struct ModSmithForm {
    int64_t p = 0;
    int K = 1;
    std::vector<int> valuations; // ascending, all < K
    ModMatrix left;              // invertible U with U A V diagonal, when requested
    size_t rank() const { return valuations.size(); }
};
ModSmithForm smith_mod_prime_power(const ModMatrix& A, bool want_left = false);

// Rank over GF(p).
size_t rank_mod_p(const ModMatrix& A);

// Basis of the kernel over GF(p) (K = 1), one vector per row of the result.
ModMatrix kernel_mod_p(const ModMatrix& A);

// Submodule of (ZZ/p^K)^n in Howell form: echelon rows with pivots exactly p^v,
// closed under the multiples p^(K-v) row. Reduction then decides membership, and
// the rows with pivot at or after column c span the vectors vanishing before c.
class ModSpan {
public:
    ModSpan() = default;
    ModSpan(int64_t p, int K, size_t n);

    int64_t p() const { return p_; }
    int K() const { return K_; }
    int64_t q() const { return q_; }
    size_t dim() const { return n_; }

    void add(std::vector<int64_t> v);
    void add(const ModSpan& other);
    bool contains(std::vector<int64_t> v) const;
    // Canonical representative of v modulo the span.
    std::vector<int64_t> reduce(std::vector<int64_t> v) const;
    // log_p of the order.
    int length() const;
    const std::vector<std::vector<int64_t>>& rows() const { return rows_; }
    // The submodule p^j S.
    ModSpan scaled(int j) const;

private:
    int64_t p_ = 0, q_ = 1;
    int K_ = 1;
    size_t n_ = 0;
    std::vector<std::vector<int64_t>> rows_;
    std::vector<int> val_;
    std::vector<int> pivot_row_; // per column, -1 when free
};

// Exponents a_1 >= a_2 >= ... with S / T = sum ZZ/p^(a_i); T must lie in S.
std::vector<int> quotient_type(const ModSpan& S, const ModSpan& T);

// Vectors x in (ZZ/p^K)^n with f x in N, where f has n columns and N lives in the target.
ModSpan kernel_mod(const ModMatrix& f, const ModSpan& N);
// f applied to each row of S, plus the rows of N.
ModSpan image_mod(const ModMatrix& f, const ModSpan& S, const ModSpan& N);

} // namespace fglab
