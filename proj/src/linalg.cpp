#include "fglab/linalg.hpp"

#include <algorithm>
#include <utility>

#include "fglab/errors.hpp"
#include "fglab/simd/modkernel.hpp"

namespace fglab {

bool IntMatrix::is_zero() const {
    return std::all_of(a.begin(), a.end(), [](const mpz_class& v) { return v == 0; });
}

IntMatrix identity_matrix(size_t n) {
    IntMatrix I(n, n);
    for (size_t i = 0; i < n; ++i) I(i, i) = 1;
    return I;
}

IntMatrix operator*(const IntMatrix& A, const IntMatrix& B) {
    if (A.cols != B.rows) throw InvalidArgument("matrix shapes do not compose");
    IntMatrix C(A.rows, B.cols);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t k = 0; k < A.cols; ++k) {
            if (A(i, k) == 0) continue;
            for (size_t j = 0; j < B.cols; ++j) C(i, j) += A(i, k) * B(k, j);
        }
    return C;
}

namespace {

struct IntWork {
    IntMatrix M, U;
    bool track;

    void swap_rows(size_t i, size_t j) {
        if (i == j) return;
        for (size_t c = 0; c < M.cols; ++c) std::swap(M(i, c), M(j, c));
        if (track)
            for (size_t c = 0; c < U.cols; ++c) std::swap(U(i, c), U(j, c));
    }
    void swap_cols(size_t i, size_t j) {
        if (i == j) return;
        for (size_t r = 0; r < M.rows; ++r) std::swap(M(r, i), M(r, j));
    }
    // row_i -= f * row_j
    void row_sub(size_t i, size_t j, const mpz_class& f) {
        for (size_t c = 0; c < M.cols; ++c)
            if (M(j, c) != 0) M(i, c) -= f * M(j, c);
        if (track)
            for (size_t c = 0; c < U.cols; ++c)
                if (U(j, c) != 0) U(i, c) -= f * U(j, c);
    }
    void col_sub(size_t i, size_t j, const mpz_class& f) {
        for (size_t r = 0; r < M.rows; ++r)
            if (M(r, j) != 0) M(r, i) -= f * M(r, j);
    }
    void negate_row(size_t i) {
        for (size_t c = 0; c < M.cols; ++c) M(i, c) = -M(i, c);
        if (track)
            for (size_t c = 0; c < U.cols; ++c) U(i, c) = -U(i, c);
    }
};

} // namespace

SmithForm smith_form(const IntMatrix& A, bool want_left) {
    IntWork w{A, want_left ? identity_matrix(A.rows) : IntMatrix(), want_left};
    IntMatrix& M = w.M;
    SmithForm out;
    const size_t n = std::min(M.rows, M.cols);
    for (size_t t = 0; t < n; ++t) {
        for (;;) {
            // smallest nonzero entry of the remaining block becomes the pivot
            size_t bi = 0, bj = 0;
            bool found = false;
            for (size_t i = t; i < M.rows; ++i)
                for (size_t j = t; j < M.cols; ++j)
                    if (M(i, j) != 0 && (!found || abs(M(i, j)) < abs(M(bi, bj)))) {
                        bi = i;
                        bj = j;
                        found = true;
                    }
            if (!found) break;
            w.swap_rows(t, bi);
            w.swap_cols(t, bj);
            bool clean = true;
            for (size_t i = t + 1; i < M.rows; ++i) {
                if (M(i, t) == 0) continue;
                mpz_class f;
                mpz_fdiv_q(f.get_mpz_t(), M(i, t).get_mpz_t(), M(t, t).get_mpz_t());
                w.row_sub(i, t, f);
                clean = clean && M(i, t) == 0;
            }
            for (size_t j = t + 1; j < M.cols; ++j) {
                if (M(t, j) == 0) continue;
                mpz_class f;
                mpz_fdiv_q(f.get_mpz_t(), M(t, j).get_mpz_t(), M(t, t).get_mpz_t());
                w.col_sub(j, t, f);
                clean = clean && M(t, j) == 0;
            }
            if (!clean) continue;
            // the pivot must divide the rest of the block
            size_t bad = M.rows;
            for (size_t i = t + 1; i < M.rows && bad == M.rows; ++i)
                for (size_t j = t + 1; j < M.cols; ++j)
                    if (M(i, j) % M(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad == M.rows) break;
            w.row_sub(t, bad, -1);
        }
        if (t >= M.rows || t >= M.cols || M(t, t) == 0) break;
        if (M(t, t) < 0) w.negate_row(t);
        out.divisors.push_back(M(t, t));
    }
    if (want_left) out.left = std::move(w.U);
    return out;
}

// ---------------------------------------------------------------- ZZ/p^K

ModMatrix::ModMatrix(size_t r, size_t c, int64_t p_, int K_) : rows(r), cols(c), p(p_), K(K_), a(r * c, 0) {
    q = 1;
    for (int i = 0; i < K; ++i) q *= p;
}

bool ModMatrix::is_zero() const {
    return std::all_of(a.begin(), a.end(), [](int64_t v) { return v == 0; });
}

ModMatrix ModMatrix::reduce(const IntMatrix& A, int64_t p, int K) {
    ModMatrix M(A.rows, A.cols, p, K);
    mpz_class q = M.q, r;
    for (size_t i = 0; i < A.a.size(); ++i) {
        mpz_fdiv_r(r.get_mpz_t(), A.a[i].get_mpz_t(), q.get_mpz_t());
        M.a[i] = r.get_si();
    }
    return M;
}

ModMatrix identity_mod(size_t n, int64_t p, int K) {
    ModMatrix I(n, n, p, K);
    for (size_t i = 0; i < n; ++i) I(i, i) = 1 % I.q;
    return I;
}

ModMatrix operator*(const ModMatrix& A, const ModMatrix& B) {
    if (A.cols != B.rows || A.q != B.q) throw InvalidArgument("matrix shapes do not compose");
    ModMatrix C(A.rows, B.cols, A.p, A.K);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t k = 0; k < A.cols; ++k)
            if (A(i, k)) simd::axpy_mod(C.row(i), B.row(k), A(i, k), A.q, B.cols);
    return C;
}

int mod_valuation(int64_t v, int64_t p, int K) {
    if (v == 0) return K;
    int e = 0;
    while (v % p == 0 && e < K) {
        v /= p;
        ++e;
    }
    return e;
}

int64_t mod_inverse(int64_t u, int64_t q) {
    mpz_class r, a = u, m = q;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t())) throw DivisionByNonUnit(std::to_string(u) + " mod " + std::to_string(q));
    return r.get_si();
}

namespace {

struct ModWork {
    ModMatrix M, U;
    bool track;

    void swap_rows(size_t i, size_t j) {
        if (i == j) return;
        std::swap_ranges(M.row(i), M.row(i) + M.cols, M.row(j));
        if (track) std::swap_ranges(U.row(i), U.row(i) + U.cols, U.row(j));
    }
    void swap_cols(size_t i, size_t j) {
        if (i == j) return;
        for (size_t r = 0; r < M.rows; ++r) std::swap(M(r, i), M(r, j));
    }
    void scale_row(size_t i, int64_t c) {
        for (size_t k = 0; k < M.cols; ++k) M(i, k) = static_cast<int64_t>(static_cast<__int128>(M(i, k)) * c % M.q);
        if (track)
            for (size_t k = 0; k < U.cols; ++k) U(i, k) = static_cast<int64_t>(static_cast<__int128>(U(i, k)) * c % M.q);
    }
    // row_i += c * row_j
    void row_axpy(size_t i, size_t j, int64_t c) {
        simd::axpy_mod(M.row(i), M.row(j), c, M.q, M.cols);
        if (track) simd::axpy_mod(U.row(i), U.row(j), c, M.q, U.cols);
    }
};

} // namespace

ModSmithForm smith_mod_prime_power(const ModMatrix& A, bool want_left) {
    ModWork w{A, want_left ? identity_mod(A.rows, A.p, A.K) : ModMatrix(), want_left};
    ModMatrix& M = w.M;
    const int64_t p = M.p, q = M.q;
    ModSmithForm out;
    out.p = p;
    out.K = M.K;
    const size_t n = std::min(M.rows, M.cols);
    for (size_t t = 0; t < n; ++t) {
        size_t bi = 0, bj = 0;
        int best = M.K;
        for (size_t i = t; i < M.rows && best > 0; ++i)
            for (size_t j = t; j < M.cols; ++j) {
                int v = mod_valuation(M(i, j), p, M.K);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    if (v == 0) break;
                }
            }
        if (best == M.K) break;
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        int64_t pe = 1;
        for (int i = 0; i < best; ++i) pe *= p;
        w.scale_row(t, mod_inverse(M(t, t) / pe, q));
        for (size_t i = t + 1; i < M.rows; ++i)
            if (M(i, t)) w.row_axpy(i, t, (q - M(i, t) / pe) % q);
        // the pivot has the least valuation, so column operations only clear row t
        for (size_t j = t + 1; j < M.cols; ++j) M(t, j) = 0;
        out.valuations.push_back(best);
    }
    if (want_left) out.left = std::move(w.U);
    return out;
}

size_t rank_mod_p(const ModMatrix& A) {
    if (A.K != 1) throw InvalidArgument("rank_mod_p needs a matrix over GF(p)");
    return smith_mod_prime_power(A).rank();
}

ModMatrix kernel_mod_p(const ModMatrix& A) {
    if (A.K != 1) throw InvalidArgument("kernel_mod_p needs a matrix over GF(p)");
    // reduced row echelon form, then one kernel vector per free column
    ModMatrix M = A;
    const int64_t q = M.q;
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < M.cols && r < M.rows; ++c) {
        size_t piv = r;
        while (piv < M.rows && M(piv, c) == 0) ++piv;
        if (piv == M.rows) continue;
        std::swap_ranges(M.row(r), M.row(r) + M.cols, M.row(piv));
        int64_t inv = mod_inverse(M(r, c), q);
        for (size_t k = 0; k < M.cols; ++k) M(r, k) = M(r, k) * inv % q;
        for (size_t i = 0; i < M.rows; ++i)
            if (i != r && M(i, c)) simd::axpy_mod(M.row(i), M.row(r), q - M(i, c), q, M.cols);
        pivots.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(M.cols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    ModMatrix K(M.cols - pivots.size(), M.cols, M.p, 1);
    size_t k = 0;
    for (size_t f = 0; f < M.cols; ++f) {
        if (is_pivot[f]) continue;
        K(k, f) = 1;
        for (size_t i = 0; i < pivots.size(); ++i) K(k, pivots[i]) = (q - M(i, f)) % q;
        ++k;
    }
    return K;
}

// ---------------------------------------------------------------- Howell spans

ModSpan::ModSpan(int64_t p, int K, size_t n) : p_(p), K_(K), n_(n), pivot_row_(n, -1) {
    for (int i = 0; i < K; ++i) q_ *= p;
}

void ModSpan::add(std::vector<int64_t> v) {
    if (v.size() != n_) throw InvalidArgument("vector length does not match the span");
    std::vector<std::vector<int64_t>> work;
    work.push_back(std::move(v));
    while (!work.empty()) {
        std::vector<int64_t> x = std::move(work.back());
        work.pop_back();
        for (size_t c = 0; c < n_; ++c) {
            if (x[c] == 0) continue;
            const int vx = mod_valuation(x[c], p_, K_);
            const int r = pivot_row_[c];
            if (r >= 0 && vx >= val_[static_cast<size_t>(r)]) {
                const int64_t f = x[c] / rows_[static_cast<size_t>(r)][c];
                simd::axpy_mod(x.data(), rows_[static_cast<size_t>(r)].data(), q_ - f, q_, n_);
                continue;
            }
            int64_t pv = 1;
            for (int i = 0; i < vx; ++i) pv *= p_;
            const int64_t inv = mod_inverse(x[c] / pv, q_);
            for (auto& e : x) e = static_cast<int64_t>(static_cast<__int128>(e) * inv % q_);
            if (vx > 0) {
                std::vector<int64_t> y(n_, 0);
                simd::axpy_mod(y.data(), x.data(), q_ / pv, q_, n_);
                work.push_back(std::move(y));
            }
            if (r >= 0) {
                work.push_back(std::move(rows_[static_cast<size_t>(r)]));
                rows_[static_cast<size_t>(r)] = std::move(x);
                val_[static_cast<size_t>(r)] = vx;
            } else {
                pivot_row_[c] = static_cast<int>(rows_.size());
                rows_.push_back(std::move(x));
                val_.push_back(vx);
            }
            break;
        }
    }
}

void ModSpan::add(const ModSpan& other) {
    for (auto& r : other.rows_) add(r);
}

std::vector<int64_t> ModSpan::reduce(std::vector<int64_t> v) const {
    for (size_t c = 0; c < n_; ++c) {
        const int r = pivot_row_[c];
        if (r < 0 || v[c] == 0) continue;
        const auto& row = rows_[static_cast<size_t>(r)];
        const int64_t f = v[c] / row[c];
        if (f) simd::axpy_mod(v.data(), row.data(), q_ - f, q_, n_);
    }
    return v;
}

bool ModSpan::contains(std::vector<int64_t> v) const {
    v = reduce(std::move(v));
    return std::all_of(v.begin(), v.end(), [](int64_t e) { return e == 0; });
}

int ModSpan::length() const {
    int l = 0;
    for (int v : val_) l += K_ - v;
    return l;
}

ModSpan ModSpan::scaled(int j) const {
    ModSpan S(p_, K_, n_);
    if (j >= K_) return S;
    int64_t pj = 1;
    for (int i = 0; i < j; ++i) pj *= p_;
    for (auto& r : rows_) {
        std::vector<int64_t> y(n_, 0);
        simd::axpy_mod(y.data(), r.data(), pj, q_, n_);
        S.add(std::move(y));
    }
    return S;
}

std::vector<int> quotient_type(const ModSpan& S, const ModSpan& T) {
    // l_j = length of p^j (S/T); the number of summands of order > p^j is l_j - l_{j+1}
    const int K = S.K();
    std::vector<int> l(static_cast<size_t>(K) + 2, 0);
    const int base = T.length();
    for (int j = 0; j <= K; ++j) {
        ModSpan U = T;
        U.add(S.scaled(j));
        l[static_cast<size_t>(j)] = U.length() - base;
    }
    std::vector<int> out;
    for (int j = K - 1; j >= 0; --j) {
        const int above = l[static_cast<size_t>(j)] - l[static_cast<size_t>(j) + 1];
        const int above_next = l[static_cast<size_t>(j) + 1] - l[static_cast<size_t>(j) + 2];
        for (int k = 0; k < above - above_next; ++k) out.push_back(j + 1);
    }
    return out;
}

ModSpan kernel_mod(const ModMatrix& f, const ModSpan& N) {
    const size_t m = f.rows, n = f.cols;
    ModSpan big(f.p, f.K, m + n);
    for (auto& r : N.rows()) {
        std::vector<int64_t> v(m + n, 0);
        std::copy(r.begin(), r.end(), v.begin());
        big.add(std::move(v));
    }
    for (size_t j = 0; j < n; ++j) {
        std::vector<int64_t> v(m + n, 0);
        for (size_t i = 0; i < m; ++i) v[i] = f(i, j);
        v[m + j] = 1;
        big.add(std::move(v));
    }
    ModSpan K(f.p, f.K, n);
    for (auto& r : big.rows())
        if (std::all_of(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m), [](int64_t e) { return e == 0; }))
            K.add(std::vector<int64_t>(r.begin() + static_cast<std::ptrdiff_t>(m), r.end()));
    return K;
}

ModSpan image_mod(const ModMatrix& f, const ModSpan& S, const ModSpan& N) {
    ModSpan I = N;
    for (auto& r : S.rows()) {
        std::vector<int64_t> y(f.rows, 0);
        for (size_t j = 0; j < f.cols; ++j)
            if (r[j]) {
                for (size_t i = 0; i < f.rows; ++i)
                    y[i] = static_cast<int64_t>((static_cast<__int128>(f(i, j)) * r[j] + y[i]) % f.q);
            }
        I.add(std::move(y));
    }
    return I;
}

} // namespace fglab
