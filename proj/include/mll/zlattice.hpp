#pragma once

#include <cassert>
#include <functional>
#include <utility>
#include <vector>

#include "mll/errors.hpp"
#include "mll/intmat.hpp"
#include "mll/numberfield.hpp"
#include "mll/scale.hpp"

namespace mll {

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

struct HnfResult {
    MatZ h;         // row-reduced generators; rows >= rank are zero
    MatZ u;         // unimodular, u * input = h
    unsigned rank;  // number of nonzero rows
};

/// Row-style HNF by Euclidean row reduction: positive pivots, entries above
/// a pivot reduced into [0, pivot).
inline HnfResult hnf_full(MatZ h) {
    const std::size_t R = h.rows(), N = h.cols();
    MatZ u = MatZ::identity(R);
    std::size_t r = 0;
    for (std::size_t c = 0; c < N && r < R; ++c) {
        for (;;) {
            // pivot: row in [r, R) with minimal nonzero |entry| in column c
            std::size_t piv = R;
            for (std::size_t i = r; i < R; ++i) {
                if (h.at(i, c) == 0) continue;
                if (piv == R ||
                    mpz_cmpabs(h.at(i, c).get_mpz_t(), h.at(piv, c).get_mpz_t()) < 0)
                    piv = i;
            }
            if (piv == R) break;  // column is zero below r
            h.swap_rows(r, piv);
            u.swap_rows(r, piv);
            bool clean = true;
            for (std::size_t i = r + 1; i < R; ++i) {
                if (h.at(i, c) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), h.at(i, c).get_mpz_t(), h.at(r, c).get_mpz_t());
                h.submul_row(i, r, q);
                u.submul_row(i, r, q);
                if (h.at(i, c) != 0) clean = false;
            }
            if (clean) {
                if (h.at(r, c) < 0) {
                    h.negate_row(r);
                    u.negate_row(r);
                }
                for (std::size_t i = 0; i < r; ++i) {
                    Int q;
                    mpz_fdiv_q(q.get_mpz_t(), h.at(i, c).get_mpz_t(), h.at(r, c).get_mpz_t());
                    h.submul_row(i, r, q);
                    u.submul_row(i, r, q);
                }
                ++r;
                break;
            }
        }
    }
    return HnfResult{std::move(h), std::move(u), static_cast<unsigned>(r)};
}

/// HNF basis of a full-rank sublattice of Z^N given by generator rows.
inline MatZ hnf(const MatZ& rows) {
    HnfResult res = hnf_full(rows);
    const std::size_t N = rows.cols();
    if (res.rank != N)
        throw RankDeficient("hnf: generators span rank " + std::to_string(res.rank) +
                            " < " + std::to_string(N));
    MatZ out(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out.at(i, j) = res.h.at(i, j);
    return out;
}

/// Basis of the left kernel {x in Z^R : x * a = 0}.
inline MatZ left_kernel(const MatZ& a) {
    HnfResult res = hnf_full(a);
    const std::size_t R = a.rows();
    MatZ out(R - res.rank, R);
    for (std::size_t i = res.rank; i < R; ++i)
        for (std::size_t j = 0; j < R; ++j) out.at(i - res.rank, j) = res.u.at(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Gram matrices under the block trace form
// ---------------------------------------------------------------------------

/// Gram of basis rows under t copies of the field's trace form. Rows are
/// vectors of O_K^t flattened into t blocks of power-basis coordinates.
inline MatZ trace_block_gram(const CyclotomicField& field, unsigned t, const MatZ& basis) {
    const unsigned d = field.degree();
    const std::size_t N = static_cast<std::size_t>(t) * d;
    assert(basis.cols() == N);
    const MatZ& T = field.trace_gram();
    MatZ c(basis.rows(), N);
    for (std::size_t i = 0; i < basis.rows(); ++i)
        for (unsigned b = 0; b < t; ++b)
            for (unsigned y = 0; y < d; ++y) {
                Int acc = 0;
                for (unsigned x = 0; x < d; ++x) acc += basis.at(i, b * d + x) * T.at(x, y);
                c.at(i, b * d + y) = acc;
            }
    return c * basis.transpose();
}

// ---------------------------------------------------------------------------
// Exact Gram-Schmidt bookkeeping (integral form)
// ---------------------------------------------------------------------------

/// d[i] is the determinant of the leading (i+1)x(i+1) block of the Gram;
/// lambda[i][j] = d[j] * mu_ij. Everything integral, divisions exact.
struct IntegralGS {
    std::vector<Int> d;
    std::vector<std::vector<Int>> lambda;
};

inline IntegralGS integral_gs(const MatZ& gram) {
    const std::size_t n = gram.rows();
    assert(gram.cols() == n);
    IntegralGS gs;
    gs.d.assign(n, 0);
    gs.lambda.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) gs.lambda[i].assign(i, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            Int u = gram.at(i, j);
            for (std::size_t l = 0; l < j; ++l) {
                Int num = gs.d[l] * u - gs.lambda[i][l] * gs.lambda[j][l];
                if (l == 0)  // d[-1] = 1
                    u = std::move(num);
                else
                    mpz_divexact(u.get_mpz_t(), num.get_mpz_t(), gs.d[l - 1].get_mpz_t());
            }
            if (j < i)
                gs.lambda[i][j] = u;
            else
                gs.d[i] = u;
        }
        if (gs.d[i] <= 0)
            throw RankDeficient("integral_gs: Gram matrix is not positive definite");
    }
    return gs;
}

// ---------------------------------------------------------------------------
// LLL (all-integer, exact; de Weger / Cohen Alg. 2.6.7 style)
// ---------------------------------------------------------------------------

struct LLLResult {
    MatZ gram;       // reduced Gram = u * G * u^T
    MatZ transform;  // unimodular u
    IntegralGS gs;   // exact GS data of the reduced Gram
};

/// Exact LLL on a positive-definite integer Gram. delta in (1/4, 1).
inline LLLResult lll_reduce(const MatZ& gram, const Rat& delta = Rat(99, 100)) {
    assert(delta > Rat(1, 4) && delta < 1);
    const std::size_t n = gram.rows();
    MatZ g = gram;
    MatZ u = MatZ::identity(n);
    if (n <= 1) return LLLResult{g, u, integral_gs(g)};

    IntegralGS gs = integral_gs(g);
    auto dm1 = [&](std::size_t i) -> Int { return i == 0 ? Int(1) : gs.d[i - 1]; };

    auto red = [&](std::size_t k, std::size_t l) {
        // q = nearest integer to lambda[k][l] / d[l]
        Int q, num = 2 * gs.lambda[k][l] + gs.d[l];
        Int den = 2 * gs.d[l];
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        if (q == 0) return;
        u.submul_row(k, l, q);
        // Gram update for b_k -> b_k - q b_l
        g.at(k, k) += q * q * g.at(l, l) - 2 * q * g.at(k, l);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            g.at(k, j) -= q * g.at(l, j);
            g.at(j, k) = g.at(k, j);
        }
        for (std::size_t j = 0; j < l; ++j) gs.lambda[k][j] -= q * gs.lambda[l][j];
        gs.lambda[k][l] -= q * gs.d[l];
    };

    auto swap_step = [&](std::size_t k) {
        u.swap_rows(k - 1, k);
        g.swap_rows(k - 1, k);
        // swap columns k-1, k of g
        for (std::size_t i = 0; i < n; ++i) std::swap(g.at(i, k - 1), g.at(i, k));
        for (std::size_t j = 0; j + 1 < k; ++j) std::swap(gs.lambda[k][j], gs.lambda[k - 1][j]);
        Int lam = gs.lambda[k][k - 1];
        Int b = dm1(k - 1) * gs.d[k] + lam * lam;
        mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), gs.d[k - 1].get_mpz_t());
        for (std::size_t i = k + 1; i < n; ++i) {
            Int t = gs.lambda[i][k];
            Int num = gs.d[k] * gs.lambda[i][k - 1] - lam * t;
            mpz_divexact(gs.lambda[i][k].get_mpz_t(), num.get_mpz_t(),
                         gs.d[k - 1].get_mpz_t());
            num = b * t + lam * gs.lambda[i][k];
            mpz_divexact(gs.lambda[i][k - 1].get_mpz_t(), num.get_mpz_t(),
                         gs.d[k].get_mpz_t());
        }
        gs.d[k - 1] = b;
    };

    const Int dn = delta.get_num(), dd = delta.get_den();
    std::size_t k = 1;
    while (k < n) {
        red(k, k - 1);
        // Lovasz: swap iff dd*(d_k*d_{k-2} + lambda^2) < dn*d_{k-1}^2
        Int lhs = dd * (gs.d[k] * dm1(k - 1) + gs.lambda[k][k - 1] * gs.lambda[k][k - 1]);
        Int rhs = dn * gs.d[k - 1] * gs.d[k - 1];
        if (lhs < rhs) {
            swap_step(k);
            k = k > 1 ? k - 1 : 1;
        } else {
            for (std::size_t l = k - 1; l-- > 0;) red(k, l);
            ++k;
        }
    }
    IntegralGS finalGs = integral_gs(g);
    return LLLResult{std::move(g), std::move(u), std::move(finalGs)};
}

// ---------------------------------------------------------------------------
// Exact enumeration (Fincke-Pohst with the integral GS data; no pruning)
// ---------------------------------------------------------------------------

namespace detail {

/// Visits one representative of every +-pair of nonzero integer vectors x
/// with Q(x) <= bound, where Q is the quadratic form of `gram`. The visitor
/// may return a smaller bound (used by the shortest-vector search); it must
/// never return a larger one. `strict` selects Q(x) < bound instead.
class Enumerator {
public:
    Enumerator(const MatZ& gram, const IntegralGS& gs, bool strict)
        : n_(gram.rows()), gs_(gs), strict_(strict) {
        denom_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            denom_[i] = (i == 0 ? Int(1) : gs_.d[i - 1]) * gs_.d[i];
        x_.assign(n_, Int(0));
    }

    void run(Int bound, const std::function<Int(const std::vector<Int>&, const Rat&)>& leaf) {
        bound_ = std::move(bound);
        leaf_ = &leaf;
        if (bound_ < 0 || (strict_ && bound_ == 0)) return;
        descend(static_cast<long>(n_) - 1, Rat(0), true);
    }

private:
    /// partial + lhs^2/denom vs bound; fills child with the sum when it
    /// passes (<= bound, or < bound in strict mode).
    bool step(const Rat& partial, const Int& lhs, std::size_t level, Rat& child) {
        Rat t(lhs * lhs, denom_[level]);
        t.canonicalize();
        t += partial;
        int c = cmp(t, bound_);
        if (strict_ ? c >= 0 : c > 0) return false;
        child = std::move(t);
        return true;
    }

    void descend(long level, const Rat& partial, bool zeroAbove) {
        if (level < 0) {
            if (!zeroAbove) {
                Int nb = (*leaf_)(x_, partial);
                assert(nb <= bound_);
                bound_ = std::move(nb);
            }
            return;
        }
        const std::size_t i = static_cast<std::size_t>(level);
        // s = sum_{j > i} x_j * lambda[j][i]
        Int s = 0;
        for (std::size_t j = i + 1; j < n_; ++j) {
            if (x_[j] != 0) s += x_[j] * gs_.lambda[j][i];
        }
        const Int& di = gs_.d[i];

        Rat child;
        if (zeroAbove) {
            // centered at 0; scan upward only, mirrors are implied
            for (Int v = 0;; ++v) {
                Int lhs = v * di;  // s == 0 here
                if (!step(partial, lhs, i, child)) break;
                x_[i] = v;
                descend(level - 1, child, v == 0);
            }
            x_[i] = 0;
            return;
        }

        // nearest integer to -s/d_i
        Int x0, num = -2 * s + di, den = 2 * di;
        mpz_fdiv_q(x0.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        for (Int v = x0;; ++v) {
            Int lhs = v * di + s;
            if (!step(partial, lhs, i, child)) break;
            x_[i] = v;
            descend(level - 1, child, false);
        }
        for (Int v = x0 - 1;; --v) {
            Int lhs = v * di + s;
            if (!step(partial, lhs, i, child)) break;
            x_[i] = v;
            descend(level - 1, child, false);
        }
        x_[i] = 0;
    }

    std::size_t n_;
    const IntegralGS& gs_;
    bool strict_;
    std::vector<Int> denom_;
    std::vector<Int> x_;
    Int bound_;
    const std::function<Int(const std::vector<Int>&, const Rat&)>* leaf_ = nullptr;
};

inline void check_dimension(const MatZ& gram, unsigned cap) {
    if (gram.rows() > cap)
        throw DimensionCap("enumeration: dimension " + std::to_string(gram.rows()) +
                           " exceeds cap " + std::to_string(cap));
}

}  // namespace detail

constexpr unsigned kDefaultEnumDimensionCap = 40;

/// Exact count of nonzero lattice vectors with Q(x) <= bound; both signs of
/// every vector are counted, so the result is always even.
inline Int count_in_ball_gram(const MatZ& gram, const Int& bound,
                              unsigned dimCap = kDefaultEnumDimensionCap) {
    detail::check_dimension(gram, dimCap);
    if (gram.rows() == 0 || bound < 0) return 0;
    LLLResult lll = lll_reduce(gram);
    Int count = 0;
    detail::Enumerator e(lll.gram, lll.gs, /*strict=*/false);
    e.run(bound, [&](const std::vector<Int>&, const Rat&) -> Int {
        ++count;
        return bound;
    });
    return 2 * count;
}

struct ShortestVector {
    std::vector<Int> coeffs;  // coordinates w.r.t. the Gram passed in
    Int qmin;
};

/// Exact shortest nonzero vector of a positive-definite integer form.
inline ShortestVector shortest_vector_gram(const MatZ& gram,
                                           unsigned dimCap = kDefaultEnumDimensionCap) {
    detail::check_dimension(gram, dimCap);
    const std::size_t n = gram.rows();
    assert(n >= 1);
    LLLResult lll = lll_reduce(gram);

    // initial bound: best diagonal entry of the reduced Gram
    std::size_t bestIdx = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (lll.gram.at(i, i) < lll.gram.at(bestIdx, bestIdx)) bestIdx = i;
    Int best = lll.gram.at(bestIdx, bestIdx);
    std::vector<Int> bestX(n, Int(0));
    bestX[bestIdx] = 1;

    detail::Enumerator e(lll.gram, lll.gs, /*strict=*/true);
    e.run(best, [&](const std::vector<Int>& x, const Rat& q) -> Int {
        assert(q.get_den() == 1);
        best = q.get_num();
        bestX = x;
        return best;
    });

    // map back through the LLL transform: v = x * U
    std::vector<Int> coeffs(n, Int(0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) coeffs[j] += bestX[i] * lll.transform.at(i, j);
    return ShortestVector{std::move(coeffs), std::move(best)};
}

/// Visits every nonzero lattice vector with Q(x) <= bound (both signs),
/// passing coefficient vectors w.r.t. the original Gram.
template <typename Fn>
inline void for_each_in_ball_gram(const MatZ& gram, const Int& bound, Fn&& fn,
                                  unsigned dimCap = kDefaultEnumDimensionCap) {
    detail::check_dimension(gram, dimCap);
    if (gram.rows() == 0 || bound < 0) return;
    const std::size_t n = gram.rows();
    LLLResult lll = lll_reduce(gram);
    detail::Enumerator e(lll.gram, lll.gs, /*strict=*/false);
    std::vector<Int> v(n);
    e.run(bound, [&](const std::vector<Int>& x, const Rat& q) -> Int {
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (x[i] != 0) v[j] += x[i] * lll.transform.at(i, j);
        }
        fn(static_cast<const std::vector<Int>&>(v), q);
        for (std::size_t j = 0; j < n; ++j) v[j] = -v[j];
        fn(static_cast<const std::vector<Int>&>(v), q);
        return bound;
    });
}

// ---------------------------------------------------------------------------
// Lattices with a symbolic global scale
// ---------------------------------------------------------------------------

/// A full-rank integral lattice with its exact Gram under the (block) trace
/// form and the symbolic scalar sigma: the normalized squared length of the
/// integer vector x is sigma * Q(x).
struct IntegralLattice {
    MatZ basis;        // N x N, rows are lattice vectors
    MatZ gram;         // basis * T_block * basis^T
    PowProduct scale;  // sigma

    unsigned rank() const { return static_cast<unsigned>(basis.rows()); }
};

/// Build from generator rows over the trace geometry of (field, t).
inline IntegralLattice lattice_from_generators(const CyclotomicField& field, unsigned t,
                                               const MatZ& generators, PowProduct sigma) {
    MatZ basis = hnf(generators);
    MatZ gram = trace_block_gram(field, t, basis);
    return IntegralLattice{std::move(basis), std::move(gram), std::move(sigma)};
}

/// A ball query: normalized squared radius r2, the derived integer bound on
/// Q certified by interval refinement.
struct BallQuery {
    PowProduct r2;         // threshold in the normalized metric
    PowProduct threshold;  // r2 / sigma, the bound on integer Q values
    Int bound;             // certified floor(threshold)
};

inline BallQuery make_ball_query(const PowProduct& r2, const PowProduct& sigma,
                                 mpfr_prec_t maxBits = 4096) {
    PowProduct threshold = r2 * sigma.inverse();
    Int bound = threshold.certified_floor(maxBits);
    return BallQuery{r2, std::move(threshold), std::move(bound)};
}

inline Int count_in_ball(const IntegralLattice& lattice, const BallQuery& query,
                         unsigned dimCap = kDefaultEnumDimensionCap) {
    return count_in_ball_gram(lattice.gram, query.bound, dimCap);
}

inline ShortestVector shortest_vector(const IntegralLattice& lattice,
                                      unsigned dimCap = kDefaultEnumDimensionCap) {
    return shortest_vector_gram(lattice.gram, dimCap);
}

/// lambda_1 in the normalized metric: sqrt(sigma * Qmin).
inline double normalized_lambda1(const IntegralLattice& lattice, const Int& qmin) {
    PowProduct v = lattice.scale * PowProduct::integer_power(qmin, 1);
    return v.pow(Rat(1, 2)).to_double();
}

}  // namespace mll
