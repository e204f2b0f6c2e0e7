#pragma once

#include <cassert>
#include <cmath>
#include <thread>
#include <vector>

#include "mll/codelift.hpp"
#include "mll/residue.hpp"
#include "mll/zlattice.hpp"

namespace mll {

// ---------------------------------------------------------------------------
// Poisson moments and the moment predictions
// ---------------------------------------------------------------------------

inline std::vector<std::vector<Int>> stirling2_table(unsigned n) {
    std::vector<std::vector<Int>> s(n + 1);
    for (unsigned i = 0; i <= n; ++i) {
        s[i].assign(i + 1, 0);
        if (i == 0) {
            s[0][0] = 1;
            continue;
        }
        for (unsigned j = 1; j <= i; ++j)
            s[i][j] = (j < i ? s[i - 1][j] * j : Int(0)) + (j - 1 < i ? s[i - 1][j - 1] : Int(0));
    }
    return s;
}

/// n-th moment of a Poisson variable with parameter lambda, via the
/// Touchard expansion sum_j S(n,j) lambda^j. Exact for rational lambda.
inline Rat poisson_moment(unsigned n, const Rat& lambda) {
    assert(lambda >= 0);
    auto s = stirling2_table(n);
    Rat acc = n == 0 ? Rat(1) : Rat(0);
    Rat lpow = 1;
    for (unsigned j = 1; j <= n; ++j) {
        lpow *= lambda;
        acc += Rat(s[n][j]) * lpow;
    }
    return acc;
}

/// Number of roots of unity in Q(zeta_k): k for even k, 2k for odd k.
inline unsigned omega_roots_of_unity(const CyclotomicField& field) {
    unsigned k = field.conductor();
    return k % 2 == 0 ? k : 2 * k;
}

struct MomentPrediction {
    unsigned n;
    Rat V;
    unsigned omegaK;
    Rat value;  // omega^n * m_n(V / omega)
};

inline MomentPrediction predicted_moment(unsigned n, const Rat& V, unsigned omegaK) {
    assert(V >= 0 && omegaK >= 1);
    Rat m = poisson_moment(n, V / omegaK);
    Rat wn;
    mpz_ui_pow_ui(wn.get_num_mpz_t(), omegaK, n);
    Rat value = wn * m;
    value.canonicalize();
    return MomentPrediction{n, V, omegaK, value};
}

// ---------------------------------------------------------------------------
// Ball geometry
// ---------------------------------------------------------------------------

/// Volume of the unit ball in dimension N as an exact rational times a
/// power of pi: pi^{N/2}/(N/2)! for even N, 2^{(N+1)/2} pi^{(N-1)/2}/N!!
/// for odd N.
inline PowProduct unit_ball_volume(unsigned n) {
    assert(n >= 1);
    Rat rat;
    if (n % 2 == 0) {
        Int fact = 1;
        for (unsigned i = 2; i <= n / 2; ++i) fact *= i;
        rat = Rat(1) / Rat(fact);
    } else {
        Int dfact = 1;
        for (unsigned i = n; i >= 2; i -= 2) dfact *= i;
        Int two;
        mpz_ui_pow_ui(two.get_mpz_t(), 2, (n + 1) / 2);
        rat = Rat(two) / Rat(dfact);
    }
    rat.canonicalize();
    return PowProduct::rational(rat) * PowProduct::pi_power(Rat(n / 2));
}

/// gamma(N): the radius of the ball of unit volume in dimension N.
inline double gamma_radius(unsigned n) {
    assert(n >= 1);
    return std::exp(std::lgamma(n / 2.0 + 1.0) / n) / std::sqrt(M_PI);
}

/// gamma(N)^2 held exactly: (1/v_N)^{2/N}.
inline PowProduct gamma_radius_sq(unsigned n) {
    return unit_ball_volume(n).pow(Rat(-2, n));
}

/// Ball of volume V (normalized metric) against the scale sigma:
/// r^2 = (V / v_N)^{2/N}, certified threshold r^2 / sigma.
inline BallQuery volume_to_threshold(const PowProduct& V, unsigned n, const PowProduct& sigma,
                                     mpfr_prec_t maxBits = 4096) {
    PowProduct r2 = (V * unit_ball_volume(n).inverse()).pow(Rat(2, n));
    return make_ball_query(r2, sigma, maxBits);
}

// ---------------------------------------------------------------------------
// Denominator index for rank-1 rows
// ---------------------------------------------------------------------------

/// Index in O_K of {c in O_K : c * D_j in O_K for all j} for a row-reduced
/// rank-1 row D (leading entry 1). Computed as the determinant of the HNF
/// basis of the congruence lattice.
inline Int denominator_index_rank1(const CyclotomicField& field,
                                   const std::vector<FieldElement>& D) {
    const unsigned d = field.degree();
    assert(!D.empty());
    assert(D[0] == field.one());

    // per-entry constraints: x * A_j == 0 mod m_j, with A_j = m_j * M_j and
    // M_j the multiplication matrix of D_j
    std::vector<MatZ> mats;
    std::vector<Int> mods;
    for (const FieldElement& a : D) {
        Int m = 1;
        for (const Rat& c : a.coeffs) m = lcm(m, c.get_den());
        if (m == 1) continue;  // integral entries impose nothing
        MatZ aj(d, d);
        for (unsigned i = 0; i < d; ++i) {
            FieldElement row = field.mul(field.zeta_power(i), a);
            for (unsigned j = 0; j < d; ++j) {
                Rat v = row.coeffs[j] * m;
                v.canonicalize();
                assert(v.get_den() == 1);
                aj.at(i, j) = v.get_num();
            }
        }
        mats.push_back(std::move(aj));
        mods.push_back(std::move(m));
    }
    if (mats.empty()) return 1;

    const std::size_t cols = mats.size() * d;
    MatZ stacked(d + cols, cols);
    for (std::size_t b = 0; b < mats.size(); ++b)
        for (unsigned i = 0; i < d; ++i)
            for (unsigned j = 0; j < d; ++j) stacked.at(i, b * d + j) = mats[b].at(i, j);
    for (std::size_t b = 0; b < mats.size(); ++b)
        for (unsigned j = 0; j < d; ++j) stacked.at(d + b * d + j, b * d + j) = mods[b];

    MatZ kern = left_kernel(stacked);
    assert(kern.rows() == d);
    MatZ basis(d, d);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j) basis.at(i, j) = kern.at(i, j);
    Int det = hnf(basis).det();
    return abs(det);
}

// ---------------------------------------------------------------------------
// Fixed-rank matrix counting
// ---------------------------------------------------------------------------

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
inline unsigned int_rank(MatZ m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    unsigned rank = 0;
    Int prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m.at(piv, c) == 0) ++piv;
        if (piv == rows) continue;
        m.swap_rows(r, piv);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                Int num = m.at(i, j) * m.at(r, c) - m.at(i, c) * m.at(r, j);
                mpz_divexact(m.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
            m.at(i, c) = 0;
        }
        prev = m.at(r, c);
        ++rank;
        ++r;
    }
    return rank;
}

struct RankCountResult {
    Rat T;
    unsigned m, n, t;
    Int count;
    unsigned expectedExponent;  // m * t * deg K
};

namespace detail {

/// Entries of O_K with normalized trace norm <= T: integer form bound is
/// Q(a) <= T^2 |disc|^{1/d}; returns power-basis coordinate vectors,
/// including zero.
inline std::vector<std::vector<Int>> entries_with_norm_bound(const CyclotomicField& field,
                                                             const Rat& T) {
    std::vector<std::vector<Int>> out;
    out.emplace_back(field.degree(), Int(0));
    if (T <= 0) return out;  // the certified floor below would also say so, but cheaply
    PowProduct bound2 = PowProduct::rational(T * T) *
                        PowProduct::integer_power(field.abs_disc(), Rat(1, field.degree()));
    Int qBound = bound2.certified_floor();
    for_each_in_ball_gram(field.trace_gram(), qBound,
                          [&](const std::vector<Int>& v, const Rat&) { out.push_back(v); });
    return out;
}

}  // namespace detail

/// Exact count of t x n matrices over O_K of K-rank exactly m with every
/// entry of normalized trace norm <= T. The K-rank is d * rank of the
/// integer matrix obtained by replacing each entry with its multiplication
/// matrix; ranks are computed fraction-free.
inline RankCountResult count_fixed_rank(const CyclotomicField& field, unsigned t, unsigned n,
                                        unsigned m, const Rat& T,
                                        const Int& searchCap = Int(200000000),
                                        unsigned jobs = 1) {
    const unsigned d = field.degree();
    auto entries = detail::entries_with_norm_bound(field, T);
    const std::size_t L = entries.size();
    const unsigned slots = t * n;

    Int space;
    mpz_ui_pow_ui(space.get_mpz_t(), L, slots);
    if (space > searchCap)
        throw SearchSpaceCap("count_fixed_rank: box of " + space.get_str() +
                             " matrices exceeds cap " + searchCap.get_str());

    // multiplication matrix of each entry (trivial 1x1 when K = Q)
    std::vector<MatZ> mul(L);
    for (std::size_t e = 0; e < L; ++e) {
        MatZ mm(d, d);
        FieldElement a = field.from_int_coeffs(entries[e]);
        for (unsigned i = 0; i < d; ++i) {
            FieldElement row = field.mul(field.zeta_power(i), a);
            for (unsigned j = 0; j < d; ++j) mm.at(i, j) = row.coeffs[j].get_num();
        }
        mul[e] = std::move(mm);
    }

    auto scan_range = [&](std::size_t first0, std::size_t first1) -> Int {
        Int local = 0;
        std::vector<std::size_t> idx(slots, 0);
        MatZ big(static_cast<std::size_t>(t) * d, static_cast<std::size_t>(n) * d);
        for (std::size_t f = first0; f < first1; ++f) {
            std::fill(idx.begin(), idx.end(), 0);
            idx[0] = f;
            for (;;) {
                for (unsigned r = 0; r < t; ++r)
                    for (unsigned c = 0; c < n; ++c) {
                        const MatZ& mm = mul[idx[r * n + c]];
                        for (unsigned i = 0; i < d; ++i)
                            for (unsigned j = 0; j < d; ++j)
                                big.at(r * d + i, c * d + j) = mm.at(i, j);
                    }
                unsigned rank = int_rank(big);
                assert(rank % d == 0);
                if (rank == m * d) ++local;
                std::size_t s = 1;
                while (s < slots && ++idx[s] == L) idx[s++] = 0;
                if (s == slots) break;
            }
        }
        return local;
    };

    Int total = 0;
    if (jobs <= 1 || L < 2) {
        total = scan_range(0, L);
    } else {
        unsigned nw = std::min<unsigned>(jobs, static_cast<unsigned>(L));
        std::vector<Int> partial(nw, Int(0));
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < nw; ++w) {
            std::size_t lo = L * w / nw, hi = L * (w + 1) / nw;
            workers.emplace_back([&, w, lo, hi]() { partial[w] = scan_range(lo, hi); });
        }
        for (auto& th : workers) th.join();
        for (const Int& p : partial) total += p;
    }
    return RankCountResult{T, m, n, t, total, m * t * d};
}

/// Colinearity-structured count of rank-1 matrices over Z: every rank-1
/// integer matrix is (multiples of) a unique primitive direction up to sign,
/// so N_1(T) = sum over primitive v of ((2 floor(T/max|v_i|) + 1)^n - 1).
inline Int count_rank1_colinear(unsigned t, unsigned n, long T) {
    assert(t >= 1 && T >= 1);
    std::vector<long> v(t, 0);
    std::vector<long> x(t, -T);
    Int total = 0;
    for (;;) {
        long maxabs = 0;
        for (unsigned i = 0; i < t; ++i) maxabs = std::max(maxabs, std::labs(x[i]));
        if (maxabs >= 1) {
            // canonical sign: first nonzero coordinate positive
            long lead = 0;
            for (unsigned i = 0; i < t; ++i)
                if (x[i] != 0) {
                    lead = x[i];
                    break;
                }
            if (lead > 0) {
                long g = 0;
                for (unsigned i = 0; i < t; ++i) g = std::gcd(g, std::labs(x[i]));
                if (g == 1) {
                    Int w = 2 * (T / maxabs) + 1;
                    Int pw;
                    mpz_pow_ui(pw.get_mpz_t(), w.get_mpz_t(), n);
                    total += pw - 1;
                }
            }
        }
        unsigned i = 0;
        while (i < t && x[i] == T) x[i++] = -T;
        if (i == t) break;
        ++x[i];
    }
    return total;
}

// ---------------------------------------------------------------------------
// Rank-drop minimum search
// ---------------------------------------------------------------------------

struct RankDropResult {
    Int minQ;             // minimal over matrices of max column integer form value
    double norm;          // sqrt(|disc|^{-1/d} * minQ), the normalized matrix norm
    double fittedC;       // norm / N(P)^{1/(m d)}
    MatZ witnessColumns;  // n columns (rows of this matrix) in Z^{t d} coords
};

/// Minimum matrix norm (max column length under the normalized trace form)
/// over t x n integral matrices of K-rank m whose reduction mod P has rank
/// < m. Exhaustive over columns ordered by increasing length.
inline RankDropResult min_rankdrop_norm(const CyclotomicField& field, unsigned t, unsigned n,
                                        unsigned m, const PrimeIdeal& P,
                                        const Int& searchCap = Int(200000000)) {
    assert(m >= 1 && m <= n && m <= t);
    const unsigned d = field.degree();
    const std::size_t nd = static_cast<std::size_t>(t) * d;

    // witness bound: columns e_1, ..., e_{m-1}, p e_m (rest zero)
    Int boundMax = Int(P.p) * P.p * field.trace_gram().at(0, 0);

    MatZ gram = trace_block_gram(field, t, MatZ::identity(nd));
    struct Col {
        std::vector<Int> v;
        Int q;
    };
    std::vector<Col> cols;
    cols.push_back(Col{std::vector<Int>(nd, Int(0)), Int(0)});
    for_each_in_ball_gram(gram, boundMax, [&](const std::vector<Int>& v, const Rat& q) {
        assert(q.get_den() == 1);
        cols.push_back(Col{v, q.get_num()});
    });
    std::sort(cols.begin(), cols.end(), [](const Col& a, const Col& b) {
        if (a.q != b.q) return a.q < b.q;
        return a.v < b.v;
    });

    Fq fq = P.residue_field();
    std::vector<std::vector<Fq::Elem>> reduced(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        reduced[i].resize(t);
        for (unsigned c = 0; c < t; ++c) {
            std::vector<Int> coeffs(d);
            for (unsigned j = 0; j < d; ++j) coeffs[j] = cols[i].v[c * d + j];
            reduced[i][c] = reduce_element(P, field, field.from_int_coeffs(coeffs));
        }
    }

    auto krank = [&](const std::vector<std::size_t>& pick) -> unsigned {
        MatZ big(nd, static_cast<std::size_t>(n) * d);
        for (unsigned c = 0; c < n; ++c) {
            // column as element-wise multiplication matrices
            for (unsigned row = 0; row < t; ++row) {
                std::vector<Int> coeffs(d);
                for (unsigned j = 0; j < d; ++j) coeffs[j] = cols[pick[c]].v[row * d + j];
                FieldElement a = field.from_int_coeffs(coeffs);
                for (unsigned i = 0; i < d; ++i) {
                    FieldElement r = field.mul(field.zeta_power(i), a);
                    for (unsigned j = 0; j < d; ++j)
                        big.at(row * d + i, c * d + j) = r.coeffs[j].get_num();
                }
            }
        }
        unsigned rk = int_rank(big);
        assert(rk % d == 0);
        return rk / d;
    };

    auto fqrank = [&](const std::vector<std::size_t>& pick) -> unsigned {
        std::vector<std::vector<Fq::Elem>> rows(n);
        for (unsigned c = 0; c < n; ++c) rows[c] = reduced[pick[c]];
        return rref(fq, rows);
    };

    // scan n-tuples ordered by the maximum column length
    Int scanned = 0;
    for (std::size_t hi = 0; hi < cols.size(); ++hi) {
        // tuples whose largest column is exactly cols[hi]
        std::vector<std::size_t> pick(n, 0);
        bool found = false;
        std::vector<std::size_t> stack;
        std::function<void(unsigned, bool)> rec = [&](unsigned slot, bool usedHi) {
            if (found) return;
            if (slot == n) {
                if (!usedHi) return;
                scanned += 1;
                if (scanned > searchCap)
                    throw SearchSpaceCap("min_rankdrop_norm: tuple scan exceeded cap");
                if (krank(pick) == m && fqrank(pick) < m) found = true;
                return;
            }
            for (std::size_t i = 0; i <= hi && !found; ++i) {
                pick[slot] = i;
                rec(slot + 1, usedHi || i == hi);
            }
        };
        rec(0, false);
        if (found) {
            MatZ witness(n, nd);
            for (unsigned c = 0; c < n; ++c)
                for (std::size_t j = 0; j < nd; ++j) witness.at(c, j) = cols[pick[c]].v[j];
            Int minQ = cols[hi].q;
            PowProduct normSq =
                PowProduct::integer_power(field.abs_disc(), Rat(-1, d)) *
                PowProduct::integer_power(minQ, 1);
            double norm = normSq.pow(Rat(1, 2)).to_double();
            double fitted = norm / std::pow(P.normQ.get_d(), 1.0 / (m * d));
            return RankDropResult{std::move(minQ), norm, fitted, std::move(witness)};
        }
    }
    throw Error("min_rankdrop_norm: no rank-dropping matrix found below the witness bound");
}

}  // namespace mll
