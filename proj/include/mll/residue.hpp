#pragma once

#include <algorithm>
#include <cassert>
#include <string>
#include <vector>

#include "mll/errors.hpp"
#include "mll/intmat.hpp"
#include "mll/numberfield.hpp"
#include "mll/rng.hpp"

namespace mll {

namespace fp {

// Polynomials over F_p with int64 coefficients in [0, p). Coefficient
// products stay below 2^62 for p < 2^31.

using Poly = std::vector<long>;

inline void strip(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline long inv_mod(long a, long p) {
    long t = 0, newt = 1, r = p, newr = a % p;
    if (newr < 0) newr += p;
    while (newr != 0) {
        long q = r / newr;
        t -= q * newt;
        std::swap(t, newt);
        r -= q * newr;
        std::swap(r, newr);
    }
    assert(r == 1);
    return t < 0 ? t + p : t;
}

inline Poly add(const Poly& a, const Poly& b, long p) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = (c[i] + b[i]) % p;
    strip(c);
    return c;
}

inline Poly sub(const Poly& a, const Poly& b, long p) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = (c[i] - b[i] % p + p) % p;
    strip(c);
    return c;
}

inline Poly mul(const Poly& a, const Poly& b, long p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    }
    strip(c);
    return c;
}

inline void divrem(const Poly& a, const Poly& b, long p, Poly& q, Poly& r) {
    assert(!b.empty());
    r = a;
    strip(r);
    q.clear();
    const long leadInv = inv_mod(b.back(), p);
    if (r.size() >= b.size()) q.assign(r.size() - b.size() + 1, 0);
    while (r.size() >= b.size()) {
        long c = (r.back() * leadInv) % p;
        std::size_t shift = r.size() - b.size();
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i)
            r[shift + i] = ((r[shift + i] - c * b[i]) % p + p) % p;
        strip(r);
    }
    strip(q);
}

inline Poly rem(const Poly& a, const Poly& b, long p) {
    Poly q, r;
    divrem(a, b, p, q, r);
    return r;
}

inline Poly monic(Poly a, long p) {
    strip(a);
    if (a.empty()) return a;
    long c = inv_mod(a.back(), p);
    for (auto& x : a) x = (x * c) % p;
    return a;
}

inline Poly gcd(Poly a, Poly b, long p) {
    strip(a);
    strip(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a), p);
}

inline Poly powmod(const Poly& base, const Int& e, const Poly& mod, long p) {
    Poly result{1};
    Poly acc = rem(base, mod, p);
    const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return result;
    for (std::size_t i = bits; i-- > 0;) {
        result = rem(mul(result, result, p), mod, p);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = rem(mul(result, acc, p), mod, p);
    }
    return result;
}

}  // namespace fp

/// Residue field F_{p^f} = F_p[x]/(g) with g monic irreducible of degree f.
/// Elements are coefficient vectors of length f.
class Fq {
public:
    using Elem = std::vector<long>;

    Fq(long p, fp::Poly modulus) : p_(p), g_(std::move(modulus)) {
        f_ = static_cast<unsigned>(fp::deg(g_));
        assert(f_ >= 1 && g_.back() == 1);
        mpz_ui_pow_ui(order_.get_mpz_t(), static_cast<unsigned long>(p_), f_);
    }

    /// The field of the given prime-power order with a deterministic
    /// (lexicographically least) irreducible modulus.
    static Fq from_order(const Int& q);

    long p() const { return p_; }
    unsigned f() const { return f_; }
    const Int& order() const { return order_; }
    const fp::Poly& modulus() const { return g_; }

    Elem zero() const { return Elem(f_, 0); }
    Elem one() const {
        Elem e(f_, 0);
        e[0] = 1 % p_;
        return e;
    }

    bool is_zero(const Elem& a) const {
        for (long c : a)
            if (c) return false;
        return true;
    }

    Elem add(const Elem& a, const Elem& b) const {
        Elem c(f_);
        for (unsigned i = 0; i < f_; ++i) c[i] = (a[i] + b[i]) % p_;
        return c;
    }

    Elem sub(const Elem& a, const Elem& b) const {
        Elem c(f_);
        for (unsigned i = 0; i < f_; ++i) c[i] = ((a[i] - b[i]) % p_ + p_) % p_;
        return c;
    }

    Elem neg(const Elem& a) const {
        Elem c(f_);
        for (unsigned i = 0; i < f_; ++i) c[i] = (p_ - a[i]) % p_;
        return c;
    }

    Elem mul(const Elem& a, const Elem& b) const {
        fp::Poly pa(a.begin(), a.end()), pb(b.begin(), b.end());
        fp::strip(pa);
        fp::strip(pb);
        fp::Poly r = fp::rem(fp::mul(pa, pb, p_), g_, p_);
        r.resize(f_, 0);
        return Elem(r.begin(), r.end());
    }

    Elem inv(const Elem& a) const {
        assert(!is_zero(a));
        // extended Euclid in F_p[x]: u*a + v*g = 1
        fp::Poly r0 = g_, r1(a.begin(), a.end());
        fp::strip(r1);
        fp::Poly s0{}, s1{1};
        while (!r1.empty()) {
            fp::Poly q, r;
            fp::divrem(r0, r1, p_, q, r);
            fp::Poly s = fp::sub(s0, fp::mul(q, s1, p_), p_);
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s);
        }
        assert(fp::deg(r0) == 0);
        long c = fp::inv_mod(r0[0], p_);
        fp::Poly u = s0;
        for (auto& x : u) x = (x * c) % p_;
        u.resize(f_, 0);
        return Elem(u.begin(), u.end());
    }

    Elem from_index(const Int& idx) const {
        Int v = idx;
        Elem e(f_);
        for (unsigned i = 0; i < f_; ++i) {
            Int r = v % p_;
            e[i] = r.get_si();
            v /= p_;
        }
        return e;
    }

    Int to_index(const Elem& a) const {
        Int idx = 0;
        for (unsigned i = f_; i-- > 0;) idx = idx * p_ + a[i];
        return idx;
    }

    Elem uniform(Rng& rng) const {
        Elem e(f_);
        for (unsigned i = 0; i < f_; ++i)
            e[i] = static_cast<long>(rng.below(static_cast<std::uint64_t>(p_)));
        return e;
    }

    bool same_structure(const Fq& o) const { return p_ == o.p_ && g_ == o.g_; }

private:
    long p_;
    fp::Poly g_;
    unsigned f_;
    Int order_;
};

/// An unramified prime P above p in Q(zeta_k), in two-generator form
/// (p, g(zeta)) with g a monic irreducible degree-f factor of the k-th
/// cyclotomic polynomial mod p.
struct PrimeIdeal {
    unsigned k = 1;
    long p = 0;
    unsigned f = 1;
    fp::Poly g;
    Int normQ;

    Fq residue_field() const { return Fq(p, g); }
};

namespace detail {

inline bool rabin_irreducible(const fp::Poly& h, long p) {
    const int n = fp::deg(h);
    if (n <= 0) return false;
    if (n == 1) return true;
    fp::Poly x{0, 1};
    fp::Poly xr = fp::rem(x, h, p);
    // x^{p^n} == x mod h, and gcd(x^{p^{n/r}} - x, h) = 1 for primes r | n.
    Int pn;
    mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned>(n));
    if (fp::powmod(x, pn, h, p) != xr) return false;
    int m = n;
    for (int r = 2; r <= m; ++r) {
        if (m % r != 0) continue;
        while (m % r == 0) m /= r;
        Int pe;
        mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned>(n / r));
        fp::Poly t = fp::sub(fp::powmod(x, pe, h, p), xr, p);
        if (fp::deg(fp::gcd(t, h, p)) != 0) return false;
    }
    return true;
}

}  // namespace detail

inline Fq Fq::from_order(const Int& q) {
    // factor q = p^f by smallest prime divisor
    assert(q >= 2);
    Int n = q;
    long p = 0;
    for (long c = 2; Int(c) * c <= n; ++c) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(c))) {
            p = c;
            break;
        }
    }
    if (p == 0) p = q.get_si();  // q itself prime
    unsigned f = 0;
    while (n > 1) {
        assert(mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p)));
        n /= p;
        ++f;
    }
    if (f == 1) return Fq(p, fp::Poly{0, 1});
    // lexicographically least monic irreducible of degree f
    Int total;
    mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(p), f);
    for (Int idx = 0; idx < total; ++idx) {
        fp::Poly h(f + 1, 0);
        Int v = idx;
        for (unsigned i = 0; i < f; ++i) {
            Int r = v % p;
            h[i] = r.get_si();
            v /= p;
        }
        h[f] = 1;
        if (detail::rabin_irreducible(h, p)) return Fq(p, h);
    }
    assert(false && "no irreducible polynomial found");
    return Fq(p, fp::Poly{0, 1});
}

/// Splits p in Q(zeta_k): returns the d/f primes above p, each given by a
/// monic irreducible degree-f factor of the cyclotomic polynomial mod p.
/// Factor order is canonical (lexicographic in the coefficient vectors).
inline std::vector<PrimeIdeal> split_prime(const CyclotomicField& field, long p) {
    if (p < 2 || !mpz_probab_prime_p(Int(p).get_mpz_t(), 30))
        throw NotPrime("split_prime: " + std::to_string(p) + " is not prime");
    const unsigned k = field.conductor();
    if (k % static_cast<unsigned>(p) == 0)
        throw RamifiedPrime("split_prime: " + std::to_string(p) + " ramifies in Q(zeta_" +
                            std::to_string(k) + ")");

    unsigned f = 1;
    if (k >= 3) {
        unsigned long r = static_cast<unsigned long>(p % k);
        unsigned long acc = r % k;
        f = 1;
        while (acc != 1 % k) {
            acc = (acc * r) % k;
            ++f;
        }
    }
    const unsigned d = field.degree();
    assert(d % f == 0);

    fp::Poly phi(field.minpoly().size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        Int c = field.minpoly()[i] % p;
        if (c < 0) c += p;
        phi[i] = c.get_si();
    }
    fp::strip(phi);

    Int q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), f);

    // Equal-degree factorization (Cantor-Zassenhaus); all factors of the
    // cyclotomic polynomial mod an unramified prime share degree f.
    Rng rng(0x6d6c6cULL ^ (static_cast<std::uint64_t>(p) << 8) ^ k);
    std::vector<fp::Poly> work{fp::monic(phi, p)}, done;
    while (!work.empty()) {
        fp::Poly h = std::move(work.back());
        work.pop_back();
        if (fp::deg(h) == static_cast<int>(f)) {
            done.push_back(std::move(h));
            continue;
        }
        for (;;) {
            fp::Poly u(static_cast<std::size_t>(fp::deg(h)), 0);
            for (auto& c : u) c = static_cast<long>(rng.below(static_cast<std::uint64_t>(p)));
            fp::strip(u);
            if (u.empty()) continue;
            fp::Poly w;
            if (p == 2) {
                // additive trace map of F_{2^f}
                fp::Poly t = fp::rem(u, h, 2), acc = t;
                for (unsigned i = 1; i < f; ++i) {
                    t = fp::rem(fp::mul(t, t, 2), h, 2);
                    acc = fp::add(acc, t, 2);
                }
                w = acc;
            } else {
                Int e = (q - 1) / 2;
                w = fp::sub(fp::powmod(u, e, h, p), fp::Poly{1}, p);
            }
            fp::Poly g0 = fp::gcd(w, h, p);
            if (fp::deg(g0) > 0 && fp::deg(g0) < fp::deg(h)) {
                fp::Poly q1, r1;
                fp::divrem(h, g0, p, q1, r1);
                assert(r1.empty());
                work.push_back(std::move(g0));
                work.push_back(fp::monic(q1, p));
                break;
            }
        }
    }
    std::sort(done.begin(), done.end());
    assert(done.size() == d / f);

    std::vector<PrimeIdeal> out;
    out.reserve(done.size());
    for (auto& g : done) {
        PrimeIdeal P;
        P.k = k;
        P.p = p;
        P.f = f;
        P.g = std::move(g);
        P.normQ = q;
        out.push_back(std::move(P));
    }
    return out;
}

/// pi_P: O_K -> k_P, the reduction zeta -> x (mod g, p) applied to the
/// power-basis coordinates. Requires an integral element.
inline Fq::Elem reduce_element(const PrimeIdeal& P, const CyclotomicField& field,
                               const FieldElement& a) {
    if (!field.is_integral(a))
        throw NonIntegralElement("reduce_element: element has non-integer coordinates");
    Fq fq = P.residue_field();
    fp::Poly acc;
    for (std::size_t l = field.degree(); l-- > 0;) {
        acc = fp::mul(acc, fp::Poly{0, 1}, P.p);
        Int c = a.coeffs[l].get_num() % P.p;
        if (c < 0) c += P.p;
        acc = fp::add(acc, fp::Poly{c.get_si()}, P.p);
        acc = fp::rem(acc, P.g, P.p);
    }
    acc.resize(fq.f(), 0);
    return Fq::Elem(acc.begin(), acc.end());
}

/// Gaussian binomial [t choose s]_q, the number of s-dimensional subspaces
/// of a t-dimensional space over F_q.
inline Int grassmannian_count(const Int& q, unsigned t, unsigned s) {
    if (s > t) return 0;
    Int num = 1, den = 1, qi = 1;
    Int qt, qs;
    mpz_pow_ui(qt.get_mpz_t(), q.get_mpz_t(), t);
    mpz_pow_ui(qs.get_mpz_t(), q.get_mpz_t(), s);
    for (unsigned i = 0; i < s; ++i) {
        num *= qt - qi;
        den *= qs - qi;
        qi *= q;
    }
    Int out;
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

/// An s-dimensional subspace of F_q^t held as the unique reduced
/// row-echelon basis.
struct Subspace {
    Fq field;
    unsigned t = 0;
    unsigned s = 0;
    std::vector<std::vector<Fq::Elem>> basis;  // s rows of length t

    bool contains(std::vector<Fq::Elem> v) const {
        for (const auto& row : basis) {
            unsigned pivot = 0;
            while (pivot < t && field.is_zero(row[pivot])) ++pivot;
            assert(pivot < t);
            if (field.is_zero(v[pivot])) continue;
            Fq::Elem c = v[pivot];
            for (unsigned j = 0; j < t; ++j) v[j] = field.sub(v[j], field.mul(c, row[j]));
        }
        for (const auto& x : v)
            if (!field.is_zero(x)) return false;
        return true;
    }

    bool operator==(const Subspace& o) const {
        return t == o.t && s == o.s && basis == o.basis && field.same_structure(o.field);
    }

    /// Canonical id string: entries as residue indices, ';' within a row,
    /// '|' between rows.
    std::string id() const {
        std::string out;
        for (unsigned i = 0; i < s; ++i) {
            if (i) out += '|';
            for (unsigned j = 0; j < t; ++j) {
                if (j) out += ';';
                out += field.to_index(basis[i][j]).get_str();
            }
        }
        return out;
    }
};

/// In-place reduced row echelon form; returns the rank.
inline unsigned rref(const Fq& fq, std::vector<std::vector<Fq::Elem>>& rows) {
    const unsigned nrows = static_cast<unsigned>(rows.size());
    const unsigned ncols = nrows ? static_cast<unsigned>(rows[0].size()) : 0;
    unsigned r = 0;
    for (unsigned c = 0; c < ncols && r < nrows; ++c) {
        unsigned piv = r;
        while (piv < nrows && fq.is_zero(rows[piv][c])) ++piv;
        if (piv == nrows) continue;
        std::swap(rows[r], rows[piv]);
        Fq::Elem inv = fq.inv(rows[r][c]);
        for (unsigned j = 0; j < ncols; ++j) rows[r][j] = fq.mul(rows[r][j], inv);
        for (unsigned i = 0; i < nrows; ++i) {
            if (i == r || fq.is_zero(rows[i][c])) continue;
            Fq::Elem f = rows[i][c];
            for (unsigned j = 0; j < ncols; ++j)
                rows[i][j] = fq.sub(rows[i][j], fq.mul(f, rows[r][j]));
        }
        ++r;
    }
    return r;
}

/// Visits every s-dimensional subspace of F_q^t exactly once, in a canonical
/// order (pivot-column combinations ascending, free entries in odometer
/// order). Throws CapExceeded when the Grassmannian is larger than cap.
template <typename Fn>
inline void for_each_subspace(const Fq& fq, unsigned t, unsigned s, const Int& cap, Fn&& fn) {
    assert(1 <= s && s <= t);
    Int count = grassmannian_count(fq.order(), t, s);
    if (count > cap)
        throw CapExceeded("enumerate_subspaces: Grassmannian has " + count.get_str() +
                          " points, cap is " + cap.get_str());

    std::vector<unsigned> pivots(s);
    for (unsigned i = 0; i < s; ++i) pivots[i] = i;

    auto emit_for_pivots = [&]() {
        // free cells: (row i, col j) with j > pivots[i] and j not a pivot
        std::vector<std::pair<unsigned, unsigned>> freeCells;
        std::vector<bool> isPivot(t, false);
        for (unsigned i = 0; i < s; ++i) isPivot[pivots[i]] = true;
        for (unsigned i = 0; i < s; ++i)
            for (unsigned j = pivots[i] + 1; j < t; ++j)
                if (!isPivot[j]) freeCells.emplace_back(i, j);

        Subspace sub{fq, t, s, {}};
        sub.basis.assign(s, std::vector<Fq::Elem>(t, fq.zero()));
        for (unsigned i = 0; i < s; ++i) sub.basis[i][pivots[i]] = fq.one();

        const unsigned long q = fq.order().get_ui();
        std::vector<unsigned long> odo(freeCells.size(), 0);
        for (;;) {
            for (std::size_t c = 0; c < freeCells.size(); ++c)
                sub.basis[freeCells[c].first][freeCells[c].second] =
                    fq.from_index(Int(odo[c]));
            fn(sub);
            std::size_t c = 0;
            while (c < odo.size() && ++odo[c] == q) odo[c++] = 0;
            if (c == odo.size()) break;
            if (odo.empty()) break;
        }
    };

    // enumerate pivot-column combinations in lexicographic order
    for (;;) {
        emit_for_pivots();
        // next combination
        int i = static_cast<int>(s) - 1;
        while (i >= 0 && pivots[static_cast<unsigned>(i)] == t - s + static_cast<unsigned>(i)) --i;
        if (i < 0) break;
        ++pivots[static_cast<unsigned>(i)];
        for (unsigned j = static_cast<unsigned>(i) + 1; j < s; ++j) pivots[j] = pivots[j - 1] + 1;
    }
}

inline std::vector<Subspace> enumerate_subspaces(const Fq& fq, unsigned t, unsigned s,
                                                 const Int& cap) {
    std::vector<Subspace> out;
    for_each_subspace(fq, t, s, cap, [&](const Subspace& sub) { out.push_back(sub); });
    return out;
}

/// Uniformly random s-dimensional subspace: i.i.d. uniform s x t matrices,
/// retried until rank s, then canonicalized. Fibers over each subspace are
/// GL_s-orbits of equal size, so the result is uniform on the Grassmannian.
inline Subspace random_subspace(const Fq& fq, unsigned t, unsigned s, Rng& rng) {
    assert(1 <= s && s <= t);
    for (;;) {
        std::vector<std::vector<Fq::Elem>> rows(s, std::vector<Fq::Elem>(t, fq.zero()));
        for (unsigned i = 0; i < s; ++i)
            for (unsigned j = 0; j < t; ++j) rows[i][j] = fq.uniform(rng);
        if (rref(fq, rows) == s) return Subspace{fq, t, s, std::move(rows)};
    }
}

}  // namespace mll
