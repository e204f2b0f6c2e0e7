#pragma once

#include <cassert>
#include <vector>

#include "mll/errors.hpp"
#include "mll/intmat.hpp"

namespace mll {

namespace poly {

// Dense integer polynomials, index = degree.

inline void strip(std::vector<Int>& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline std::vector<Int> mul(const std::vector<Int>& a, const std::vector<Int>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Int> c(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

/// Quotient of a by monic b; requires exact division (zero remainder).
inline std::vector<Int> div_exact_monic(std::vector<Int> a, const std::vector<Int>& b) {
    assert(!b.empty() && b.back() == 1);
    const std::size_t db = b.size() - 1;
    strip(a);
    if (a.size() < b.size()) {
        assert(a.empty());
        return {};
    }
    std::vector<Int> q(a.size() - db);
    for (std::size_t i = a.size(); i-- > db;) {
        Int c = a[i];
        if (c == 0) continue;
        q[i - db] = c;
        for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
    }
    for (const Int& c : a) assert(c == 0);
    return q;
}

}  // namespace poly

inline unsigned euler_phi(unsigned k) {
    unsigned result = k, n = k;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            result -= result / p;
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

/// k-th cyclotomic polynomial over Z, computed as (x^k - 1) / prod of
/// lower cyclotomic polynomials at the divisors of k.
inline std::vector<Int> cyclotomic_poly(unsigned k) {
    assert(k >= 1);
    std::vector<Int> f(k + 1);
    f[0] = -1;
    f[k] = 1;
    for (unsigned dd = 1; dd < k; ++dd) {
        if (k % dd == 0) f = poly::div_exact_monic(std::move(f), cyclotomic_poly(dd));
    }
    return f;
}

/// Element of Q(zeta_k) in the power basis 1, zeta, ..., zeta^{d-1}.
struct FieldElement {
    std::vector<Rat> coeffs;

    bool operator==(const FieldElement& o) const { return coeffs == o.coeffs; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const Rat& c : coeffs)
            if (c != 0) return false;
        return true;
    }
};

/// The cyclotomic field K = Q(zeta_k) together with its integer trace Gram
/// T_ij = Tr(zeta^i * conj(zeta^j)) for the power basis. The power basis is
/// an integral basis, so an element is an algebraic integer exactly when all
/// of its coefficients are integers.
class CyclotomicField {
public:
    explicit CyclotomicField(unsigned k) : k_(k) {
        assert(k >= 1);
        minpoly_ = cyclotomic_poly(k);
        d_ = static_cast<unsigned>(minpoly_.size() - 1);
        assert(d_ == euler_phi(k) || k == 1);

        // zeta^e in the power basis, e in [0, k).
        zetaPow_.resize(k);
        std::vector<Int> cur{1};
        for (unsigned e = 0; e < k_; ++e) {
            std::vector<Int> padded = cur;
            padded.resize(d_);
            zetaPow_[e] = padded;
            // multiply by x and reduce mod the minimal polynomial
            cur.insert(cur.begin(), Int(0));
            if (cur.size() == d_ + 1) {
                Int lead = cur[d_];
                if (lead != 0)
                    for (unsigned j = 0; j < d_; ++j) cur[j] -= lead * minpoly_[j];
                cur.pop_back();
            }
        }

        // Power sums of the roots of the minimal polynomial via Newton's
        // identities give Tr(zeta^e) for all e in [0, k).
        traceZeta_.resize(k_ >= 1 ? k_ : 1);
        traceZeta_[0] = d_;
        for (unsigned m = 1; m < k_; ++m) {
            Int acc = 0;
            if (m <= d_) {
                for (unsigned i = 1; i < m; ++i) acc += minpoly_[d_ - i] * traceZeta_[m - i];
                acc += Int(m) * minpoly_[d_ - m];
            } else {
                for (unsigned i = 1; i <= d_; ++i) acc += minpoly_[d_ - i] * traceZeta_[m - i];
            }
            traceZeta_[m] = -acc;
        }

        traceGram_ = MatZ(d_, d_);
        for (unsigned i = 0; i < d_; ++i)
            for (unsigned j = 0; j < d_; ++j)
                traceGram_.at(i, j) = traceZeta_[(k_ + i - j) % k_];
        absDisc_ = traceGram_.det();
        assert(absDisc_ > 0);
    }

    unsigned conductor() const { return k_; }
    unsigned degree() const { return d_; }
    const std::vector<Int>& minpoly() const { return minpoly_; }
    const MatZ& trace_gram() const { return traceGram_; }
    const Int& abs_disc() const { return absDisc_; }

    FieldElement zero() const { return FieldElement{std::vector<Rat>(d_)}; }
    FieldElement one() const { return from_integer(1); }

    FieldElement from_integer(long v) const {
        FieldElement e = zero();
        e.coeffs[0] = v;
        return e;
    }

    FieldElement from_int_coeffs(const std::vector<Int>& c) const {
        assert(c.size() == d_);
        FieldElement e = zero();
        for (unsigned i = 0; i < d_; ++i) e.coeffs[i] = c[i];
        return e;
    }

    /// zeta^e for any exponent e (reduced mod k).
    FieldElement zeta_power(long e) const {
        long r = e % static_cast<long>(k_);
        if (r < 0) r += k_;
        return from_int_coeffs(zetaPow_[static_cast<unsigned>(r)]);
    }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        check(a);
        check(b);
        FieldElement r = a;
        for (unsigned i = 0; i < d_; ++i) r.coeffs[i] += b.coeffs[i];
        return r;
    }

    FieldElement sub(const FieldElement& a, const FieldElement& b) const {
        check(a);
        check(b);
        FieldElement r = a;
        for (unsigned i = 0; i < d_; ++i) r.coeffs[i] -= b.coeffs[i];
        return r;
    }

    FieldElement neg(const FieldElement& a) const {
        check(a);
        FieldElement r = a;
        for (unsigned i = 0; i < d_; ++i) r.coeffs[i] = -r.coeffs[i];
        return r;
    }

    FieldElement scale(const FieldElement& a, const Rat& c) const {
        check(a);
        FieldElement r = a;
        for (unsigned i = 0; i < d_; ++i) r.coeffs[i] *= c;
        return r;
    }

    /// Product reduced modulo the minimal polynomial. Integral inputs give
    /// an integral output since the minimal polynomial is monic over Z.
    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        check(a);
        check(b);
        std::vector<Rat> prod(2 * d_ - 1);
        for (unsigned i = 0; i < d_; ++i) {
            if (a.coeffs[i] == 0) continue;
            for (unsigned j = 0; j < d_; ++j) prod[i + j] += a.coeffs[i] * b.coeffs[j];
        }
        for (std::size_t i = prod.size(); i-- > d_;) {
            Rat c = prod[i];
            if (c == 0) continue;
            prod[i] = 0;
            for (unsigned j = 0; j < d_; ++j) prod[i - d_ + j] -= c * minpoly_[j];
        }
        FieldElement r = zero();
        for (unsigned i = 0; i < d_; ++i) r.coeffs[i] = prod[i];
        return r;
    }

    /// Image under complex conjugation, zeta -> zeta^{k-1}. The identity on
    /// the totally real fields k <= 2.
    FieldElement conj(const FieldElement& a) const {
        check(a);
        FieldElement r = zero();
        for (unsigned l = 0; l < d_; ++l) {
            if (a.coeffs[l] == 0) continue;
            const std::vector<Int>& pw = zetaPow_[(k_ - l) % k_];
            for (unsigned i = 0; i < d_; ++i) r.coeffs[i] += a.coeffs[l] * pw[i];
        }
        return r;
    }

    Rat trace(const FieldElement& a) const {
        check(a);
        Rat t = 0;
        for (unsigned l = 0; l < d_; ++l) t += a.coeffs[l] * traceZeta_[l];
        return t;
    }

    /// Tr(a * conj(b)); the bilinear form underlying the lattice geometry.
    Rat trace_pairing(const FieldElement& a, const FieldElement& b) const {
        return trace(mul(a, conj(b)));
    }

    /// Determinant of the multiplication-by-a map.
    Rat norm(const FieldElement& a) const {
        check(a);
        // Clear denominators, take an integer determinant, divide back out.
        Int den = 1;
        for (const Rat& c : a.coeffs) den = lcm(den, c.get_den());
        MatZ m(d_, d_);
        FieldElement cur = scale(a, Rat(den));
        FieldElement z = zeta_power(1);
        for (unsigned j = 0; j < d_; ++j) {
            for (unsigned i = 0; i < d_; ++i) {
                assert(cur.coeffs[i].get_den() == 1);
                m.at(j, i) = cur.coeffs[i].get_num();
            }
            if (j + 1 < d_) cur = mul(cur, z);
        }
        Rat r(m.det());
        Int denPow;
        mpz_pow_ui(denPow.get_mpz_t(), den.get_mpz_t(), d_);
        r /= denPow;
        return r;
    }

    bool is_integral(const FieldElement& a) const {
        check(a);
        for (const Rat& c : a.coeffs)
            if (c.get_den() != 1) return false;
        return true;
    }

private:
    void check(const FieldElement& a) const { assert(a.coeffs.size() == d_); }

    unsigned k_;
    unsigned d_;
    std::vector<Int> minpoly_;
    std::vector<std::vector<Int>> zetaPow_;
    std::vector<Int> traceZeta_;
    MatZ traceGram_;
    Int absDisc_;
};

inline CyclotomicField field_new(unsigned k) { return CyclotomicField(k); }

}  // namespace mll
