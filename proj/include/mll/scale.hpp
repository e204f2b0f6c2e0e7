#pragma once

#include <map>
#include <string>
#include <utility>

#include <mpfr.h>

#include "mll/errors.hpp"
#include "mll/intmat.hpp"

namespace mll {

/// Directed-rounding enclosure [lo, hi] of a positive real, backed by MPFR.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec) {
        mpfr_init2(lo_, prec);
        mpfr_init2(hi_, prec);
        mpfr_set_ui(lo_, 1, MPFR_RNDD);
        mpfr_set_ui(hi_, 1, MPFR_RNDU);
    }
    Interval(const Interval& o) {
        mpfr_init2(lo_, mpfr_get_prec(o.lo_));
        mpfr_init2(hi_, mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    Interval& operator=(const Interval& o) {
        if (this != &o) {
            mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
            mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
            mpfr_set(lo_, o.lo_, MPFR_RNDD);
            mpfr_set(hi_, o.hi_, MPFR_RNDU);
        }
        return *this;
    }
    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static Interval pi(mpfr_prec_t prec) {
        Interval r(prec);
        mpfr_const_pi(r.lo_, MPFR_RNDD);
        mpfr_const_pi(r.hi_, MPFR_RNDU);
        return r;
    }

    static Interval of_int(const Int& v, mpfr_prec_t prec) {
        Interval r(prec);
        mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
        return r;
    }

    static Interval of_rat(const Rat& v, mpfr_prec_t prec) {
        Interval r(prec);
        mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
        return r;
    }

    void mul(const Interval& o) {
        // positive operands only
        mpfr_mul(lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_mul(hi_, hi_, o.hi_, MPFR_RNDU);
    }

    /// this^(num/den) for a positive interval; den > 0.
    Interval pow_rat(const Int& num, unsigned long den, mpfr_prec_t prec) const {
        Interval r(prec);
        if (num == 0) return r;
        auto eval = [&](const mpfr_t x, mpfr_t out, mpfr_rnd_t rnd) {
            mpfr_pow_z(out, x, num.get_mpz_t(), rnd);
            if (den != 1) mpfr_rootn_ui(out, out, den, rnd);
        };
        if (num > 0) {
            eval(lo_, r.lo_, MPFR_RNDD);
            eval(hi_, r.hi_, MPFR_RNDU);
        } else {
            eval(hi_, r.lo_, MPFR_RNDD);
            eval(lo_, r.hi_, MPFR_RNDU);
        }
        return r;
    }

    double mid() const {
        return (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN)) / 2.0;
    }

    double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

    /// floor of the enclosed value if unambiguous: with n = floor(hi),
    /// certification requires lo >= n so no integer lies in (lo, hi].
    bool certified_floor(Int& out) const {
        Int n;
        mpfr_get_z(n.get_mpz_t(), hi_, MPFR_RNDD);  // floor
        if (mpfr_cmp_z(lo_, n.get_mpz_t()) >= 0) {
            out = n;
            return true;
        }
        return false;
    }

private:
    mpfr_t lo_, hi_;
};

/// Exact positive real of the form prod_i b_i^{e_i} * pi^{e_pi} with integer
/// bases b_i >= 2 and rational exponents. Carries the irrational scalings
/// (|disc|^{-1/d}, beta, ball radii) symbolically so that core lattice
/// arithmetic stays integral; numeric values are produced only as certified
/// enclosures.
class PowProduct {
public:
    static PowProduct one() { return PowProduct(); }

    static PowProduct pi_power(const Rat& e) {
        PowProduct p;
        p.piExp_ = e;
        return p;
    }

    /// b^e with the base split into prime factors (trial division; a large
    /// remaining cofactor is kept as its own base).
    static PowProduct integer_power(const Int& b, const Rat& e) {
        assert(b >= 1);
        PowProduct p;
        if (e == 0 || b == 1) return p;
        Int n = b;
        for (Int f = 2; f * f <= n && f < 1000000; ++f) {
            if (!mpz_divisible_p(n.get_mpz_t(), f.get_mpz_t())) continue;
            unsigned long m = 0;
            while (mpz_divisible_p(n.get_mpz_t(), f.get_mpz_t())) {
                n /= f;
                ++m;
            }
            p.factors_[f] += e * static_cast<long>(m);
        }
        if (n > 1) p.factors_[n] += e;
        p.prune();
        return p;
    }

    static PowProduct rational(const Rat& v) {
        assert(v > 0);
        PowProduct p = integer_power(v.get_num(), 1);
        p *= integer_power(v.get_den(), -1);
        return p;
    }

    PowProduct& operator*=(const PowProduct& o) {
        for (const auto& [b, e] : o.factors_) factors_[b] += e;
        piExp_ += o.piExp_;
        prune();
        return *this;
    }

    PowProduct operator*(const PowProduct& o) const {
        PowProduct p = *this;
        p *= o;
        return p;
    }

    PowProduct pow(const Rat& e) const {
        PowProduct p;
        if (e == 0) return p;
        for (const auto& [b, ex] : factors_) p.factors_[b] = ex * e;
        p.piExp_ = piExp_ * e;
        p.prune();
        return p;
    }

    PowProduct inverse() const { return pow(-1); }

    bool is_one() const { return factors_.empty() && piExp_ == 0; }

    bool is_rational() const {
        if (piExp_ != 0) return false;
        for (const auto& [b, e] : factors_)
            if (e.get_den() != 1) return false;
        return true;
    }

    Interval evaluate(mpfr_prec_t prec) const {
        Interval acc(prec);
        for (const auto& [b, e] : factors_) {
            Interval base = Interval::of_int(b, prec);
            acc.mul(base.pow_rat(e.get_num(), e.get_den().get_ui(), prec));
        }
        if (piExp_ != 0) {
            Interval pi = Interval::pi(prec);
            acc.mul(pi.pow_rat(piExp_.get_num(), piExp_.get_den().get_ui(), prec));
        }
        return acc;
    }

    double to_double() const { return evaluate(128).mid(); }

    /// Certified floor by adaptive precision refinement. An exact integer
    /// tie that rounding cannot resolve raises PrecisionExhausted at the
    /// precision cap.
    Int certified_floor(mpfr_prec_t maxBits = 4096) const {
        for (mpfr_prec_t prec = 64; prec <= maxBits; prec *= 2) {
            Int out;
            if (evaluate(prec).certified_floor(out)) return out;
        }
        throw PrecisionExhausted("certified_floor: value not separated from an integer at " +
                                 std::to_string(maxBits) + " bits");
    }

    std::string str() const {
        if (is_one()) return "1";
        std::string s;
        auto term = [&](const std::string& base, const Rat& e) {
            if (!s.empty()) s += " * ";
            s += base;
            if (e != 1) s += "^(" + e.get_str() + ")";
        };
        for (const auto& [b, e] : factors_) term(b.get_str(), e);
        if (piExp_ != 0) term("pi", piExp_);
        return s;
    }

    const std::map<Int, Rat>& factors() const { return factors_; }
    const Rat& pi_exponent() const { return piExp_; }

private:
    void prune() {
        for (auto it = factors_.begin(); it != factors_.end();) {
            if (it->second == 0)
                it = factors_.erase(it);
            else
                ++it;
        }
    }

    std::map<Int, Rat> factors_;
    Rat piExp_ = 0;
};

}  // namespace mll
