#pragma once

#include <cassert>
#include <utility>

#include "mll/errors.hpp"
#include "mll/residue.hpp"
#include "mll/zlattice.hpp"

namespace mll {

/// beta = N(P)^{-(1 - s/t)/d}, the scaling that gives the lifted lattice
/// unit covolume in the normalized metric. Held exactly as (base, exponent).
struct BetaScale {
    Int normQ;
    Rat exponent;

    bool is_one() const { return exponent == 0; }
    PowProduct as_pow_product() const { return PowProduct::integer_power(normQ, exponent); }
};

inline BetaScale beta_scale(const PrimeIdeal& P, unsigned s, unsigned t,
                            const CyclotomicField& field) {
    assert(1 <= s && s <= t);
    Rat e = -(Rat(1) - Rat(s, t)) / field.degree();
    e.canonicalize();
    return BetaScale{P.normQ, e};
}

/// Z-basis (HNF) of the preimage of the subspace S under coordinatewise
/// reduction mod P inside O_K^t. Generators: O_K-multiples of the
/// coefficient-lifted RREF rows of S, together with p e_i zeta^j and
/// g(zeta) e_i zeta^j on every coordinate.
inline MatZ lift_subspace(const CyclotomicField& field, unsigned t, const PrimeIdeal& P,
                          const Subspace& S) {
    if (S.t != t)
        throw DimensionMismatch("lift_subspace: subspace ambient dimension " +
                                std::to_string(S.t) + " != t = " + std::to_string(t));
    if (!(S.field.p() == P.p && S.field.modulus() == P.g))
        throw DimensionMismatch("lift_subspace: subspace is not over the residue field of P");
    if (field.conductor() != P.k)
        throw DimensionMismatch("lift_subspace: prime ideal belongs to a different field");

    const unsigned d = field.degree();
    const std::size_t N = static_cast<std::size_t>(t) * d;

    // g(zeta) in power-basis coordinates
    FieldElement gz = field.zero();
    for (std::size_t i = 0; i < P.g.size(); ++i)
        gz = field.add(gz, field.scale(field.zeta_power(static_cast<long>(i)), Rat(P.g[i])));

    std::vector<std::vector<FieldElement>> gens;  // vectors over O_K^t

    // lifted RREF rows times the power basis
    for (unsigned r = 0; r < S.s; ++r) {
        std::vector<FieldElement> row(t, field.zero());
        for (unsigned c = 0; c < t; ++c) {
            // coefficient lift of F_{p^f} = F_p[x]/(g): digits to {0,...,p-1}
            FieldElement lift = field.zero();
            for (unsigned i = 0; i < S.field.f(); ++i) {
                long coeff = S.basis[r][c][i];
                if (coeff != 0)
                    lift = field.add(
                        lift, field.scale(field.zeta_power(static_cast<long>(i)), Rat(coeff)));
            }
            row[c] = lift;
        }
        for (unsigned j = 0; j < d; ++j) {
            std::vector<FieldElement> v(t, field.zero());
            FieldElement zj = field.zeta_power(j);
            for (unsigned c = 0; c < t; ++c) v[c] = field.mul(row[c], zj);
            gens.push_back(std::move(v));
        }
    }
    // p e_i zeta^j and g(zeta) e_i zeta^j
    for (unsigned i = 0; i < t; ++i) {
        for (unsigned j = 0; j < d; ++j) {
            FieldElement zj = field.zeta_power(j);
            std::vector<FieldElement> vp(t, field.zero());
            vp[i] = field.scale(zj, Rat(P.p));
            gens.push_back(std::move(vp));
            std::vector<FieldElement> vg(t, field.zero());
            vg[i] = field.mul(gz, zj);
            gens.push_back(std::move(vg));
        }
    }

    MatZ rows(gens.size(), N);
    for (std::size_t r = 0; r < gens.size(); ++r)
        for (unsigned c = 0; c < t; ++c)
            for (unsigned j = 0; j < d; ++j) {
                const Rat& x = gens[r][c].coeffs[j];
                assert(x.get_den() == 1);
                rows.at(r, static_cast<std::size_t>(c) * d + j) = x.get_num();
            }
    return hnf(rows);
}

/// One lattice of L(P,s): the lifted code with its exact Gram and the
/// symbolic scale sigma = |disc|^{-1/d} * beta^2.
class ModuleLatticeInstance {
public:
    ModuleLatticeInstance(const CyclotomicField& field, unsigned t, PrimeIdeal P, Subspace S)
        : field_(&field), t_(t), prime_(std::move(P)), subspace_(std::move(S)) {
        beta_ = beta_scale(prime_, subspace_.s, t_, field);
        MatZ basis = lift_subspace(field, t_, prime_, subspace_);
        PowProduct sigma =
            PowProduct::integer_power(field.abs_disc(), Rat(-1, field.degree())) *
            beta_.as_pow_product().pow(2);
        MatZ gram = trace_block_gram(field, t_, basis);
        lattice_ = IntegralLattice{std::move(basis), std::move(gram), std::move(sigma)};
        verify_invariants();
    }

    const CyclotomicField& field() const { return *field_; }
    unsigned t() const { return t_; }
    const PrimeIdeal& prime() const { return prime_; }
    const Subspace& subspace() const { return subspace_; }
    const BetaScale& beta() const { return beta_; }
    const IntegralLattice& lattice() const { return lattice_; }

    /// [O_K^t : pi^{-1}(S)] = N(P)^{t-s}
    Int index_in_standard_lattice() const {
        Int idx;
        mpz_pow_ui(idx.get_mpz_t(), prime_.normQ.get_mpz_t(), t_ - subspace_.s);
        return idx;
    }

    /// Steinitz class exponent metadata: the instances of L(P,s) share the
    /// class [P]^{t-s}; the class itself is not computed here.
    unsigned steinitz_exponent() const { return t_ - subspace_.s; }

private:
    void verify_invariants() const {
        // index identity:  |det(basis)| = N(P)^{t-s}
        Int db = lattice_.basis.det();
        if (abs(db) != index_in_standard_lattice())
            throw Error("module lattice: index identity violated");
        // Gram determinant identity: det(gram) = |disc|^t * N(P)^{2(t-s)}
        Int discT;
        mpz_pow_ui(discT.get_mpz_t(), field_->abs_disc().get_mpz_t(), t_);
        if (lattice_.gram.det() != discT * db * db)
            throw Error("module lattice: Gram determinant identity violated");
        // normalized covolume is exactly 1: sigma^N * det(gram) == 1 on exponents
        PowProduct norm = lattice_.scale.pow(lattice_.rank()) *
                          PowProduct::integer_power(lattice_.gram.det(), 1);
        if (!norm.is_one()) throw Error("module lattice: normalized covolume is not 1");
    }

    const CyclotomicField* field_;
    unsigned t_;
    PrimeIdeal prime_;
    Subspace subspace_;
    BetaScale beta_;
    IntegralLattice lattice_;
};

inline ModuleLatticeInstance build_module_lattice(const CyclotomicField& field, unsigned t,
                                                  const PrimeIdeal& P, const Subspace& S) {
    return ModuleLatticeInstance(field, t, P, S);
}

/// Reduces a basis row (coordinates in Z^N) back to k_P^t.
inline std::vector<Fq::Elem> reduce_row(const CyclotomicField& field, unsigned t,
                                        const PrimeIdeal& P, const MatZ& basis,
                                        std::size_t row) {
    const unsigned d = field.degree();
    std::vector<Fq::Elem> out(t);
    for (unsigned c = 0; c < t; ++c) {
        std::vector<Int> coeffs(d);
        for (unsigned j = 0; j < d; ++j) coeffs[j] = basis.at(row, static_cast<std::size_t>(c) * d + j);
        out[c] = reduce_element(P, field, field.from_int_coeffs(coeffs));
    }
    return out;
}

}  // namespace mll
