#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mll/codelift.hpp"
#include "mll/rng.hpp"

using namespace mll;

namespace {

Subspace span_of(const Fq& fq, unsigned t, const std::vector<std::vector<long>>& rows) {
    std::vector<std::vector<Fq::Elem>> basis;
    for (const auto& r : rows) {
        std::vector<Fq::Elem> row;
        for (long v : r) row.push_back(fq.from_index(Int(v)));
        basis.push_back(std::move(row));
    }
    unsigned s = rref(fq, basis);
    basis.resize(s);
    return Subspace{fq, t, s, std::move(basis)};
}

// rational solve y * H = x for square invertible H; true iff y is integral
bool lattice_member(const MatZ& h, const std::vector<Int>& x) {
    const std::size_t n = h.rows();
    // Gaussian elimination on H^T y^T = x^T over Q
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(h.at(j, i));
        a[i][n] = Rat(x[i]);
    }
    for (std::size_t c = 0, r = 0; c < n; ++c, ++r) {
        std::size_t piv = r;
        while (piv < n && a[piv][c] == 0) ++piv;
        REQUIRE(piv < n);
        std::swap(a[r], a[piv]);
        Rat inv = 1 / a[r][c];
        for (std::size_t j = c; j <= n; ++j) a[r][j] *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (std::size_t j = c; j <= n; ++j) a[i][j] -= f * a[r][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (a[i][n].get_den() != 1) return false;
    return true;
}

}  // namespace

TEST_CASE("classical lift over Q: span{(1,2)} mod 5") {
    CyclotomicField Q(1);
    auto primes = split_prime(Q, 5);
    REQUIRE(primes.size() == 1);
    const PrimeIdeal& P = primes[0];
    Fq fq = P.residue_field();

    Subspace S = span_of(fq, 2, {{1, 2}});
    MatZ basis = lift_subspace(Q, 2, P, S);
    CHECK(basis.at(0, 0) == 1);
    CHECK(basis.at(0, 1) == 2);
    CHECK(basis.at(1, 0) == 0);
    CHECK(basis.at(1, 1) == 5);
    CHECK(basis.det() == 5);
}

TEST_CASE("s = t lifts to the standard lattice") {
    CyclotomicField F(4);
    auto primes = split_prime(F, 13);
    const PrimeIdeal& P = primes[0];
    Fq fq = P.residue_field();
    Subspace S = span_of(fq, 2, {{1, 0}, {0, 1}});
    REQUIRE(S.s == 2);

    ModuleLatticeInstance inst = build_module_lattice(F, 2, P, S);
    CHECK(inst.lattice().basis == MatZ::identity(4));
    CHECK(inst.index_in_standard_lattice() == 1);
    CHECK(inst.beta().is_one());
    // sigma = |disc|^{-1/d} alone
    PowProduct expect = PowProduct::integer_power(F.abs_disc(), Rat(-1, F.degree()));
    CHECK((inst.lattice().scale * expect.inverse()).is_one());
}

TEST_CASE("Gram determinant identity for k=4, p=5, t=2, s=1") {
    CyclotomicField F(4);
    auto primes = split_prime(F, 5);
    const PrimeIdeal& P = primes[0];
    Fq fq = P.residue_field();
    Subspace S = span_of(fq, 2, {{1, 0}});

    ModuleLatticeInstance inst = build_module_lattice(F, 2, P, S);
    CHECK(inst.lattice().gram.det() == 400);  // |disc|^t * N^2 = 16 * 25
    CHECK(inst.index_in_standard_lattice() == 5);
    CHECK(inst.steinitz_exponent() == 1);
}

TEST_CASE("beta exponent bookkeeping") {
    CyclotomicField F8(8);
    auto primes = split_prime(F8, 17);  // split: 17 = 1 mod 8
    const PrimeIdeal& P = primes[0];
    REQUIRE(P.normQ == 17);

    BetaScale b = beta_scale(P, 1, 2, F8);
    CHECK(b.normQ == 17);
    CHECK(b.exponent == Rat(-1, 8));
    CHECK(beta_scale(P, 2, 2, F8).is_one());

    // over Q, beta matches the classical construction p^{-(1 - 1/t)}
    CyclotomicField Q(1);
    auto qprimes = split_prime(Q, 7);
    BetaScale bq = beta_scale(qprimes[0], 1, 3, Q);
    CHECK(bq.exponent == Rat(-2, 3));
}

TEST_CASE("random instances: covolume, index, and reduction consistency") {
    Rng rng(2024);
    const std::vector<std::pair<unsigned, long>> fieldsPrimes = {
        {1, 11}, {4, 13}, {8, 17}, {12, 13}};
    int built = 0;
    for (const auto& [k, p] : fieldsPrimes) {
        CyclotomicField F(k);
        auto primes = split_prime(F, p);
        for (unsigned t = 2; t <= 3; ++t) {
            for (unsigned s = 1; s < t; ++s) {
                for (int rep = 0; rep < 5; ++rep) {
                    const PrimeIdeal& P = primes[rng.below(primes.size())];
                    Fq fq = P.residue_field();
                    Rng sRng(rng.next());
                    Subspace S = random_subspace(fq, t, s, sRng);
                    ModuleLatticeInstance inst = build_module_lattice(F, t, P, S);
                    ++built;

                    // index identity
                    Int expect;
                    mpz_pow_ui(expect.get_mpz_t(), P.normQ.get_mpz_t(), t - s);
                    CHECK(abs(inst.lattice().basis.det()) == expect);

                    // normalized covolume is exactly one (symbolic)
                    PowProduct norm =
                        inst.lattice().scale.pow(inst.lattice().rank()) *
                        PowProduct::integer_power(inst.lattice().gram.det(), 1);
                    CHECK(norm.is_one());

                    // every basis row reduces into S
                    for (std::size_t r = 0; r < inst.lattice().basis.rows(); ++r) {
                        auto vec = reduce_row(F, t, P, inst.lattice().basis, r);
                        CHECK(S.contains(vec));
                    }
                }
            }
        }
    }
    CHECK(built >= 50);
}

TEST_CASE("sigma example: k=4, t=2, s=1, N(P)=5") {
    CyclotomicField F(4);
    auto primes = split_prime(F, 5);
    Fq fq = primes[0].residue_field();
    Subspace S = span_of(fq, 2, {{1, 3}});
    ModuleLatticeInstance inst = build_module_lattice(F, 2, primes[0], S);
    // sigma = 4^{-1/2} * 5^{-1/2} = 2^{-1} * 5^{-1/2}
    const auto& f = inst.lattice().scale.factors();
    REQUIRE(f.size() == 2);
    CHECK(f.at(2) == -1);
    CHECK(f.at(5) == Rat(-1, 2));
}

TEST_CASE("membership completeness on small instances") {
    // x in lattice <=> pi(x) in S, scanned over O_K^t residues mod p
    struct Case {
        unsigned k;
        long p;
        unsigned t, s;
    };
    for (const Case& c : std::vector<Case>{{1, 3, 2, 1}, {1, 5, 3, 2}, {4, 3, 2, 1}}) {
        CyclotomicField F(c.k);
        auto primes = split_prime(F, c.p);
        const PrimeIdeal& P = primes[0];
        Fq fq = P.residue_field();
        Rng rng(77 + c.k + c.p);
        Subspace S = random_subspace(fq, c.t, c.s, rng);
        MatZ basis = lift_subspace(F, c.t, P, S);

        const unsigned d = F.degree();
        const unsigned n = c.t * d;
        std::vector<long> x(n, 0);
        for (;;) {
            // membership in the lattice vs membership of the reduction in S
            std::vector<Int> xi(n);
            for (unsigned i = 0; i < n; ++i) xi[i] = x[i];
            std::vector<Fq::Elem> red(c.t);
            for (unsigned col = 0; col < c.t; ++col) {
                std::vector<Int> coeffs(d);
                for (unsigned j = 0; j < d; ++j) coeffs[j] = xi[col * d + j];
                red[col] = reduce_element(P, F, F.from_int_coeffs(coeffs));
            }
            CHECK(lattice_member(basis, xi) == S.contains(red));

            unsigned i = 0;
            while (i < n && x[i] == c.p - 1) x[i++] = 0;
            if (i == n) break;
            ++x[i];
        }
    }
}

TEST_CASE("dimension mismatch is rejected") {
    CyclotomicField F(4);
    auto primes = split_prime(F, 5);
    Fq fq = primes[0].residue_field();
    Subspace S = span_of(fq, 3, {{1, 0, 0}});
    CHECK_THROWS_AS(lift_subspace(F, 2, primes[0], S), DimensionMismatch);
}
