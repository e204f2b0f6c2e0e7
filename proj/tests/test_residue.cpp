#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mll/residue.hpp"

using namespace mll;

TEST_CASE("splitting of 5 in Q(i)") {
    CyclotomicField F(4);
    auto primes = split_prime(F, 5);
    REQUIRE(primes.size() == 2);
    for (const auto& P : primes) {
        CHECK(P.f == 1);
        CHECK(P.normQ == 5);
    }
    // x^2 + 1 = (x - 2)(x - 3) mod 5, i.e. roots 2 and 3
    std::set<long> roots;
    for (const auto& P : primes) {
        REQUIRE(P.g.size() == 2);
        roots.insert((5 - P.g[0]) % 5);
    }
    CHECK(roots == std::set<long>{2, 3});
}

TEST_CASE("splitting of 7 in Q(zeta_12) gives two degree-2 primes") {
    CyclotomicField F(12);
    auto primes = split_prime(F, 7);
    REQUIRE(primes.size() == 2);
    for (const auto& P : primes) {
        CHECK(P.f == 2);
        CHECK(P.normQ == 49);
    }
}

TEST_CASE("ramified and composite inputs are rejected") {
    CyclotomicField F(4);
    CHECK_THROWS_AS(split_prime(F, 2), RamifiedPrime);
    CHECK_THROWS_AS(split_prime(F, 15), NotPrime);
    CyclotomicField Q(1);
    CHECK_NOTHROW(split_prime(Q, 2));
}

TEST_CASE("each factor divides the cyclotomic polynomial and is Frobenius-minimal") {
    for (auto [k, p] : std::vector<std::pair<unsigned, long>>{
             {4, 5}, {4, 13}, {8, 3}, {8, 17}, {12, 7}, {12, 13}, {5, 2}, {3, 2}, {15, 2}}) {
        CyclotomicField F(k);
        auto primes = split_prime(F, p);
        CHECK(primes.size() == F.degree() / primes[0].f);
        fp::Poly phi(F.minpoly().size());
        for (std::size_t i = 0; i < phi.size(); ++i) {
            Int c = F.minpoly()[i] % p;
            if (c < 0) c += p;
            phi[i] = c.get_si();
        }
        for (const auto& P : primes) {
            fp::Poly q, r;
            fp::divrem(phi, P.g, p, q, r);
            CHECK(r.empty());  // g | Phi_k mod p

            // Frobenius: zeta^(p^j) returns to zeta exactly at j = f
            fp::Poly x{0, 1};
            fp::Poly img = fp::rem(x, P.g, p);
            fp::Poly t = img;
            for (unsigned j = 1; j <= P.f; ++j) {
                t = fp::powmod(t, Int(p), P.g, p);
                if (j < P.f) CHECK(t != img);
            }
            CHECK(t == img);
        }
    }
}

TEST_CASE("reduction map is a unital ring homomorphism") {
    CyclotomicField F(4);
    auto primes = split_prime(F, 5);
    // pick the prime with g = x - 2
    const PrimeIdeal& P = primes[0].g[0] == 3 ? primes[0] : primes[1];
    REQUIRE((5 - P.g[0]) % 5 == 2);
    Fq fq = P.residue_field();

    Fq::Elem two = reduce_element(P, F, F.zeta_power(1));
    CHECK(fq.to_index(two) == 2);
    CHECK(fq.to_index(fq.mul(two, two)) == 4);  // (-1 mod 5)

    CHECK(fq.to_index(reduce_element(P, F, F.one())) == 1);

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        FieldElement a = F.zero(), b = F.zero();
        for (unsigned i = 0; i < F.degree(); ++i) {
            a.coeffs[i] = static_cast<long>(rng.below(41)) - 20;
            b.coeffs[i] = static_cast<long>(rng.below(41)) - 20;
        }
        CHECK(reduce_element(P, F, F.mul(a, b)) ==
              fq.mul(reduce_element(P, F, a), reduce_element(P, F, b)));
        CHECK(reduce_element(P, F, F.add(a, b)) ==
              fq.add(reduce_element(P, F, a), reduce_element(P, F, b)));
    }

    FieldElement half = F.zero();
    half.coeffs[0] = Rat(1, 2);
    CHECK_THROWS_AS(reduce_element(P, F, half), NonIntegralElement);
}

TEST_CASE("reduction in a degree-2 residue field") {
    CyclotomicField F(12);
    auto primes = split_prime(F, 7);
    const PrimeIdeal& P = primes[0];
    Fq fq = P.residue_field();
    // the image of zeta has multiplicative order 12 in F_49
    Fq::Elem z = reduce_element(P, F, F.zeta_power(1));
    Fq::Elem acc = z;
    for (unsigned j = 1; j < 12; ++j) {
        CHECK(!(acc == fq.one()));
        acc = fq.mul(acc, z);
    }
    CHECK(acc == fq.one());
}

TEST_CASE("Gaussian binomials") {
    CHECK(grassmannian_count(2, 2, 1) == 3);
    CHECK(grassmannian_count(3, 3, 1) == 13);
    CHECK(grassmannian_count(7, 3, 3) == 1);
    CHECK(grassmannian_count(5, 4, 0) == 1);
    CHECK(grassmannian_count(997, 2, 1) == 998);
}

TEST_CASE("subspace enumeration of the projective line over F_2") {
    Fq f2 = Fq::from_order(2);
    auto subs = enumerate_subspaces(f2, 2, 1, Int(1000));
    REQUIRE(subs.size() == 3);
    std::set<std::string> ids;
    for (const auto& s : subs) ids.insert(s.id());
    CHECK(ids == std::set<std::string>{"1;0", "0;1", "1;1"});
}

TEST_CASE("enumeration count matches the Gaussian binomial") {
    for (unsigned q : {2u, 3u, 5u}) {
        Fq fq = Fq::from_order(q);
        for (unsigned t = 1; t <= 4; ++t) {
            for (unsigned s = 1; s <= t; ++s) {
                std::set<std::string> seen;
                Int n = 0;
                for_each_subspace(fq, t, s, Int(1000000), [&](const Subspace& sub) {
                    ++n;
                    seen.insert(sub.id());
                    // canonical RREF: re-reducing changes nothing
                    auto rows = sub.basis;
                    CHECK(rref(fq, rows) == s);
                    CHECK(rows == sub.basis);
                });
                CHECK(n == grassmannian_count(q, t, s));
                CHECK(Int(static_cast<unsigned long>(seen.size())) == n);  // all distinct
            }
        }
    }
}

TEST_CASE("full space is the single s = t subspace") {
    Fq f5 = Fq::from_order(5);
    auto subs = enumerate_subspaces(f5, 3, 3, Int(10));
    REQUIRE(subs.size() == 1);
    for (unsigned i = 0; i < 3; ++i)
        for (unsigned j = 0; j < 3; ++j)
            CHECK(f5.to_index(subs[0].basis[i][j]) == (i == j ? 1 : 0));
}

TEST_CASE("enumeration cap") {
    Fq f5 = Fq::from_order(5);
    CHECK_THROWS_AS(enumerate_subspaces(f5, 4, 2, Int(10)), CapExceeded);
}

TEST_CASE("containment fractions match the counting law within 3/q") {
    // fraction of s-subspaces containing m fixed independent vectors is
    // q^{-m(t-s)} (1 + eps) with |eps| <= 3/q
    for (unsigned q : {3u, 5u}) {
        Fq fq = Fq::from_order(q);
        const unsigned t = 3;
        Rng rng(55);
        for (unsigned s = 1; s <= 2; ++s) {
            for (unsigned m = 1; m <= s; ++m) {
                // fixed independent vectors: rows of a random rank-m matrix
                std::vector<std::vector<Fq::Elem>> fixed;
                do {
                    fixed.assign(m, std::vector<Fq::Elem>(t, fq.zero()));
                    for (auto& row : fixed)
                        for (auto& e : row) e = fq.uniform(rng);
                    auto copy = fixed;
                    if (rref(fq, copy) == m) break;
                } while (true);

                Int total = 0, containing = 0;
                for_each_subspace(fq, t, s, Int(1000000), [&](const Subspace& sub) {
                    ++total;
                    bool all = true;
                    for (const auto& v : fixed)
                        if (!sub.contains(v)) all = false;
                    if (all) ++containing;
                });
                double frac = containing.get_d() / total.get_d();
                double target = std::pow(static_cast<double>(q),
                                         -static_cast<double>(m) * (t - s));
                double eps = frac / target - 1.0;
                CHECK(std::abs(eps) <= 3.0 / q);
            }
        }
    }
}

TEST_CASE("random subspaces: rank, determinism, uniformity") {
    Fq f3 = Fq::from_order(3);

    Rng a(99), b(99);
    for (int i = 0; i < 20; ++i) {
        Subspace s1 = random_subspace(f3, 3, 2, a);
        Subspace s2 = random_subspace(f3, 3, 2, b);
        CHECK(s1 == s2);
        auto rows = s1.basis;
        CHECK(rref(f3, rows) == 2);
    }

    // chi-square style: 13000 draws over the 4 lines of F_3^2, each within
    // 5 sigma of uniform
    Rng rng(123);
    std::map<std::string, int> freq;
    const int draws = 13000;
    for (int i = 0; i < draws; ++i) freq[random_subspace(f3, 2, 1, rng).id()]++;
    REQUIRE(freq.size() == 4);
    double expect = draws / 4.0;
    double sigma = std::sqrt(draws * 0.25 * 0.75);
    for (const auto& [id, n] : freq) CHECK(std::abs(n - expect) <= 5.0 * sigma);
}

TEST_CASE("residue fields of prime-power order") {
    Fq f4 = Fq::from_order(4);
    CHECK(f4.p() == 2);
    CHECK(f4.f() == 2);
    // multiplicative group has order 3
    Fq::Elem x = f4.from_index(2);  // the class of x
    Fq::Elem acc = x;
    int ord = 1;
    while (!(acc == f4.one())) {
        acc = f4.mul(acc, x);
        ++ord;
    }
    CHECK(ord == 3);

    Fq f9 = Fq::from_order(9);
    CHECK(f9.p() == 3);
    CHECK(f9.f() == 2);
    for (Int i = 1; i < 9; ++i) {
        Fq::Elem e = f9.from_index(i);
        CHECK(f9.mul(e, f9.inv(e)) == f9.one());
    }
}
