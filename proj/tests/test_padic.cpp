#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "padens/padic.hpp"

#include <random>

using namespace padens;

TEST_CASE("valuations")
{
    CHECK(*valuation(Rational(12), Prime(2)) == 2);
    CHECK_FALSE(valuation(Rational(0), Prime(5)).has_value());
    CHECK(*valuation(Rational(9, 2), Prime(3)) == 2);
    CHECK(*valuation(Rational(5, 27), Prime(3)) == -3);
    CHECK(unit_part(Rational(-50), Prime(5)) == -2);
    CHECK(is_integral(Rational(1, 2), Prime(3)));
    CHECK_FALSE(is_integral(Rational(1, 3), Prime(3)));
}

TEST_CASE("primes are checked at construction")
{
    CHECK_THROWS_AS(Prime(9), DomainError);
    CHECK_THROWS_AS(Prime(1), DomainError);
    CHECK(Prime(101).value() == 101);
}

TEST_CASE("rational parsing and printing")
{
    CHECK(parse_rational("-6/4") == Rational(-3, 2));
    CHECK(to_string(Rational(6, 3)) == "2");
    CHECK(to_string(Rational(-1, 3)) == "-1/3");
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("square classes have canonical representatives")
{
    Prime p3(3), p2(2);
    CHECK(square_class(Rational(4), p3) == square_class(Rational(1), p3));
    CHECK(square_class(Rational(2), p3) != square_class(Rational(1), p3));
    CHECK(square_class(Rational(18), p3).parity == 0);
    CHECK(square_class(Rational(17), p2) == square_class(Rational(1), p2));
    CHECK(square_class(Rational(3), p2) == square_class(Rational(11), p2));
    CHECK(square_class(Rational(3), p2) != square_class(Rational(7), p2));
}

TEST_CASE("square class membership agrees with explicit squares")
{
    for (long p : {2L, 3L, 5L, 7L})
        for (long u = 1; u < 40; ++u)
            for (long v = 1; v < 40; ++v)
            {
                Rational q = Rational(u * v * v);
                CHECK(square_class(q, Prime(p)) == square_class(Rational(u), Prime(p)));
            }
}

TEST_CASE("hilbert symbol examples")
{
    CHECK(hilbert_symbol(Rational(1), Rational(7), Prime(5)) == 1);
    CHECK(hilbert_symbol(Rational(-1), Rational(-1), Prime(2)) == oracle::hilbert(-1, -1, 2));
    CHECK(hilbert_symbol(Rational(-1), Rational(-1), Prime(2)) == -1);
    CHECK(hilbert_symbol(Rational(3), Rational(5), Prime(5)) == oracle::hilbert(3, 5, 5));
    CHECK(hilbert_symbol(Rational(3), Rational(5), Prime(5)) == -1);
    CHECK(hilbert_symbol_inf(Rational(-1), Rational(-3)) == -1);
}

TEST_CASE("hilbert symbol matches the solubility oracle")
{
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> pick(-60, 60);
    for (int t = 0; t < 150; ++t)
    {
        long a = pick(rng), b = pick(rng);
        if (!a || !b)
            continue;
        Rational ra(a, 1 + std::abs(pick(rng)) % 4), rb(b);
        for (long p : {2L, 3L, 5L, 7L, 13L})
        {
            INFO("a=" << to_string(ra) << " b=" << to_string(rb) << " p=" << p);
            CHECK(hilbert_symbol(ra, rb, Prime(p)) == oracle::hilbert(ra, rb, p));
        }
    }
}

TEST_CASE("chi")
{
    for (long p : {3L, 5L, 7L})
        for (long u = 1; u < p; ++u)
            CHECK(chi(Rational(u * u), Prime(p)) == 1);
    CHECK(chi(Rational(3), Prime(3)) == 0);
    CHECK(chi(Rational(2), Prime(3)) == -1);
    // chi(x) = (x, p)_p for even valuation
    for (long x : {2L, 5L, 7L, 18L, 45L, 63L})
        for (long p : {3L, 5L, 7L})
            if (*valuation(Rational(x), Prime(p)) % 2 == 0)
                CHECK(chi(Rational(x), Prime(p)) == oracle::hilbert(x, p, p));
    // homomorphism on units
    for (long a = 1; a < 11; ++a)
        for (long b = 1; b < 11; ++b)
            CHECK(chi(Rational(a * b), Prime(11)) == chi(Rational(a), Prime(11)) * chi(Rational(b), Prime(11)));
}

TEST_CASE("legendre and mod 8")
{
    CHECK(legendre(2, 7) == 1);
    CHECK(legendre(3, 7) == -1);
    CHECK(mod8(Rational(-1)) == 7);
    CHECK(mod8(Rational(1, 3)) == 3);
    CHECK(smallest_nonresidue(Prime(7)) == 3);
    CHECK(smallest_nonresidue(Prime(3)) == 2);
}

TEST_CASE("prime support")
{
    CHECK(prime_support(Rational(12, 35)) == std::vector<long>{2, 3, 5, 7});
    CHECK(prime_factors(Integer(1)).empty());
    CHECK(rpow(3, -2) == Rational(1, 9));
}
