#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace padens
{
    using Integer = mpz_class;
    using Rational = mpq_class;

    // Error taxonomy. The CLI maps these onto exit codes.
    struct DomainError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };
    struct BudgetExceeded : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
    struct VerificationFailure : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
    struct PrecisionExhausted : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    class Prime
    {
    public:
        explicit Prime(long p);
        long value() const { return p_; }
        operator long() const { return p_; }
        bool is_two() const { return p_ == 2; }
        bool operator==(const Prime &o) const { return p_ == o.p_; }
        bool operator<(const Prime &o) const { return p_ < o.p_; }

    private:
        long p_;
    };

    bool is_prime(long n);

    // --- rational plumbing -------------------------------------------------
    std::string to_string(const Integer &x);
    std::string to_string(const Rational &x); // "num/den", den omitted when 1
    Rational parse_rational(const std::string &s);
    Rational make_rational(const Integer &num, const Integer &den = 1);

    Integer ipow(long base, unsigned long e);
    Rational rpow(long base, long e); // base^e, e may be negative

    // nullopt encodes +infinity (x = 0)
    std::optional<long> valuation(const Rational &x, const Prime &p);
    long valuation(const Integer &x, const Prime &p); // x != 0
    long val_or(const Rational &x, const Prime &p, long if_zero);

    // x = p^v * u with u a p-adic unit; returns u
    Rational unit_part(const Rational &x, const Prime &p);

    // p-integrality of a rational
    bool is_integral(const Rational &x, const Prime &p);

    // reduce a p-integral rational mod p^d to [0, p^d)
    long reduce_mod(const Rational &x, const Prime &p, long modulus);

    // Legendre symbol of a p-adic unit rational, p odd
    int legendre(const Rational &u, const Prime &p);
    int legendre(long a, long p);

    // residue of an odd 2-adic unit rational mod 8
    int mod8(const Rational &u);

    // --- square classes, Hilbert symbol, chi -------------------------------
    struct SquareClass
    {
        long unit_part = 1;
        int parity = 0;

        bool operator==(const SquareClass &o) const { return unit_part == o.unit_part && parity == o.parity; }
        bool operator!=(const SquareClass &o) const { return !(*this == o); }
        Rational representative(const Prime &p) const;
        std::string str() const;
    };

    long smallest_nonresidue(const Prime &p);
    SquareClass square_class(const Rational &x, const Prime &p);
    SquareClass mul(const SquareClass &a, const SquareClass &b, const Prime &p);

    int hilbert_symbol(const Rational &a, const Rational &b, const Prime &p);
    int hilbert_symbol_inf(const Rational &a, const Rational &b);
    int hilbert_symbol(const SquareClass &a, const SquareClass &b, const Prime &p);

    int chi(const Rational &x, const Prime &p);
    int chi(const SquareClass &x, const Prime &p);

    // primes dividing the numerator or denominator of x
    std::vector<long> prime_support(const Rational &x);
    std::vector<long> prime_factors(Integer n);
}
