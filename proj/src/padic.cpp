#include "padens/padic.hpp"

#include <algorithm>
#include <cstdlib>

namespace padens
{
    bool is_prime(long n)
    {
        if (n < 2)
            return false;
        for (long d = 2; d * d <= n; ++d)
            if (n % d == 0)
                return false;
        return true;
    }

    Prime::Prime(long p) : p_(p)
    {
        if (!is_prime(p))
            throw DomainError("not a prime: " + std::to_string(p));
    }

    std::string to_string(const Integer &x) { return x.get_str(); }

    std::string to_string(const Rational &raw)
    {
        Rational x = raw;
        x.canonicalize();
        if (x.get_den() == 1)
            return x.get_num().get_str();
        return x.get_num().get_str() + "/" + x.get_den().get_str();
    }

    Rational parse_rational(const std::string &raw)
    {
        std::string s;
        for (char c : raw)
            if (c != ' ')
                s += c;
        if (s.empty())
            throw DomainError("empty rational");
        auto slash = s.find('/');
        try
        {
            Integer num(s.substr(0, slash));
            Integer den = 1;
            if (slash != std::string::npos)
                den = Integer(s.substr(slash + 1));
            if (den == 0)
                throw DomainError("zero denominator in '" + raw + "'");
            return make_rational(num, den);
        }
        catch (const std::invalid_argument &)
        {
            throw DomainError("malformed rational '" + raw + "'");
        }
    }

    Rational make_rational(const Integer &num, const Integer &den)
    {
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    Integer ipow(long base, unsigned long e)
    {
        Integer r;
        mpz_ui_pow_ui(r.get_mpz_t(), std::labs(base), e);
        if (base < 0 && (e & 1))
            r = -r;
        return r;
    }

    Rational rpow(long base, long e)
    {
        if (e >= 0)
            return Rational(ipow(base, e));
        return make_rational(1, ipow(base, -e));
    }

    long valuation(const Integer &x, const Prime &p)
    {
        if (x == 0)
            throw DomainError("valuation of zero integer");
        Integer pp = p.value();
        return (long)mpz_remove(Integer().get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t());
    }

    std::optional<long> valuation(const Rational &x, const Prime &p)
    {
        if (x == 0)
            return std::nullopt;
        return valuation(x.get_num(), p) - valuation(x.get_den(), p);
    }

    long val_or(const Rational &x, const Prime &p, long if_zero)
    {
        auto v = valuation(x, p);
        return v ? *v : if_zero;
    }

    Rational unit_part(const Rational &x, const Prime &p)
    {
        if (x == 0)
            throw DomainError("unit part of zero");
        Integer pp = p.value(), n, d;
        mpz_remove(n.get_mpz_t(), x.get_num().get_mpz_t(), pp.get_mpz_t());
        mpz_remove(d.get_mpz_t(), x.get_den().get_mpz_t(), pp.get_mpz_t());
        return make_rational(n, d);
    }

    bool is_integral(const Rational &x, const Prime &p)
    {
        return x == 0 || mpz_divisible_ui_p(x.get_den().get_mpz_t(), p.value()) == 0;
    }

    long reduce_mod(const Rational &x, const Prime &p, long modulus)
    {
        if (!is_integral(x, p))
            throw DomainError("reduce_mod: " + to_string(x) + " is not " + std::to_string(p.value()) + "-integral");
        Integer m = modulus, inv, r;
        if (mpz_invert(inv.get_mpz_t(), x.get_den().get_mpz_t(), m.get_mpz_t()) == 0)
        {
            if (modulus == 1)
                return 0;
            throw DomainError("reduce_mod: denominator not invertible");
        }
        r = x.get_num() * inv;
        mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
        return r.get_si();
    }

    int legendre(long a, long p)
    {
        Integer A = a, P = p;
        return mpz_legendre(A.get_mpz_t(), P.get_mpz_t());
    }

    int legendre(const Rational &u, const Prime &p)
    {
        Integer P = p.value();
        int s = mpz_legendre(u.get_num().get_mpz_t(), P.get_mpz_t()) * mpz_legendre(u.get_den().get_mpz_t(), P.get_mpz_t());
        if (s == 0)
            throw DomainError("legendre of a non-unit");
        return s;
    }

    int mod8(const Rational &u)
    {
        // odd squares are 1 mod 8, so den^{-1} = den mod 8
        long n = mpz_fdiv_ui(u.get_num().get_mpz_t(), 8);
        long d = mpz_fdiv_ui(u.get_den().get_mpz_t(), 8);
        if (n % 2 == 0 || d % 2 == 0)
            throw DomainError("mod8 of a non-unit");
        return (int)((n * d) % 8);
    }

    long smallest_nonresidue(const Prime &p)
    {
        if (p.is_two())
            throw DomainError("no quadratic non-residue class for p = 2");
        for (long a = 2;; ++a)
            if (legendre(a, p.value()) == -1)
                return a;
    }

    Rational SquareClass::representative(const Prime &p) const
    {
        return Rational(unit_part) * (parity ? Rational(p.value()) : Rational(1));
    }

    std::string SquareClass::str() const
    {
        return std::to_string(unit_part) + (parity ? "*p" : "");
    }

    SquareClass square_class(const Rational &x, const Prime &p)
    {
        if (x == 0)
            throw DomainError("square class of zero");
        SquareClass c;
        c.parity = (int)(((*valuation(x, p)) % 2 + 2) % 2);
        Rational u = unit_part(x, p);
        if (p.is_two())
            c.unit_part = mod8(u);
        else
            c.unit_part = legendre(u, p) == 1 ? 1 : smallest_nonresidue(p);
        return c;
    }

    SquareClass mul(const SquareClass &a, const SquareClass &b, const Prime &p)
    {
        return square_class(a.representative(p) * b.representative(p), p);
    }

    namespace
    {
        int eps2(long u) { return ((u - 1) / 2) & 1; }      // (u-1)/2 mod 2
        int omega2(long u) { return ((u * u - 1) / 8) & 1; } // (u^2-1)/8 mod 2
    }

    int hilbert_symbol(const Rational &a, const Rational &b, const Prime &p)
    {
        if (a == 0 || b == 0)
            throw DomainError("hilbert symbol of zero");
        long alpha = *valuation(a, p), beta = *valuation(b, p);
        Rational u = unit_part(a, p), v = unit_part(b, p);
        if (p.is_two())
        {
            long U = mod8(u), V = mod8(v);
            int e = eps2(U) * eps2(V) + (alpha & 1) * omega2(V) + (beta & 1) * omega2(U);
            return (e & 1) ? -1 : 1;
        }
        long ep = (p.value() - 1) / 2;
        int s = ((alpha & 1) && (beta & 1) && (ep & 1)) ? -1 : 1;
        if (beta & 1)
            s *= legendre(u, p);
        if (alpha & 1)
            s *= legendre(v, p);
        return s;
    }

    int hilbert_symbol_inf(const Rational &a, const Rational &b)
    {
        if (a == 0 || b == 0)
            throw DomainError("hilbert symbol of zero");
        return (a < 0 && b < 0) ? -1 : 1;
    }

    int hilbert_symbol(const SquareClass &a, const SquareClass &b, const Prime &p)
    {
        return hilbert_symbol(a.representative(p), b.representative(p), p);
    }

    int chi(const Rational &x, const Prime &p)
    {
        if (x == 0)
            throw DomainError("chi of zero");
        if (*valuation(x, p) % 2 != 0)
            return 0;
        return hilbert_symbol(x, Rational(p.value()), p);
    }

    int chi(const SquareClass &x, const Prime &p) { return chi(x.representative(p), p); }

    std::vector<long> prime_factors(Integer n)
    {
        std::vector<long> out;
        if (n < 0)
            n = -n;
        for (long d = 2; n > 1; ++d)
        {
            if (Integer(d) * d > n)
            {
                if (!n.fits_slong_p())
                    throw DomainError("prime_factors: cofactor too large");
                out.push_back(n.get_si());
                break;
            }
            if (mpz_divisible_ui_p(n.get_mpz_t(), d))
            {
                out.push_back(d);
                while (mpz_divisible_ui_p(n.get_mpz_t(), d))
                    n /= d;
            }
        }
        return out;
    }

    std::vector<long> prime_support(const Rational &x)
    {
        auto a = prime_factors(x.get_num());
        auto b = prime_factors(x.get_den());
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        return a;
    }
}
