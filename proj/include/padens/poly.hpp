#pragma once

#include "padens/padic.hpp"

#include <string>
#include <vector>

namespace padens
{
    // Dense univariate polynomial over Q; c[i] is the coefficient of X^i.
    struct QPoly
    {
        std::vector<Rational> c;

        QPoly() = default;
        explicit QPoly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }
        static QPoly monomial(const Rational &a, int deg);

        QPoly &trim();
        int degree() const { return (int)c.size() - 1; } // -1 for zero
        bool is_zero() const { return c.empty(); }
        Rational coeff(int i) const { return i >= 0 && i < (int)c.size() ? c[i] : Rational(0); }
        Rational eval(const Rational &x) const;
        QPoly derivative() const;
        bool integral() const;
        std::vector<Integer> integer_coeffs() const; // throws unless integral

        friend QPoly operator+(const QPoly &a, const QPoly &b);
        friend QPoly operator-(const QPoly &a, const QPoly &b);
        friend QPoly operator*(const QPoly &a, const QPoly &b);
        friend QPoly operator*(const Rational &s, const QPoly &a);
        friend bool operator==(const QPoly &a, const QPoly &b) { return a.c == b.c; }
        friend bool operator!=(const QPoly &a, const QPoly &b) { return !(a == b); }

        std::string str(const std::string &var = "X") const;
    };

    // quotient of exact division; throws VerificationFailure on nonzero remainder
    QPoly exact_divide(const QPoly &num, const QPoly &den);

    // unique polynomial of degree < xs.size() through the points
    QPoly interpolate(const std::vector<Rational> &xs, const std::vector<Rational> &ys);

    // Integer-coefficient polynomial used for density polynomials.
    struct DensityPolynomial
    {
        std::vector<Integer> coeffs;

        static DensityPolynomial from(const QPoly &q);
        QPoly as_qpoly() const;
        Integer eval(const Integer &x) const;
        Integer derived() const; // -(d/dX) at X = 1
        std::string str() const { return as_qpoly().str(); }
        bool operator==(const DensityPolynomial &o) const { return coeffs == o.coeffs; }
    };

    DensityPolynomial parse_poly(const std::string &s); // "1,0,-1" -> 1 - X^2
}
