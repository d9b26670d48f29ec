#include "padens/poly.hpp"

#include <sstream>

namespace padens
{
    QPoly QPoly::monomial(const Rational &a, int deg)
    {
        std::vector<Rational> c(deg + 1, Rational(0));
        c[deg] = a;
        return QPoly(c);
    }

    QPoly &QPoly::trim()
    {
        while (!c.empty() && c.back() == 0)
            c.pop_back();
        return *this;
    }

    Rational QPoly::eval(const Rational &x) const
    {
        Rational acc = 0;
        for (int i = degree(); i >= 0; --i)
            acc = acc * x + c[i];
        return acc;
    }

    QPoly QPoly::derivative() const
    {
        std::vector<Rational> d;
        for (size_t i = 1; i < c.size(); ++i)
            d.push_back(c[i] * (long)i);
        return QPoly(d);
    }

    bool QPoly::integral() const
    {
        for (auto &x : c)
            if (x.get_den() != 1)
                return false;
        return true;
    }

    std::vector<Integer> QPoly::integer_coeffs() const
    {
        if (!integral())
            throw VerificationFailure("polynomial has non-integral coefficients: " + str());
        std::vector<Integer> out;
        for (auto &x : c)
            out.push_back(x.get_num());
        return out;
    }

    QPoly operator+(const QPoly &a, const QPoly &b)
    {
        std::vector<Rational> r(std::max(a.c.size(), b.c.size()), Rational(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i)
            r[i] += b.c[i];
        return QPoly(r);
    }

    QPoly operator-(const QPoly &a, const QPoly &b) { return a + Rational(-1) * b; }

    QPoly operator*(const QPoly &a, const QPoly &b)
    {
        if (a.is_zero() || b.is_zero())
            return QPoly();
        std::vector<Rational> r(a.c.size() + b.c.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j)
                r[i + j] += a.c[i] * b.c[j];
        return QPoly(r);
    }

    QPoly operator*(const Rational &s, const QPoly &a)
    {
        std::vector<Rational> r(a.c);
        for (auto &x : r)
            x *= s;
        return QPoly(r);
    }

    std::string QPoly::str(const std::string &var) const
    {
        if (c.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (size_t i = 0; i < c.size(); ++i)
        {
            if (c[i] == 0)
                continue;
            Rational a = c[i];
            bool neg = a < 0;
            if (neg)
                a = -a;
            os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
            first = false;
            if (i == 0 || a != 1)
                os << to_string(a);
            if (i > 0)
            {
                os << (i == 0 || a != 1 ? "*" : "") << var;
                if (i > 1)
                    os << "^" << i;
            }
        }
        return os.str();
    }

    QPoly exact_divide(const QPoly &num, const QPoly &den)
    {
        if (den.is_zero())
            throw DomainError("division by the zero polynomial");
        std::vector<Rational> rem = num.c;
        int dd = den.degree();
        int qd = num.degree() - dd;
        if (qd < 0)
        {
            if (!num.is_zero())
                throw VerificationFailure("inexact polynomial division: " + num.str() + " / " + den.str());
            return QPoly();
        }
        std::vector<Rational> q(qd + 1, Rational(0));
        for (int i = qd; i >= 0; --i)
        {
            Rational f = rem[i + dd] / den.c[dd];
            q[i] = f;
            for (int j = 0; j <= dd; ++j)
                rem[i + j] -= f * den.c[j];
        }
        for (auto &r : rem)
            if (r != 0)
                throw VerificationFailure("inexact polynomial division: " + num.str() + " / " + den.str());
        return QPoly(q);
    }

    QPoly interpolate(const std::vector<Rational> &xs, const std::vector<Rational> &ys)
    {
        // Newton divided differences
        size_t n = xs.size();
        if (ys.size() != n)
            throw DomainError("interpolate: size mismatch");
        std::vector<Rational> dd(ys);
        for (size_t k = 1; k < n; ++k)
            for (size_t i = n - 1; i >= k; --i)
            {
                dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
                if (i == k)
                    break;
            }
        QPoly result;
        for (size_t k = n; k-- > 0;)
        {
            result = result * QPoly({-xs[k], Rational(1)});
            result = result + QPoly({dd[k]});
        }
        return result;
    }

    DensityPolynomial DensityPolynomial::from(const QPoly &q) { return {q.integer_coeffs()}; }

    QPoly DensityPolynomial::as_qpoly() const
    {
        std::vector<Rational> c;
        for (auto &x : coeffs)
            c.emplace_back(x);
        return QPoly(c);
    }

    Integer DensityPolynomial::eval(const Integer &x) const
    {
        Integer acc = 0;
        for (size_t i = coeffs.size(); i-- > 0;)
            acc = acc * x + coeffs[i];
        return acc;
    }

    Integer DensityPolynomial::derived() const
    {
        Integer acc = 0;
        for (size_t i = 1; i < coeffs.size(); ++i)
            acc += coeffs[i] * (long)i;
        return -acc;
    }

    DensityPolynomial parse_poly(const std::string &s)
    {
        DensityPolynomial p;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            p.coeffs.push_back(Integer(tok));
        while (!p.coeffs.empty() && p.coeffs.back() == 0)
            p.coeffs.pop_back();
        return p;
    }
}
