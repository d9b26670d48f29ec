#include "padens/eisenstein.hpp"

#include "padens/denpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace padens
{
    namespace
    {
        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string cur;
            std::istringstream is(s);
            while (std::getline(is, cur, sep))
                out.push_back(cur);
            return out;
        }

        RMatrix2 parse2(const std::string &s, const char *what)
        {
            auto rows = split(s, ';');
            if (rows.size() != 2)
                throw DomainError(std::string(what) + ": expected \"a,b;b,c\"");
            RMatrix2 m;
            for (int i = 0; i < 2; ++i)
            {
                auto cols = split(rows[i], ',');
                if (cols.size() != 2)
                    throw DomainError(std::string(what) + ": expected \"a,b;b,c\"");
                for (int j = 0; j < 2; ++j)
                    m[i][j] = parse_rational(cols[j]);
            }
            if (m[0][1] != m[1][0])
                throw DomainError(std::string(what) + ": matrix is not symmetric");
            return m;
        }

        HalfTwoValue two_power(const Prime &v)
        {
            // |2|_v^{3/2}
            return {1, v.is_two() ? -3 : 0, ""};
        }

        Rational abs_v(const Rational &x, const Prime &v)
        {
            return rpow(v.value(), -*valuation(x, v));
        }
    }

    SymTarget::SymTarget(const Rational &a, const Rational &b, const Rational &c)
    {
        T = {{{a, b}, {b, c}}};
        if (det() == 0)
            throw DomainError("SymTarget: singular T");
    }

    SymTarget SymTarget::parse(const std::string &s)
    {
        RMatrix2 m = parse2(s, "T");
        return SymTarget(m[0][0], m[0][1], m[1][1]);
    }

    QuadLattice SymTarget::at(const Prime &v) const
    {
        return QuadLattice(v, {{T[0][0], T[0][1]}, {T[1][0], T[1][1]}});
    }

    std::string SymTarget::str() const
    {
        return to_string(T[0][0]) + "," + to_string(T[0][1]) + ";" + to_string(T[1][0]) + "," + to_string(T[1][1]);
    }

    Integer psi_index(long N)
    {
        if (N < 1)
            throw DomainError("psi_index: N must be positive");
        Integer num = N, den = 1;
        for (long l : prime_factors(Integer(N)))
        {
            num *= l + 1;
            den *= l;
        }
        return num / den;
    }

    std::vector<long> diff_candidates(const SymTarget &T, long N)
    {
        if (N < 1)
            throw DomainError("diff_set: N must be positive");
        std::set<long> c;
        for (long l : prime_support(Rational(2 * N) * 4 * T.det()))
            c.insert(l);
        for (auto &row : T.T)
            for (auto &x : row)
                if (x != 0)
                    for (long l : prime_support(x))
                        c.insert(l);
        return {c.begin(), c.end()};
    }

    bool represented_at(const SymTarget &T, long N, const Prime &l)
    {
        return space_represents(make_delta(N, l).invariants(), T.at(l).invariants(), l);
    }

    std::vector<long> diff_set(const SymTarget &T, long N)
    {
        if (T.det() == 0)
            throw DomainError("diff_set: singular T");
        std::vector<long> out;
        for (long l : diff_candidates(T, N))
            if (!represented_at(T, N, Prime(l)))
                out.push_back(l);
        return out;
    }

    std::string HalfTwoValue::str() const
    {
        std::string s = to_string(rational);
        if (half_twos != 0 && rational != 0)
            s += " * 2^(" + std::to_string(half_twos) + "/2)";
        return s;
    }

    HalfTwoValue operator*(const HalfTwoValue &a, const HalfTwoValue &b)
    {
        HalfTwoValue r{a.rational * b.rational, a.half_twos + b.half_twos, a.note.empty() ? b.note : a.note};
        if (r.rational == 0)
            r.half_twos = 0;
        // keep the exponent in {-1, 0, 1}: fold whole powers of 2 into the rational part
        while (r.half_twos >= 2 || r.half_twos <= -2)
        {
            int step = r.half_twos > 0 ? 2 : -2;
            r.rational *= step > 0 ? Rational(2) : Rational(1, 2);
            r.half_twos -= step;
        }
        return r;
    }

    HalfTwoValue whittaker_finite(const SymTarget &T, long N, const Prime &v, int k)
    {
        if (k < 0)
            throw DomainError("whittaker_finite: k must be nonnegative");
        QuadLattice M = T.at(v);
        if (!M.integral())
            return {0, 0, "no integral representations"};
        HalfTwoValue c{abs_v(N, v) * hilbert_symbol(Rational(N), Rational(-1), v), 0, ""};
        HalfTwoValue den{den_delta(N, 2 * k, 1, M), 0, ""};
        return c * two_power(v) * den;
    }

    HalfTwoValue whittaker_constant(long N, const Prime &p)
    {
        long q = p.value();
        Rational lead = N % q == 0 ? Rational(q - 1, q) : Rational(q * q - 1, q * q);
        HalfTwoValue c{lead * abs_v(N, p) * hilbert_symbol(Rational(N), Rational(-1), p), 0, ""};
        return c * two_power(p);
    }

    LogMultiple whittaker_derivative(const QuadLattice &M, long N)
    {
        if (M.rank() != 2)
            throw DomainError("whittaker_derivative: M must have rank 2");
        LogMultiple r;
        r.log_prime = M.p().value();
        r.derived = derived_level_density(M, N);
        r.c_p = whittaker_constant(N, M.p());
        r.coefficient = r.c_p * HalfTwoValue{Rational(r.derived), 0, ""};
        return r;
    }

    double ArchFactor::numeric(bool include_qT) const
    {
        double v = sign * std::pow(2.0, two_exponent.get_d()) * std::pow(std::numbers::pi, pi_exponent) *
                   std::pow(det_y.get_d(), 0.75);
        if (include_qT)
            v *= std::exp(-2 * std::numbers::pi * trace_Ty.get_d());
        return v;
    }

    RMatrix2 identity2() { return {{{1, 0}, {0, 1}}}; }

    RMatrix2 parse_matrix2(const std::string &s) { return parse2(s, "y"); }

    ArchFactor whittaker_arch(const SymTarget &T, const RMatrix2 &y)
    {
        if (!T.positive_definite())
            throw DomainError("whittaker_arch: T must be positive definite");
        Rational dy = y[0][0] * y[1][1] - y[0][1] * y[1][0];
        if (y[0][1] != y[1][0] || y[0][0] <= 0 || dy <= 0)
            throw DomainError("whittaker_arch: y must be symmetric positive definite");
        ArchFactor a;
        a.det_y = dy;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                a.trace_Ty += T.T[i][j] * y[j][i];
        return a;
    }

    EisCoefficient eis_coeff_derivative(const SymTarget &T, const RMatrix2 &y, long N, unsigned audit_seed)
    {
        if (!T.positive_definite())
            throw DomainError("eis_coeff_derivative: T must be positive definite");
        EisCoefficient e;
        e.arch = whittaker_arch(T, y);
        e.diff_primes = diff_set(T, N);
        e.scanned = diff_candidates(T, N);
        e.degree_factor = Rational(psi_index(N)) / 24;
        e.finite_product = {1, 0, ""};
        if (e.diff_primes.size() != 1)
        {
            e.zero = true;
            e.finite_product = e.derivative = e.rational_part = e.central_value = e.predicted_degree = {0, 0, ""};
            return e;
        }
        long p = e.diff_primes.front();
        e.zero = false;
        e.derivative_prime = p;
        for (long v : e.scanned)
            if (v != p)
                e.finite_product = e.finite_product * whittaker_finite(T, N, Prime(v), 0);

        QuadLattice Mp = T.at(Prime(p));
        if (!Mp.integral())
            throw DomainError("eis_coeff_derivative: T is not integral at the derivative prime");
        LogMultiple d = whittaker_derivative(Mp, N);
        e.derived = d.derived;
        e.derivative = d.coefficient;
        e.rational_part = e.finite_product * e.derivative;
        e.central_value = e.finite_product * whittaker_finite(T, N, Prime(p), 0);
        e.predicted_degree = HalfTwoValue{-e.degree_factor, 7, ""} * e.rational_part;

        // away from the scanned set every local factor is the unramified one: level density 1
        std::mt19937 rng(audit_seed);
        std::set<long> seen(e.scanned.begin(), e.scanned.end());
        std::vector<long> pool;
        for (long l = 3; l < 60; ++l)
            if (is_prime(l) && !seen.count(l))
                pool.push_back(l);
        std::shuffle(pool.begin(), pool.end(), rng);
        for (size_t i = 0; i < pool.size() && e.audit.size() < 5; ++i)
        {
            Prime l(pool[i]);
            GoodPrimeAudit a;
            a.prime = l.value();
            a.value = whittaker_finite(T, N, l, 0);
            a.unit = level_density_direct(T.at(l), N, 1).as_qpoly() == QPoly({Rational(1)});
            e.audit.push_back(a);
        }
        std::sort(e.audit.begin(), e.audit.end(), [](auto &a, auto &b) { return a.prime < b.prime; });
        return e;
    }
}
