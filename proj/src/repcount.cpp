#include "padens/repcount.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>

namespace padens
{
    Integer &enumeration_budget()
    {
        static Integer budget = Integer(1000000000);
        return budget;
    }

    void check_budget(const Integer &work, const std::string &what)
    {
        if (work > enumeration_budget())
            throw BudgetExceeded(what + ": needs " + to_string(work) + " operations, budget is " +
                                 to_string(enumeration_budget()));
    }

    long norm_exponent(int m, int n, int d) { return (long)d * ((long)m * n - (long)n * (n + 1) / 2); }

    namespace
    {
        struct ModForm
        {
            long q;
            int m;
            std::vector<long> quad; // q(x) = sum quad[i][j] x_i x_j over i <= j, row-major upper triangle
            std::vector<long> bil;  // (x, y) = sum bil[i][j] x_i y_j
        };

        ModForm mod_form(const QuadLattice &S, long q)
        {
            ModForm f{q, S.rank(), {}, {}};
            int m = f.m;
            f.quad.assign(m * m, 0);
            f.bil.assign(m * m, 0);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                {
                    long twice = reduce_mod(Rational(2 * S.at(i, j)), S.p(), q);
                    f.bil[i * m + j] = twice;
                    if (i == j)
                        f.quad[i * m + i] = reduce_mod(S.at(i, i), S.p(), q);
                    else if (i < j)
                        f.quad[i * m + j] = twice;
                }
            return f;
        }

        void require_integral(const QuadLattice &S, const QuadLattice &T)
        {
            if (!(S.p() == T.p()))
                throw DomainError("prime mismatch between S and T");
            if (!S.integral() || !T.integral())
                throw DomainError("S and T must be integral");
        }

        // rank mod p of the column vectors (entries mod q)
        int rank_mod_p(std::vector<std::vector<long>> cols, long p)
        {
            int rank = 0;
            size_t m = cols.empty() ? 0 : cols[0].size();
            for (auto &c : cols)
                for (auto &x : c)
                    x %= p;
            for (size_t r = 0; r < m && rank < (int)cols.size(); ++r)
            {
                int piv = -1;
                for (int c = rank; c < (int)cols.size(); ++c)
                    if (cols[c][r] % p)
                    {
                        piv = c;
                        break;
                    }
                if (piv < 0)
                    continue;
                std::swap(cols[piv], cols[rank]);
                long inv = 1;
                for (long t = 1; t < p; ++t)
                    if ((cols[rank][r] * t) % p == 1)
                        inv = t;
                for (int c = 0; c < (int)cols.size(); ++c)
                {
                    if (c == rank || cols[c][r] % p == 0)
                        continue;
                    long f = (cols[c][r] * inv) % p;
                    for (size_t k = 0; k < m; ++k)
                        cols[c][k] = ((cols[c][k] - f * cols[rank][k]) % p + p) % p;
                }
                ++rank;
            }
            return rank;
        }

        RepCount brute(const QuadLattice &S, const QuadLattice &T, int d, bool primitive)
        {
            require_integral(S, T);
            if (d < 1)
                throw DomainError("precision d must be positive");
            const Prime &p = S.p();
            int m = S.rank(), n = T.rank();
            RepCount out;
            out.d = d;
            out.norm_exponent = norm_exponent(m, n, d);
            if (n == 0)
            {
                out.count = 1;
                return out;
            }
            check_budget(ipow(p.value(), (unsigned long)d * m * n), "brute-force count");
            long q = ipow(p.value(), d).get_si();
            ModForm f = mod_form(S, q);

            // every vector of (Z/q)^m, bucketed by q(x)
            long total = ipow(q, m).get_si();
            std::vector<std::vector<long>> vecs(total, std::vector<long>(m));
            std::map<long, std::vector<long>> bucket;
            for (long idx = 0; idx < total; ++idx)
            {
                long t = idx;
                for (int i = 0; i < m; ++i)
                {
                    vecs[idx][i] = t % q;
                    t /= q;
                }
                long v = 0;
                for (int i = 0; i < m; ++i)
                    for (int j = i; j < m; ++j)
                        v = (v + f.quad[i * m + j] * (vecs[idx][i] * vecs[idx][j] % q)) % q;
                bucket[v].push_back(idx);
            }
            auto bilinear = [&](long x, long y) {
                long v = 0;
                for (int i = 0; i < m; ++i)
                {
                    if (!vecs[x][i])
                        continue;
                    for (int j = 0; j < m; ++j)
                        v = (v + f.bil[i * m + j] * (vecs[x][i] * vecs[y][j] % q)) % q;
                }
                return v;
            };

            std::vector<long> diag(n);
            std::vector<std::vector<long>> off(n, std::vector<long>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                {
                    if (i == j)
                        diag[i] = reduce_mod(T.at(i, i), p, q);
                    else
                        off[i][j] = reduce_mod(Rational(2 * T.at(i, j)), p, q);
                }

            std::vector<long> chosen(n);
            std::uint64_t count = 0;
            auto rec = [&](auto &&self, int col) -> void {
                if (col == n)
                {
                    if (primitive)
                    {
                        std::vector<std::vector<long>> cols;
                        for (long c : chosen)
                            cols.push_back(vecs[c]);
                        if (rank_mod_p(cols, p.value()) < n)
                            return;
                    }
                    ++count;
                    return;
                }
                auto it = bucket.find(diag[col]);
                if (it == bucket.end())
                    return;
                for (long cand : it->second)
                {
                    bool ok = true;
                    for (int prev = 0; prev < col && ok; ++prev)
                        ok = bilinear(chosen[prev], cand) == off[prev][col];
                    if (!ok)
                        continue;
                    chosen[col] = cand;
                    self(self, col + 1);
                }
            };
            rec(rec, 0);
            out.count = Integer(std::to_string(count));
            return out;
        }
    }

    RepCount count_reps_bruteforce(const QuadLattice &S, const QuadLattice &T, int d) { return brute(S, T, d, false); }
    RepCount count_primitive_bruteforce(const QuadLattice &S, const QuadLattice &T, int d) { return brute(S, T, d, true); }

    // ---------------------------------------------------------------- structure

    std::optional<CountingForm> counting_form(const QuadLattice &S)
    {
        const Prime &p = S.p();
        if (!S.integral())
            return std::nullopt;
        CountingForm f;
        int m = S.rank();
        if (m == 0)
            return f;
        if (!p.is_two())
        {
            if (!S.nondegenerate())
                return std::nullopt;
            std::vector<Rational> units;
            for (auto &e : diagonalize(S))
                (e.exponent == 0 ? units : f.lines).push_back(e.value);
            long r = (long)units.size();
            if (r == 0)
                return f;
            Rational delta = 1;
            for (auto &u : units)
                delta *= u;
            if (r % 2 == 1)
            {
                f.planes = (int)(r - 1) / 2;
                f.lines.push_back(f.planes % 2 ? Rational(-delta) : delta);
            }
            else
            {
                long sgn = (r / 2) % 2 ? -1 : 1;
                if (legendre(Rational(sgn * delta), p) == 1)
                    f.planes = (int)r / 2;
                else
                {
                    f.planes = (int)r / 2 - 1;
                    f.lines.push_back(1);
                    f.lines.push_back(f.planes % 2 ? Rational(-delta) : delta);
                }
            }
            return f;
        }
        // p = 2: accept only orthogonal sums of lines and hyperbolic planes
        std::vector<bool> used(m, false);
        for (int i = 0; i < m; ++i)
        {
            if (used[i])
                continue;
            std::vector<int> nb;
            for (int j = 0; j < m; ++j)
                if (j != i && S.at(i, j) != 0)
                    nb.push_back(j);
            if (nb.empty())
            {
                used[i] = true;
                if (S.at(i, i) != 0)
                    f.lines.push_back(S.at(i, i));
                continue;
            }
            if (nb.size() != 1)
                return std::nullopt;
            int j = nb[0];
            for (int k = 0; k < m; ++k)
                if (k != i && k != j && S.at(j, k) != 0)
                    return std::nullopt;
            Rational h2 = 2 * S.at(i, j);
            if (*valuation(h2, p) != 0)
                return std::nullopt;
            // even unimodular plane; hyperbolic iff a*c is even
            Rational ac = S.at(i, i) * S.at(j, j);
            if (ac != 0 && *valuation(ac, p) == 0)
                return std::nullopt;
            used[i] = used[j] = true;
            ++f.planes;
        }
        return f;
    }

    CountingForm selfdual_form(int k, int eps, const Prime &p)
    {
        CountingForm f;
        if (k == 0)
        {
            if (eps != 1)
                throw DomainError("H_0^- does not exist");
            return f;
        }
        if (p.is_two())
        {
            if (k % 2 || eps != 1)
                throw DomainError("at p = 2 only H_{2n}^+ is available");
            f.planes = k / 2;
            return f;
        }
        auto c = counting_form(make_selfdual(k, eps, p));
        return *c;
    }

    CountingForm with_delta(CountingForm f, const Rational &N)
    {
        f.lines.push_back(-N);
        f.planes += 1;
        return f;
    }

    // ------------------------------------------------------------- distributions

    ValueDistribution value_distribution(const QuadLattice &S, int d)
    {
        const Prime &p = S.p();
        if (!S.integral())
            throw DomainError("value_distribution: S must be integral");
        long q = ipow(p.value(), d).get_si();
        ValueDistribution out;
        out.d = d;
        auto form = counting_form(S);
        if (!form)
        {
            check_budget(ipow(q, S.rank()), "value distribution");
            RepCount dummy;
            std::vector<Integer> table(q, Integer(0));
            ModForm f = mod_form(S, q);
            int m = S.rank();
            long total = ipow(q, m).get_si();
            std::vector<long> x(m);
            for (long idx = 0; idx < total; ++idx)
            {
                long t = idx;
                for (int i = 0; i < m; ++i)
                {
                    x[i] = t % q;
                    t /= q;
                }
                long v = 0;
                for (int i = 0; i < m; ++i)
                    for (int j = i; j < m; ++j)
                        v = (v + f.quad[i * m + j] * (x[i] * x[j] % q)) % q;
                table[v] += 1;
            }
            out.table = table;
            return out;
        }
        check_budget(Integer(q) * q * (form->lines.size() + form->planes + 1), "value distribution");
        std::vector<Integer> acc(q, Integer(0));
        acc[0] = 1;
        auto convolve = [&](const std::vector<long> &block) {
            std::vector<Integer> next(q, Integer(0));
            for (long a = 0; a < q; ++a)
            {
                if (acc[a] == 0)
                    continue;
                for (long b = 0; b < q; ++b)
                    if (block[b])
                        next[(a + b) % q] += acc[a] * block[b];
            }
            acc.swap(next);
        };
        for (auto &c : form->lines)
        {
            long cm = reduce_mod(c, p, q);
            std::vector<long> block(q, 0);
            for (long x = 0; x < q; ++x)
                block[(cm * (x * x % q)) % q] += 1;
            convolve(block);
        }
        if (form->planes)
        {
            std::vector<long> block(q, 0);
            for (long x = 0; x < q; ++x)
                for (long y = 0; y < q; ++y)
                    block[x * y % q] += 1;
            for (int i = 0; i < form->planes; ++i)
                convolve(block);
        }
        out.table = acc;
        return out;
    }

    // ------------------------------------------------------------------ densities

    Rational eval_planes(const QPoly &census, const Prime &p, int planes)
    {
        return census.eval(rpow(p.value(), -planes));
    }

    RepCount count_reps_fast(const QuadLattice &S, const QuadLattice &T, int d)
    {
        require_integral(S, T);
        if (T.rank() > 2)
            throw DomainError("count_reps_fast: target rank must be at most 2");
        auto form = counting_form(S);
        if (!form)
            throw DomainError("count_reps_fast: S is not a sum of lines and hyperbolic planes");
        RepCount out;
        out.d = d;
        out.norm_exponent = norm_exponent(S.rank(), T.rank(), d);
        Rational den = eval_planes(density_census(S.p(), form->lines, T, d), S.p(), form->planes);
        Rational c = den * rpow(S.p().value(), out.norm_exponent);
        if (c.get_den() != 1 || c < 0)
            throw VerificationFailure("count_reps_fast produced a non-integral count " + to_string(c));
        out.count = c.get_num();
        return out;
    }

    Rational density_form(const Prime &p, const CountingForm &S, const QuadLattice &T)
    {
        if (T.rank() == 0)
            return 1;
        if (!T.integral())
            return 0;
        return eval_planes(stable_census(p, S.lines, T), p, S.planes);
    }

    Rational pdensity_rank1(const Prime &p, const CountingForm &S, const Rational &N)
    {
        Rational den = density_form(p, S, make_rank1(N, p));
        if (N == 0 || *valuation(N, p) < 2)
            return den;
        Rational inner = N / Rational(p.value() * p.value());
        return den - rpow(p.value(), 2 - S.rank()) * density_form(p, S, make_rank1(inner, p));
    }

    namespace
    {
        Rational brute_stable(const QuadLattice &S, const QuadLattice &T, bool primitive)
        {
            int d = stable_depth(T);
            Rational prev = brute(S, T, d, primitive).normalized(S.p());
            for (int tries = 0; tries < 8; ++tries)
            {
                Rational next = brute(S, T, d + 1, primitive).normalized(S.p());
                if (next == prev)
                    return next;
                prev = next;
                ++d;
            }
            throw VerificationFailure("brute-force density did not stabilize");
        }
    }

    Rational density(const QuadLattice &S, const QuadLattice &T, DensityOptions opt)
    {
        require_integral(S, T);
        if (T.rank() == 0)
            return 1;
        if (!T.nondegenerate())
            throw DomainError("density: T must be nondegenerate");
        if (!opt.brute && T.rank() <= 2)
            if (auto f = counting_form(S))
                return density_form(S.p(), *f, T);
        return brute_stable(S, T, false);
    }

    Rational pdensity(const QuadLattice &S, const QuadLattice &T, DensityOptions opt)
    {
        require_integral(S, T);
        if (T.rank() == 0)
            return 1;
        if (!T.nondegenerate())
            throw DomainError("pdensity: T must be nondegenerate");
        if (!opt.brute && T.rank() == 1)
            if (auto f = counting_form(S))
                return pdensity_rank1(S.p(), *f, T.at(0, 0));
        return brute_stable(S, T, true);
    }
}
