#include "padens/denpoly.hpp"

#include <functional>

namespace padens
{
    namespace
    {
        void require_odd(const Prime &p, const char *what)
        {
            if (p.is_two())
                throw DomainError(std::string(what) + ": requires an odd prime");
        }

        void require_eps(int eps)
        {
            if (eps != 1 && eps != -1)
                throw DomainError("eps must be +1 or -1");
        }

        bool selfdual_exists(int k, int eps, const Prime &p)
        {
            if (k < 0)
                return false;
            if (k == 0 || p.is_two())
                return eps == 1 && k % 2 == 0;
            return true;
        }

        long nu(const Rational &x, const Prime &p)
        {
            if (x == 0)
                throw DomainError("valuation of zero where a nonzero value is required");
            return *valuation(x, p);
        }

        // ν_p(det 2T) + 2n + 2
        int degree_bound(const QuadLattice &L)
        {
            Rational det2 = L.det() * rpow(2, L.rank());
            return (int)nu(det2, L.p()) + 2 * L.rank() + 2;
        }

        // Interpolate through X = p^{-k}, k = k0 .. k0+D, and confirm two more points.
        DensityPolynomial fit(const Prime &p, int k0, int D, const std::function<Rational(int)> &value,
                              const std::string &what)
        {
            std::vector<Rational> xs, ys;
            for (int k = k0; k <= k0 + D; ++k)
            {
                xs.push_back(rpow(p.value(), -k));
                ys.push_back(value(k));
            }
            QPoly P = interpolate(xs, ys);
            for (int k = k0 + D + 1; k <= k0 + D + 2; ++k)
                if (P.eval(rpow(p.value(), -k)) != value(k))
                    throw VerificationFailure(what + ": held-out evaluation at X = p^-" + std::to_string(k) +
                                              " disagrees with the interpolant " + P.str());
            if (!P.integral())
                throw VerificationFailure(what + ": interpolant has non-integral coefficients " + P.str());
            return DensityPolynomial::from(P);
        }

        // L = M (+) <N> with N the line of largest exponent
        std::pair<QuadLattice, Rational> split_line(const QuadLattice &L)
        {
            const Prime &p = L.p();
            int n = L.rank();
            if (!p.is_two())
            {
                auto diag = diagonalize(L);
                std::vector<Rational> rest;
                for (int i = 0; i + 1 < n; ++i)
                    rest.push_back(diag[i].value);
                return {make_diagonal(rest, p), diag.back().value};
            }
            int best = -1;
            long bv = -1;
            for (int i = 0; i < n; ++i)
            {
                bool isolated = L.at(i, i) != 0;
                for (int j = 0; j < n && isolated; ++j)
                    isolated = j == i || L.at(i, j) == 0;
                if (isolated && *valuation(L.at(i, i), p) > bv)
                    best = i, bv = *valuation(L.at(i, i), p);
            }
            if (best < 0)
                throw DomainError("no orthogonal line summand to split off at p = 2: " + L.str());
            RMatrix M;
            for (int i = 0; i < n; ++i)
            {
                if (i == best)
                    continue;
                std::vector<Rational> row;
                for (int j = 0; j < n; ++j)
                    if (j != best)
                        row.push_back(L.at(i, j));
                M.push_back(row);
            }
            return {QuadLattice(p, M), L.at(best, best)};
        }

        Rational nor_at(int n, int eps, const Prime &p, int k)
        {
            return nor_factor(n, eps, p).eval(rpow(p.value(), -k));
        }

        long max_jordan_exponent(const QuadLattice &L)
        {
            long a = 0;
            for (auto &e : diagonalize(L))
                a = std::max(a, e.exponent);
            return a;
        }
    }

    QuadLattice with_line(const QuadLattice &M, const Rational &N) { return ortho_sum(M, make_rank1(N, M.p())); }

    QPoly nor_factor(int n, int eps, const Prime &p)
    {
        require_eps(eps);
        if (n < 0)
            throw DomainError("nor_factor: n must be non-negative");
        QPoly out({Rational(1)});
        if (n % 2 == 1)
            out = QPoly({Rational(1), Rational(-eps) * rpow(p.value(), -(n + 1) / 2)});
        for (int i = 1; 2 * i < n + 1; ++i)
            out = out * QPoly({Rational(1), Rational(0), -rpow(p.value(), -2 * i)});
        return out;
    }

    Rational den_delta(const Rational &N, int k, int eps, const QuadLattice &M)
    {
        if (!is_integral(N, M.p()))
            throw DomainError("den_delta: N must be integral");
        if (M.rank() == 0)
            return 1;
        return density_form(M.p(), with_delta(selfdual_form(k, eps, M.p()), N), M);
    }

    Rational pden_selfdual(int k, int eps, const QuadLattice &L)
    {
        if (L.rank() != 1)
            throw DomainError("pden_selfdual: only rank-1 targets are supported");
        return pdensity_rank1(L.p(), selfdual_form(k, eps, L.p()), L.at(0, 0));
    }

    Rational primitive_decomposition(int k, int eps, const QuadLattice &M, const Rational &N)
    {
        const Prime &p = M.p();
        require_eps(eps);
        if (k < 4)
            throw DomainError("primitive_decomposition: the ambient rank must be at least 4");
        if (!selfdual_exists(k, eps, p) || !selfdual_exists(k - 4, eps, p))
            throw DomainError("primitive_decomposition: H_k^eps (+) complement not available");
        if (!is_integral(N, p) || N == 0)
            throw DomainError("primitive_decomposition: N must be a nonzero integral value");
        if (M.rank() > 2)
            throw DomainError("primitive_decomposition: M must have rank at most 2");
        long n = nu(N, p);
        int r = M.rank();
        CountingForm H = selfdual_form(k, eps, p);
        Rational sum = 0;
        for (long i = 0; 2 * i <= n; ++i)
        {
            Rational Ni = N * rpow(p.value(), -2 * i);
            Rational term = rpow(p.value(), (2 - k + r) * i) * pdensity_rank1(p, H, Ni);
            if (term == 0)
                continue;
            sum += term * den_delta(Ni, k - 4, eps, M);
        }
        return sum;
    }

    Rational primitive_decomposition(const QuadLattice &H, const QuadLattice &M, const Rational &N)
    {
        if (!(H.p() == M.p()))
            throw DomainError("primitive_decomposition: prime mismatch");
        if (!H.integral() || dual_index(H) != 1)
            throw DomainError("primitive_decomposition: H must be self-dual");
        int eps = H.rank() == 0 ? 1 : chi(H.disc(), H.p());
        return primitive_decomposition(H.rank(), eps, M, N);
    }

    Rational den_selfdual(int k, int eps, const QuadLattice &L)
    {
        if (!L.integral())
            return 0;
        if (L.rank() == 0)
            return 1;
        if (L.rank() <= 2)
            return density_form(L.p(), selfdual_form(k, eps, L.p()), L);
        if (L.rank() == 3)
        {
            auto [M, N] = split_line(L);
            return primitive_decomposition(k, eps, M, N);
        }
        throw DomainError("den_selfdual: targets of rank above 3 are not supported");
    }

    DensityPolynomial den_poly(const QuadLattice &L, int eps)
    {
        const Prime &p = L.p();
        require_eps(eps);
        int n = L.rank();
        if (p.is_two() && (n % 2 == 0 || eps != 1))
            throw DomainError("den_poly at p = 2 requires odd rank and eps = +1");
        if (!L.integral() || !L.nondegenerate())
            throw DomainError("den_poly: L must be integral and nondegenerate");
        // rank 3 needs H_{2k}^eps as the decomposition complement
        int k0 = (n == 3 && !selfdual_exists(0, eps, p)) ? 1 : 0;
        return fit(p, k0, degree_bound(L), [&](int k) -> Rational {
            return den_selfdual(2 * k + n + 1, eps, L) / nor_at(n, eps, p, k);
        }, "den_poly");
    }

    DensityPolynomial den_flat_poly(const QuadLattice &L, int eps)
    {
        const Prime &p = L.p();
        require_eps(eps);
        int n = L.rank();
        if (n < 1)
            throw DomainError("den_flat_poly: rank must be positive");
        if (p.is_two() && (n % 2 == 1 || eps != 1))
            throw DomainError("den_flat_poly at p = 2 requires even rank and eps = +1");
        if (!L.integral() || !L.nondegenerate())
            throw DomainError("den_flat_poly: L must be integral and nondegenerate");
        int chiL = chi_lattice(L);
        int k0 = 0;
        while (!selfdual_exists(2 * k0 + n, eps, p) || (n == 3 && 2 * k0 + n < 4) ||
               (n == 3 && !selfdual_exists(2 * k0 + n - 4, eps, p)))
            ++k0;
        DensityPolynomial raw = fit(p, k0, degree_bound(L), [&](int k) -> Rational {
            Rational x = rpow(p.value(), -k);
            return den_selfdual(2 * k + n, eps, L) / nor_at(n - 1, eps, p, k) * (1 - eps * chiL * x);
        }, "den_flat_poly");
        // the evaluation rule carries an extra (1 - X^2); dividing it out gives the
        // normalization under which the induction and stabilization identities hold
        return DensityPolynomial::from(exact_divide(raw.as_qpoly(), QPoly({Rational(1), Rational(0), Rational(-1)})));
    }

    DensityPolynomial pden_poly(const QuadLattice &L, int eps)
    {
        const Prime &p = L.p();
        require_eps(eps);
        if (L.rank() != 1)
            throw DomainError("pden_poly: only rank-1 lattices are supported");
        if (p.is_two() && eps != 1)
            throw DomainError("pden_poly at p = 2 requires eps = +1");
        if (!L.integral() || !L.nondegenerate())
            throw DomainError("pden_poly: L must be integral and nondegenerate");
        return fit(p, 0, degree_bound(L), [&](int k) -> Rational {
            return pden_selfdual(2 * k + 2, eps, L) / nor_at(1, eps, p, k);
        }, "pden_poly");
    }

    bool incoherent(const QuadLattice &L, int eps)
    {
        return !space_embeds(L.invariants(), selfdual_invariants(L.rank() + 1, eps, L.p()), L.p());
    }

    Integer derived_density(const QuadLattice &L, int eps)
    {
        if (!incoherent(L, eps))
            throw DomainError("derived_density: not incoherent at this prime (L embeds into H_{n+1}^eps)");
        DensityPolynomial P = den_poly(L, eps);
        if (P.eval(1) != 0)
            throw VerificationFailure("derived_density: central value " + to_string(P.eval(1)) + " is nonzero");
        return P.derived();
    }

    Rational rank1_pden_closed(int k, int eps, const Rational &N, const Prime &p)
    {
        require_eps(eps);
        if (k < 1)
            throw DomainError("rank1_pden_closed: k must be positive");
        if (p.is_two() && (k % 2 || eps != 1))
            throw DomainError("rank1_pden_closed at p = 2 holds only for even k and eps = +1");
        if (!is_integral(N, p))
            throw DomainError("rank1_pden_closed: N must be integral");
        long q = p.value();
        bool div = N == 0 || *valuation(N, p) >= 1;
        if (k % 2)
        {
            if (div)
                return 1 - rpow(q, 1 - k);
            return 1 + eps * chi(N, p) * rpow(q, (1 - k) / 2);
        }
        if (div)
            return (1 - eps * rpow(q, -k / 2)) * (1 + eps * rpow(q, 1 - k / 2));
        return 1 - eps * rpow(q, -k / 2);
    }

    DensityPolynomial level_density_direct(const QuadLattice &M, const Rational &N, int eps)
    {
        const Prime &p = M.p();
        require_eps(eps);
        int r = M.rank();
        if (r < 1)
            throw DomainError("level_density_direct: M must have positive rank");
        if (p.is_two() && (r % 2 || eps != 1))
            throw DomainError("level_density at p = 2 requires even rank and eps = +1");
        if (!M.integral() || !is_integral(N, p) || N == 0)
            throw DomainError("level_density_direct: M and N must be integral, N nonzero");
        bool div = nu(N, p) >= 1;
        int m0 = 0;
        while (!selfdual_exists(2 * m0 + r - 2, eps, p))
            ++m0;
        QPoly nor = div ? nor_factor(r - 1, eps, p) : nor_factor(r, eps * (p.is_two() ? 1 : chi(N, p)), p);
        return fit(p, m0, degree_bound(with_line(M, N)), [&](int m) -> Rational {
            return den_delta(N, 2 * m + r - 2, eps, M) / nor.eval(rpow(p.value(), -m));
        }, "level_density_direct");
    }

    DensityPolynomial level_density_diff(const QuadLattice &M, const Rational &N, int eps)
    {
        const Prime &p = M.p();
        if (N == 0)
            throw DomainError("level_density_diff: N must be nonzero");
        QPoly P = den_poly(with_line(M, N), eps).as_qpoly();
        if (nu(N, p) >= 2)
        {
            QPoly Q = den_poly(with_line(M, N / Rational(p.value() * p.value())), eps).as_qpoly();
            P = P - QPoly::monomial(1, 2) * Q;
        }
        return DensityPolynomial::from(P);
    }

    Integer derived_level_density(const QuadLattice &M, const Rational &N)
    {
        const Prime &p = M.p();
        QuadLattice L = with_line(M, N);
        if (!incoherent(L, 1))
            throw DomainError("derived_level_density: M (+) <N> embeds into H_{r+2}^+ (not incoherent)");
        DensityPolynomial P = level_density_direct(M, N, 1);
        if (P.eval(1) != 0)
            throw VerificationFailure("derived_level_density: central value " + to_string(P.eval(1)) +
                                      " is nonzero");
        Integer direct = P.derived();
        Integer diff = derived_density(L, 1);
        if (nu(N, p) >= 2)
            diff -= derived_density(with_line(M, N / Rational(p.value() * p.value())), 1);
        if (direct != diff)
            throw VerificationFailure("derived_level_density: direct route gives " + to_string(direct) +
                                      ", difference route gives " + to_string(diff));
        return direct;
    }

    InductionReport induction_check(const QuadLattice &L, const Rational &N, int eps)
    {
        const Prime &p = L.p();
        require_odd(p, "induction_check");
        InductionReport rep;
        long n = nu(N, p);
        rep.above_threshold = n >= max_jordan_exponent(L) + 2;
        rep.lhs = den_poly(with_line(L, N), eps).as_qpoly();
        QPoly first;
        if (n >= 2)
            first = QPoly::monomial(1, 2) * den_poly(with_line(L, N / Rational(p.value() * p.value())), eps).as_qpoly();
        QPoly flat = QPoly({Rational(1), Rational(0), Rational(-1)}) * den_flat_poly(L, eps).as_qpoly();
        QPoly divisor({Rational(1), Rational(-eps * chi_lattice(L))});
        try
        {
            rep.rhs = first + exact_divide(flat, divisor);
        }
        catch (const VerificationFailure &e)
        {
            rep.holds = false;
            rep.diagnostic = e.what();
            return rep;
        }
        rep.holds = rep.lhs == rep.rhs;
        if (!rep.holds)
            rep.diagnostic = "residual " + (rep.lhs - rep.rhs).str();
        return rep;
    }

    int stable_threshold(const QuadLattice &M, const Rational &N0)
    {
        long ar = max_jordan_exponent(M);
        long v0 = nu(N0, M.p());
        int k = 0;
        while (2 * k <= ar - v0)
            ++k;
        return k;
    }

    DensityPolynomial stable_level_density(const QuadLattice &M, const Rational &N0, int k, int eps)
    {
        const Prime &p = M.p();
        require_odd(p, "stable_level_density");
        if (M.rank() < 2)
            throw DomainError("stable_level_density: M must have rank at least 2");
        if (k < stable_threshold(M, N0))
            throw DomainError("stable_level_density: k = " + std::to_string(k) + " is below the threshold " +
                              std::to_string(stable_threshold(M, N0)));
        QPoly flat = QPoly({Rational(1), Rational(0), Rational(-1)}) * den_flat_poly(M, eps).as_qpoly();
        QPoly divisor({Rational(1), Rational(-eps * chi_lattice(M))});
        return DensityPolynomial::from(exact_divide(flat, divisor));
    }

    Integer int_level(const QuadLattice &M, const Rational &N)
    {
        if (M.rank() != 2)
            throw DomainError("int_level: M must have rank 2");
        if (!M.integral() || !M.nondegenerate())
            throw DomainError("int_level: M must be integral and nondegenerate");
        return derived_level_density(M, N);
    }

    Integer int_sharp(const QuadLattice &L)
    {
        if (L.rank() != 3)
            throw DomainError("int_sharp: L must have rank 3");
        return derived_density(L, 1);
    }
}
