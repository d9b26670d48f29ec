#include "padens/qlattice.hpp"

#include <algorithm>
#include <sstream>

namespace padens
{
    namespace
    {
        RMatrix zeros(int n) { return RMatrix(n, std::vector<Rational>(n, Rational(0))); }

        // symmetric elementary operations on a square matrix
        void add_to(RMatrix &A, int dst, int src, const Rational &f)
        {
            int n = (int)A.size();
            for (int c = 0; c < n; ++c)
                A[dst][c] += f * A[src][c];
            for (int r = 0; r < n; ++r)
                A[r][dst] += f * A[r][src];
        }

        // Diagonalize by congruence. With p-adic pivoting the basis change is in GL_n(Z_p).
        std::vector<Rational> congruence_diagonal(RMatrix A, const Prime *padic)
        {
            int n = (int)A.size();
            std::vector<int> active(n);
            for (int i = 0; i < n; ++i)
                active[i] = i;
            std::vector<Rational> out;
            while (!active.empty())
            {
                int bi = -1, bj = -1;
                long best = 0;
                for (int i : active)
                    for (int j : active)
                    {
                        if (j < i || A[i][j] == 0)
                            continue;
                        long v = padic ? *valuation(A[i][j], *padic) : 0;
                        bool better = bi < 0 || v < best || (v == best && bi != bj && i == j);
                        if (better)
                            bi = i, bj = j, best = v;
                    }
                if (bi < 0)
                {
                    for (size_t k = 0; k < active.size(); ++k)
                        out.push_back(0);
                    break;
                }
                if (bi != bj)
                {
                    // p odd (or rational): q(x_i + x_j) picks up 2*T_ij
                    add_to(A, bi, bj, 1);
                    if (A[bi][bi] == 0)
                        add_to(A, bi, bj, -2);
                }
                const Rational piv = A[bi][bi];
                for (int k : active)
                {
                    if (k == bi || A[k][bi] == 0)
                        continue;
                    add_to(A, k, bi, -A[k][bi] / piv);
                }
                out.push_back(piv);
                active.erase(std::find(active.begin(), active.end(), bi));
            }
            return out;
        }
    }

    Rational determinant(RMatrix m)
    {
        int n = (int)m.size();
        Rational det = 1;
        for (int c = 0; c < n; ++c)
        {
            int piv = -1;
            for (int r = c; r < n; ++r)
                if (m[r][c] != 0)
                {
                    piv = r;
                    break;
                }
            if (piv < 0)
                return 0;
            if (piv != c)
            {
                std::swap(m[piv], m[c]);
                det = -det;
            }
            det *= m[c][c];
            for (int r = c + 1; r < n; ++r)
            {
                if (m[r][c] == 0)
                    continue;
                Rational f = m[r][c] / m[c][c];
                for (int k = c; k < n; ++k)
                    m[r][k] -= f * m[c][k];
            }
        }
        return det;
    }

    QuadLattice::QuadLattice(Prime p, RMatrix half_gram) : p_(p), T_(std::move(half_gram))
    {
        int n = (int)T_.size();
        for (auto &row : T_)
            if ((int)row.size() != n)
                throw DomainError("half-Gram matrix is not square");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                if (T_[i][j] != T_[j][i])
                    throw DomainError("half-Gram matrix is not symmetric");
    }

    bool QuadLattice::integral() const
    {
        for (int i = 0; i < rank(); ++i)
            for (int j = 0; j < rank(); ++j)
                if (!is_integral(i == j ? T_[i][j] : Rational(2 * T_[i][j]), p_))
                    return false;
        return true;
    }

    Rational QuadLattice::det() const { return determinant(T_); }

    Rational QuadLattice::disc() const
    {
        long n = rank();
        Rational d = det();
        return ((n * (n - 1) / 2) % 2) ? Rational(-d) : d;
    }

    SpaceInvariants QuadLattice::invariants() const
    {
        if (!nondegenerate())
            throw DomainError("invariants of a degenerate lattice");
        return invariants_of_diagonal(rational_diagonal(*this), p_);
    }

    std::string QuadLattice::str() const
    {
        std::ostringstream os;
        os << "[";
        for (int i = 0; i < rank(); ++i)
        {
            os << (i ? ";" : "");
            for (int j = 0; j < rank(); ++j)
                os << (j ? "," : "") << to_string(T_[i][j]);
        }
        os << "]@" << p_.value();
        return os.str();
    }

    SpaceInvariants invariants_of_diagonal(const std::vector<Rational> &d, const Prime &p)
    {
        SpaceInvariants inv;
        inv.dim = (int)d.size();
        Rational det = 1;
        for (size_t i = 0; i < d.size(); ++i)
        {
            if (d[i] == 0)
                throw DomainError("degenerate space");
            det *= d[i];
            for (size_t j = i + 1; j < d.size(); ++j)
                inv.hasse *= hilbert_symbol(d[i], d[j], p);
        }
        long n = inv.dim;
        Rational disc = ((n * (n - 1) / 2) % 2) ? Rational(-det) : det;
        inv.disc = square_class(disc, p);
        inv.chi_disc = chi(disc, p);
        return inv;
    }

    QuadLattice zero_lattice(const Prime &p) { return QuadLattice(p, {}); }

    QuadLattice make_hyperbolic(int k, const Prime &p)
    {
        if (k < 0)
            throw DomainError("negative hyperbolic rank");
        RMatrix T = zeros(2 * k);
        for (int b = 0; b < k; ++b)
            T[2 * b][2 * b + 1] = T[2 * b + 1][2 * b] = Rational(1, 2);
        return QuadLattice(p, T);
    }

    QuadLattice make_selfdual(int k, int eps, const Prime &p)
    {
        if (p.is_two())
            throw DomainError("make_selfdual: only H_{2n}^+ exists at p = 2; use make_hyperbolic");
        if (k < 1)
            throw DomainError("make_selfdual: rank must be positive");
        if (eps != 1 && eps != -1)
            throw DomainError("make_selfdual: eps must be +1 or -1");
        long sgn = ((long)k * (k - 1) / 2) % 2 ? -1 : 1;
        long u = 1;
        if (legendre(sgn, p.value()) != eps)
            u = smallest_nonresidue(p);
        std::vector<Rational> e(k, Rational(1));
        e.back() = u;
        return make_diagonal(e, p);
    }

    QuadLattice make_rank1(const Rational &N, const Prime &p) { return QuadLattice(p, {{N}}); }

    QuadLattice make_delta(const Rational &N, const Prime &p)
    {
        if (!is_integral(N, p))
            throw DomainError("make_delta: N must be p-integral");
        Rational h(-1, 2);
        return QuadLattice(p, {{-N, 0, 0}, {0, 0, h}, {0, h, 0}});
    }

    QuadLattice make_diagonal(const std::vector<Rational> &entries, const Prime &p)
    {
        RMatrix T = zeros((int)entries.size());
        for (size_t i = 0; i < entries.size(); ++i)
            T[i][i] = entries[i];
        return QuadLattice(p, T);
    }

    QuadLattice ortho_sum(const QuadLattice &a, const QuadLattice &b)
    {
        if (!(a.p() == b.p()))
            throw DomainError("ortho_sum: prime mismatch");
        int n = a.rank(), m = b.rank();
        RMatrix T = zeros(n + m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                T[i][j] = a.at(i, j);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                T[n + i][n + j] = b.at(i, j);
        return QuadLattice(a.p(), T);
    }

    Integer dual_index(const QuadLattice &L)
    {
        if (!L.integral())
            throw DomainError("dual_index: lattice not integral");
        Rational d = L.det() * rpow(2, L.rank());
        if (d == 0)
            throw DomainError("dual_index: degenerate lattice");
        return ipow(L.p().value(), *valuation(d, L.p()));
    }

    std::vector<Rational> rational_diagonal(const QuadLattice &L)
    {
        return congruence_diagonal(L.half_gram(), nullptr);
    }

    std::vector<Rational> padic_diagonal(const QuadLattice &L)
    {
        if (L.p().is_two())
            throw DomainError("padic_diagonal: p must be odd");
        return congruence_diagonal(L.half_gram(), &L.p());
    }

    std::vector<JordanEntry> diagonalize(const QuadLattice &L)
    {
        if (L.p().is_two())
            throw DomainError("diagonalize: p = 2 has no diagonal Jordan form in general");
        if (!L.nondegenerate())
            throw DomainError("diagonalize: degenerate lattice");
        auto d = congruence_diagonal(L.half_gram(), &L.p());
        std::vector<JordanEntry> out;
        for (auto &x : d)
            out.push_back({x, square_class(unit_part(x, L.p()), L.p()), *valuation(x, L.p())});
        std::stable_sort(out.begin(), out.end(), [](auto &a, auto &b) { return a.exponent < b.exponent; });
        return out;
    }

    int chi_lattice(const QuadLattice &L)
    {
        if (L.rank() == 0)
            return 1;
        return chi(L.disc(), L.p());
    }

    namespace
    {
        Rational det_rep(const SpaceInvariants &s, const Prime &p)
        {
            long n = s.dim;
            Rational d = s.disc.representative(p);
            return ((n * (n - 1) / 2) % 2) ? Rational(-d) : d;
        }
    }

    bool space_embeds(const SpaceInvariants &U, const SpaceInvariants &W, const Prime &p)
    {
        int c = W.dim - U.dim;
        if (c < 0)
            return false;
        Rational dU = det_rep(U, p), dW = det_rep(W, p);
        if (c == 0)
            return U.disc == W.disc && U.hasse == W.hasse;
        Rational delta = dW / dU;
        if (c == 1)
            return U.hasse * hilbert_symbol(dU, delta, p) == W.hasse;
        if (c == 2)
        {
            int hq = W.hasse * U.hasse * hilbert_symbol(dU, delta, p);
            bool minus_delta_square = square_class(-delta, p) == SquareClass{};
            return !(minus_delta_square && hq == -1);
        }
        return true;
    }

    bool space_represents(const SpaceInvariants &V, const SpaceInvariants &B, const Prime &p)
    {
        if (V.dim != 3 || B.dim != 2)
            throw DomainError("space_represents: expects a ternary V and a binary B");
        return space_embeds(B, V, p);
    }

    bool is_isometric_space(const QuadLattice &a, const QuadLattice &b)
    {
        if (!(a.p() == b.p()))
            throw DomainError("is_isometric_space: prime mismatch");
        return a.rank() == b.rank() && a.invariants() == b.invariants();
    }

    SpaceInvariants selfdual_invariants(int k, int eps, const Prime &p)
    {
        if (k == 0)
        {
            if (eps != 1)
                throw DomainError("H_0^- does not exist");
            return SpaceInvariants{};
        }
        if (p.is_two())
        {
            if (k % 2 || eps != 1)
                throw DomainError("at p = 2 only H_{2n}^+ is available");
            return make_hyperbolic(k / 2, p).invariants();
        }
        return make_selfdual(k, eps, p).invariants();
    }
}
