// Den_d(D (+) H^K, T) = sum over A in Sym_n(Z/p^d) of
//     e(-tr(AT)/p^d) * prod_lines ghat(c * A) * |im A|^{-K},
// with ghat the normalized Gauss sum of the line form twisted by A. Grouping by
// |im A| = p^w gives a polynomial in X = p^{-K}.
#include "padens/repcount.hpp"

#include <array>
#include <map>
#include <mutex>
#include <sstream>

namespace padens
{
    namespace
    {
        using i64 = long; // 64-bit on the supported platforms; gmpxx has no long long ctor

        int vmod(i64 x, i64 p, int d)
        {
            if (x == 0)
                return d;
            int v = 0;
            while (x % p == 0)
            {
                x /= p;
                ++v;
            }
            return v;
        }

        i64 inv_mod(i64 a, i64 m)
        {
            i64 g = m, x = 0, x1 = 1, a1 = a % m;
            if (a1 < 0)
                a1 += m;
            while (a1)
            {
                i64 t = g / a1;
                g -= t * a1;
                std::swap(g, a1);
                x -= t * x1;
                std::swap(x, x1);
            }
            if (g != 1)
                throw DomainError("inv_mod: not invertible");
            return ((x % m) + m) % m;
        }

        struct Line
        {
            int e;   // valuation (>= d means the line never contributes)
            int cls; // Legendre symbol (p odd) or residue mod 8 (p = 2)
        };

        // Jordan data of a symmetric A mod p^d, rank <= 2
        struct JordanA
        {
            int n = 0;
            bool block = false; // p = 2 only: A = 2^e [[2a,1],[1,2b]]
            bool aniso = false;
            int e[2] = {0, 0};
            i64 u[2] = {1, 1}; // unit parts mod q
        };

        struct Ctx
        {
            i64 p, q;
            int d;
            std::vector<i64> pw;
            std::vector<i64> inv; // inverse table for units mod q
            Ctx(i64 p_, int d_) : p(p_), q(1), d(d_)
            {
                pw.push_back(1);
                for (int i = 0; i < d; ++i)
                {
                    q *= p;
                    pw.push_back(q);
                }
                inv.assign(q, 0);
                for (i64 x = 1; x < q; ++x)
                    if (x % p)
                        inv[x] = inv_mod(x, q);
            }
            i64 unit(i64 x, int e) const { return (x / pw[e]) % q; }

            // alpha2 = C - B^2 / A for A of valuation e1 <= v(B)
            i64 schur(i64 A, i64 B, i64 C, int e1) const
            {
                if (B == 0)
                    return C;
                int vB = vmod(B, p, d);
                int s = 2 * vB - e1;
                if (s >= d)
                    return C;
                i64 Bu = unit(B, vB), Au = unit(A, e1);
                i64 t = (Bu * Bu) % q * inv[Au] % q * pw[s] % q;
                return ((C - t) % q + q) % q;
            }

            JordanA jordan(i64 a, i64 b, i64 c, int n) const
            {
                JordanA J;
                J.n = n;
                if (n == 1)
                {
                    J.e[0] = vmod(a, p, d);
                    if (J.e[0] < d)
                        J.u[0] = unit(a, J.e[0]);
                    return J;
                }
                int va = vmod(a, p, d), vb = vmod(b, p, d), vc = vmod(c, p, d);
                int mn = std::min(va, vc);
                if (mn == d && vb == d)
                {
                    J.e[0] = J.e[1] = d;
                    return J;
                }
                i64 A, B, C;
                if (mn <= vb)
                {
                    if (va <= vc)
                        A = a, B = b, C = c;
                    else
                        A = c, B = b, C = a;
                }
                else if (p == 2)
                {
                    J.block = true;
                    J.e[0] = J.e[1] = vb;
                    i64 ap = (a / pw[vb]) / 2, cp = (c / pw[vb]) / 2;
                    J.aniso = (ap & 1) && (cp & 1);
                    return J;
                }
                else
                {
                    // x1 -> x1 + x2: q(x1) = a + 2b + c, (x1, x2) = b + c
                    A = (a + 2 * b + c) % q;
                    B = (b + c) % q;
                    C = c;
                }
                int e1 = vmod(A, p, d);
                J.e[0] = e1;
                J.u[0] = unit(A, e1);
                i64 a2 = schur(A, B, C, e1);
                J.e[1] = vmod(a2, p, d);
                if (J.e[1] < d)
                    J.u[1] = unit(a2, J.e[1]);
                return J;
            }

            int im_exponent(const JordanA &J) const
            {
                if (J.block)
                    return 2 * (d - J.e[0]);
                int w = 0;
                for (int i = 0; i < J.n; ++i)
                    w += d - J.e[i];
                return w;
            }
        };

        // Enumerate (a, b, c) in (Z/q)^3 (or a alone for n = 1) with
        // alpha a + beta b + gamma c = 0 mod p^L, solving for the variable whose
        // coefficient has least valuation.
        template <class F>
        void enumerate_filtered(const Ctx &cx, int n, i64 alpha, i64 beta, i64 gamma, int L, F &&visit)
        {
            const i64 q = cx.q, p = cx.p;
            i64 mL = cx.pw[L];
            i64 coef[3] = {alpha % mL, beta % mL, gamma % mL};
            int nv = n == 1 ? 1 : 3;
            int piv = 0;
            int best = L + 1;
            for (int i = 0; i < nv; ++i)
            {
                int v = coef[i] == 0 ? L : std::min(L, vmod(coef[i], p, L));
                if (v < best)
                    best = v, piv = i;
            }
            // pivot variable x satisfies coef[piv] * x = -rest mod p^L
            int v = best;
            i64 step = cx.pw[L - v];
            i64 cu = v < L ? (coef[piv] / cx.pw[v]) % step : 0;
            i64 cinv = v < L ? inv_mod(cu, step) : 0;
            i64 reps = q / step;
            int o1 = (piv + 1) % 3, o2 = (piv + 2) % 3;
            auto solve = [&](i64 rest, auto &&emit) {
                rest %= mL;
                i64 target = (mL - rest) % mL;
                if (v == L)
                {
                    if (target != 0)
                        return;
                    for (i64 x = 0; x < q; ++x)
                        emit(x);
                    return;
                }
                if (target % cx.pw[v])
                    return;
                i64 x0 = ((target / cx.pw[v]) % step) * cinv % step;
                for (i64 k = 0; k < reps; ++k)
                    emit(x0 + k * step);
            };
            if (nv == 1)
            {
                solve(0, [&](i64 x) { visit(x, 0, 0); });
                return;
            }
            i64 vars[3];
            for (i64 y = 0; y < q; ++y)
                for (i64 z = 0; z < q; ++z)
                {
                    vars[o1] = y;
                    vars[o2] = z;
                    i64 rest = (coef[o1] * y + coef[o2] * z) % mL;
                    solve(rest, [&](i64 x) {
                        vars[piv] = x;
                        visit(vars[0], vars[1], vars[2]);
                    });
                }
        }

        Integer enumeration_work(const Ctx &cx, int n, int L, int vmin)
        {
            Integer per = Integer(cx.q) / Integer(cx.pw[L - std::min(vmin, L)]);
            if (n == 1)
                return per;
            return Integer(cx.q) * cx.q * per;
        }

        int kronecker2(i64 u) { return (u % 8 == 1 || u % 8 == 7) ? 1 : -1; }

        // Z[zeta_8] with zeta^4 = -1
        using Z8 = std::array<i64, 4>;
        Z8 z8_mul(const Z8 &x, const Z8 &y)
        {
            Z8 r{0, 0, 0, 0};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                {
                    int k = i + j;
                    if (k < 4)
                        r[k] += x[i] * y[j];
                    else
                        r[k - 4] -= x[i] * y[j];
                }
            return r;
        }
        Z8 zeta_pow(int k)
        {
            k = ((k % 8) + 8) % 8;
            Z8 r{0, 0, 0, 0};
            if (k < 4)
                r[k] = 1;
            else
                r[k - 4] = -1;
            return r;
        }

        // Per-A factor prod ghat * |im A|^{-K}, as sign * g_p^s * p^{-H} * X^w (p odd)
        // or z * 2^{-H} * X^w with z in Z[zeta_8] (p = 2).
        using OddKey = std::array<int, 3>; // w, H, s
        using TwoKey = std::pair<int, int>; // w, H

        struct Engine
        {
            const Ctx &cx;
            const std::vector<Line> &lines;
            int n;
            std::vector<int> leg;
            int epsp = 1;

            Engine(const Ctx &c, const std::vector<Line> &ls, int n_) : cx(c), lines(ls), n(n_)
            {
                if (cx.p != 2)
                {
                    leg.assign(cx.p, 0);
                    for (i64 x = 1; x < cx.p; ++x)
                        leg[x] = legendre(x, cx.p);
                    epsp = cx.p % 4 == 1 ? 1 : -1;
                }
            }

            void odd_term(i64 a, i64 b, i64 c, std::map<OddKey, i64> &out) const
            {
                const int d = cx.d;
                JordanA J = cx.jordan(a, b, c, n);
                int H = 0, s = 0, sign = 1;
                for (int i = 0; i < n; ++i)
                {
                    if (J.e[i] >= d)
                        continue;
                    int ui = leg[J.u[i] % cx.p];
                    for (auto &ln : lines)
                    {
                        int t = ln.e + J.e[i];
                        if (t >= d)
                            continue;
                        int m = d - t;
                        if (m % 2 == 0)
                            H += m / 2;
                        else
                        {
                            H += (m + 1) / 2;
                            ++s;
                            sign *= ln.cls * ui;
                        }
                    }
                }
                int pairs = s / 2; // g^2 = eps_p p
                if (pairs % 2 && epsp == -1)
                    sign = -sign;
                out[{cx.im_exponent(J), H - pairs, s % 2}] += sign;
            }

            void two_term(i64 a, i64 b, i64 c, std::map<TwoKey, Z8> &out) const
            {
                static const Z8 one_plus_i{1, 0, 1, 0}, one_minus_i{1, 0, -1, 0}, sqrt2{0, 1, 0, -1},
                    minus_one{-1, 0, 0, 0};
                const int d = cx.d;
                JordanA J = cx.jordan(a, b, c, n);
                Z8 z{1, 0, 0, 0};
                int H = 0;
                for (auto &ln : lines)
                {
                    if (J.block)
                    {
                        int m = d - (ln.e + J.e[0]) - 1;
                        if (m <= 0)
                            continue;
                        H += m;
                        if (J.aniso && m % 2)
                            z = z8_mul(z, minus_one);
                        continue;
                    }
                    for (int i = 0; i < n; ++i)
                    {
                        if (J.e[i] >= d)
                            continue;
                        int t = ln.e + J.e[i];
                        if (t >= d)
                            continue;
                        int m = d - t;
                        if (m == 1)
                            return; // the Gauss sum vanishes
                        i64 u = (ln.cls * (J.u[i] % 8)) % 8;
                        z = z8_mul(z, u % 4 == 1 ? one_plus_i : one_minus_i);
                        if (m % 2)
                        {
                            if (kronecker2(u) < 0)
                                z = z8_mul(z, minus_one);
                            z = z8_mul(z, sqrt2);
                            H += (m + 1) / 2;
                        }
                        else
                            H += m / 2;
                    }
                }
                Z8 &slot = out[{cx.im_exponent(J), H}];
                for (int k = 0; k < 4; ++k)
                    slot[k] += z[k];
            }
        };

        // accumulated sums before the final character average
        struct Acc
        {
            std::map<std::array<int, 4>, i64> odd; // (w, H, s, jcls)
            std::map<TwoKey, Z8> two;
        };

        void add_odd(const Ctx &cx, const Engine &E, Acc &acc, i64 j, const std::map<OddKey, i64> &terms)
        {
            int jcls = 0;
            if (j)
                jcls = E.leg[(j / cx.pw[cx.d - 1]) % cx.p] == 1 ? 1 : 2;
            for (auto &[k, cnt] : terms)
                if (cnt)
                    acc.odd[{k[0], k[1], k[2], jcls}] += cnt;
        }

        void add_two(const Ctx &cx, Acc &acc, i64 j, const std::map<TwoKey, Z8> &terms)
        {
            const int d = cx.d;
            int r = d >= 3 ? (int)((j / cx.pw[d - 3]) % 8) : (int)((j * (8 / cx.q)) % 8);
            Z8 w = zeta_pow(-r);
            for (auto &[k, z] : terms)
            {
                Z8 v = z8_mul(z, w);
                Z8 &slot = acc.two[k];
                for (int i = 0; i < 4; ++i)
                    slot[i] += v[i];
            }
        }

        // quadratic number field element a + b g with g^2 = eps_p p
        struct QG
        {
            Rational a = 0, b = 0;
        };

        QPoly finish_odd(const Ctx &cx, const Engine &E, const Acc &acc)
        {
            const i64 p = cx.p;
            std::map<int, QG> coeff;
            Rational pm1(p - 1);
            for (auto &[key, cnt] : acc.odd)
            {
                if (!cnt)
                    continue;
                auto [w, H, s, jcls] = key;
                Rational scale = Rational(cnt) * rpow(p, -H);
                QG &c = coeff[w];
                if (jcls == 0)
                {
                    (s ? c.b : c.a) += scale;
                    continue;
                }
                // mean of zeta^{-j} over a square class: (-1 + eta eps_p g) / (p - 1)
                int eta = jcls == 1 ? 1 : -1;
                if (!s)
                {
                    c.a += scale * Rational(-1) / pm1;
                    c.b += scale * Rational(eta * E.epsp) / pm1;
                }
                else
                {
                    c.a += scale * Rational(eta * p) / pm1;
                    c.b += scale * Rational(-1) / pm1;
                }
            }
            std::vector<Rational> out;
            for (auto &[w, v] : coeff)
            {
                if (v.b != 0)
                    throw VerificationFailure("density census: irrational Gauss-sum residue");
                if ((int)out.size() <= w)
                    out.resize(w + 1, Rational(0));
                out[w] = v.a;
            }
            return QPoly(out);
        }

        QPoly finish_two(const Acc &acc)
        {
            std::map<int, Rational> coeff;
            for (auto &[key, z] : acc.two)
            {
                coeff[key.first] += rpow(2, -key.second) * Rational(z[0]);
            }
            // the zeta, zeta^2, zeta^3 parts must cancel
            std::map<int, std::array<Rational, 3>> irr;
            for (auto &[key, z] : acc.two)
                for (int k = 1; k < 4; ++k)
                    irr[key.first][k - 1] += rpow(2, -key.second) * Rational(z[k]);
            for (auto &[w, v] : irr)
                for (auto &x : v)
                    if (x != 0)
                        throw VerificationFailure("density census: non-rational 2-adic Gauss sum residue");
            std::vector<Rational> out;
            for (auto &[w, v] : coeff)
            {
                if ((int)out.size() <= w)
                    out.resize(w + 1, Rational(0));
                out[w] = v;
            }
            return QPoly(out);
        }

        // Residues of a mod p^d in the class {a : v(a t) >= L}.
        std::vector<i64> admissible(const Ctx &cx, i64 t, int L)
        {
            int f = std::max(0, L - vmod(t, cx.p, cx.d));
            std::vector<i64> out;
            for (i64 a = 0; a < cx.q; a += cx.pw[f])
                out.push_back(a);
            return out;
        }

        // square-class key of a residue: valuation and unit class
        std::pair<int, int> class_key(const Ctx &cx, const Engine &E, i64 a)
        {
            int v = vmod(a, cx.p, cx.d);
            if (v >= cx.d)
                return {v, 0};
            i64 u = cx.unit(a, v);
            if (cx.p == 2)
            {
                i64 mod = std::min<i64>(8, cx.pw[cx.d - v]);
                return {v, (int)(u % mod)};
            }
            return {v, E.leg[u % cx.p]};
        }

        // T = diag(t1, t2). Averaging A -> D A D over unit diagonals D kills every
        // A unless v(a t1), v(c t2) >= L; the sum over b only depends on the
        // square classes of a and c.
        QPoly census_diagonal(const Ctx &cx, const std::vector<Line> &lines, int n, i64 t1, i64 t2)
        {
            Engine E(cx, lines, n);
            const bool two = cx.p == 2;
            int L = two ? std::max(cx.d - 3, 0) : cx.d - 1;
            auto as = admissible(cx, t1, L);
            std::vector<i64> cs = n == 2 ? admissible(cx, t2, L) : std::vector<i64>{0};
            check_budget(Integer((long)as.size()) * (long)cs.size(), "density census");

            std::map<std::array<int, 4>, std::map<OddKey, i64>> odd_cache;
            std::map<std::array<int, 4>, std::map<TwoKey, Z8>> two_cache;
            Acc acc;
            for (i64 a : as)
            {
                auto ka = class_key(cx, E, a);
                for (i64 c : cs)
                {
                    auto kc = n == 2 ? class_key(cx, E, c) : std::pair<int, int>{0, 0};
                    std::array<int, 4> key{ka.first, ka.second, kc.first, kc.second};
                    i64 j = (a * t1 + c * t2) % cx.q;
                    if (two)
                    {
                        auto it = two_cache.find(key);
                        if (it == two_cache.end())
                        {
                            std::map<TwoKey, Z8> terms;
                            if (n == 1)
                                E.two_term(a, 0, 0, terms);
                            else
                                for (i64 b = 0; b < cx.q; ++b)
                                    E.two_term(a, b, c, terms);
                            it = two_cache.emplace(key, std::move(terms)).first;
                        }
                        add_two(cx, acc, j, it->second);
                    }
                    else
                    {
                        auto it = odd_cache.find(key);
                        if (it == odd_cache.end())
                        {
                            std::map<OddKey, i64> terms;
                            if (n == 1)
                                E.odd_term(a, 0, 0, terms);
                            else
                                for (i64 b = 0; b < cx.q; ++b)
                                    E.odd_term(a, b, c, terms);
                            it = odd_cache.emplace(key, std::move(terms)).first;
                        }
                        add_odd(cx, E, acc, j, it->second);
                    }
                }
            }
            return two ? finish_two(acc) : finish_odd(cx, E, acc);
        }

        // p = 2 with T an even unimodular-type block: plain filtered enumeration.
        QPoly census_block(const Ctx &cx, const std::vector<Line> &lines, i64 t11, i64 t22, i64 t12x2)
        {
            Engine E(cx, lines, 2);
            int L = std::max(cx.d - 3, 0);
            int vmin = std::min({vmod(t11, 2, cx.d), vmod(t12x2, 2, cx.d), vmod(t22, 2, cx.d)});
            check_budget(enumeration_work(cx, 2, L, vmin), "density census");
            Acc acc;
            std::map<TwoKey, Z8> terms;
            enumerate_filtered(cx, 2, t11, t12x2, t22, L, [&](i64 a, i64 b, i64 c) {
                terms.clear();
                E.two_term(a, b, c, terms);
                add_two(cx, acc, (a * t11 + c * t22 + b * t12x2) % cx.q, terms);
            });
            return finish_two(acc);
        }

        // GL_n(Z_p)-equivalent diagonal form of T, if one exists (always for p odd)
        std::optional<std::vector<Rational>> diagonal_target(const QuadLattice &T)
        {
            const Prime &p = T.p();
            if (T.rank() == 1)
                return std::vector<Rational>{T.at(0, 0)};
            if (!p.is_two())
                return padic_diagonal(T);
            if (T.at(0, 1) == 0)
                return std::vector<Rational>{T.at(0, 0), T.at(1, 1)};
            long va = val_or(T.at(0, 0), p, 1 << 20), vc = val_or(T.at(1, 1), p, 1 << 20);
            long vb = *valuation(T.at(0, 1), p);
            if (std::min(va, vc) > vb)
                return std::nullopt;
            Rational piv = va <= vc ? T.at(0, 0) : T.at(1, 1);
            return std::vector<Rational>{piv, T.det() / piv};
        }

        std::mutex cache_mu;
        std::map<std::string, QPoly> &cache()
        {
            static std::map<std::string, QPoly> c;
            return c;
        }
    }

    QPoly density_census(const Prime &prime, const std::vector<Rational> &lines, const QuadLattice &T, int d)
    {
        if (!(T.p() == prime))
            throw DomainError("density_census: prime mismatch");
        if (!T.integral())
            throw DomainError("density_census: T must be integral");
        int n = T.rank();
        if (n > 2)
            throw DomainError("density_census: target rank must be at most 2");
        if (n == 0)
            return QPoly({Rational(1)});
        if (d < 1)
            throw DomainError("density_census: d must be positive");

        std::ostringstream key;
        key << prime.value() << "|" << d << "|" << T.str() << "|";
        std::vector<Line> ls;
        for (auto &c : lines)
        {
            if (!is_integral(c, prime))
                throw DomainError("density_census: line value not integral");
            if (c == 0)
                continue;
            int e = (int)*valuation(c, prime);
            if (e >= d)
                continue; // contributes the factor 1
            Rational u = unit_part(c, prime);
            int cls = prime.is_two() ? mod8(u) : legendre(u, prime);
            ls.push_back({e, cls});
        }
        std::sort(ls.begin(), ls.end(), [](auto &x, auto &y) { return std::pair(x.e, x.cls) < std::pair(y.e, y.cls); });
        for (auto &l : ls)
            key << l.e << ":" << l.cls << ",";
        {
            std::lock_guard lk(cache_mu);
            auto it = cache().find(key.str());
            if (it != cache().end())
                return it->second;
        }

        Ctx cx(prime.value(), d);
        QPoly out;
        if (auto diag = diagonal_target(T))
        {
            i64 t1 = reduce_mod((*diag)[0], prime, cx.q);
            i64 t2 = n == 2 ? reduce_mod((*diag)[1], prime, cx.q) : 0;
            out = census_diagonal(cx, ls, n, t1, t2);
        }
        else
            out = census_block(cx, ls, reduce_mod(T.at(0, 0), prime, cx.q), reduce_mod(T.at(1, 1), prime, cx.q),
                               reduce_mod(Rational(2 * T.at(0, 1)), prime, cx.q));

        std::lock_guard lk(cache_mu);
        cache()[key.str()] = out;
        return out;
    }

    int stable_depth(const QuadLattice &T)
    {
        const Prime &p = T.p();
        int n = T.rank();
        if (n == 0)
            return 1;
        if (!T.nondegenerate())
            throw DomainError("stable_depth: T must be nondegenerate");
        if (!p.is_two())
        {
            long amax = 0;
            for (auto &e : diagonalize(T))
                amax = std::max(amax, e.exponent);
            return (int)amax + 1;
        }
        // p = 2: largest Jordan exponent of the bilinear matrix 2T, plus 4
        long f;
        if (n == 1)
            f = *valuation(Rational(2 * T.at(0, 0)), p);
        else
        {
            long va = val_or(Rational(2 * T.at(0, 0)), p, 1 << 20);
            long vc = val_or(Rational(2 * T.at(1, 1)), p, 1 << 20);
            long vb = val_or(Rational(2 * T.at(0, 1)), p, 1 << 20);
            long vdet = *valuation(Rational(4 * T.det()), p);
            if (std::min(va, vc) <= vb)
                f = vdet - std::min(va, vc);
            else
                f = vb;
        }
        return (int)f + 4;
    }

    QPoly stable_census(const Prime &p, const std::vector<Rational> &lines, const QuadLattice &T)
    {
        int d = stable_depth(T);
        QPoly prev = density_census(p, lines, T, d);
        for (int tries = 0; tries < 6; ++tries)
        {
            QPoly next = density_census(p, lines, T, d + 1);
            if (next == prev)
                return next;
            prev = next;
            ++d;
        }
        throw VerificationFailure("density census did not stabilize for T = " + T.str());
    }
}
