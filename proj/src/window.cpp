#include "padens/window.hpp"

#include <algorithm>
#include <sstream>

namespace padens
{
    // ---------------------------------------------------------------- TruncSeries

    TruncSeries::TruncSeries(const Prime &p, int prec, int cap) : p_(p), prec_(prec), cap_(cap)
    {
        if (prec < 1)
            throw PrecisionExhausted("truncated series: coefficient precision must be at least 1");
        if (cap < 1)
            throw DomainError("truncated series: degree cap must be positive");
    }

    TruncSeries TruncSeries::constant(const Prime &p, int prec, int cap, const Integer &c)
    {
        return monomial(p, prec, cap, 0, 0, c);
    }

    TruncSeries TruncSeries::monomial(const Prime &p, int prec, int cap, int i, int j, const Integer &c)
    {
        TruncSeries s(p, prec, cap);
        s.put(i, j, c);
        return s;
    }

    void TruncSeries::put(int i, int j, Integer c)
    {
        if (i + j >= cap_)
            return;
        Integer mod = ipow(p_.value(), prec_);
        c %= mod;
        if (c < 0)
            c += mod;
        if (c == 0)
            terms_.erase({i, j});
        else
            terms_[{i, j}] = c;
    }

    Integer TruncSeries::coeff(int i, int j) const
    {
        auto it = terms_.find({i, j});
        return it == terms_.end() ? Integer(0) : it->second;
    }

    void TruncSeries::check_compatible(const TruncSeries &o) const
    {
        if (!(p_ == o.p_))
            throw DomainError("truncated series: prime mismatch");
    }

    TruncSeries TruncSeries::operator+(const TruncSeries &o) const
    {
        check_compatible(o);
        TruncSeries r(p_, std::min(prec_, o.prec_), std::min(cap_, o.cap_));
        for (auto &[m, c] : terms_)
            r.put(m.first, m.second, c);
        for (auto &[m, c] : o.terms_)
            r.put(m.first, m.second, r.coeff(m.first, m.second) + c);
        return r;
    }

    TruncSeries TruncSeries::operator-() const { return scaled(-1); }

    TruncSeries TruncSeries::operator-(const TruncSeries &o) const { return *this + (-o); }

    TruncSeries TruncSeries::operator*(const TruncSeries &o) const
    {
        check_compatible(o);
        TruncSeries r(p_, std::min(prec_, o.prec_), std::min(cap_, o.cap_));
        std::map<Monomial, Integer> acc;
        for (auto &[m1, c1] : terms_)
            for (auto &[m2, c2] : o.terms_)
            {
                int i = m1.first + m2.first, j = m1.second + m2.second;
                if (i + j < r.cap_)
                    acc[{i, j}] += c1 * c2;
            }
        for (auto &[m, c] : acc)
            r.put(m.first, m.second, c);
        return r;
    }

    TruncSeries TruncSeries::scaled(const Integer &c) const
    {
        TruncSeries r(p_, prec_, cap_);
        for (auto &[m, v] : terms_)
            r.put(m.first, m.second, v * c);
        return r;
    }

    bool TruncSeries::operator==(const TruncSeries &o) const
    {
        return p_ == o.p_ && prec_ == o.prec_ && cap_ == o.cap_ && terms_ == o.terms_;
    }

    int TruncSeries::content_valuation() const
    {
        int v = prec_;
        for (auto &[m, c] : terms_)
            v = std::min<int>(v, (int)valuation(c, p_));
        return v;
    }

    TruncSeries TruncSeries::divide_p(int s) const
    {
        if (s == 0)
            return *this;
        if (s < 0)
            throw DomainError("divide_p: negative exponent");
        if (content_valuation() < s)
            throw DomainError("divide_p: series is not divisible by p^" + std::to_string(s));
        if (prec_ - s < 1)
            throw PrecisionExhausted("dividing by p^" + std::to_string(s) + " exhausts the coefficient precision p^" +
                                     std::to_string(prec_) + "; increase the working precision");
        TruncSeries r(p_, prec_ - s, cap_);
        Integer d = ipow(p_.value(), s);
        for (auto &[m, c] : terms_)
            r.put(m.first, m.second, c / d);
        return r;
    }

    TruncSeries TruncSeries::truncate(int cap) const
    {
        TruncSeries r(p_, prec_, std::min(cap, cap_));
        for (auto &[m, c] : terms_)
            r.put(m.first, m.second, c);
        return r;
    }

    TruncSeries TruncSeries::with_cap(int cap) const
    {
        TruncSeries r(p_, prec_, cap);
        for (auto &[m, c] : terms_)
            r.put(m.first, m.second, c);
        return r;
    }

    TruncSeries TruncSeries::reduce(int prec) const
    {
        if (prec > prec_)
            throw PrecisionExhausted("cannot raise coefficient precision");
        TruncSeries r(p_, prec, cap_);
        for (auto &[m, c] : terms_)
            r.put(m.first, m.second, c);
        return r;
    }

    int TruncSeries::order() const
    {
        int o = -1;
        for (auto &[m, c] : terms_)
            if (o < 0 || m.first + m.second < o)
                o = m.first + m.second;
        return o;
    }

    std::string TruncSeries::str() const
    {
        if (terms_.empty())
            return "0";
        std::vector<std::pair<Monomial, Integer>> v(terms_.begin(), terms_.end());
        std::sort(v.begin(), v.end(), [](auto &a, auto &b) {
            int da = a.first.first + a.first.second, db = b.first.first + b.first.second;
            return da != db ? da < db : a.first.first > b.first.first;
        });
        std::ostringstream os;
        bool first = true;
        for (auto &[m, c] : v)
        {
            if (!first)
                os << " + ";
            first = false;
            bool unit = m.first + m.second > 0;
            if (c != 1 || !unit)
                os << c.get_str() << (unit ? "*" : "");
            std::string sep;
            if (m.first)
            {
                os << "t1" << (m.first > 1 ? "^" + std::to_string(m.first) : "");
                sep = "*";
            }
            if (m.second)
                os << sep << "t2" << (m.second > 1 ? "^" + std::to_string(m.second) : "");
        }
        return os.str();
    }

    TruncSeries sigma(const TruncSeries &s)
    {
        TruncSeries r(s.p(), s.precision(), s.cap());
        long p = s.p().value();
        for (auto &[m, c] : s.terms())
            if ((long)(m.first + m.second) * p < s.cap())
                r = r + TruncSeries::monomial(s.p(), s.precision(), s.cap(), m.first * p, m.second * p, c);
        return r;
    }

    // ---------------------------------------------------------------- matrices

    namespace
    {
        using Mat = std::array<TruncSeries, 4>;

        Mat matmul(const Mat &a, const Mat &b)
        {
            return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                    a[2] * b[1] + a[3] * b[3]};
        }

        TruncSeries cst(const Prime &p, int prec, int cap, long c) { return TruncSeries::constant(p, prec, cap, c); }

        TruncSeries var(const Prime &p, int prec, int cap, int which, long c = 1)
        {
            return which == 1 ? TruncSeries::monomial(p, prec, cap, 1, 0, c)
                              : TruncSeries::monomial(p, prec, cap, 0, 1, c);
        }

        // U(t) = [[0,1],[p,-t]]
        Mat U(const Prime &p, int prec, int cap, int which)
        {
            return {cst(p, prec, cap, 0), cst(p, prec, cap, 1), cst(p, prec, cap, p.value()),
                    var(p, prec, cap, which, -1)};
        }

        // U'(t) = [[t,1],[p,0]]
        Mat Uprime(const Prime &p, int prec, int cap, int which)
        {
            return {var(p, prec, cap, which), cst(p, prec, cap, 1), cst(p, prec, cap, p.value()),
                    cst(p, prec, cap, 0)};
        }

        WindowMatrix step(const WindowMatrix &A, int left, int right)
        {
            const TruncSeries &s0 = A.e[0];
            const Prime &p = s0.p();
            int prec = s0.precision(), cap = s0.cap();
            Mat sA = {sigma(A.e[0]), sigma(A.e[1]), sigma(A.e[2]), sigma(A.e[3])};
            WindowMatrix out{A.scale + 1, matmul(matmul(Uprime(p, prec, cap, left), sA), U(p, prec, cap, right))};
            out.normalize();
            return out;
        }

        long plong(const Prime &p, int e) { return ipow(p.value(), e).get_si(); }
    }

    void WindowMatrix::normalize()
    {
        while (scale > 0)
        {
            int v = e[0].precision();
            bool all_zero = true;
            for (auto &s : e)
            {
                v = std::min(v, s.content_valuation());
                all_zero = all_zero && s.is_zero();
            }
            if (all_zero)
                throw PrecisionExhausted("window matrix vanishes to the working precision; increase it");
            if (v == 0)
                return;
            for (auto &s : e)
                s = s.divide_p(1);
            --scale;
        }
    }

    bool WindowMatrix::integral_below(int cap) const
    {
        if (scale <= 0)
            return true;
        if (scale > e[0].precision())
            throw PrecisionExhausted("window matrix: denominator exceeds the working precision");
        for (auto &s : e)
            if (s.truncate(cap).content_valuation() < scale)
                return false;
        return true;
    }

    int window_precision(int n) { return n / 2 + 3; }

    int window_cap(int n, const Prime &p) { return (int)plong(p, n / 2 + 1); }

    WindowPair initial_matrices(int n, const Prime &p, int prec, int cap)
    {
        if (n < 0)
            throw DomainError("initial_matrices: valuation must be non-negative");
        int k = n / 2;
        auto c = [&](const Integer &v) { return TruncSeries::constant(p, prec, cap, v); };
        Integer pk = ipow(p.value(), k);
        WindowPair w;
        if (n % 2 == 0)
        {
            w.X = {0, {c(pk), c(0), c(0), c(pk)}};
            w.Y = w.X;
        }
        else
        {
            w.X = {0, {c(0), c(pk), c(pk * p.value()), c(0)}};
            w.Y = {0, {c(0), c(-pk), c(-pk * p.value()), c(0)}};
        }
        return w;
    }

    WindowPair recursion_step(const WindowPair &w) { return {step(w.X, 2, 1), step(w.Y, 1, 2)}; }

    std::vector<WindowPair> window_tower(int n, const Prime &p, int levels, int prec, int cap)
    {
        if (cap < plong(p, std::max(levels - 1, 0)))
            throw DomainError("window_tower: degree cap too small for the requested levels");
        std::vector<WindowPair> out{initial_matrices(n, p, prec, cap)};
        for (int l = 1; l <= levels; ++l)
            out.push_back(recursion_step(out.back()));
        return out;
    }

    int max_lift_level(int n, const Prime &p)
    {
        // one level beyond the expected failure, so a late failure is still measured
        int L = n / 2 + 2;
        auto tower = window_tower(n, p, L, window_precision(n) + 1, (int)plong(p, L));
        for (int l = 0; l <= L; ++l)
        {
            int capl = (int)plong(p, l);
            if (!(tower[l].X.integral_below(capl) && tower[l].Y.integral_below(capl)))
                return l - 1;
        }
        throw PrecisionExhausted("max_lift_level: still liftable at level " + std::to_string(L));
    }

    TruncSeries expected_leadform(int n, const Prime &p)
    {
        int cap = window_cap(n, p);
        long q = p.value();
        if (n % 2 == 0)
        {
            long pk = plong(p, n / 2);
            int e = (int)((pk - 1) / (q - 1));
            return TruncSeries::monomial(p, 1, cap, e, e) *
                   (TruncSeries::monomial(p, 1, cap, 0, (int)pk) - TruncSeries::monomial(p, 1, cap, (int)pk, 0));
        }
        int e = (int)((plong(p, (n + 1) / 2) - 1) / (q - 1));
        return TruncSeries::monomial(p, 1, cap, e, e);
    }

    TruncSeries unit_normalized(const TruncSeries &s)
    {
        if (s.precision() != 1)
            return unit_normalized(s.reduce(1));
        if (s.is_zero())
            return s;
        Monomial low{-1, -1};
        for (auto &[m, c] : s.terms())
        {
            int d = m.first + m.second, dl = low.first + low.second;
            if (low.first < 0 || d < dl || (d == dl && m.first > low.first))
                low = m;
        }
        Integer inv;
        Integer mod = s.p().value();
        mpz_invert(inv.get_mpz_t(), s.coeff(low.first, low.second).get_mpz_t(), mod.get_mpz_t());
        return s.scaled(inv);
    }

    bool same_up_to_unit(const TruncSeries &a, const TruncSeries &b, int cap)
    {
        return unit_normalized(a.truncate(cap)).terms() == unit_normalized(b.truncate(cap)).terms();
    }

    TruncSeries obstruction_leadform(int n, const Prime &p)
    {
        int l = n / 2 + 1;
        auto tower = window_tower(n, p, l, window_precision(n), window_cap(n, p));
        const WindowMatrix &X = tower[l].X;
        if (X.integral())
            throw VerificationFailure("obstruction_leadform: X(p^" + std::to_string(l) + ") is still integral");
        // X(p^l) = p^{k-l} (lead + p C): exactly one power of p in the denominator
        if (X.scale != 1)
            throw VerificationFailure("obstruction_leadform: X(p^" + std::to_string(l) + ") has denominator p^" +
                                      std::to_string(X.scale) + ", expected p^1");
        TruncSeries lead = X.at(0, 1).reduce(1);
        TruncSeries want = expected_leadform(n, p);
        if (!same_up_to_unit(lead, want, window_cap(n, p)))
            throw VerificationFailure("obstruction_leadform: got " + lead.str() + ", expected a unit times " +
                                      want.str());
        return lead;
    }

    TruncSeries predicted_fiber(int n, const Prime &p, FiberKind which)
    {
        if (n < 0)
            throw DomainError("predicted_fiber: n must be non-negative");
        if (which == FiberKind::level_structure && n < 1)
            throw DomainError("predicted_fiber: the level-structure fiber needs n >= 1");
        // factors (t1^a - t2^b)^mult
        struct Factor
        {
            long a, b;
            int mult;
        };
        std::vector<Factor> fs;
        if (which == FiberKind::special_cycle)
            for (int a = 0; a <= n; ++a)
                fs.push_back({plong(p, a), plong(p, n - a), 1});
        else
        {
            fs.push_back({1, plong(p, n), 1});
            fs.push_back({plong(p, n), 1, 1}); // t1^{p^n} - t2 = -(t2 - t1^{p^n})
            for (int a = 1; a < n; ++a)
                fs.push_back({plong(p, a - 1), plong(p, n - a - 1), (int)p.value() - 1});
        }
        long deg = 0;
        for (auto &f : fs)
            deg += std::max(f.a, f.b) * f.mult;
        int cap = (int)deg + 1;
        TruncSeries out = TruncSeries::constant(p, 1, cap, 1);
        for (auto &f : fs)
        {
            TruncSeries g = TruncSeries::monomial(p, 1, cap, (int)f.a, 0) - TruncSeries::monomial(p, 1, cap, 0, (int)f.b);
            for (int m = 0; m < f.mult; ++m)
                out = out * g;
        }
        if (which == FiberKind::level_structure)
            out = -out;
        return out;
    }

    TruncSeries reduce_mod_binomial(const TruncSeries &s, long a, long b)
    {
        TruncSeries r(s.p(), s.precision(), s.cap());
        for (auto &[m, c] : s.terms())
        {
            long i = m.first, j = m.second;
            if (b >= a)
            {
                j += (i / a) * b;
                i %= a;
            }
            else
            {
                i += (j / b) * a;
                j %= b;
            }
            if (i + j < s.cap())
                r = r + TruncSeries::monomial(s.p(), s.precision(), s.cap(), (int)i, (int)j, c);
        }
        return r;
    }

    SpciReport verify_spci(int n, const Prime &p)
    {
        SpciReport rep;
        rep.n = n;
        rep.p = p.value();
        int L = n / 2 + 1;
        int cap = window_cap(n, p);
        std::vector<WindowPair> tower;
        try
        {
            tower = window_tower(n, p, L, window_precision(n), cap);
        }
        catch (const std::exception &e)
        {
            rep.failures.push_back(std::string("recursion: ") + e.what());
            return rep;
        }

        // (0) lifting level and monotonicity of non-integrality
        rep.lift_level = 0;
        bool broken = false;
        rep.monotone_ok = true;
        for (int l = 0; l <= L; ++l)
        {
            int capl = (int)plong(p, l);
            bool integ = tower[l].X.integral_below(capl) && tower[l].Y.integral_below(capl);
            if (integ && broken)
                rep.monotone_ok = false;
            if (!integ)
                broken = true;
            else if (!broken)
                rep.lift_level = l;
        }
        rep.lift_ok = rep.lift_level == n / 2 && broken;
        if (!rep.lift_ok)
            rep.failures.push_back("lift level " + std::to_string(rep.lift_level) + ", expected " +
                                   std::to_string(n / 2));
        if (!rep.monotone_ok)
            rep.failures.push_back("integrality returns after the first failure");

        // (a) leading form of the obstruction
        try
        {
            rep.leadform = obstruction_leadform(n, p);
            rep.leadform_ok = true;
        }
        catch (const std::exception &e)
        {
            rep.failures.push_back(std::string("leadform: ") + e.what());
        }

        // (b) predicted special fiber, truncated, against the obstruction
        TruncSeries fiber = predicted_fiber(n, p, FiberKind::special_cycle).truncate(cap);
        TruncSeries want = rep.leadform_ok ? rep.leadform : expected_leadform(n, p);
        rep.fiber_ok = same_up_to_unit(fiber, want, cap);
        if (!rep.fiber_ok)
            rep.failures.push_back("truncated special fiber " + fiber.str() + " is not a unit times " + want.str());

        // (c) X(p^l), Y(p^l) integral modulo t1^{p^k1} - t2^{p^k2}, k1 + k2 = n
        rep.divisibility_ok = true;
        for (int k1 = 0; k1 <= n; ++k1)
        {
            long a = plong(p, k1), b = plong(p, n - k1);
            for (int l = 1; l <= L; ++l)
            {
                int capl = (int)plong(p, l);
                for (const WindowMatrix *W : {&tower[l].X, &tower[l].Y})
                {
                    if (W->scale <= 0)
                        continue;
                    for (int idx = 0; idx < 4; ++idx)
                    {
                        TruncSeries r = reduce_mod_binomial(W->e[idx].truncate(capl), a, b);
                        if (W->scale > r.precision())
                            throw PrecisionExhausted("verify_spci: precision below the denominator");
                        if (r.content_valuation() < W->scale)
                        {
                            rep.divisibility_ok = false;
                            rep.failures.push_back(std::string(W == &tower[l].X ? "X" : "Y") + "(p^" +
                                                   std::to_string(l) + ") entry " + std::to_string(idx / 2 + 1) +
                                                   "," + std::to_string(idx % 2 + 1) + " not integral mod t1^" +
                                                   std::to_string(a) + " - t2^" + std::to_string(b) + ": " +
                                                   r.str() + " / p^" + std::to_string(W->scale));
                        }
                    }
                }
            }
        }

        // Z(x) = D(x) + Z(x/p): special(n) = unit * level(n) * special(n-2)
        if (n == 0)
            rep.factorization_ok = true;
        else
        {
            TruncSeries lhs = predicted_fiber(n, p, FiberKind::special_cycle);
            TruncSeries rhs = predicted_fiber(n, p, FiberKind::level_structure);
            if (n >= 2)
            {
                TruncSeries prev = predicted_fiber(n - 2, p, FiberKind::special_cycle);
                int c = rhs.cap() + prev.cap();
                rhs = rhs.with_cap(c) * prev.with_cap(c);
            }
            // caps differ, so compare the exact term maps
            rep.factorization_ok = unit_normalized(lhs).terms() == unit_normalized(rhs).terms();
            if (!rep.factorization_ok)
                rep.failures.push_back("special fiber is not level fiber times the fiber of x/p");
        }
        return rep;
    }
}
