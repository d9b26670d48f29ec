#include "padens/verify.hpp"

#include "padens/denpoly.hpp"
#include "padens/repcount.hpp"
#include "padens/window.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

namespace padens
{
    namespace
    {
        using Clock = std::chrono::steady_clock;

        struct Instance
        {
            std::string name;
            std::function<void(VerificationReport &)> run;
        };

        std::vector<long> units(const Prime &p)
        {
            if (p.is_two())
                return {1, 3, 5, 7};
            return {1, smallest_nonresidue(p)};
        }

        std::string describe(const QuadLattice &M, const Rational &N)
        {
            return "M=" + M.str() + " N=" + to_string(N);
        }

        std::vector<QuadLattice> diagonal_rank2(const Prime &p, int max_exp)
        {
            std::vector<QuadLattice> out;
            for (int a1 = 0; a1 <= max_exp; ++a1)
                for (int a2 = a1; a2 <= max_exp; ++a2)
                    for (long u1 : units(p))
                        for (long u2 : units(p))
                        {
                            if (a1 == a2 && u2 < u1)
                                continue;
                            out.push_back(make_diagonal({scaled_unit(u1, a1, p), scaled_unit(u2, a2, p)}, p));
                        }
            return out;
        }

        std::vector<Rational> level_values(const Prime &p, int max_nu)
        {
            std::vector<Rational> out;
            for (int v = 0; v <= max_nu; ++v)
                for (long u : units(p))
                    out.push_back(scaled_unit(u, v, p));
            return out;
        }

        void require_odd_grid(const Prime &p, const std::string &suite)
        {
            if (p.is_two())
                throw DomainError("verify " + suite + ": the grid is defined for odd p only");
        }

        std::vector<Instance> anadecom(const SuiteOptions &o)
        {
            Prime p(o.p);
            std::vector<Instance> out;
            auto add = [&](int k, const QuadLattice &M, const Rational &N) {
                out.push_back({"k=" + std::to_string(k) + " " + describe(M, N), [=](VerificationReport &r) {
                                   Rational counted = density(make_selfdual(k, o.eps, p), with_line(M, N));
                                   Rational decomposed = primitive_decomposition(k, o.eps, M, N);
                                   r.pass = counted == decomposed;
                                   r.witness["counted"] = to_string(counted);
                                   r.witness["decomposition"] = to_string(decomposed);
                               }});
            };
            if (o.M || o.N)
            {
                if (!o.M || !o.N)
                    throw DomainError("verify anadecom: --M and --N go together");
                for (int k : {4, 6})
                    add(k, *o.M, *o.N);
                return out;
            }
            require_odd_grid(p, "anadecom");
            int max_exp = o.grid == "full" ? 3 : 1;
            std::vector<QuadLattice> Ms{zero_lattice(p)};
            for (int a = 0; a <= max_exp; ++a)
                for (long u : units(p))
                    Ms.push_back(make_rank1(scaled_unit(u, a, p), p));
            for (int k : {4, 6})
                for (auto &M : Ms)
                    for (auto &N : level_values(p, 4))
                        add(k, M, N);
            return out;
        }

        void level_checks(VerificationReport &r, const QuadLattice &M, const Rational &N, int eps)
        {
            DensityPolynomial direct = level_density_direct(M, N, eps);
            DensityPolynomial diff = level_density_diff(M, N, eps);
            r.witness["direct"] = direct.str();
            r.witness["diff"] = diff.str();
            r.pass = direct == diff;
            if (incoherent(with_line(M, N), eps))
            {
                r.witness["central"] = to_string(direct.eval(1));
                r.pass = r.pass && direct.eval(1) == 0;
                if (eps == 1 && r.pass)
                    r.witness["derived"] = to_string(derived_level_density(M, N));
            }
        }

        std::vector<Instance> anadiff(const SuiteOptions &o)
        {
            Prime p(o.p);
            std::vector<Instance> out;
            auto add = [&](const QuadLattice &M, const Rational &N) {
                out.push_back({describe(M, N), [=](VerificationReport &r) { level_checks(r, M, N, o.eps); }});
            };
            if (o.M || o.N)
            {
                if (!o.M || !o.N)
                    throw DomainError("verify anadiff: --M and --N go together");
                add(*o.M, *o.N);
                return out;
            }
            require_odd_grid(p, "anadiff");
            bool full = o.grid == "full";
            for (auto &M : diagonal_rank2(p, full ? 3 : 2))
                for (auto &N : level_values(p, full ? 4 : 3))
                    add(M, N);
            return out;
        }

        std::vector<Instance> induction(const SuiteOptions &o)
        {
            Prime p(o.p);
            require_odd_grid(p, "induction");
            std::vector<Instance> out;
            auto add = [&](const QuadLattice &L, const Rational &N) {
                out.push_back({"L=" + L.str() + " N=" + to_string(N), [=](VerificationReport &r) {
                                   InductionReport rep = induction_check(L, N, o.eps);
                                   r.pass = rep.holds || !rep.above_threshold;
                                   r.witness["above_threshold"] = rep.above_threshold ? "true" : "false";
                                   r.witness["holds"] = rep.holds ? "true" : "false";
                                   r.witness["lhs"] = rep.lhs.str();
                                   r.witness["rhs"] = rep.rhs.str();
                                   if (!rep.diagnostic.empty())
                                       r.witness["diagnostic"] = rep.diagnostic;
                               }});
            };
            if (o.M || o.N)
            {
                if (!o.M || !o.N)
                    throw DomainError("verify induction: --M and --N go together");
                add(*o.M, *o.N);
                return out;
            }
            int max_exp = o.grid == "full" ? 2 : 1;
            std::vector<QuadLattice> Ls;
            for (int a = 0; a <= max_exp; ++a)
                for (long u : units(p))
                    Ls.push_back(make_rank1(scaled_unit(u, a, p), p));
            for (auto &M : diagonal_rank2(p, max_exp))
                Ls.push_back(M);
            for (auto &L : Ls)
            {
                long t = 0;
                for (auto &e : diagonalize(L))
                    t = std::max(t, e.exponent);
                for (long v = t + 2; v <= t + 3; ++v)
                    for (long u : units(p))
                        add(L, scaled_unit(u, v, p));
            }
            return out;
        }

        std::vector<Instance> stable(const SuiteOptions &o)
        {
            Prime p(o.p);
            require_odd_grid(p, "stable");
            std::vector<Instance> out;
            auto add = [&](const QuadLattice &M, const Rational &N0) {
                int k = stable_threshold(M, N0);
                out.push_back({describe(M, N0) + " k=" + std::to_string(k), [=](VerificationReport &r) {
                                   Rational N = N0 * rpow(p.value(), 2 * k);
                                   DensityPolynomial s = stable_level_density(M, N0, k, o.eps);
                                   DensityPolynomial d = level_density_direct(M, N, o.eps);
                                   r.pass = s == d;
                                   r.witness["stable"] = s.str();
                                   r.witness["direct"] = d.str();
                               }});
            };
            if (o.M || o.N)
            {
                if (!o.M || !o.N)
                    throw DomainError("verify stable: --M and --N go together");
                add(*o.M, *o.N);
                return out;
            }
            bool full = o.grid == "full";
            for (auto &M : diagonal_rank2(p, full ? 3 : 2))
                for (auto &N0 : level_values(p, 1))
                    add(M, N0);
            return out;
        }

        std::vector<Instance> spci(const SuiteOptions &o)
        {
            Prime p(o.p);
            std::vector<Instance> out;
            int max_n = o.grid == "full" ? 4 : 3;
            for (int n = 0; n <= max_n; ++n)
                out.push_back({"n=" + std::to_string(n), [=](VerificationReport &r) {
                                   SpciReport s = verify_spci(n, p);
                                   r.pass = s.ok();
                                   r.witness["lift_level"] = std::to_string(s.lift_level);
                                   r.witness["expected_lift_level"] = std::to_string(n / 2);
                                   std::string f;
                                   for (auto &x : s.failures)
                                       f += (f.empty() ? "" : "; ") + x;
                                   if (!f.empty())
                                       r.witness["failures"] = f;
                               }});
            return out;
        }
    }

    Rational scaled_unit(long u, long a, const Prime &p) { return Rational(u) * rpow(p.value(), a); }

    QuadLattice parse_diagonal(const std::string &s, const Prime &p)
    {
        if (s.empty())
            throw DomainError("empty diagonal lattice");
        std::vector<Rational> entries;
        std::istringstream is(s);
        std::string item;
        while (std::getline(is, item, ','))
        {
            auto star = item.find('*');
            auto caret = item.find('^');
            if (star == std::string::npos && caret == std::string::npos)
            {
                entries.push_back(parse_rational(item));
                continue;
            }
            Rational u = star == std::string::npos ? Rational(1) : parse_rational(item.substr(0, star));
            std::string power = star == std::string::npos ? item : item.substr(star + 1);
            caret = power.find('^');
            if (caret == std::string::npos)
                throw DomainError("diagonal entry '" + item + "': expected u*p^a");
            std::string b = power.substr(0, caret);
            Rational base = b == "p" ? Rational(p.value()) : parse_rational(b);
            if (base != p.value())
                throw DomainError("diagonal entry '" + item + "': base must be p = " + std::to_string(p.value()));
            long a;
            try
            {
                a = std::stol(power.substr(caret + 1));
            }
            catch (const std::exception &)
            {
                throw DomainError("diagonal entry '" + item + "': bad exponent");
            }
            entries.push_back(u * rpow(p.value(), a));
        }
        return make_diagonal(entries, p);
    }

    std::vector<ExampleRow> worked_examples(const Prime &p, int max_k3)
    {
        require_odd_grid(p, "tables");
        const Integer q = p.value();
        std::vector<ExampleRow> rows;
        auto add = [&](int ex, long a1, long a2, long e1, long e2, const Rational &N, bool level,
                       std::vector<Integer> expected, Integer expected_derived) {
            QuadLattice M = make_diagonal({scaled_unit(e1, a1, p), scaled_unit(e2, a2, p)}, p);
            ExampleRow r;
            r.example = ex;
            r.p = p.value();
            r.M = std::to_string(e1) + "*" + std::to_string(p.value()) + "^" + std::to_string(a1) + "," +
                  std::to_string(e2) + "*" + std::to_string(p.value()) + "^" + std::to_string(a2);
            r.N = to_string(N);
            DensityPolynomial P = level ? level_density_direct(M, N) : den_poly(with_line(M, N));
            r.poly = P.coeffs;
            r.derived = level ? derived_level_density(M, N) : derived_density(with_line(M, N));
            r.expected_poly = std::move(expected);
            r.expected_derived = expected_derived;
            rows.push_back(std::move(r));
        };
        for (long e1 : units(p))
            for (long e2 : units(p))
                for (long u : units(p))
                    for (int nu0 : {0, 1})
                    {
                        Rational N0 = scaled_unit(u, nu0, p);
                        QuadLattice M1 = make_diagonal({scaled_unit(e1, 1, p), scaled_unit(e2, 2, p)}, p);
                        if (incoherent(with_line(M1, N0)))
                        {
                            if (nu0 == 0)
                                add(1, 1, 2, e1, e2, N0, false, {1, 0, 0, -1}, 3);
                            else
                                add(1, 1, 2, e1, e2, N0, false, {1, q, 0, -q, -1}, 2 * q + 4);
                            for (int k : {1, 2})
                                add(2, 1, 2, e1, e2, N0 * rpow(p.value(), 2 * k), true, {1, q, q - 1, -q, -q}, 4 * q + 2);
                        }
                        QuadLattice M3 = make_diagonal({scaled_unit(e1, 2, p), scaled_unit(e2, 3, p)}, p);
                        if (incoherent(with_line(M3, N0)))
                            for (int k = 3; k <= max_k3; ++k)
                                add(3, 2, 3, e1, e2, N0 * rpow(p.value(), 2 * k), true,
                                    {1, q, q * q + q - 1, q * q - q, -q, -q * q, -q * q}, 2 + 4 * q + 6 * q * q);
                    }
        std::stable_sort(rows.begin(), rows.end(), [](auto &a, auto &b) { return a.example < b.example; });
        return rows;
    }

    std::vector<std::string> suite_names() { return {"anadecom", "anadiff", "induction", "stable", "spci"}; }

    std::vector<VerificationReport> run_suite(const std::string &name, const SuiteOptions &opt)
    {
        if (opt.eps != 1 && opt.eps != -1)
            throw DomainError("eps must be +1 or -1");
        if (opt.grid != "small" && opt.grid != "full" && opt.grid != "empty")
            throw DomainError("unknown grid '" + opt.grid + "' (small, full, empty)");
        auto names = suite_names();
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw DomainError("unknown suite '" + name + "'");
        std::vector<Instance> instances;
        if (opt.grid == "empty" && !opt.M && !opt.N)
            instances = {};
        else if (name == "anadecom")
            instances = anadecom(opt);
        else if (name == "anadiff")
            instances = anadiff(opt);
        else if (name == "induction")
            instances = induction(opt);
        else if (name == "stable")
            instances = stable(opt);
        else
            instances = spci(opt);

        std::vector<VerificationReport> out;
        for (auto &inst : instances)
        {
            VerificationReport r;
            r.suite = name;
            r.instance = inst.name;
            auto t0 = Clock::now();
            try
            {
                inst.run(r);
            }
            catch (const VerificationFailure &e)
            {
                r.pass = false;
                r.witness["error"] = e.what();
            }
            r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            out.push_back(std::move(r));
        }
        return out;
    }
}
