#include "padens/denpoly.hpp"
#include "padens/eisenstein.hpp"
#include "padens/repcount.hpp"
#include "padens/verify.hpp"
#include "padens/window.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace padens;
using Json = nlohmann::ordered_json;

namespace
{
    enum Exit
    {
        ok = 0,
        verification_failed = 1,
        usage = 2,
        budget = 3
    };

    Json poly_json(const DensityPolynomial &P)
    {
        Json a = Json::array();
        for (auto &c : P.coeffs)
            a.push_back(c.fits_slong_p() ? Json(c.get_si()) : Json(to_string(c)));
        return a;
    }

    Json int_json(const Integer &x) { return x.fits_slong_p() ? Json(x.get_si()) : Json(to_string(x)); }

    QuadLattice lattice_from_json(const Json &j, std::optional<long> p)
    {
        long jp = j.at("p").get<long>();
        if (p && *p != jp)
            throw DomainError("lattice JSON has p = " + std::to_string(jp) + " but --p is " + std::to_string(*p));
        RMatrix m;
        for (auto &row : j.at("half_gram"))
        {
            std::vector<Rational> r;
            for (auto &x : row)
                r.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>()));
            m.push_back(r);
        }
        if (j.contains("rank") && j.at("rank").get<size_t>() != m.size())
            throw DomainError("lattice JSON: rank does not match half_gram");
        return QuadLattice(Prime(jp), m);
    }

    // inline JSON, a JSON file, or diagonal shorthand
    QuadLattice read_lattice(const std::string &s, std::optional<long> p)
    {
        try
        {
            if (!s.empty() && s.front() == '{')
                return lattice_from_json(Json::parse(s), p);
            if (std::filesystem::is_regular_file(s))
            {
                std::ifstream in(s);
                return lattice_from_json(Json::parse(in), p);
            }
        }
        catch (const Json::exception &e)
        {
            throw DomainError(std::string("lattice JSON: ") + e.what());
        }
        if (!p)
            throw DomainError("diagonal shorthand needs --p");
        return parse_diagonal(s, Prime(*p));
    }

    Json lattice_json(const QuadLattice &L)
    {
        Json g = Json::array();
        for (auto &row : L.half_gram())
        {
            Json r = Json::array();
            for (auto &x : row)
                r.push_back(to_string(x));
            g.push_back(r);
        }
        return {{"p", L.p().value()}, {"rank", L.rank()}, {"half_gram", g}};
    }

    Json half_two_json(const HalfTwoValue &v)
    {
        Json j{{"rational", to_string(v.rational)}, {"sqrt2_exponent", v.half_twos}};
        if (!v.note.empty())
            j["note"] = v.note;
        return j;
    }

    void emit(const Json &j) { std::cout << j.dump(2) << "\n"; }

    struct Options
    {
        std::string budget;
        long p = 0;
        std::string S, T, M, N, y, grid = "small", suite;
        int d = -1;
        int eps = 1;
        long n = 0, level = 1;
        unsigned seed = 1;
        bool brute = false, verify = false, paper_examples = false;
    };

    Rational read_N(const std::string &s)
    {
        if (s.empty())
            throw DomainError("--N is required");
        return parse_rational(s);
    }

    int cmd_density(const Options &o)
    {
        QuadLattice S = read_lattice(o.S, o.p ? std::optional<long>(o.p) : std::nullopt);
        QuadLattice T = read_lattice(o.T, S.p().value());
        if (!(S.p() == T.p()))
            throw DomainError("S and T live over different primes");
        int d = o.d >= 0 ? o.d : stable_depth(T);
        if (d < 1)
            throw DomainError("--d must be at least 1");
        RepCount c = o.brute ? count_reps_bruteforce(S, T, d) : count_reps_fast(S, T, d);
        Json j{{"count", to_string(c.count)}, {"d", d}};
        if (o.d >= 0)
            j["density"] = to_string(c.normalized(S.p()));
        else
            j["density"] = to_string(density(S, T, {o.brute}));
        emit(j);
        return ok;
    }

    int cmd_denpoly(const Options &o)
    {
        QuadLattice L = read_lattice(o.M, o.p ? std::optional<long>(o.p) : std::nullopt);
        DensityPolynomial P = den_poly(L, o.eps);
        bool inc = incoherent(L, o.eps);
        Json j{{"poly", poly_json(P)}, {"derived", nullptr}, {"checks", {{"incoherent", inc}, {"central_value", int_json(P.eval(1))}}}};
        if (inc)
            j["derived"] = int_json(derived_density(L, o.eps));
        emit(j);
        return inc && P.eval(1) != 0 ? verification_failed : ok;
    }

    int cmd_level_density(const Options &o)
    {
        QuadLattice M = read_lattice(o.M, o.p ? std::optional<long>(o.p) : std::nullopt);
        Rational N = read_N(o.N);
        DensityPolynomial direct = level_density_direct(M, N, o.eps);
        DensityPolynomial diff = level_density_diff(M, N, o.eps);
        bool inc = incoherent(with_line(M, N), o.eps);
        Json j{{"poly", poly_json(direct)},
               {"derived", nullptr},
               {"checks", {{"difference_formula", direct == diff}, {"incoherent", inc}, {"central_value", int_json(direct.eval(1))}}}};
        if (inc && o.eps == 1)
            j["derived"] = int_json(derived_level_density(M, N));
        emit(j);
        bool good = direct == diff && (!inc || direct.eval(1) == 0);
        return good ? ok : verification_failed;
    }

    int cmd_derived(const Options &o)
    {
        QuadLattice M = read_lattice(o.M, o.p ? std::optional<long>(o.p) : std::nullopt);
        Json j;
        if (o.N.empty())
        {
            DensityPolynomial P = den_poly(M, o.eps);
            j = {{"poly", poly_json(P)}, {"derived", int_json(derived_density(M, o.eps))}, {"checks", {{"central_value", 0}}}};
        }
        else
        {
            Rational N = read_N(o.N);
            DensityPolynomial P = level_density_direct(M, N, 1);
            j = {{"poly", poly_json(P)},
                 {"derived", int_json(derived_level_density(M, N))},
                 {"checks", {{"two_routes_agree", true}, {"central_value", 0}}}};
        }
        emit(j);
        return ok;
    }

    int cmd_int_level(const Options &o)
    {
        QuadLattice M = read_lattice(o.M, o.p ? std::optional<long>(o.p) : std::nullopt);
        Rational N = read_N(o.N);
        Integer v = int_level(M, N);
        Json checks{{"route", "derived level density"}};
        if (valuation(N, M.p()).value_or(0) >= 2)
        {
            Rational Np = N / Rational(M.p().value() * M.p().value());
            Integer a = int_sharp(with_line(M, N));
            Integer b = incoherent(with_line(M, Np)) ? int_sharp(with_line(M, Np)) : Integer(0);
            checks["sharp_difference"] = int_json(a - b);
            checks["sharp_difference_agrees"] = a - b == v;
        }
        emit({{"derived", int_json(v)}, {"checks", checks}});
        return checks.value("sharp_difference_agrees", true) ? ok : verification_failed;
    }

    int cmd_int_sharp(const Options &o)
    {
        QuadLattice L = read_lattice(o.M, o.p ? std::optional<long>(o.p) : std::nullopt);
        emit({{"poly", poly_json(den_poly(L, 1))}, {"derived", int_json(int_sharp(L))}, {"checks", {{"incoherent", true}}}});
        return ok;
    }

    int cmd_verify(const Options &o)
    {
        SuiteOptions so;
        so.p = o.p ? o.p : 3;
        so.grid = o.grid;
        so.eps = o.eps;
        if (!o.M.empty())
            so.M = read_lattice(o.M, so.p);
        if (!o.N.empty())
            so.N = read_N(o.N);
        auto reports = run_suite(o.suite, so);
        Json list = Json::array();
        int passed = 0;
        for (auto &r : reports)
        {
            passed += r.pass;
            Json w = Json::object();
            for (auto &[k, v] : r.witness)
                w[k] = v;
            list.push_back({{"theorem", r.suite}, {"instance", r.instance}, {"pass", r.pass}, {"witness", w}, {"seconds", r.seconds}});
        }
        emit({{"suite", o.suite},
              {"p", so.p},
              {"grid", so.grid},
              {"instances", reports.size()},
              {"passed", passed},
              {"checks", {{"all_pass", passed == (int)reports.size()}}},
              {"reports", list}});
        return passed == (int)reports.size() ? ok : verification_failed;
    }

    int cmd_window(const Options &o)
    {
        Prime p(o.p ? o.p : 3);
        if (o.n < 0)
            throw DomainError("--n must be nonnegative");
        int n = (int)o.n;
        Json j{{"p", p.value()}, {"n", n}, {"lift_level", max_lift_level(n, p)}, {"expected_lift_level", n / 2}};
        auto sparse = [](const TruncSeries &s) {
            Json m = Json::object();
            for (auto &[ij, c] : s.terms())
                m[std::to_string(ij.first) + "," + std::to_string(ij.second)] = to_string(c);
            return m;
        };
        j["expected_leadform"] = sparse(expected_leadform(n, p));
        int code = ok;
        try
        {
            j["obstruction"] = sparse(obstruction_leadform(n, p));
        }
        catch (const VerificationFailure &e)
        {
            j["obstruction"] = nullptr;
            j["obstruction_error"] = e.what();
            code = verification_failed;
        }
        if (o.verify)
        {
            SpciReport r = verify_spci(n, p);
            Json f = Json::array();
            for (auto &x : r.failures)
                f.push_back(x);
            j["report"] = {{"lift_ok", r.lift_ok},           {"monotone_ok", r.monotone_ok},
                           {"leadform_ok", r.leadform_ok},   {"fiber_ok", r.fiber_ok},
                           {"divisibility_ok", r.divisibility_ok}, {"factorization_ok", r.factorization_ok},
                           {"pass", r.ok()},                 {"failures", f}};
            if (!r.ok())
                code = verification_failed;
        }
        emit(j);
        return code;
    }

    int cmd_eis(const Options &o)
    {
        if (o.level < 1)
            throw DomainError("--N must be a positive integer");
        SymTarget T = SymTarget::parse(o.T);
        RMatrix2 y = o.y.empty() ? identity2() : parse_matrix2(o.y);
        EisCoefficient e = eis_coeff_derivative(T, y, o.level, o.seed);
        Json diff = Json::array();
        for (long l : e.diff_primes)
            diff.push_back(l);
        Json scanned = Json::array();
        for (long l : e.scanned)
            scanned.push_back(l);
        Json audit = Json::array();
        bool audit_ok = true;
        for (auto &a : e.audit)
        {
            audit.push_back({{"prime", a.prime}, {"value", half_two_json(a.value)}, {"unramified", a.unit}});
            audit_ok = audit_ok && a.unit;
        }
        Json j{{"diff", diff},
               {"finite_product", to_string(e.finite_product.rational)},
               {"finite_product_sqrt2_exponent", e.finite_product.half_twos},
               {"derivative_prime", e.derivative_prime ? Json(*e.derivative_prime) : Json(nullptr)},
               {"rational_part", to_string(e.rational_part.rational)},
               {"rational_part_sqrt2_exponent", e.rational_part.half_twos},
               {"derived", e.zero ? Json(nullptr) : int_json(e.derived)},
               {"derivative", half_two_json(e.derivative)},
               {"central_value", to_string(e.central_value.rational)},
               {"arch",
                {{"sign", e.arch.sign},
                 {"two_exponent", to_string(e.arch.two_exponent)},
                 {"pi_exponent", e.arch.pi_exponent},
                 {"det_y", to_string(e.arch.det_y)},
                 {"det_y_exponent", "3/4"},
                 {"qT", "exp(-2*pi*" + to_string(e.arch.trace_Ty) + ")"},
                 {"trace_Ty", to_string(e.arch.trace_Ty)}}},
               {"psi", int_json(psi_index(o.level))},
               {"degree_factor", to_string(e.degree_factor)},
               {"predicted_degree", {{"value", half_two_json(e.predicted_degree)}, {"times", "pi^2 * det(y)^(3/4) * log p"}}},
               {"scanned_primes", scanned},
               {"audit", audit}};
        emit(j);
        return audit_ok && e.central_value.rational == 0 ? ok : verification_failed;
    }

    int cmd_tables(const Options &o)
    {
        if (!o.paper_examples)
            throw DomainError("tables: only --examples is available");
        Prime p(o.p ? o.p : 3);
        auto rows = worked_examples(p);
        auto poly = [](const std::vector<Integer> &c) {
            std::string s;
            for (size_t i = 0; i < c.size(); ++i)
                s += (i ? " " : "") + to_string(c[i]);
            return s;
        };
        std::cout << "example,p,M,N,poly,derived,expected_poly,expected_derived,match\n";
        bool all = true;
        for (auto &r : rows)
        {
            std::cout << r.example << "," << r.p << ",\"" << r.M << "\"," << r.N << "," << poly(r.poly) << ","
                      << to_string(r.derived) << "," << poly(r.expected_poly) << "," << to_string(r.expected_derived)
                      << "," << (r.match() ? "yes" : "no") << "\n";
            all = all && r.match();
        }
        return all ? ok : verification_failed;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"padens: local densities, level-N derived densities, window obstructions"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--budget", o.budget, "enumeration budget (primitive operations)")->envname("PADENS_BUDGET");

    auto with_lattice = [&](CLI::App *c, bool needN) {
        c->add_option("--p", o.p, "prime");
        c->add_option("--M", o.M, "lattice: JSON, JSON file, or diagonal shorthand u*p^a,...")->required();
        auto N = c->add_option("--N", o.N, "level value N");
        if (needN)
            N->required();
        c->add_option("--eps", o.eps, "sign of the self-dual lattice")->check(CLI::IsMember({-1, 1}));
    };

    auto density = app.add_subcommand("density", "representation density Den(S, T)");
    density->add_option("--p", o.p, "prime");
    density->add_option("--S", o.S, "ambient lattice")->required();
    density->add_option("--T", o.T, "target lattice")->required();
    density->add_option("--d", o.d, "count modulo p^d instead of the stable density");
    density->add_flag("--brute", o.brute, "use the brute-force counter");

    auto denpoly = app.add_subcommand("denpoly", "density polynomial Den(X, L)");
    denpoly->add_option("--p", o.p, "prime");
    denpoly->add_option("--M", o.M, "lattice")->required();
    denpoly->add_option("--eps", o.eps, "sign")->check(CLI::IsMember({-1, 1}));

    auto level = app.add_subcommand("level-density", "level-N density polynomial of M");
    with_lattice(level, true);
    auto derived = app.add_subcommand("derived", "derived density (level-N when --N is given)");
    with_lattice(derived, false);
    auto intlevel = app.add_subcommand("int-level", "Int at level N via the derived level density");
    with_lattice(intlevel, true);
    auto intsharp = app.add_subcommand("int-sharp", "Int^sharp of a rank-3 lattice");
    intsharp->add_option("--p", o.p, "prime");
    intsharp->add_option("--M", o.M, "rank-3 lattice")->required();

    auto verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", o.suite, "anadecom | anadiff | induction | stable | spci")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    verify->add_option("--p", o.p, "prime");
    verify->add_option("--grid", o.grid, "small | full | empty")->check(CLI::IsMember({"small", "full", "empty"}));
    verify->add_option("--M", o.M, "single-instance lattice");
    verify->add_option("--N", o.N, "single-instance level value");
    verify->add_option("--eps", o.eps, "sign")->check(CLI::IsMember({-1, 1}));

    auto window = app.add_subcommand("window-fiber", "window lifting obstruction and special fiber");
    window->add_option("--p", o.p, "prime")->required();
    window->add_option("--n", o.n, "valuation n")->required();
    window->add_flag("--verify", o.verify, "run the full check report");

    auto eis = app.add_subcommand("eis-coeff", "derivative of the Fourier coefficient at T");
    eis->add_option("--N", o.level, "level N")->required();
    eis->add_option("--T", o.T, "positive-definite T as \"a,b;b,c\"")->required();
    eis->add_option("--y", o.y, "imaginary part y as \"a,b;b,c\" (default identity)");
    eis->add_option("--seed", o.seed, "seed for the good-prime audit");

    auto tables = app.add_subcommand("tables", "CSV tables");
    tables->add_flag("--examples,--paper-examples", o.paper_examples, "the three worked examples");
    tables->add_option("--p", o.p, "prime");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return usage;
    }

    try
    {
        if (!o.budget.empty())
        {
            Integer b;
            if (b.set_str(o.budget, 10) != 0 || b < 0)
                throw DomainError("--budget must be a nonnegative integer");
            enumeration_budget() = b;
        }
        CLI::App *sub = app.get_subcommands().front();
        std::string name = sub->get_name();
        if (name == "density")
            return cmd_density(o);
        if (name == "denpoly")
            return cmd_denpoly(o);
        if (name == "level-density")
            return cmd_level_density(o);
        if (name == "derived")
            return cmd_derived(o);
        if (name == "int-level")
            return cmd_int_level(o);
        if (name == "int-sharp")
            return cmd_int_sharp(o);
        if (name == "verify")
            return cmd_verify(o);
        if (name == "window-fiber")
            return cmd_window(o);
        if (name == "eis-coeff")
            return cmd_eis(o);
        return cmd_tables(o);
    }
    catch (const BudgetExceeded &e)
    {
        std::cerr << "budget refusal: " << e.what() << "\n";
        return budget;
    }
    catch (const VerificationFailure &e)
    {
        std::cerr << "verification failure: " << e.what() << "\n";
        return verification_failed;
    }
    catch (const PrecisionExhausted &e)
    {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return verification_failed;
    }
    catch (const DomainError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
}
