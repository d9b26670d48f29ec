#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padens/verify.hpp"

#include <set>

using namespace padens;

TEST_CASE("small grids pass")
{
    for (const auto &name : suite_names())
        for (long p : {3L, 5L})
        {
            if (name == "spci" && p == 5)
                continue;
            SuiteOptions opt;
            opt.p = p;
            auto reports = run_suite(name, opt);
            INFO(name << " p=" << p);
            CHECK_FALSE(reports.empty());
            for (auto &r : reports)
            {
                INFO(r.instance);
                CHECK(r.pass);
                CHECK(r.suite == name);
            }
        }
}

TEST_CASE("spci at p = 2 reports failures as data")
{
    SuiteOptions opt;
    opt.p = 2;
    auto reports = run_suite("spci", opt);
    REQUIRE(reports.size() >= 2);
    CHECK(reports[0].pass); // n = 0
    bool any_fail = false;
    for (auto &r : reports)
        if (!r.pass)
        {
            any_fail = true;
            CHECK_FALSE(r.witness.empty());
        }
    CHECK(any_fail);
}

TEST_CASE("options are validated")
{
    SuiteOptions opt;
    opt.grid = "empty";
    CHECK(run_suite("anadiff", opt).empty());
    CHECK_THROWS_AS(run_suite("nonsense", SuiteOptions{}), DomainError);
    SuiteOptions bad;
    bad.grid = "huge";
    CHECK_THROWS_AS(run_suite("anadiff", bad), DomainError);
    bad.grid = "small";
    bad.eps = 0;
    CHECK_THROWS_AS(run_suite("anadiff", bad), DomainError);
}

TEST_CASE("single instance mode")
{
    SuiteOptions opt;
    opt.M = parse_diagonal("1*p^1,2*p^2", Prime(3));
    opt.N = 9;
    auto reports = run_suite("anadiff", opt);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].pass);
}

TEST_CASE("worked examples")
{
    for (long p : {3L, 5L})
    {
        auto rows = worked_examples(Prime(p), 3);
        std::set<int> seen;
        for (auto &r : rows)
        {
            seen.insert(r.example);
            INFO("example " << r.example << " M=" << r.M << " N=" << r.N);
            CHECK(r.match());
        }
        CHECK(seen == std::set<int>{1, 2, 3});
    }
}

TEST_CASE("diagonal shorthand")
{
    Prime p(3);
    CHECK(scaled_unit(2, 3, p) == 54);
    QuadLattice L = parse_diagonal("1*p^1,2*p^2", p);
    CHECK(L.half_gram() == make_diagonal({3, 18}, p).half_gram());
    CHECK(parse_diagonal("3,18", p).half_gram() == L.half_gram());
    CHECK(parse_diagonal("1/3", p).half_gram()[0][0] == Rational(1, 3));
    CHECK_THROWS_AS(parse_diagonal("1*q^2", p), DomainError);
    CHECK_THROWS_AS(parse_diagonal("1*5^2", p), DomainError);
    CHECK(parse_diagonal("2*3^1", p).half_gram()[0][0] == 6);
    CHECK_THROWS_AS(parse_diagonal("", p), DomainError);
}
