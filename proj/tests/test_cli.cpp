#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace
{
    struct Run
    {
        int code = -1;
        std::string out;
    };

    Run run(const std::string &args, const std::string &env = "")
    {
        std::string cmd = env + (env.empty() ? "" : " ") + PADENS_CLI + std::string(" ") + args + " 2>/dev/null";
        Run r;
        FILE *f = popen(cmd.c_str(), "r");
        REQUIRE(f != nullptr);
        std::array<char, 4096> buf;
        size_t n;
        while ((n = fread(buf.data(), 1, buf.size(), f)) > 0)
            r.out.append(buf.data(), n);
        int st = pclose(f);
        r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
        return r;
    }

    nlohmann::json json_of(const Run &r) { return nlohmann::json::parse(r.out); }
}

TEST_CASE("density and polynomials")
{
    Run r = run(R"(density --p 3 --S '{"p":3,"half_gram":[[0,"1/2"],["1/2",0]]}' --T 1)");
    REQUIRE(r.code == 0);
    CHECK(json_of(r)["density"] == "2/3");

    r = run("denpoly --p 3 --M '1*p^1,1*p^2,1'");
    REQUIRE(r.code == 0);
    auto j = json_of(r);
    CHECK(j["poly"] == nlohmann::json::array({1, 0, 0, -1}));
    CHECK(j["derived"] == 3);
    CHECK(j["checks"]["incoherent"] == true);

    r = run("level-density --p 3 --M '3,9' --N 9");
    REQUIRE(r.code == 0);
    j = json_of(r);
    CHECK(j["poly"] == nlohmann::json::array({1, 3, 2, -3, -3}));
    CHECK(j["derived"] == 14);
    CHECK(j["checks"]["central_value"] == 0);
}

TEST_CASE("Eisenstein coefficient output")
{
    Run r = run("eis-coeff --N 9 --T '3,0;0,9'");
    REQUIRE(r.code == 0);
    auto j = json_of(r);
    CHECK(j["diff"] == nlohmann::json::array({3}));
    CHECK(j["derived"] == 14);
    CHECK(j["derivative"]["rational"] == "28/27");
    CHECK(j["psi"] == 12);
    CHECK(j["audit"].size() == 5);
}

TEST_CASE("verification suites and tables")
{
    Run r = run("verify anadiff --p 3");
    CHECK(r.code == 0);
    auto j = json_of(r);
    CHECK(j["instances"] == j["passed"]);
    CHECK(run("verify anadiff --grid empty").code == 0);
    CHECK(run("verify nonsense").code == 2);

    r = run("tables --paper-examples --p 5");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("example,p,M,N,poly,derived,expected_poly,expected_derived,match", 0) == 0);
    CHECK(r.out.find(",no\n") == std::string::npos);
}

TEST_CASE("window fiber exit codes")
{
    Run r = run("window-fiber --p 3 --n 2 --verify");
    CHECK(r.code == 0);
    CHECK(json_of(r)["report"]["pass"] == true);
    // the displayed obstruction vanishes below the cap at p = 2
    CHECK(run("window-fiber --p 2 --n 1 --verify").code == 1);
}

TEST_CASE("usage errors and budget refusals")
{
    CHECK(run("").code == 2);
    CHECK(run("density --bogus").code == 2);
    CHECK(run("denpoly --p 4 --M 1").code == 2);
    CHECK(run("eis-coeff --N 9 --T '1,1;1,1'").code == 2);
    CHECK(run("--budget 10 density --p 3 --S 1,1,1,1 --T 1,1 --brute").code == 3);
    CHECK(run("density --p 3 --S 1,1,1,1 --T 1,1 --brute", "PADENS_BUDGET=10").code == 3);
    CHECK(run("density --p 3 --S 1,1 --T 1 --brute", "PADENS_BUDGET=100000").code == 0);
}
