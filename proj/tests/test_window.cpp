#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padens/window.hpp"

#include <random>

using namespace padens;

namespace
{
    // dense reference: c[i][j], no truncation, exact integers
    using Dense = std::vector<std::vector<Integer>>;

    Dense dense_mul(const Dense &a, const Dense &b)
    {
        size_t n = a.size() + b.size();
        Dense out(n, std::vector<Integer>(n, 0));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a[i].size(); ++j)
                for (size_t k = 0; k < b.size(); ++k)
                    for (size_t l = 0; l < b[k].size(); ++l)
                        out[i + k][j + l] += a[i][j] * b[k][l];
        return out;
    }

    TruncSeries from_dense(const Dense &d, const Prime &p, int prec, int cap)
    {
        TruncSeries s(p, prec, cap);
        for (size_t i = 0; i < d.size(); ++i)
            for (size_t j = 0; j < d[i].size(); ++j)
                if (d[i][j] != 0 && (int)(i + j) < cap)
                    s = s + TruncSeries::monomial(p, prec, cap, (int)i, (int)j, d[i][j]);
        return s;
    }

    Dense random_dense(std::mt19937 &rng, int deg)
    {
        std::uniform_int_distribution<int> c(-30, 30);
        Dense d(deg, std::vector<Integer>(deg, 0));
        for (int i = 0; i < deg; ++i)
            for (int j = 0; i + j < deg; ++j)
                d[i][j] = c(rng);
        return d;
    }

    TruncSeries t(const Prime &p, int cap, int i, int j, long c = 1) { return TruncSeries::monomial(p, 1, cap, i, j, c); }
}

TEST_CASE("truncated arithmetic matches a dense reference")
{
    std::mt19937 rng(7);
    for (long pv : {2L, 3L, 5L})
    {
        Prime p(pv);
        for (int trial = 0; trial < 40; ++trial)
        {
            int prec = 1 + trial % 4, cap = 2 + trial % 7;
            Dense a = random_dense(rng, 5), b = random_dense(rng, 5);
            TruncSeries A = from_dense(a, p, prec, cap), B = from_dense(b, p, prec, cap);
            CHECK(A * B == from_dense(dense_mul(a, b), p, prec, cap));
            CHECK(A * B == B * A);
            CHECK((A + B) - B == A);
            CHECK(A + (-A) == TruncSeries(p, prec, cap));
        }
    }
}

TEST_CASE("Frobenius substitution")
{
    Prime p(3);
    int cap = 20;
    CHECK(sigma(t(p, cap, 1, 0)) == t(p, cap, 3, 0));
    CHECK(sigma(TruncSeries::constant(p, 1, cap, 2)) == TruncSeries::constant(p, 1, cap, 2));
    CHECK(sigma(t(p, cap, 1, 1)) == t(p, cap, 3, 3));
    CHECK(sigma(t(p, cap, 4, 3)).is_zero()); // degree 21 overflows
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        TruncSeries a = from_dense(random_dense(rng, 4), p, 3, cap), b = from_dense(random_dense(rng, 4), p, 3, cap);
        CHECK(sigma(a * b) == sigma(a) * sigma(b));
        CHECK(sigma(a + b) == sigma(a) + sigma(b));
    }
}

TEST_CASE("content valuation and exact division")
{
    Prime p(3);
    TruncSeries s = TruncSeries::monomial(p, 4, 5, 1, 0, 9) + TruncSeries::monomial(p, 4, 5, 0, 2, 18);
    CHECK(s.content_valuation() == 2);
    TruncSeries q = s.divide_p(2);
    CHECK(q.precision() == 2);
    CHECK(q == TruncSeries::monomial(p, 2, 5, 1, 0, 1) + TruncSeries::monomial(p, 2, 5, 0, 2, 2));
    CHECK(s.order() == 1);
    CHECK(TruncSeries(p, 4, 5).order() == -1);
}

TEST_CASE("initial matrices")
{
    Prime p(3);
    auto w0 = initial_matrices(0, p, 3, 9);
    CHECK(w0.X.at(0, 0) == TruncSeries::constant(p, 3, 9, 1));
    CHECK(w0.X.at(0, 1).is_zero());
    CHECK(w0.Y.at(1, 1) == TruncSeries::constant(p, 3, 9, 1));
    auto w2 = initial_matrices(2, p, 3, 9);
    CHECK(w2.X.at(0, 0) == TruncSeries::constant(p, 3, 9, 3));
    CHECK(w2.X.at(1, 1) == TruncSeries::constant(p, 3, 9, 3));
    auto w1 = initial_matrices(1, p, 3, 9);
    CHECK(w1.X.at(0, 0).is_zero());
    CHECK(w1.X.at(1, 1).is_zero());
    CHECK(w1.Y.at(0, 1) == -w1.X.at(0, 1));
    CHECK(w1.Y.at(1, 0) == -w1.X.at(1, 0));
    CHECK_THROWS_AS(initial_matrices(-1, p, 3, 9), DomainError);
}

TEST_CASE("one recursion step from the identity exposes t2 - t1")
{
    Prime p(3);
    int cap = 9;
    auto w = recursion_step(initial_matrices(0, p, 3, cap));
    CHECK_FALSE(w.X.integral());
    // p X(p) = U'(t2) U(t1) = [[p, t2 - t1], [0, p]]
    CHECK(w.X.scale == 1);
    CHECK(w.X.at(0, 1).reduce(1).truncate(3) == t(p, 3, 0, 1) - t(p, 3, 1, 0));
    CHECK(same_up_to_unit(obstruction_leadform(0, p), t(p, 3, 0, 1) - t(p, 3, 1, 0), 3));
}

TEST_CASE("lifting levels and leading forms at p = 3")
{
    Prime p(3);
    CHECK(max_lift_level(0, p) == 0);
    CHECK(max_lift_level(1, p) == 0);
    CHECK(max_lift_level(2, p) == 1);
    CHECK(max_lift_level(3, p) == 1);
    CHECK(max_lift_level(4, p) == 2);
    CHECK(same_up_to_unit(obstruction_leadform(1, p), t(p, 3, 1, 1), 3));
    // (t1 t2)^1 (t2^3 - t1^3) below degree 9
    CHECK(same_up_to_unit(obstruction_leadform(2, p), t(p, 9, 1, 4) - t(p, 9, 4, 1), 9));
}

TEST_CASE("at p = 2 the displayed obstruction vanishes below the cap")
{
    Prime p(2);
    CHECK(max_lift_level(0, p) == 0);
    CHECK(verify_spci(0, p).ok());
    for (int n = 1; n <= 3; ++n)
    {
        INFO("n=" << n);
        CHECK(expected_leadform(n, p).is_zero());
        CHECK(max_lift_level(n, p) > n / 2);
        CHECK_FALSE(verify_spci(n, p).ok());
    }
}

TEST_CASE("predicted fibers")
{
    Prime p(3);
    TruncSeries s1 = predicted_fiber(1, p, FiberKind::special_cycle);
    int cap = s1.cap();
    REQUIRE(cap > 6);
    TruncSeries a = t(p, cap, 3, 0) - t(p, cap, 0, 1), b = t(p, cap, 1, 0) - t(p, cap, 0, 3);
    CHECK(s1 == a * b);
    TruncSeries l1 = predicted_fiber(1, p, FiberKind::level_structure);
    TruncSeries c = t(p, l1.cap(), 1, 0) - t(p, l1.cap(), 0, 3), d = t(p, l1.cap(), 0, 1) - t(p, l1.cap(), 3, 0);
    CHECK(l1 == c * d);
    // degree p^2 + p + p^2
    TruncSeries s2 = predicted_fiber(2, p, FiberKind::special_cycle);
    int deg = 0;
    for (auto &[m, v] : s2.terms())
        deg = std::max(deg, m.first + m.second);
    CHECK(deg == 9 + 3 + 9);
    CHECK_THROWS_AS(predicted_fiber(0, p, FiberKind::level_structure), DomainError);
}

TEST_CASE("reduction modulo a binomial")
{
    Prime p(3);
    int cap = 30;
    std::mt19937 rng(5);
    for (auto [a, b] : {std::pair<long, long>{1, 3}, {3, 1}, {9, 1}, {3, 3}})
    {
        TruncSeries f = t(p, cap, (int)a, 0) - t(p, cap, 0, (int)b);
        for (int trial = 0; trial < 10; ++trial)
        {
            Dense g = random_dense(rng, 5);
            TruncSeries G = from_dense(g, p, 1, cap);
            CHECK(reduce_mod_binomial(f * G, a, b).is_zero());
            CHECK(reduce_mod_binomial(G, a, b) == reduce_mod_binomial(reduce_mod_binomial(G, a, b), a, b));
        }
        CHECK_FALSE(reduce_mod_binomial(t(p, cap, 1, 1), a, b).is_zero());
    }
}

TEST_CASE("full check of the special-fiber theorem at p = 3")
{
    for (int n = 0; n <= 4; ++n)
    {
        SpciReport r = verify_spci(n, Prime(3));
        INFO("n=" << n);
        for (auto &f : r.failures)
            INFO(f);
        CHECK(r.ok());
        CHECK(r.lift_level == n / 2);
    }
}
