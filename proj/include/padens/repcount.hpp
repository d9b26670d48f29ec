#pragma once

#include "padens/poly.hpp"
#include "padens/qlattice.hpp"

#include <optional>
#include <vector>

namespace padens
{
    struct RepCount
    {
        Integer count;
        int d = 0;
        long norm_exponent = 0; // d * (m n - n(n+1)/2)
        Rational normalized(const Prime &p) const { return Rational(count) * rpow(p.value(), -norm_exponent); }
    };

    struct ValueDistribution
    {
        int d = 0;
        std::vector<Integer> table; // table[v] = #{x : q(x) = v mod p^d}
    };

    // Global enumeration budget (primitive operations). Refusal, never approximation.
    Integer &enumeration_budget();
    void check_budget(const Integer &work, const std::string &what);

    long norm_exponent(int m, int n, int d);

    RepCount count_reps_bruteforce(const QuadLattice &S, const QuadLattice &T, int d);
    RepCount count_primitive_bruteforce(const QuadLattice &S, const QuadLattice &T, int d);

    // S = D (+) H^planes with D diagonal: the shape the fast counter handles
    struct CountingForm
    {
        std::vector<Rational> lines;
        int planes = 0;
        int rank() const { return (int)lines.size() + 2 * planes; }
    };
    std::optional<CountingForm> counting_form(const QuadLattice &S);
    CountingForm selfdual_form(int k, int eps, const Prime &p);   // H_k^eps
    CountingForm with_delta(CountingForm f, const Rational &N);   // f (+) delta(N)

    ValueDistribution value_distribution(const QuadLattice &S, int d);

    // Exact Den_d(D (+) H^K, T) as a polynomial in X = p^{-K}; rank T <= 2.
    QPoly density_census(const Prime &p, const std::vector<Rational> &lines, const QuadLattice &T, int d);
    int stable_depth(const QuadLattice &T);
    // census at the stable depth, confirmed one level deeper
    QPoly stable_census(const Prime &p, const std::vector<Rational> &lines, const QuadLattice &T);
    Rational eval_planes(const QPoly &census, const Prime &p, int planes);

    RepCount count_reps_fast(const QuadLattice &S, const QuadLattice &T, int d);

    struct DensityOptions
    {
        bool brute = false;
    };
    Rational density(const QuadLattice &S, const QuadLattice &T, DensityOptions opt = {});
    Rational pdensity(const QuadLattice &S, const QuadLattice &T, DensityOptions opt = {});

    // densities on a counting form directly
    Rational density_form(const Prime &p, const CountingForm &S, const QuadLattice &T);
    Rational pdensity_rank1(const Prime &p, const CountingForm &S, const Rational &N);
}
