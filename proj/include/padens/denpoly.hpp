#pragma once

#include "padens/poly.hpp"
#include "padens/qlattice.hpp"
#include "padens/repcount.hpp"

#include <string>

namespace padens
{
    // Nor^eps(X, n) as a polynomial in X
    QPoly nor_factor(int n, int eps, const Prime &p);

    // Den(H_k^eps, L) for rank L <= 3 (rank 3 via the primitive decomposition)
    Rational den_selfdual(int k, int eps, const QuadLattice &L);
    // Pden(H_k^eps, L), rank L = 1
    Rational pden_selfdual(int k, int eps, const QuadLattice &L);
    // Den(delta(N) (+) H_k^eps, M), rank M <= 2
    Rational den_delta(const Rational &N, int k, int eps, const QuadLattice &M);

    DensityPolynomial den_poly(const QuadLattice &L, int eps = 1);
    DensityPolynomial den_flat_poly(const QuadLattice &L, int eps = 1);
    DensityPolynomial pden_poly(const QuadLattice &L, int eps = 1);
    Integer derived_density(const QuadLattice &L, int eps = 1);

    Rational rank1_pden_closed(int k, int eps, const Rational &N, const Prime &p);

    // sum_i p^{(2-k+r)i} Pden(H_k, <p^{-2i}N>) Den(delta(p^{-2i}N) (+) H_{k-4}, M)
    Rational primitive_decomposition(int k, int eps, const QuadLattice &M, const Rational &N);
    Rational primitive_decomposition(const QuadLattice &H, const QuadLattice &M, const Rational &N);

    DensityPolynomial level_density_direct(const QuadLattice &M, const Rational &N, int eps = 1);
    DensityPolynomial level_density_diff(const QuadLattice &M, const Rational &N, int eps = 1);
    Integer derived_level_density(const QuadLattice &M, const Rational &N);

    struct InductionReport
    {
        bool holds = false;
        bool above_threshold = false;
        QPoly lhs, rhs;
        std::string diagnostic;
    };
    InductionReport induction_check(const QuadLattice &L, const Rational &N, int eps = 1);

    // smallest k with k > (a_r - v(N0)) / 2
    int stable_threshold(const QuadLattice &M, const Rational &N0);
    DensityPolynomial stable_level_density(const QuadLattice &M, const Rational &N0, int k, int eps = 1);

    Integer int_level(const QuadLattice &M, const Rational &N);
    Integer int_sharp(const QuadLattice &L);

    // M (+) <N>
    QuadLattice with_line(const QuadLattice &M, const Rational &N);
    // does L (x) Q_p fail to embed in the space of H_{rank L + 1}^eps?
    bool incoherent(const QuadLattice &L, int eps = 1);
}
