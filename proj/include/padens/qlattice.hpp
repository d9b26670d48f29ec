#pragma once

#include "padens/padic.hpp"

#include <string>
#include <vector>

namespace padens
{
    using RMatrix = std::vector<std::vector<Rational>>;

    struct SpaceInvariants
    {
        int dim = 0;
        int chi_disc = 1;
        int hasse = 1;
        SquareClass disc;

        bool operator==(const SpaceInvariants &o) const
        {
            return dim == o.dim && hasse == o.hasse && disc == o.disc;
        }
    };

    // Rank-n lattice over Z_p, stored as its half-Gram T_ij = (x_i, x_j)/2.
    class QuadLattice
    {
    public:
        QuadLattice(Prime p, RMatrix half_gram);

        const Prime &p() const { return p_; }
        int rank() const { return (int)T_.size(); }
        const RMatrix &half_gram() const { return T_; }
        const Rational &at(int i, int j) const { return T_[i][j]; }

        bool integral() const;
        bool nondegenerate() const { return det() != 0; }
        Rational det() const;                 // det of the half-Gram
        Rational disc() const;                // (-1)^{n(n-1)/2} det
        SpaceInvariants invariants() const;   // of L (x) Q_p
        std::string str() const;

    private:
        Prime p_;
        RMatrix T_;
    };

    Rational determinant(RMatrix m);

    QuadLattice make_hyperbolic(int k, const Prime &p);
    QuadLattice make_selfdual(int k, int eps, const Prime &p);
    QuadLattice make_rank1(const Rational &N, const Prime &p);
    QuadLattice make_delta(const Rational &N, const Prime &p);
    QuadLattice make_diagonal(const std::vector<Rational> &entries, const Prime &p);
    QuadLattice ortho_sum(const QuadLattice &a, const QuadLattice &b);
    QuadLattice zero_lattice(const Prime &p);

    Integer dual_index(const QuadLattice &L);

    // rational diagonalization of the space L (x) Q (basis change over Q)
    std::vector<Rational> rational_diagonal(const QuadLattice &L);

    struct JordanEntry
    {
        Rational value; // an entry eps * p^a of an isometric diagonal form
        SquareClass unit;
        long exponent;
    };
    // Z_p-congruent diagonal entries (zeros allowed), p odd
    std::vector<Rational> padic_diagonal(const QuadLattice &L);
    // Z_p-diagonalization, p odd; sorted by exponent
    std::vector<JordanEntry> diagonalize(const QuadLattice &L);

    // invariants of the space with given rational diagonal entries
    SpaceInvariants invariants_of_diagonal(const std::vector<Rational> &d, const Prime &p);

    // chi(disc L); 0 when the discriminant has odd valuation
    int chi_lattice(const QuadLattice &L);

    // Does the space U embed isometrically into W (both over Q_p)?
    bool space_embeds(const SpaceInvariants &U, const SpaceInvariants &W, const Prime &p);
    bool space_represents(const SpaceInvariants &V, const SpaceInvariants &B, const Prime &p);
    bool is_isometric_space(const QuadLattice &a, const QuadLattice &b);

    // Invariants of H_k^eps (x) Q_p
    SpaceInvariants selfdual_invariants(int k, int eps, const Prime &p);
}
