#pragma once

#include "padens/padic.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace padens
{
    using Monomial = std::pair<int, int>; // (i, j) ~ t1^i t2^j

    // Truncated series in t1, t2: monomials with i + j < cap, coefficients mod p^prec.
    class TruncSeries
    {
    public:
        TruncSeries() : TruncSeries(Prime(2), 1, 1) {}
        TruncSeries(const Prime &p, int prec, int cap);

        static TruncSeries constant(const Prime &p, int prec, int cap, const Integer &c);
        static TruncSeries monomial(const Prime &p, int prec, int cap, int i, int j, const Integer &c = 1);

        const Prime &p() const { return p_; }
        int precision() const { return prec_; }
        int cap() const { return cap_; }
        const std::map<Monomial, Integer> &terms() const { return terms_; }
        Integer coeff(int i, int j) const;
        bool is_zero() const { return terms_.empty(); }

        TruncSeries operator+(const TruncSeries &o) const;
        TruncSeries operator-(const TruncSeries &o) const;
        TruncSeries operator-() const;
        TruncSeries operator*(const TruncSeries &o) const;
        TruncSeries scaled(const Integer &c) const;
        bool operator==(const TruncSeries &o) const;

        // smallest p-adic valuation among the coefficients; prec() if zero (unknown beyond)
        int content_valuation() const;
        // exact division by p^s, losing s digits of precision
        TruncSeries divide_p(int s) const;
        TruncSeries truncate(int cap) const;
        // same terms under another cap; raising it is only sound for exact polynomials
        TruncSeries with_cap(int cap) const;
        TruncSeries reduce(int prec) const; // coefficients mod p^prec
        int order() const;                  // lowest total degree, -1 if zero

        std::string str() const;

    private:
        void put(int i, int j, Integer c);
        void check_compatible(const TruncSeries &o) const;

        Prime p_;
        int prec_;
        int cap_;
        std::map<Monomial, Integer> terms_;
    };

    // t_i -> t_i^p, coefficients fixed
    TruncSeries sigma(const TruncSeries &s);

    // p^{-scale} * entries
    struct WindowMatrix
    {
        int scale = 0;
        std::array<TruncSeries, 4> e; // row-major 2x2

        const TruncSeries &at(int r, int c) const { return e[2 * r + c]; }
        bool integral() const { return scale <= 0; }
        // integrality in A_cap = W[[t1,t2]] / (t1,t2)^cap
        bool integral_below(int cap) const;
        // divide common powers of p out of the entries while scale > 0
        void normalize();
    };

    struct WindowPair
    {
        WindowMatrix X, Y;
    };

    // working precision / degree cap used for valuation n
    int window_precision(int n);
    int window_cap(int n, const Prime &p);

    WindowPair initial_matrices(int n, const Prime &p, int prec, int cap);
    // X' = p^{-1} U'(t2) sigma(X) U(t1),  Y' = p^{-1} U'(t1) sigma(Y) U(t2)
    WindowPair recursion_step(const WindowPair &w);
    // X(p^l), Y(p^l) for l = 0 .. levels
    std::vector<WindowPair> window_tower(int n, const Prime &p, int levels, int prec, int cap);

    int max_lift_level(int n, const Prime &p);

    // the displayed leading form of the obstruction, reduced mod p and truncated at the cap
    TruncSeries expected_leadform(int n, const Prime &p);
    // (1,2) entry of the first non-integral X(p^l), scaled to be integral, mod p and truncated
    TruncSeries obstruction_leadform(int n, const Prime &p);

    enum class FiberKind
    {
        special_cycle,
        level_structure
    };
    // exact product polynomial over Z/p
    TruncSeries predicted_fiber(int n, const Prime &p, FiberKind which);

    // scale so the lowest nonzero coefficient (graded order) is 1; series must be mod p
    TruncSeries unit_normalized(const TruncSeries &s);

    // a == unit * b after truncation below total degree cap (both mod p)
    bool same_up_to_unit(const TruncSeries &a, const TruncSeries &b, int cap);

    // normal form modulo (t1,t2)^cap + (t1^{p^k1} - t2^{p^k2}); rewrites the higher power
    TruncSeries reduce_mod_binomial(const TruncSeries &s, long a, long b);

    struct SpciReport
    {
        int n = 0;
        long p = 0;
        int lift_level = -1;
        bool lift_ok = false;
        bool monotone_ok = false;
        bool leadform_ok = false;
        bool fiber_ok = false;
        bool divisibility_ok = false;
        bool factorization_ok = false;
        TruncSeries leadform;
        std::vector<std::string> failures;
        bool ok() const
        {
            return lift_ok && monotone_ok && leadform_ok && fiber_ok && divisibility_ok && factorization_ok;
        }
    };

    SpciReport verify_spci(int n, const Prime &p);
}
