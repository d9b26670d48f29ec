#pragma once

#include "padens/qlattice.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace padens
{
    // 2x2 symmetric target T = (1/2)((x_i, x_j))
    struct SymTarget
    {
        std::array<std::array<Rational, 2>, 2> T;

        SymTarget() = default;
        SymTarget(const Rational &a, const Rational &b, const Rational &c);
        static SymTarget parse(const std::string &s); // "a,b;b,c"

        Rational det() const { return T[0][0] * T[1][1] - T[0][1] * T[1][0]; }
        Rational trace() const { return T[0][0] + T[1][1]; }
        bool positive_definite() const { return T[0][0] > 0 && det() > 0; }
        QuadLattice at(const Prime &v) const; // M_v
        std::string str() const;
    };

    Integer psi_index(long N);

    // primes that can possibly lie in Diff(T, Delta(N))
    std::vector<long> diff_candidates(const SymTarget &T, long N);
    bool represented_at(const SymTarget &T, long N, const Prime &l);
    std::vector<long> diff_set(const SymTarget &T, long N);

    // rational * 2^{half_twos / 2}; the sqrt(2) power only shows up at v = 2
    struct HalfTwoValue
    {
        Rational rational = 0;
        int half_twos = 0;
        std::string note;

        std::string str() const;
    };
    HalfTwoValue operator*(const HalfTwoValue &a, const HalfTwoValue &b);

    HalfTwoValue whittaker_finite(const SymTarget &T, long N, const Prime &v, int k);

    // c_p * derived_level_density(M, N), a multiple of log p
    struct LogMultiple
    {
        HalfTwoValue coefficient;
        long log_prime = 0;
        Integer derived;
        HalfTwoValue c_p;
    };
    HalfTwoValue whittaker_constant(long N, const Prime &p);
    LogMultiple whittaker_derivative(const QuadLattice &M, long N);

    // -2^{7/2} pi^2 det(y)^{3/4} q^T, q^T = exp(-2 pi tr(T y)), kept symbolic
    struct ArchFactor
    {
        int sign = -1;
        Rational two_exponent = Rational(7, 2);
        int pi_exponent = 2;
        Rational det_y = 1;           // raised to 3/4
        Rational trace_Ty = 0;        // q^T = exp(-2 pi trace_Ty)
        double numeric(bool include_qT = true) const;
    };
    using RMatrix2 = std::array<std::array<Rational, 2>, 2>;
    ArchFactor whittaker_arch(const SymTarget &T, const RMatrix2 &y);
    RMatrix2 identity2();
    RMatrix2 parse_matrix2(const std::string &s);

    struct GoodPrimeAudit
    {
        long prime = 0;
        HalfTwoValue value;
        bool unit = false;
    };

    struct EisCoefficient
    {
        std::vector<long> diff_primes;
        bool zero = true;
        std::optional<long> derivative_prime;
        HalfTwoValue finite_product;     // prod over finite v != p of W_{T,v}(1, 0)
        HalfTwoValue derivative;         // c_p * derived, coefficient of log p
        Integer derived;
        HalfTwoValue rational_part;      // finite_product * derivative
        HalfTwoValue central_value;      // with W_{T,p}(1, 0) in place of the derivative
        ArchFactor arch;
        Rational degree_factor;          // psi(N) / 24
        // degree_factor * rational_part * (-2^{7/2}); times pi^2 det(y)^{3/4} log p
        HalfTwoValue predicted_degree;
        std::vector<long> scanned;
        std::vector<GoodPrimeAudit> audit;
    };
    EisCoefficient eis_coeff_derivative(const SymTarget &T, const RMatrix2 &y, long N, unsigned audit_seed = 1);
}
