#pragma once

#include "padens/qlattice.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace padens
{
    struct VerificationReport
    {
        std::string suite;
        std::string instance;
        bool pass = false;
        std::map<std::string, std::string> witness; // filled on failure, plus key values
        double seconds = 0;
    };

    struct SuiteOptions
    {
        long p = 3;
        std::string grid = "small"; // small | full | empty
        int eps = 1;
        // a single instance instead of the grid
        std::optional<QuadLattice> M;
        std::optional<Rational> N;
    };

    std::vector<std::string> suite_names();
    std::vector<VerificationReport> run_suite(const std::string &name, const SuiteOptions &opt);

    // one row per incoherent instance of the three worked examples
    struct ExampleRow
    {
        int example = 0;
        long p = 0;
        std::string M;
        std::string N;
        std::vector<Integer> poly, expected_poly;
        Integer derived, expected_derived;
        bool match() const { return poly == expected_poly && derived == expected_derived; }
    };
    std::vector<ExampleRow> worked_examples(const Prime &p, int max_k3 = 3);

    // "u1*p^a1,u2*p^a2,..." or plain rationals "3,18"
    QuadLattice parse_diagonal(const std::string &s, const Prime &p);
    // u * p^a
    Rational scaled_unit(long u, long a, const Prime &p);
}
