#pragma once

#include <cstdint>
#include <vector>

#include "nmfkit/nnls.hpp"

namespace nmfkit {

struct OracleSolution {
    std::vector<double> solution;
    double objective = 0.0;
    std::uint32_t active_pattern = 0; // bit i set when variable i is pinned at zero
};

/// Brute-force NNLS reference: enumerates every subset of variables pinned at
/// zero, solves the reduced normal equations on the complement, keeps
/// candidates that are feasible and KKT-consistent, and returns the best.
/// Trusted over the iterative solver on small instances; refuses dimensions
/// above 14. Ties within 1e-12 go to the smaller pattern by cardinality, then
/// lexicographically by index list.
OracleSolution oracle_nnls(const NnlsProblem& p);

} // namespace nmfkit
