#pragma once

#include <cstddef>
#include <cstdint>

namespace nmfkit {

/// Shared solver settings. The NMF driver consumes all fields; a standalone
/// NNLS solve uses maxiter_inner as its iteration budget.
struct SolverConfig {
    std::size_t maxiter_outer = 200;
    std::size_t maxiter_inner = 20;
    double kkt_tol = 1e-6;
    double eps_active = 1e-2;     // cap on the active-set threshold
    double rel_change_tol = 1e-9; // outer stop on |f_l - f_{l+1}| <= tol * max(1, f_l)
    std::int64_t seed = 0;

    void validate() const;
};

} // namespace nmfkit
