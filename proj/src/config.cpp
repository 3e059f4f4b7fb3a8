#include "nmfkit/config.hpp"

#include "nmfkit/errors.hpp"

namespace nmfkit {

void SolverConfig::validate() const {
    if (maxiter_outer < 1 || maxiter_inner < 1) {
        throw ValidationError("solver config: iteration counts must be >= 1");
    }
    if (!(kkt_tol > 0.0) || !(eps_active > 0.0) || !(rel_change_tol > 0.0)) {
        throw ValidationError("solver config: tolerances must be positive");
    }
}

} // namespace nmfkit
