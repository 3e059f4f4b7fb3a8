#include "nmfkit/synthetic.hpp"

#include "nmfkit/errors.hpp"
#include "nmfkit/rng.hpp"

namespace nmfkit {

SyntheticKind synthetic_kind_from_string(const std::string& name) {
    if (name == "synthetic-uniform" || name == "uniform") return SyntheticKind::uniform;
    if (name == "synthetic-lowrank" || name == "lowrank") return SyntheticKind::lowrank;
    throw ValidationError("unknown synthetic kind '" + name + "'");
}

DenseMatrix generate_synthetic(SyntheticKind kind, std::size_t n, std::size_t m, std::size_t k,
                               std::int64_t seed) {
    if (n < 1 || m < 1 || k < 1) throw ValidationError("generate_synthetic: dimensions must be >= 1");
    Rng rng(static_cast<std::uint64_t>(seed));
    if (kind == SyntheticKind::uniform) {
        DenseMatrix v(n, m);
        for (double& x : v.data()) x = rng.uniform01();
        return v;
    }
    DenseMatrix w(n, k), h(k, m);
    for (double& x : w.data()) x = rng.uniform01();
    for (double& x : h.data()) x = rng.uniform01();
    return matmul(w, h);
}

} // namespace nmfkit
