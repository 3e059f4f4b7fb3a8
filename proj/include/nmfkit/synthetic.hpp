#pragma once

#include <cstdint>
#include <string>

#include "nmfkit/matrix.hpp"

namespace nmfkit {

enum class SyntheticKind {
    uniform, // entries i.i.d. uniform on [0,1)
    lowrank, // W*H product of uniform nonnegative factors: exact rank <= k
};

SyntheticKind synthetic_kind_from_string(const std::string& name);

/// Deterministic per seed: one generator stream, factors drawn W first then H
/// for the lowrank kind.
DenseMatrix generate_synthetic(SyntheticKind kind, std::size_t n, std::size_t m, std::size_t k,
                               std::int64_t seed);

} // namespace nmfkit
