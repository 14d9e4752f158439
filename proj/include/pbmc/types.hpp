#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace pbmc {

using Var = std::uint32_t;  // 1-based variable index
using Cid = std::uint64_t;  // stable constraint id, never reused within a session

// Exact integer carrier for ADD terminals and model counts.
using Int = mpz_class;

inline std::string to_string(const Int& v) { return v.get_str(); }

}  // namespace pbmc
