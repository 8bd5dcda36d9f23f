/// @file  bitvec.hpp
/// @brief Integers as vectors of boolean functions, compared against constants

#pragma once

#include <cstdint>
#include <vector>

#include "aclbdd/bdd.hpp"

namespace aclbdd {

/// Ordered boolean functions, most significant bit first.
struct BitVec {
  std::vector<NodeRef> bits;

  [[nodiscard]] unsigned width() const noexcept { return static_cast<unsigned>(bits.size()); }
};

/// Vector of terminals encoding `n`. Throws std::out_of_range if n does not
/// fit in `width` bits; width must be 1..63.
BitVec int2bv(std::uint64_t n, unsigned width);

NodeRef bv_eq_const(Manager &mgr, const BitVec &v, std::uint64_t n);
NodeRef bv_geq_const(Manager &mgr, const BitVec &v, std::uint64_t n);
NodeRef bv_leq_const(Manager &mgr, const BitVec &v, std::uint64_t n);
/// lo <= v <= hi. Throws std::invalid_argument when lo > hi.
NodeRef bv_in_range(Manager &mgr, const BitVec &v, std::uint64_t lo, std::uint64_t hi);
/// Wildcard match: bits where `mask` is 1 are ignored, the rest must equal
/// `base`. Same set as `(v | mask) == (base | mask)`.
NodeRef masked_eq(Manager &mgr, const BitVec &v, std::uint64_t base, std::uint64_t mask);

} // namespace aclbdd
