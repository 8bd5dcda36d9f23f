#include "aclbdd/bitvec.hpp"

#include <stdexcept>
#include <string>

namespace aclbdd {

namespace {

void check_width(unsigned width) {
  if (width == 0 || width > 63)
    throw std::invalid_argument("bit-vector width must be 1..63, got " + std::to_string(width));
}

void check_fits(std::uint64_t n, unsigned width, const char *what) {
  check_width(width);
  if (n >> width)
    throw std::out_of_range(std::string(what) + " " + std::to_string(n) + " does not fit in " +
                            std::to_string(width) + " bits");
}

// Bit of `n` aligned with v.bits[i] (MSB first).
inline bool bit_at(std::uint64_t n, unsigned width, unsigned i) {
  return (n >> (width - 1 - i)) & 1u;
}

} // namespace

BitVec int2bv(std::uint64_t n, unsigned width) {
  check_fits(n, width, "value");
  BitVec out;
  out.bits.reserve(width);
  for (unsigned i = 0; i < width; ++i)
    out.bits.push_back(bit_at(n, width, i) ? kTrue : kFalse);
  return out;
}

NodeRef bv_eq_const(Manager &mgr, const BitVec &v, std::uint64_t n) {
  const auto w = v.width();
  check_fits(n, w, "value");
  NodeRef acc = kTrue;
  // Build bottom-up so each conjunction extends a cube by one literal.
  for (unsigned i = w; i-- > 0;) {
    const auto lit = bit_at(n, w, i) ? v.bits[i] : mgr.neg(v.bits[i]);
    acc = mgr.conj(lit, acc);
  }
  return acc;
}

// From the least significant bit upwards: ge = (x & ~y) | ((x == y) & ge_rest),
// which for a constant y bit collapses to x | ge (y = 0) or x & ge (y = 1).
NodeRef bv_geq_const(Manager &mgr, const BitVec &v, std::uint64_t n) {
  const auto w = v.width();
  check_fits(n, w, "bound");
  NodeRef acc = kTrue;
  for (unsigned i = w; i-- > 0;)
    acc = bit_at(n, w, i) ? mgr.conj(v.bits[i], acc) : mgr.disj(v.bits[i], acc);
  return acc;
}

NodeRef bv_leq_const(Manager &mgr, const BitVec &v, std::uint64_t n) {
  const auto w = v.width();
  check_fits(n, w, "bound");
  NodeRef acc = kTrue;
  for (unsigned i = w; i-- > 0;)
    acc = bit_at(n, w, i) ? mgr.disj(mgr.neg(v.bits[i]), acc) : mgr.conj(mgr.neg(v.bits[i]), acc);
  return acc;
}

NodeRef bv_in_range(Manager &mgr, const BitVec &v, std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi)
    throw std::invalid_argument("range lower bound " + std::to_string(lo) +
                                " exceeds upper bound " + std::to_string(hi));
  return mgr.conj(bv_geq_const(mgr, v, lo), bv_leq_const(mgr, v, hi));
}

NodeRef masked_eq(Manager &mgr, const BitVec &v, std::uint64_t base, std::uint64_t mask) {
  const auto w = v.width();
  check_fits(base, w, "base");
  check_fits(mask, w, "mask");
  NodeRef acc = kTrue;
  for (unsigned i = w; i-- > 0;) {
    if (bit_at(mask, w, i))
      continue;
    const auto lit = bit_at(base, w, i) ? v.bits[i] : mgr.neg(v.bits[i]);
    acc = mgr.conj(lit, acc);
  }
  return acc;
}

} // namespace aclbdd
