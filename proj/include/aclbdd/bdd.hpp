/// @file  bdd.hpp
/// @brief Reduced ordered binary decision diagrams (no complement edges)

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace aclbdd {

using VarId = std::uint32_t;
using BigCount = boost::multiprecision::cpp_int;

/// Handle to a node owned by a `Manager`.
///
/// The two terminals are shared by every manager (tag 0). Non-terminal
/// handles carry the tag of the issuing manager, so equality is a plain
/// field comparison and cross-manager use can be detected.
struct NodeRef {
  std::uint32_t tag = 0;
  std::uint32_t index = 0;

  static constexpr NodeRef zero() noexcept { return {0, 0}; }
  static constexpr NodeRef one() noexcept { return {0, 1}; }

  [[nodiscard]] constexpr bool is_terminal() const noexcept { return index < 2; }
  [[nodiscard]] constexpr bool is_false() const noexcept { return index == 0; }
  [[nodiscard]] constexpr bool is_true() const noexcept { return index == 1; }

  friend constexpr bool operator==(NodeRef, NodeRef) noexcept = default;
};

inline constexpr NodeRef kFalse = NodeRef::zero();
inline constexpr NodeRef kTrue = NodeRef::one();

enum class BinOp : std::uint8_t { And, Or, Xor, Implies };

/// Raised on misuse of the engine: ordering violations in `mk`, operands from
/// another manager, out-of-range variables, incomplete assignments.
class BddError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct Node {
  VarId var;
  std::uint32_t low;
  std::uint32_t high;
};

struct BddStats {
  std::size_t node_count = 0;
  std::size_t max_depth = 0;
};

/// Owner of a canonical node store.
///
/// The store is append-only; handles stay valid for the lifetime of the
/// manager. A manager is not thread safe: callers serialise access to it.
class Manager {
public:
  /// Identity order: variable i sits at level i.
  explicit Manager(std::uint32_t var_count);
  /// `var_levels[v]` is the position of variable v in the order; must be a
  /// permutation of 0..n-1.
  explicit Manager(std::vector<std::uint32_t> var_levels);

  Manager(const Manager &) = delete;
  Manager &operator=(const Manager &) = delete;
  Manager(Manager &&) noexcept = default;
  Manager &operator=(Manager &&) noexcept = default;

  [[nodiscard]] std::uint32_t var_count() const noexcept {
    return static_cast<std::uint32_t>(level_of_.size());
  }
  [[nodiscard]] std::uint32_t level(VarId v) const;
  [[nodiscard]] VarId var_at_level(std::uint32_t level) const;
  [[nodiscard]] const std::vector<std::uint32_t> &levels() const noexcept { return level_of_; }
  [[nodiscard]] std::uint32_t tag() const noexcept { return tag_; }
  /// Stored non-terminals, live or not.
  [[nodiscard]] std::size_t store_size() const noexcept { return nodes_.size() - 2; }

  /// True iff `f` may be used with this manager.
  [[nodiscard]] bool owns(NodeRef f) const noexcept {
    return f.is_terminal() ? f.tag == 0 : (f.tag == tag_ && f.index < nodes_.size());
  }

  NodeRef mk(VarId var, NodeRef low, NodeRef high);
  NodeRef var(VarId v);
  NodeRef nvar(VarId v);

  NodeRef apply(BinOp op, NodeRef a, NodeRef b);
  NodeRef neg(NodeRef a);
  NodeRef ite(NodeRef c, NodeRef t, NodeRef e);
  NodeRef exists(NodeRef a, std::span<const VarId> vars);

  NodeRef conj(NodeRef a, NodeRef b) { return apply(BinOp::And, a, b); }
  NodeRef disj(NodeRef a, NodeRef b) { return apply(BinOp::Or, a, b); }

  /// Cofactor: substitutes constants for the listed variables.
  /// `values[i]` is the value of `vars[i]`.
  NodeRef restrict(NodeRef a, std::span<const VarId> vars, std::span<const bool> values);

  /// Variables the function depends on, ascending by id.
  [[nodiscard]] std::vector<VarId> support(NodeRef a) const;

  /// `assignment[v]` is 0, 1, or negative for unassigned. Throws if the
  /// traversed path needs an unassigned variable.
  [[nodiscard]] bool eval(NodeRef a, std::span<const std::int8_t> assignment) const;

  /// Allocation-free evaluation; `bit(v)` returns the value of variable v.
  template <class BitFn> [[nodiscard]] bool eval_with(NodeRef a, BitFn &&bit) const {
    check_owned(a);
    std::uint32_t i = a.index;
    while (i > 1) {
      const Node &n = nodes_[i];
      i = bit(n.var) ? n.high : n.low;
    }
    return i == 1;
  }

  [[nodiscard]] BddStats stats(NodeRef a) const;
  [[nodiscard]] std::size_t node_count(NodeRef a) const { return stats(a).node_count; }
  [[nodiscard]] std::size_t max_depth(NodeRef a) const { return stats(a).max_depth; }
  /// Satisfying assignments over exactly the variables in `vars`; the set
  /// must cover the support of `a`.
  [[nodiscard]] BigCount sat_count(NodeRef a, std::span<const VarId> vars) const;

  /// Top variable of a non-terminal.
  [[nodiscard]] VarId top_var(NodeRef a) const;
  [[nodiscard]] NodeRef low(NodeRef a) const;
  [[nodiscard]] NodeRef high(NodeRef a) const;

  /// Graphviz rendering; dashed edges are 0-branches.
  [[nodiscard]] std::string to_dot(NodeRef a,
                                   const std::function<std::string(VarId)> &name = {}) const;

  /// Every structural invariant of the store. Test helper; linear in size.
  [[nodiscard]] bool check_invariants() const;

private:
  struct TripleHash {
    std::size_t operator()(const Node &n) const noexcept;
  };
  struct TripleEq {
    bool operator()(const Node &a, const Node &b) const noexcept {
      return a.var == b.var && a.low == b.low && a.high == b.high;
    }
  };
  struct Key3 {
    std::uint32_t a, b, c;
    friend bool operator==(const Key3 &, const Key3 &) = default;
  };
  struct Key3Hash {
    std::size_t operator()(const Key3 &k) const noexcept;
  };

  [[nodiscard]] NodeRef ref(std::uint32_t i) const noexcept {
    return i < 2 ? NodeRef{0, i} : NodeRef{tag_, i};
  }
  void check_owned(NodeRef a) const;
  void check_var(VarId v) const;
  [[nodiscard]] std::uint32_t node_level(std::uint32_t i) const noexcept {
    return i < 2 ? var_count() : level_of_[nodes_[i].var];
  }

  std::uint32_t make(VarId var, std::uint32_t low, std::uint32_t high);
  std::uint32_t apply_rec(BinOp op, std::uint32_t a, std::uint32_t b);
  std::uint32_t neg_rec(std::uint32_t a);
  std::uint32_t ite_rec(std::uint32_t c, std::uint32_t t, std::uint32_t e);

  std::uint32_t tag_;
  std::vector<std::uint32_t> level_of_;
  std::vector<VarId> var_at_;
  std::vector<Node> nodes_;
  std::unordered_map<Node, std::uint32_t, TripleHash, TripleEq> unique_;
  std::unordered_map<Key3, std::uint32_t, Key3Hash> apply_cache_;
  std::unordered_map<Key3, std::uint32_t, Key3Hash> ite_cache_;
  std::unordered_map<std::uint32_t, std::uint32_t> neg_cache_;
};

} // namespace aclbdd

template <> struct std::hash<aclbdd::NodeRef> {
  std::size_t operator()(aclbdd::NodeRef r) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{r.tag} << 32) | r.index);
  }
};
