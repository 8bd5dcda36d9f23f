/// @file  analysis.hpp
/// @brief Queries over compiled rule sets: tables, summaries, diffs,
///        redundancy and per-packet verdicts

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aclbdd/acl.hpp"
#include "aclbdd/bdd.hpp"
#include "aclbdd/compiler.hpp"
#include "aclbdd/condition.hpp"
#include "aclbdd/layout.hpp"

namespace aclbdd {

inline constexpr std::size_t kDefaultRowBudget = 10000;

/// `c ∧ f`.
NodeRef instantiate(Manager &mgr, const VariableLayout &layout, const Condition &c, NodeRef f);

struct Interval {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  friend bool operator==(const Interval &, const Interval &) = default;
};

/// Nested interval listing of a boolean function.
///
/// Every row is a product of one interval per column; the rows are disjoint
/// and their union is exactly the satisfying set of the listed function.
/// A row shares its first `shared_prefix` cells with the row above; those
/// cells are blank in the nested rendering.
struct Table {
  struct Row {
    std::vector<Interval> cells;
    std::size_t shared_prefix = 0;

    [[nodiscard]] bool elided(std::size_t column) const noexcept { return column < shared_prefix; }
    friend bool operator==(const Row &, const Row &) = default;
  };

  std::vector<Field> columns;
  std::vector<Row> rows;

  [[nodiscard]] bool empty() const noexcept { return rows.empty(); }
  friend bool operator==(const Table &, const Table &) = default;
};

class RowBudgetExceeded : public std::runtime_error {
public:
  explicit RowBudgetExceeded(std::size_t budget)
      : std::runtime_error("table exceeds the row budget of " + std::to_string(budget) +
                           " rows; use a summary over fewer columns"),
        budget_(budget) {}

  [[nodiscard]] std::size_t budget() const noexcept { return budget_; }

private:
  std::size_t budget_;
};

/// Maximal intervals of one field's domain over which the cofactor of `f`
/// is the same function, in ascending order. Cofactors may be FALSE.
std::vector<std::pair<Interval, NodeRef>> partition_field(Manager &mgr,
                                                          const VariableLayout &layout, Field field,
                                                          NodeRef f);

/// `order` is extended with the remaining fields in default order. A budget
/// of 0 means unlimited.
Table show_conditions(Manager &mgr, const VariableLayout &layout, std::span<const Field> order,
                      NodeRef f, std::size_t row_budget = kDefaultRowBudget);

/// Quantifies away every field outside `columns` and lists the rest.
Table give_summary(Manager &mgr, const VariableLayout &layout, std::span<const Field> columns,
                   NodeRef f, std::size_t row_budget = kDefaultRowBudget);

/// Disjunction of the rows' interval products.
NodeRef table_function(Manager &mgr, const VariableLayout &layout, const Table &table);

struct DiffResult {
  /// Accepted by the new set only.
  NodeRef newallow = kFalse;
  /// Accepted by the old set only.
  NodeRef newdeny = kFalse;

  [[nodiscard]] bool equivalent() const noexcept {
    return newallow.is_false() && newdeny.is_false();
  }
};

/// Both sets must live in `mgr` with compatible layouts.
DiffResult diff(Manager &mgr, const CompiledRuleSet &old_set, const CompiledRuleSet &new_set);

struct RedundantRule {
  std::size_t index = 0;
  std::size_t source_line = 0;
  std::string text;
};

/// Rules whose removal leaves the accept function unchanged. Scans from the
/// last rule backwards and drops each redundant rule before testing earlier
/// ones, so of two identical rules the later one is reported and removing
/// every reported rule at once preserves the function. Ascending index order.
std::vector<RedundantRule> find_redundant(Manager &mgr, const CompiledRuleSet &crs);
std::vector<RedundantRule> find_redundant(Manager &mgr, const VariableLayout &layout,
                                          const RuleSet &rs);

struct Packet {
  std::uint32_t proto = 0;
  std::uint32_t port = 0;
  std::array<std::uint32_t, 4> src{};
  std::array<std::uint32_t, 4> dst{};

  [[nodiscard]] std::uint32_t value(Field f) const noexcept {
    switch (f) {
    case Field::Proto:
      return proto;
    case Field::Port:
      return port;
    default: {
      const auto i = field_index(f);
      return i < field_index(Field::Dest1) ? src[i - field_index(Field::Src1)]
                                           : dst[i - field_index(Field::Dest1)];
    }
    }
  }
  friend bool operator==(const Packet &, const Packet &) = default;
};

/// Throws std::out_of_range when a field exceeds the layout's domain.
void check_packet(const VariableLayout &layout, const Packet &p);

/// Direct matching against a rule's fields, no BDDs involved.
bool rule_matches(const Rule &rule, const Packet &p) noexcept;
/// Index of the first matching rule, or nullopt (implicit deny).
std::optional<std::size_t> first_match(const RuleSet &rs, const Packet &p) noexcept;
bool linear_accept(const RuleSet &rs, const Packet &p) noexcept;

/// Walks `f` using the packet's header bits.
bool bdd_accept(const Manager &mgr, const VariableLayout &layout, NodeRef f, const Packet &p);

struct PacketVerdict {
  /// From the compiled function.
  bool accept = false;
  /// From the linear first-match interpreter.
  bool linear_accept = false;
  /// Matching rule, or nullopt for the implicit deny.
  std::optional<std::size_t> matched_rule;
};

PacketVerdict eval_packet(const Manager &mgr, const CompiledRuleSet &crs, const Packet &p);

/// Total assignment for `Manager::eval`.
std::vector<std::int8_t> packet_assignment(const VariableLayout &layout, const Packet &p);

} // namespace aclbdd
