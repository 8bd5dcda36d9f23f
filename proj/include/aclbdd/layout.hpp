/// @file  layout.hpp
/// @brief Assignment of packet-header fields to BDD variables

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aclbdd/bdd.hpp"
#include "aclbdd/bitvec.hpp"

namespace aclbdd {

/// Packet-header columns, in default display order.
enum class Field : std::uint8_t { Proto, Port, Src1, Src2, Src3, Src4, Dest1, Dest2, Dest3, Dest4 };

inline constexpr std::size_t kFieldCount = 10;
inline constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::Proto, Field::Port,  Field::Src1,  Field::Src2,  Field::Src3,
    Field::Src4,  Field::Dest1, Field::Dest2, Field::Dest3, Field::Dest4};

constexpr std::size_t field_index(Field f) noexcept { return static_cast<std::size_t>(f); }
inline Field src_field(std::size_t segment) { return static_cast<Field>(2 + segment); }
inline Field dest_field(std::size_t segment) { return static_cast<Field>(6 + segment); }

/// Stable key: "Proto", "Port", "Src1".."Src4", "Dest1".."Dest4".
std::string_view field_name(Field f) noexcept;
/// Column header used by the text renderer ("Ports", "Src 1", ...).
std::string_view field_title(Field f) noexcept;
/// Accepts the stable key plus the usual spellings ("Ports", "Source1",
/// "Src 1", "Dst1"), case-insensitively.
std::optional<Field> parse_field(std::string_view text);

/// Throws std::invalid_argument on a repeated field.
void check_distinct(std::span<const Field> fields);
/// `prefix` followed by the remaining fields in default order.
std::vector<Field> complete_order(std::span<const Field> prefix);

struct Widths {
  unsigned segment = 8;
  unsigned port = 16;
  unsigned proto = 3;

  [[nodiscard]] std::uint32_t total() const noexcept { return proto + port + 8 * segment; }
  friend bool operator==(const Widths &, const Widths &) = default;
};

enum class BitOrder : std::uint8_t { MsbFirst, LsbFirst };

/// Fixed mapping of every header bit to a manager variable.
///
/// Variable ids are always allocated field by field in default order
/// (proto, port, src1..4, dest1..4), most significant bit first. The
/// variable *order* used by a manager is a separate permutation held here
/// as `levels()`.
class VariableLayout {
public:
  /// Default order: proto, port, src1..4, dest1..4, MSB first.
  explicit VariableLayout(Widths widths = {});
  /// Fields are placed in `field_order` (a permutation of all ten) with the
  /// given bit direction inside each field.
  VariableLayout(Widths widths, std::span<const Field> field_order,
                 BitOrder bit_order = BitOrder::MsbFirst);
  /// Arbitrary permutation: `var_levels[v]` is the level of variable v.
  static VariableLayout with_levels(Widths widths, std::vector<std::uint32_t> var_levels);

  [[nodiscard]] const Widths &widths() const noexcept { return widths_; }
  [[nodiscard]] std::uint32_t variable_count() const noexcept { return widths_.total(); }
  [[nodiscard]] unsigned width(Field f) const noexcept;
  [[nodiscard]] std::uint32_t max_value(Field f) const noexcept;
  /// Variables of a field, most significant bit first.
  [[nodiscard]] std::span<const VarId> vars(Field f) const noexcept;
  [[nodiscard]] std::vector<VarId> vars(std::span<const Field> fields) const;
  [[nodiscard]] const std::vector<std::uint32_t> &levels() const noexcept { return levels_; }

  [[nodiscard]] Field field_of(VarId v) const { return var_field_.at(v); }
  /// Bit position of `v` within its field (0 = least significant).
  [[nodiscard]] unsigned shift_of(VarId v) const { return var_shift_.at(v); }
  [[nodiscard]] std::span<const Field> var_fields() const noexcept { return var_field_; }
  [[nodiscard]] std::span<const unsigned> var_shifts() const noexcept { return var_shift_; }
  /// "prt[2]", "p[15]", "sa1[7]", "da4[0]".
  [[nodiscard]] std::string var_name(VarId v) const;

  /// Manager whose variable order is this layout's.
  [[nodiscard]] Manager make_manager() const { return Manager(levels_); }
  [[nodiscard]] BitVec bitvec(Manager &mgr, Field f) const;

  /// Same widths and same variable order.
  [[nodiscard]] bool compatible(const VariableLayout &other) const noexcept {
    return widths_ == other.widths_ && levels_ == other.levels_;
  }

private:
  void assign_ids();

  Widths widths_;
  std::array<std::vector<VarId>, kFieldCount> field_vars_;
  std::vector<Field> var_field_;
  std::vector<unsigned> var_shift_;
  std::vector<std::uint32_t> levels_;
};

} // namespace aclbdd
