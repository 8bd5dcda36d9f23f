#include "aclbdd/layout.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace aclbdd {

namespace {

constexpr std::array<std::string_view, kFieldCount> kNames = {
    "Proto", "Port", "Src1", "Src2", "Src3", "Src4", "Dest1", "Dest2", "Dest3", "Dest4"};
constexpr std::array<std::string_view, kFieldCount> kTitles = {
    "Proto", "Ports", "Src 1", "Src 2", "Src 3", "Src 4", "Dest1", "Dest2", "Dest3", "Dest4"};

std::string normalise(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

} // namespace

std::string_view field_name(Field f) noexcept { return kNames[field_index(f)]; }
std::string_view field_title(Field f) noexcept { return kTitles[field_index(f)]; }

std::optional<Field> parse_field(std::string_view text) {
  const auto s = normalise(text);
  if (s == "proto" || s == "protocol")
    return Field::Proto;
  if (s == "port" || s == "ports")
    return Field::Port;
  for (std::string_view prefix : {"src", "source", "dest", "dst", "destination"}) {
    if (s.size() != prefix.size() + 1 || s.compare(0, prefix.size(), prefix) != 0)
      continue;
    const char d = s.back();
    if (d < '1' || d > '4')
      return std::nullopt;
    const auto seg = static_cast<std::size_t>(d - '1');
    return prefix.starts_with('s') ? src_field(seg) : dest_field(seg);
  }
  return std::nullopt;
}

void check_distinct(std::span<const Field> fields) {
  std::array<bool, kFieldCount> seen{};
  for (auto f : fields) {
    if (seen[field_index(f)])
      throw std::invalid_argument("field " + std::string(field_name(f)) + " listed twice");
    seen[field_index(f)] = true;
  }
}

std::vector<Field> complete_order(std::span<const Field> prefix) {
  check_distinct(prefix);
  std::vector<Field> out(prefix.begin(), prefix.end());
  for (auto f : kAllFields)
    if (std::find(out.begin(), out.end(), f) == out.end())
      out.push_back(f);
  return out;
}

VariableLayout::VariableLayout(Widths widths)
    : VariableLayout(widths, std::span<const Field>(kAllFields), BitOrder::MsbFirst) {}

VariableLayout::VariableLayout(Widths widths, std::span<const Field> field_order,
                               BitOrder bit_order)
    : widths_(widths) {
  assign_ids();
  if (field_order.size() != kFieldCount)
    throw std::invalid_argument("field order must list all ten fields");
  check_distinct(field_order);
  levels_.assign(variable_count(), 0);
  std::uint32_t level = 0;
  for (auto f : field_order) {
    const auto &vs = field_vars_[field_index(f)];
    if (bit_order == BitOrder::MsbFirst)
      for (auto v : vs)
        levels_[v] = level++;
    else
      for (auto it = vs.rbegin(); it != vs.rend(); ++it)
        levels_[*it] = level++;
  }
}

VariableLayout VariableLayout::with_levels(Widths widths, std::vector<std::uint32_t> var_levels) {
  VariableLayout out(widths);
  if (var_levels.size() != out.variable_count())
    throw std::invalid_argument("level vector has " + std::to_string(var_levels.size()) +
                                " entries, layout has " + std::to_string(out.variable_count()) +
                                " variables");
  std::vector<std::uint32_t> sorted = var_levels;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i)
      throw std::invalid_argument("levels must be a permutation");
  out.levels_ = std::move(var_levels);
  return out;
}

void VariableLayout::assign_ids() {
  if (widths_.segment < 1 || widths_.segment > 31 || widths_.port < 1 || widths_.port > 31 ||
      widths_.proto < 1 || widths_.proto > 31)
    throw std::invalid_argument("field widths must be between 1 and 31 bits");
  VarId next = 0;
  for (auto f : kAllFields) {
    const auto w = width(f);
    auto &vs = field_vars_[field_index(f)];
    vs.clear();
    for (unsigned i = 0; i < w; ++i) {
      vs.push_back(next++);
      var_field_.push_back(f);
      var_shift_.push_back(w - 1 - i);
    }
  }
}

unsigned VariableLayout::width(Field f) const noexcept {
  switch (f) {
  case Field::Proto:
    return widths_.proto;
  case Field::Port:
    return widths_.port;
  default:
    return widths_.segment;
  }
}

std::uint32_t VariableLayout::max_value(Field f) const noexcept {
  return static_cast<std::uint32_t>((std::uint64_t{1} << width(f)) - 1);
}

std::span<const VarId> VariableLayout::vars(Field f) const noexcept {
  return field_vars_[field_index(f)];
}

std::vector<VarId> VariableLayout::vars(std::span<const Field> fields) const {
  std::vector<VarId> out;
  for (auto f : fields) {
    const auto vs = vars(f);
    out.insert(out.end(), vs.begin(), vs.end());
  }
  return out;
}

std::string VariableLayout::var_name(VarId v) const {
  const auto f = field_of(v);
  const auto bit = std::to_string(shift_of(v));
  switch (f) {
  case Field::Proto:
    return "prt[" + bit + "]";
  case Field::Port:
    return "p[" + bit + "]";
  default: {
    const auto idx = field_index(f);
    const bool src = idx < field_index(Field::Dest1);
    const auto seg = src ? idx - field_index(Field::Src1) + 1 : idx - field_index(Field::Dest1) + 1;
    return (src ? "sa" : "da") + std::to_string(seg) + "[" + bit + "]";
  }
  }
}

BitVec VariableLayout::bitvec(Manager &mgr, Field f) const {
  if (mgr.var_count() != variable_count())
    throw std::invalid_argument("manager variable count does not match layout");
  BitVec out;
  for (auto v : vars(f))
    out.bits.push_back(mgr.var(v));
  return out;
}

} // namespace aclbdd
