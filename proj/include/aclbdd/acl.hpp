/// @file  acl.hpp
/// @brief Cisco-style access-list rules and their text parser

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aclbdd {

enum class Action : std::uint8_t { Permit, Deny };

std::string_view action_name(Action a) noexcept;

/// Name → number assignment for protocols, with whether a port clause is
/// allowed.
class ProtocolTable {
public:
  struct Entry {
    std::string name;
    std::uint32_t number;
    bool has_ports;
  };

  /// ip=0, icmp=1, udp=2, tcp=3, gre=4.
  static const ProtocolTable &standard();

  explicit ProtocolTable(std::vector<Entry> entries);

  [[nodiscard]] const Entry *find(std::string_view name) const noexcept;
  [[nodiscard]] const Entry *find(std::uint32_t number) const noexcept;
  [[nodiscard]] const std::vector<Entry> &entries() const noexcept { return entries_; }
  /// ceil(log2 n), at least 1.
  [[nodiscard]] unsigned width() const noexcept;

private:
  std::vector<Entry> entries_;
};

struct Protocol {
  std::string name;
  std::uint32_t number = 0;

  friend bool operator==(const Protocol &, const Protocol &) = default;
};

/// Base address plus wildcard mask; a 1 bit in the mask is "don't care".
struct AddrSpec {
  std::array<std::uint32_t, 4> base{};
  std::array<std::uint32_t, 4> mask{};

  friend bool operator==(const AddrSpec &, const AddrSpec &) = default;
};

struct PortRange {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  friend bool operator==(const PortRange &, const PortRange &) = default;
};

struct Rule {
  std::uint32_t list_id = 0;
  Action action = Action::Deny;
  Protocol protocol;
  AddrSpec src;
  AddrSpec dst;
  /// Absent means any port; `eq x` is stored as the range [x, x].
  std::optional<PortRange> port;
  std::size_t source_line = 0;
  /// Original line, kept for reports.
  std::string text;

  /// Compares the rule's meaning, not its provenance.
  friend bool operator==(const Rule &a, const Rule &b) {
    return a.list_id == b.list_id && a.action == b.action && a.protocol == b.protocol &&
           a.src == b.src && a.dst == b.dst && a.port == b.port;
  }
};

struct RuleSet {
  std::vector<Rule> rules;
  std::string origin;

  [[nodiscard]] std::size_t size() const noexcept { return rules.size(); }
  [[nodiscard]] bool empty() const noexcept { return rules.empty(); }
};

struct Diagnostic {
  std::size_t line = 0;
  std::string token;
  std::string message;
};

/// Carries every diagnostic for the input; a file with any error yields no
/// rule set.
class AclParseError : public std::runtime_error {
public:
  explicit AclParseError(std::vector<Diagnostic> diagnostics);

  [[nodiscard]] const std::vector<Diagnostic> &diagnostics() const noexcept { return diags_; }

private:
  std::vector<Diagnostic> diags_;
};

Rule parse_rule(std::string_view line, std::size_t line_no = 1,
                const ProtocolTable &protocols = ProtocolTable::standard());

/// Blank lines and lines starting with `!` are skipped.
RuleSet parse_ruleset(std::string_view text, std::string origin = {},
                      const ProtocolTable &protocols = ProtocolTable::standard());

RuleSet load_ruleset(const std::string &path,
                     const ProtocolTable &protocols = ProtocolTable::standard());

/// Canonical text form; `parse_rule(unparse(r)) == r` for every parsed rule.
std::string unparse(const Rule &rule);

std::string format_addr(const std::array<std::uint32_t, 4> &segments);

} // namespace aclbdd
