#include "aclbdd/acl.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace aclbdd {

std::string_view action_name(Action a) noexcept { return a == Action::Permit ? "permit" : "deny"; }

const ProtocolTable &ProtocolTable::standard() {
  static const ProtocolTable table({{"ip", 0, false},
                                    {"icmp", 1, false},
                                    {"udp", 2, true},
                                    {"tcp", 3, true},
                                    {"gre", 4, true}});
  return table;
}

ProtocolTable::ProtocolTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (std::size_t j = i + 1; j < entries_.size(); ++j)
      if (entries_[i].name == entries_[j].name || entries_[i].number == entries_[j].number)
        throw std::invalid_argument("protocol table entries must have distinct names and numbers");
}

const ProtocolTable::Entry *ProtocolTable::find(std::string_view name) const noexcept {
  for (const auto &e : entries_) {
    if (e.name.size() != name.size())
      continue;
    if (std::equal(name.begin(), name.end(), e.name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == b;
        }))
      return &e;
  }
  return nullptr;
}

const ProtocolTable::Entry *ProtocolTable::find(std::uint32_t number) const noexcept {
  for (const auto &e : entries_)
    if (e.number == number)
      return &e;
  return nullptr;
}

unsigned ProtocolTable::width() const noexcept {
  std::uint32_t top = 0;
  for (const auto &e : entries_)
    top = std::max(top, e.number);
  return std::max(1u, static_cast<unsigned>(std::bit_width(top)));
}

namespace {

std::string summarise(const std::vector<Diagnostic> &diags) {
  std::ostringstream os;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    if (i)
      os << "; ";
    os << "line " << diags[i].line << ": " << diags[i].message;
    if (!diags[i].token.empty())
      os << " ('" << diags[i].token << "')";
  }
  return os.str();
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

class RuleParser {
public:
  RuleParser(std::string_view line, std::size_t line_no, const ProtocolTable &protocols)
      : line_(line), line_no_(line_no), protocols_(protocols), tokens_(tokenize(line)) {}

  Rule parse() {
    Rule r;
    r.source_line = line_no_;
    r.text = std::string(trim(line_));
    expect_keyword("access-list");
    r.list_id = number("access-list number", 0xffffffffu);
    const auto action = next("action");
    if (iequals(action, "permit"))
      r.action = Action::Permit;
    else if (iequals(action, "deny"))
      r.action = Action::Deny;
    else
      fail(action, "expected 'permit' or 'deny'");

    const auto proto_tok = next("protocol");
    const auto *entry = protocols_.find(proto_tok);
    if (!entry)
      fail(proto_tok, "unknown protocol");
    r.protocol = {entry->name, entry->number};

    r.src.base = quad("source address");
    r.src.mask = quad("source mask");
    r.dst.base = quad("destination address");
    r.dst.mask = quad("destination mask");

    if (pos_ < tokens_.size()) {
      const auto kw = tokens_[pos_++];
      if (!entry->has_ports)
        fail(kw, "protocol " + entry->name + " does not take a port clause");
      if (iequals(kw, "eq")) {
        const auto p = number("port", 65535);
        r.port = PortRange{p, p};
      } else if (iequals(kw, "range")) {
        const auto lo_tok = peek();
        const auto lo = number("port", 65535);
        const auto hi = number("port", 65535);
        if (lo > hi)
          fail(lo_tok, "port range lower bound exceeds upper bound");
        r.port = PortRange{lo, hi};
      } else {
        fail(kw, "expected 'eq' or 'range'");
      }
    }
    if (pos_ < tokens_.size())
      fail(tokens_[pos_], "unexpected trailing token");
    return r;
  }

private:
  [[noreturn]] void fail(std::string_view token, std::string message) const {
    throw AclParseError({Diagnostic{line_no_, std::string(token), std::move(message)}});
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return s;
  }

  std::string_view peek() const { return pos_ < tokens_.size() ? tokens_[pos_] : ""; }

  std::string_view next(const char *what) {
    if (pos_ >= tokens_.size())
      fail("", std::string("missing ") + what);
    return tokens_[pos_++];
  }

  void expect_keyword(std::string_view kw) {
    const auto tok = next(std::string(kw).c_str());
    if (!iequals(tok, kw))
      fail(tok, "expected '" + std::string(kw) + "'");
  }

  static bool to_uint(std::string_view tok, std::uint64_t &out) {
    if (tok.empty() || tok.size() > 10)
      return false;
    const auto *end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc{} && p == end;
  }

  std::uint32_t number(const char *what, std::uint32_t max) {
    const auto tok = next(what);
    std::uint64_t v = 0;
    if (!to_uint(tok, v))
      fail(tok, std::string("malformed ") + what);
    if (v > max)
      fail(tok, std::string(what) + " out of range (max " + std::to_string(max) + ")");
    return static_cast<std::uint32_t>(v);
  }

  std::array<std::uint32_t, 4> quad(const char *what) {
    const auto tok = next(what);
    std::array<std::uint32_t, 4> out{};
    std::size_t seg = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= tok.size(); ++i) {
      if (i < tok.size() && tok[i] != '.')
        continue;
      std::uint64_t v = 0;
      if (seg >= 4 || !to_uint(tok.substr(start, i - start), v))
        fail(tok, std::string("malformed dotted quad for ") + what);
      if (v > 255)
        fail(tok, std::string("segment out of range 0-255 in ") + what);
      out[seg++] = static_cast<std::uint32_t>(v);
      start = i + 1;
    }
    if (seg != 4)
      fail(tok, std::string("malformed dotted quad for ") + what);
    return out;
  }

  std::string_view line_;
  std::size_t line_no_;
  const ProtocolTable &protocols_;
  std::vector<std::string_view> tokens_;
  std::size_t pos_ = 0;
};

bool skippable(std::string_view line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c)))
      continue;
    return c == '!';
  }
  return true;
}

} // namespace

AclParseError::AclParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarise(diagnostics)), diags_(std::move(diagnostics)) {}

Rule parse_rule(std::string_view line, std::size_t line_no, const ProtocolTable &protocols) {
  return RuleParser(line, line_no, protocols).parse();
}

RuleSet parse_ruleset(std::string_view text, std::string origin, const ProtocolTable &protocols) {
  RuleSet rs;
  rs.origin = std::move(origin);
  std::vector<Diagnostic> diags;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    ++line_no;
    if (!skippable(line)) {
      try {
        rs.rules.push_back(parse_rule(line, line_no, protocols));
      } catch (const AclParseError &e) {
        diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
      }
    }
    if (end == text.size())
      break;
    start = end + 1;
  }
  if (!diags.empty())
    throw AclParseError(std::move(diags));
  return rs;
}

RuleSet load_ruleset(const std::string &path, const ProtocolTable &protocols) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ruleset(buf.str(), path, protocols);
}

std::string format_addr(const std::array<std::uint32_t, 4> &s) {
  return std::to_string(s[0]) + "." + std::to_string(s[1]) + "." + std::to_string(s[2]) + "." +
         std::to_string(s[3]);
}

std::string unparse(const Rule &rule) {
  std::string out = "access-list " + std::to_string(rule.list_id) + " " +
                    std::string(action_name(rule.action)) + " " + rule.protocol.name + " " +
                    format_addr(rule.src.base) + " " + format_addr(rule.src.mask) + " " +
                    format_addr(rule.dst.base) + " " + format_addr(rule.dst.mask);
  if (rule.port) {
    if (rule.port->lo == rule.port->hi)
      out += " eq " + std::to_string(rule.port->lo);
    else
      out += " range " + std::to_string(rule.port->lo) + " " + std::to_string(rule.port->hi);
  }
  return out;
}

} // namespace aclbdd
