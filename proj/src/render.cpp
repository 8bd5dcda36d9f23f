#include "aclbdd/render.hpp"

#include <algorithm>
#include <sstream>

namespace aclbdd {

using nlohmann::json;

std::string format_interval(const Interval &iv) {
  if (iv.lo == iv.hi)
    return std::to_string(iv.lo);
  return std::to_string(iv.lo) + "--" + std::to_string(iv.hi);
}

std::string render_text(const Table &table) {
  const auto ncol = table.columns.size();
  std::vector<std::size_t> width(ncol);
  for (std::size_t c = 0; c < ncol; ++c)
    width[c] = field_title(table.columns[c]).size();
  for (const auto &row : table.rows)
    for (std::size_t c = 0; c < ncol; ++c)
      width[c] = std::max(width[c], format_interval(row.cells[c]).size());

  std::ostringstream os;
  auto pad = [&](std::string_view s, std::size_t w) {
    os << std::string(w > s.size() ? w - s.size() : 0, ' ') << s;
  };
  for (std::size_t c = 0; c < ncol; ++c) {
    if (c)
      os << "  ";
    pad(field_title(table.columns[c]), width[c]);
  }
  os << '\n';
  for (const auto &row : table.rows) {
    std::string line;
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c)
        line += row.elided(c - 1) && row.elided(c) ? "  " : "| ";
      const auto cell = row.elided(c) ? std::string() : format_interval(row.cells[c]);
      line += std::string(width[c] > cell.size() ? width[c] - cell.size() : 0, ' ') + cell;
    }
    os << line << '\n';
  }
  return os.str();
}

json table_to_json(const Table &table) {
  json cols = json::array();
  for (auto f : table.columns)
    cols.push_back(std::string(field_name(f)));
  json rows = json::array();
  for (const auto &row : table.rows) {
    json cells = json::array();
    json elided = json::array();
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      cells.push_back({{"lo", row.cells[c].lo}, {"hi", row.cells[c].hi}});
      elided.push_back(row.elided(c));
    }
    rows.push_back({{"cells", std::move(cells)}, {"elided", std::move(elided)}});
  }
  return {{"columns", std::move(cols)}, {"rows", std::move(rows)}, {"row_count", table.rows.size()}};
}

namespace {

Table::Row row_from_json(const json &r, std::size_t ncol) {
  Table::Row row;
  const auto &cells = r.at("cells");
  if (!cells.is_array() || cells.size() != ncol)
    throw std::invalid_argument("row has the wrong number of cells");
  for (const auto &c : cells)
    row.cells.push_back({c.at("lo").get<std::uint32_t>(), c.at("hi").get<std::uint32_t>()});
  if (r.contains("elided")) {
    const auto &el = r.at("elided");
    while (row.shared_prefix < el.size() && el[row.shared_prefix].get<bool>())
      ++row.shared_prefix;
  }
  return row;
}

std::vector<Field> columns_from_json(const json &cols) {
  std::vector<Field> out;
  for (const auto &c : cols) {
    const auto f = parse_field(c.get<std::string>());
    if (!f)
      throw std::invalid_argument("unknown column " + c.get<std::string>());
    out.push_back(*f);
  }
  check_distinct(out);
  return out;
}

} // namespace

Table table_from_json(const json &j) {
  try {
    Table t;
    t.columns = columns_from_json(j.at("columns"));
    for (const auto &r : j.at("rows"))
      t.rows.push_back(row_from_json(r, t.columns.size()));
    return t;
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string("malformed table: ") + e.what());
  }
}

std::string render_structured(const Table &table, std::string_view name) {
  std::ostringstream os;
  json head = {{"record", "table"}, {"name", std::string(name)}, {"columns", json::array()}};
  for (auto f : table.columns)
    head["columns"].push_back(std::string(field_name(f)));
  os << head.dump() << '\n';
  const auto doc = table_to_json(table);
  for (const auto &r : doc.at("rows")) {
    json rec = {{"record", "row"}, {"table", std::string(name)}};
    rec["cells"] = r.at("cells");
    rec["elided"] = r.at("elided");
    os << rec.dump() << '\n';
  }
  os << json{{"record", "end"}, {"table", std::string(name)}, {"rows", table.rows.size()}}.dump()
     << '\n';
  return os.str();
}

std::vector<std::pair<std::string, Table>> parse_structured(std::string_view text) {
  std::vector<std::pair<std::string, Table>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool open = false;
  try {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      const auto rec = json::parse(line);
      const auto kind = rec.at("record").get<std::string>();
      if (kind == "table") {
        out.emplace_back(rec.at("name").get<std::string>(), Table{});
        out.back().second.columns = columns_from_json(rec.at("columns"));
        open = true;
      } else if (kind == "row") {
        if (!open || rec.at("table").get<std::string>() != out.back().first)
          throw std::invalid_argument("row record outside its table");
        auto &t = out.back().second;
        t.rows.push_back(row_from_json(rec, t.columns.size()));
      } else if (kind == "end") {
        if (!open || rec.at("rows").get<std::size_t>() != out.back().second.rows.size())
          throw std::invalid_argument("table end record does not match its rows");
        open = false;
      }
    }
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string("malformed structured output: ") + e.what());
  }
  if (open)
    throw std::invalid_argument("structured output ends inside a table");
  return out;
}

} // namespace aclbdd
