#include "aclbdd/cli.hpp"

#include <chrono>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aclbdd/analysis.hpp"
#include "aclbdd/render.hpp"
#include "aclbdd/service.hpp"

namespace aclbdd::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string order;
  std::string where;
  std::string summary;
  bool not_allowed = false;
  std::string format = "text";
  std::string widths;
  std::size_t row_budget = kDefaultRowBudget;
};

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(std::string text) {
  std::erase_if(text, [](char c) { return c == '[' || c == ']'; });
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty())
    out.push_back(cur);
  return out;
}

std::vector<Field> parse_fields(const std::string &text, const char *flag) {
  std::vector<Field> out;
  for (const auto &name : split_list(text)) {
    const auto f = parse_field(name);
    if (!f)
      throw CLI::ValidationError(flag, "unknown field '" + name + "'");
    out.push_back(*f);
  }
  try {
    check_distinct(out);
  } catch (const std::invalid_argument &e) {
    throw CLI::ValidationError(flag, e.what());
  }
  return out;
}

Widths parse_widths(const std::string &text) {
  Widths w;
  if (text.empty())
    return w;
  const auto parts = split_list(text);
  if (parts.size() != 3)
    throw CLI::ValidationError("--widths", "expected seg,port,proto");
  try {
    w.segment = static_cast<unsigned>(std::stoul(parts[0]));
    w.port = static_cast<unsigned>(std::stoul(parts[1]));
    w.proto = static_cast<unsigned>(std::stoul(parts[2]));
    VariableLayout check(w);
  } catch (const std::exception &e) {
    throw CLI::ValidationError("--widths", e.what());
  }
  return w;
}

bool structured(const Options &o) { return o.format == "structured"; }

struct Loaded {
  VariableLayout layout;
  Manager mgr;
  std::vector<CompiledRuleSet> sets;
  double compile_ms = 0;
};

/// Parses and compiles every path into one shared manager.
Loaded load_all(const std::vector<std::string> &paths, const Options &o) {
  Loaded l{VariableLayout(parse_widths(o.widths)), Manager(0), {}, 0};
  l.mgr = l.layout.make_manager();
  for (const auto &path : paths) {
    RuleSet rs;
    try {
      rs = load_ruleset(path);
    } catch (const AclParseError &e) {
      std::string msg;
      for (const auto &d : e.diagnostics()) {
        msg += path + ":" + std::to_string(d.line) + ": " + d.message;
        if (!d.token.empty())
          msg += " ('" + d.token + "')";
        msg += '\n';
      }
      throw InputError(msg + std::to_string(e.diagnostics().size()) + " parse error(s) in " + path);
    } catch (const std::runtime_error &e) {
      throw InputError(e.what());
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      l.sets.push_back(compile_ruleset(l.mgr, l.layout, rs));
    } catch (const CompileError &e) {
      throw InputError(path + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    l.compile_ms += std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  }
  return l;
}

void print_table(std::ostream &out, const Options &o, const Table &t, std::string_view name) {
  if (structured(o))
    out << render_structured(t, name);
  else
    out << render_text(t);
}

int cmd_show(const std::string &path, const Options &o, std::ostream &out) {
  auto l = load_all({path}, o);
  const auto order = parse_fields(o.order, "--order");
  const auto summary = parse_fields(o.summary, "--summary");
  const auto cond = parse_condition(o.where);
  auto &crs = l.sets.front();
  NodeRef f = o.not_allowed ? l.mgr.neg(crs.accept) : crs.accept;
  f = instantiate(l.mgr, l.layout, cond, f);
  const auto table = summary.empty() ? show_conditions(l.mgr, l.layout, order, f, o.row_budget)
                                     : give_summary(l.mgr, l.layout, summary, f, o.row_budget);
  print_table(out, o, table, summary.empty() ? (o.not_allowed ? "not_allowed" : "accept")
                                             : "summary");
  return kOk;
}

int cmd_diff(const std::string &old_path, const std::string &new_path, const Options &o,
             std::ostream &out) {
  auto l = load_all({old_path, new_path}, o);
  const auto order = parse_fields(o.order, "--order");
  const auto cond = condition_to_bdd(l.mgr, l.layout, parse_condition(o.where));
  const auto d = diff(l.mgr, l.sets[0], l.sets[1]);
  const auto allow = l.mgr.conj(cond, d.newallow);
  const auto deny = l.mgr.conj(cond, d.newdeny);
  const auto allow_t = show_conditions(l.mgr, l.layout, order, allow, o.row_budget);
  const auto deny_t = show_conditions(l.mgr, l.layout, order, deny, o.row_budget);
  const bool same = allow.is_false() && deny.is_false();
  if (structured(o)) {
    out << render_structured(allow_t, "newallow") << render_structured(deny_t, "newdeny");
    out << json{{"record", "summary"}, {"equivalent", same}}.dump() << '\n';
  } else {
    out << "newallow:\n" << render_text(allow_t) << "\nnewdeny:\n" << render_text(deny_t);
    if (same)
      out << "\nrule sets are equivalent\n";
  }
  return same ? kOk : kDifferences;
}

int cmd_check(const std::string &path, const Options &o, std::ostream &out) {
  auto l = load_all({path}, o);
  const auto found = find_redundant(l.mgr, l.sets.front());
  if (structured(o)) {
    for (const auto &r : found)
      out << json{{"record", "redundant"}, {"index", r.index}, {"line", r.source_line},
                  {"text", r.text}}
                 .dump()
          << '\n';
    out << json{{"record", "summary"}, {"redundant", found.size()}}.dump() << '\n';
  } else if (found.empty()) {
    out << "no redundant rules\n";
  } else {
    for (const auto &r : found)
      out << "redundant rule #" << r.index << " (line " << r.source_line << "): " << r.text
          << '\n';
  }
  return found.empty() ? kOk : kRedundant;
}

int cmd_stats(const std::string &path, const Options &o, std::ostream &out) {
  auto l = load_all({path}, o);
  const auto &crs = l.sets.front();
  const auto st = l.mgr.stats(crs.accept);
  if (structured(o)) {
    out << json{{"record", "stats"},          {"rules", crs.source.size()},
                {"variables", l.layout.variable_count()}, {"node_count", st.node_count},
                {"max_depth", st.max_depth},  {"compile_ms", l.compile_ms}}
               .dump()
        << '\n';
  } else {
    out << "rules:      " << crs.source.size() << '\n'
        << "variables:  " << l.layout.variable_count() << '\n'
        << "node_count: " << st.node_count << '\n'
        << "max_depth:  " << st.max_depth << '\n'
        << "compile_ms: " << l.compile_ms << '\n';
  }
  return kOk;
}

int cmd_dot(const std::string &path, const Options &o, std::ostream &out) {
  auto l = load_all({path}, o);
  out << l.mgr.to_dot(l.sets.front().accept,
                      [&](VarId v) { return l.layout.var_name(v); });
  return kOk;
}

int cmd_serve(const std::string &addr, const Options &o, std::ostream &out, std::ostream &err) {
  Service::Options so;
  so.widths = parse_widths(o.widths);
  so.row_budget = o.row_budget;
  Service service(so);
  out << "serving on " << addr << std::endl;
  if (!serve(service, addr)) {
    err << "cannot listen on " << addr << '\n';
    return kInputError;
  }
  return kOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Access-list analysis with binary decision diagrams", "aclbdd"};
  app.require_subcommand(0, 1);
  Options o;
  std::string serve_addr;
  app.add_option("--serve", serve_addr, "Start the HTTP service on host:port");

  auto add_format = [&](CLI::App *cmd) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}));
  };
  auto add_widths = [&](CLI::App *cmd) {
    cmd->add_option("--widths", o.widths, "Field widths seg,port,proto (default 8,16,3)");
  };
  auto add_budget = [&](CLI::App *cmd) {
    cmd->add_option("--row-budget", o.row_budget, "Maximum table rows (0 = unlimited)");
  };

  std::string file, old_file, new_file, addr;

  auto *show = app.add_subcommand("show", "List the accepted packets as a table");
  show->add_option("file", file, "Access-list file")->required();
  show->add_option("--order", o.order, "Leading columns, e.g. Port,Proto");
  show->add_option("--where", o.where, "Condition, e.g. \"Proto<-udp, Port range 80 90\"");
  show->add_option("--summary", o.summary, "Summarise over these columns only");
  show->add_flag("--not-allowed", o.not_allowed, "List rejected packets instead");
  add_format(show);
  add_widths(show);
  add_budget(show);

  auto *dif = app.add_subcommand("diff", "Packets gained and lost between two rule sets");
  dif->add_option("old", old_file, "Original access list")->required();
  dif->add_option("new", new_file, "Modified access list")->required();
  dif->add_option("--order", o.order, "Leading columns");
  dif->add_option("--where", o.where, "Restrict both tables by a condition");
  add_format(dif);
  add_widths(dif);
  add_budget(dif);

  auto *check = app.add_subcommand("check", "Report redundant rules");
  check->add_option("file", file, "Access-list file")->required();
  add_format(check);
  add_widths(check);

  auto *stats = app.add_subcommand("stats", "Size of the compiled rule set");
  stats->add_option("file", file, "Access-list file")->required();
  add_format(stats);
  add_widths(stats);

  auto *dot = app.add_subcommand("dot", "Graphviz dump of the compiled rule set");
  dot->add_option("file", file, "Access-list file")->required();
  add_widths(dot);

  auto *srv = app.add_subcommand("serve", "Start the HTTP service");
  srv->add_option("address", addr, "host:port")->required();
  add_widths(srv);
  add_budget(srv);

  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  if (argv.empty())
    argv.push_back("aclbdd");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (!serve_addr.empty())
      return cmd_serve(serve_addr, o, out, err);
    if (*show)
      return cmd_show(file, o, out);
    if (*dif)
      return cmd_diff(old_file, new_file, o, out);
    if (*check)
      return cmd_check(file, o, out);
    if (*stats)
      return cmd_stats(file, o, out);
    if (*dot)
      return cmd_dot(file, o, out);
    if (*srv)
      return cmd_serve(addr, o, out, err);
    out << app.help();
    return kUsage;
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const InputError &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ConditionError &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const RowBudgetExceeded &e) {
    err << "error: " << e.what() << "\nhint: rerun with --summary <columns>\n";
    return kRowBudget;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

} // namespace aclbdd::cli
