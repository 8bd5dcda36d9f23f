#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "aclbdd/analysis.hpp"
#include "aclbdd/bdd.hpp"
#include "aclbdd/bitvec.hpp"
#include "aclbdd/render.hpp"

namespace py = pybind11;
using namespace aclbdd;
using nlohmann::json;

namespace {

py::object to_py(const json &j) { return py::module_::import("json").attr("loads")(j.dump()); }
json from_py(const py::object &o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::vector<Field> fields(const std::vector<std::string> &names) {
  std::vector<Field> out;
  for (const auto &n : names) {
    const auto f = parse_field(n);
    if (!f)
      throw py::value_error("unknown field '" + n + "'");
    out.push_back(*f);
  }
  check_distinct(out);
  return out;
}

json rule_json(const Rule &r) {
  json j = {{"list_id", r.list_id},
            {"action", std::string(action_name(r.action))},
            {"protocol", r.protocol.name},
            {"protocol_number", r.protocol.number},
            {"src", format_addr(r.src.base)},
            {"src_mask", format_addr(r.src.mask)},
            {"dst", format_addr(r.dst.base)},
            {"dst_mask", format_addr(r.dst.mask)},
            {"line", r.source_line}};
  j["port"] = r.port ? json::array({r.port->lo, r.port->hi}) : json();
  return j;
}

/// Rule sets compiled into one shared manager, addressed by index.
class Workspace {
public:
  Workspace(unsigned segment, unsigned port, unsigned proto)
      : layout_(Widths{segment, port, proto}), mgr_(layout_.make_manager()) {}

  std::size_t load(const std::string &text, const std::string &name) {
    sets_.push_back(compile_ruleset(mgr_, layout_, parse_ruleset(text, name)));
    return sets_.size() - 1;
  }

  std::size_t load_file(const std::string &path) {
    sets_.push_back(compile_ruleset(mgr_, layout_, load_ruleset(path)));
    return sets_.size() - 1;
  }

  py::object show(std::size_t id, const std::vector<std::string> &order, const std::string &where,
                  const std::vector<std::string> &summary, bool not_allowed,
                  std::size_t row_budget) {
    const auto &crs = at(id);
    NodeRef f = not_allowed ? mgr_.neg(crs.accept) : crs.accept;
    f = instantiate(mgr_, layout_, parse_condition(where), f);
    const auto cols = fields(summary);
    const auto t = cols.empty() ? show_conditions(mgr_, layout_, fields(order), f, row_budget)
                                : give_summary(mgr_, layout_, cols, f, row_budget);
    return to_py(table_to_json(t));
  }

  py::object diff(std::size_t old_id, std::size_t new_id, const std::vector<std::string> &order,
                  const std::string &where, std::size_t row_budget) {
    const auto cond = condition_to_bdd(mgr_, layout_, parse_condition(where));
    const auto d = aclbdd::diff(mgr_, at(old_id), at(new_id));
    const auto allow = mgr_.conj(cond, d.newallow);
    const auto deny = mgr_.conj(cond, d.newdeny);
    const auto cols = fields(order);
    return to_py({{"equivalent", allow.is_false() && deny.is_false()},
                  {"newallow", table_to_json(show_conditions(mgr_, layout_, cols, allow, row_budget))},
                  {"newdeny", table_to_json(show_conditions(mgr_, layout_, cols, deny, row_budget))}});
  }

  py::object redundant(std::size_t id) {
    json out = json::array();
    for (const auto &r : find_redundant(mgr_, at(id)))
      out.push_back({{"index", r.index}, {"line", r.source_line}, {"text", r.text}});
    return to_py(out);
  }

  py::object stats(std::size_t id) {
    const auto &crs = at(id);
    const auto st = mgr_.stats(crs.accept);
    return to_py({{"rules", crs.source.size()},
                  {"variables", layout_.variable_count()},
                  {"node_count", st.node_count},
                  {"max_depth", st.max_depth}});
  }

  py::object eval(std::size_t id, std::uint32_t proto, std::uint32_t port,
                  const std::array<std::uint32_t, 4> &src, const std::array<std::uint32_t, 4> &dst) {
    Packet p{proto, port, src, dst};
    const auto v = eval_packet(mgr_, at(id), p);
    json out = {{"accept", v.accept}, {"linear_accept", v.linear_accept}};
    out["matched_rule"] = v.matched_rule ? json(*v.matched_rule) : json();
    return to_py(out);
  }

  std::string dot(std::size_t id) {
    return mgr_.to_dot(at(id).accept, [&](VarId v) { return layout_.var_name(v); });
  }

  std::uint32_t variable_count() const { return layout_.variable_count(); }
  std::size_t size() const { return sets_.size(); }

private:
  const CompiledRuleSet &at(std::size_t id) const {
    if (id >= sets_.size())
      throw py::index_error("no rule set " + std::to_string(id));
    return sets_[id];
  }

  VariableLayout layout_;
  Manager mgr_;
  std::vector<CompiledRuleSet> sets_;
};

} // namespace

PYBIND11_MODULE(_aclbdd, m) {
  m.doc() = "Access-list analysis with binary decision diagrams";

  static py::exception<AclParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<RowBudgetExceeded> budget_error(m, "RowBudgetExceeded", PyExc_RuntimeError);
  py::register_exception<CompileError>(m, "CompileError", PyExc_ValueError);
  py::register_exception<ConditionError>(m, "ConditionError", PyExc_ValueError);
  py::register_exception<BddError>(m, "BddError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const AclParseError &e) {
      py::list diags;
      for (const auto &d : e.diagnostics())
        diags.append(py::make_tuple(d.line, d.token, d.message));
      py::object exc = py::handle(parse_error.ptr())(e.what());
      exc.attr("diagnostics") = diags;
      PyErr_SetObject(parse_error.ptr(), exc.ptr());
    } catch (const RowBudgetExceeded &e) {
      py::set_error(budget_error, e.what());
    }
  });

  py::class_<NodeRef>(m, "NodeRef")
      .def("is_true", &NodeRef::is_true)
      .def("is_false", &NodeRef::is_false)
      .def("__eq__", [](NodeRef a, NodeRef b) { return a == b; })
      .def("__hash__", [](NodeRef a) { return std::hash<NodeRef>{}(a); })
      .def("__repr__", [](NodeRef a) {
        return "<NodeRef " + std::to_string(a.tag) + ":" + std::to_string(a.index) + ">";
      });

  py::enum_<BinOp>(m, "BinOp")
      .value("AND", BinOp::And)
      .value("OR", BinOp::Or)
      .value("XOR", BinOp::Xor)
      .value("IMPLIES", BinOp::Implies);

  py::class_<Manager>(m, "Manager")
      .def(py::init<std::uint32_t>(), py::arg("var_count"))
      .def_property_readonly("var_count", &Manager::var_count)
      .def_property_readonly_static("TRUE", [](py::object) { return kTrue; })
      .def_property_readonly_static("FALSE", [](py::object) { return kFalse; })
      .def("var", &Manager::var)
      .def("nvar", &Manager::nvar)
      .def("mk", &Manager::mk)
      .def("apply", &Manager::apply)
      .def("neg", &Manager::neg)
      .def("ite", &Manager::ite)
      .def("exists",
           [](Manager &mgr, NodeRef f, const std::vector<VarId> &vars) { return mgr.exists(f, vars); })
      .def("eval",
           [](const Manager &mgr, NodeRef f, const std::vector<std::int8_t> &asg) {
             return mgr.eval(f, asg);
           })
      .def("node_count", &Manager::node_count)
      .def("max_depth", &Manager::max_depth)
      .def("sat_count",
           [](const Manager &mgr, NodeRef f, const std::vector<VarId> &vars) {
             // Python ints are arbitrary precision; go through the decimal string.
             return py::int_(py::str(mgr.sat_count(f, vars).str()));
           })
      .def("in_range",
           [](Manager &mgr, const std::vector<VarId> &vars, std::uint64_t lo, std::uint64_t hi) {
             BitVec v;
             for (auto x : vars)
               v.bits.push_back(mgr.var(x));
             return bv_in_range(mgr, v, lo, hi);
           },
           "lo <= value <= hi over the given variables, most significant first");

  py::class_<Workspace>(m, "Workspace")
      .def(py::init<unsigned, unsigned, unsigned>(), py::arg("segment") = 8, py::arg("port") = 16,
           py::arg("proto") = 3)
      .def_property_readonly("variable_count", &Workspace::variable_count)
      .def("__len__", &Workspace::size)
      .def("load", &Workspace::load, py::arg("text"), py::arg("name") = "")
      .def("load_file", &Workspace::load_file, py::arg("path"))
      .def("show", &Workspace::show, py::arg("id"), py::arg("order") = std::vector<std::string>{},
           py::arg("where") = "", py::arg("summary") = std::vector<std::string>{},
           py::arg("not_allowed") = false, py::arg("row_budget") = kDefaultRowBudget)
      .def("diff", &Workspace::diff, py::arg("old"), py::arg("new"),
           py::arg("order") = std::vector<std::string>{}, py::arg("where") = "",
           py::arg("row_budget") = kDefaultRowBudget)
      .def("redundant", &Workspace::redundant)
      .def("stats", &Workspace::stats)
      .def("eval_packet", &Workspace::eval, py::arg("id"), py::arg("proto"), py::arg("port"),
           py::arg("src"), py::arg("dst"))
      .def("dot", &Workspace::dot);

  m.def("parse_rule", [](const std::string &line) { return to_py(rule_json(parse_rule(line))); });
  m.def("normalize_rule", [](const std::string &line) { return unparse(parse_rule(line)); });
  m.def("render_text", [](const py::object &table) { return render_text(table_from_json(from_py(table))); });
}
