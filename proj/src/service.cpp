#include "aclbdd/service.hpp"

#include <array>
#include <optional>
#include <random>
#include <sstream>

#include <httplib.h>

#include "aclbdd/render.hpp"

namespace aclbdd {

using nlohmann::json;

struct Service::Session {
  Session(std::string id_, const VariableLayout &layout_)
      : id(std::move(id_)), layout(layout_), mgr(layout_.make_manager()) {}

  std::string id;
  std::mutex mu;
  VariableLayout layout;
  Manager mgr;
  std::array<std::optional<CompiledRuleSet>, 2> slots;
  std::array<std::int64_t, 2> compile_us{};
  Clock::time_point last_used = Clock::now();
};

namespace {

using Response = Service::Response;

Response error(int status, std::string code, std::string message,
               std::optional<std::size_t> line = std::nullopt) {
  json body = {{"code", std::move(code)}, {"message", std::move(message)}};
  if (line)
    body["line"] = *line;
  return {status, std::move(body)};
}

std::optional<std::size_t> slot_index(std::string_view slot) {
  if (slot == "old")
    return 0;
  if (slot == "new")
    return 1;
  return std::nullopt;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/')
      ++i;
    const auto start = i;
    while (i < path.size() && path[i] != '/')
      ++i;
    if (i > start)
      out.push_back(path.substr(start, i - start));
  }
  return out;
}

std::vector<Field> fields_from_json(const json &j, const char *what) {
  std::vector<Field> out;
  if (j.is_null())
    return out;
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + " must be a list of field names");
  for (const auto &e : j) {
    const auto f = e.is_string() ? parse_field(e.get<std::string>()) : std::nullopt;
    if (!f)
      throw std::invalid_argument(std::string("unknown field in ") + what + ": " + e.dump());
    out.push_back(*f);
  }
  check_distinct(out);
  return out;
}

std::string new_session_id() {
  static std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << rng();
  return os.str();
}

} // namespace

Service::Service(Options options) : options_(std::move(options)) {
  VariableLayout probe(options_.widths); // validates widths early
}

Service::~Service() = default;

std::size_t Service::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void Service::expire_idle(Clock::time_point now) {
  std::lock_guard lock(mu_);
  std::erase_if(sessions_, [&](const auto &kv) {
    return now - kv.second->last_used > options_.idle_expiry;
  });
}

std::shared_ptr<Service::Session> Service::find_session(const std::string &id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end())
    return nullptr;
  it->second->last_used = Clock::now();
  return it->second;
}

Response Service::create_session(const json &body) {
  Widths w = options_.widths;
  if (body.contains("widths")) {
    const auto &jw = body.at("widths");
    w.segment = jw.value("segment", w.segment);
    w.port = jw.value("port", w.port);
    w.proto = jw.value("proto", w.proto);
  }
  std::optional<VariableLayout> layout;
  try {
    layout.emplace(w);
  } catch (const std::invalid_argument &e) {
    return error(400, "invalid_widths", e.what());
  }
  auto session = std::make_shared<Session>(new_session_id(), *layout);
  {
    std::lock_guard lock(mu_);
    while (sessions_.contains(session->id))
      session->id = new_session_id();
    sessions_.emplace(session->id, session);
  }
  return {201,
          {{"session_id", session->id},
           {"variables", layout->variable_count()},
           {"widths", {{"segment", w.segment}, {"port", w.port}, {"proto", w.proto}}}}};
}

Response Service::load(Session &s, const std::string &slot, const json &body) {
  const auto idx = slot_index(slot);
  if (!idx)
    return error(400, "invalid_slot", "slot must be 'old' or 'new'");
  if (!body.is_object() || !body.contains("text") || !body.at("text").is_string())
    return error(400, "bad_request", "body must be {\"text\": <access list>}");
  const auto name = body.value("name", slot);
  RuleSet rs;
  try {
    rs = parse_ruleset(body.at("text").get<std::string>(), name);
  } catch (const AclParseError &e) {
    auto r = error(400, "parse_error", e.what(), e.diagnostics().front().line);
    r.body["diagnostics"] = json::array();
    for (const auto &d : e.diagnostics())
      r.body["diagnostics"].push_back(
          {{"line", d.line}, {"token", d.token}, {"message", d.message}});
    return r;
  }
  const auto start = Clock::now();
  try {
    s.slots[*idx] = compile_ruleset(s.mgr, s.layout, rs);
  } catch (const CompileError &e) {
    return error(400, "compile_error", e.what(), e.line());
  }
  s.compile_us[*idx] =
      std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
  const auto &crs = *s.slots[*idx];
  return {200,
          {{"session_id", s.id},
           {"slot", slot},
           {"rule_count", crs.source.size()},
           {"variables", s.layout.variable_count()},
           {"node_count", s.mgr.node_count(crs.accept)},
           {"diagnostics", json::array()}}};
}

Response Service::query(Session &s, const json &body) {
  const auto slot = body.value("slot", std::string("old"));
  const auto idx = slot_index(slot);
  if (!idx)
    return error(400, "invalid_slot", "slot must be 'old' or 'new'");
  if (!s.slots[*idx])
    return error(409, "slot_not_loaded", "no rule set loaded in slot '" + slot + "'");
  const auto &crs = *s.slots[*idx];

  std::vector<Field> order, summary;
  try {
    order = fields_from_json(body.value("order", json()), "order");
    summary = fields_from_json(body.value("summary", json()), "summary");
  } catch (const std::invalid_argument &e) {
    return error(400, "invalid_order", e.what());
  }
  std::size_t budget = options_.row_budget;
  if (const auto b = body.value("row_budget", std::size_t{0}); b != 0)
    budget = options_.row_budget == 0 ? b : std::min(b, options_.row_budget);

  try {
    const auto cond = parse_condition(body.value("where", std::string()));
    NodeRef f = body.value("not_allowed", false) ? s.mgr.neg(crs.accept) : crs.accept;
    f = instantiate(s.mgr, s.layout, cond, f);
    const auto table = summary.empty() ? show_conditions(s.mgr, s.layout, order, f, budget)
                                       : give_summary(s.mgr, s.layout, summary, f, budget);
    auto out = table_to_json(table);
    out["slot"] = slot;
    return {200, std::move(out)};
  } catch (const ConditionError &e) {
    return error(400, "invalid_condition", e.what());
  } catch (const RowBudgetExceeded &e) {
    return error(422, "row_budget_exceeded", e.what());
  }
}

Response Service::diff(Session &s, const json &body) {
  for (std::size_t i = 0; i < 2; ++i)
    if (!s.slots[i])
      return error(409, "slot_not_loaded",
                   std::string("diff needs both slots; '") + (i ? "new" : "old") + "' is empty");
  std::vector<Field> order;
  try {
    order = fields_from_json(body.value("order", json()), "order");
  } catch (const std::invalid_argument &e) {
    return error(400, "invalid_order", e.what());
  }
  std::size_t budget = options_.row_budget;
  if (const auto b = body.value("row_budget", std::size_t{0}); b != 0)
    budget = options_.row_budget == 0 ? b : std::min(b, options_.row_budget);
  try {
    const auto cond = condition_to_bdd(s.mgr, s.layout,
                                       parse_condition(body.value("where", std::string())));
    const auto d = aclbdd::diff(s.mgr, *s.slots[0], *s.slots[1]);
    const auto allow = s.mgr.conj(cond, d.newallow);
    const auto deny = s.mgr.conj(cond, d.newdeny);
    return {200,
            {{"equivalent", allow.is_false() && deny.is_false()},
             {"newallow", table_to_json(show_conditions(s.mgr, s.layout, order, allow, budget))},
             {"newdeny", table_to_json(show_conditions(s.mgr, s.layout, order, deny, budget))}}};
  } catch (const ConditionError &e) {
    return error(400, "invalid_condition", e.what());
  } catch (const RowBudgetExceeded &e) {
    return error(422, "row_budget_exceeded", e.what());
  }
}

Response Service::redundant(Session &s, const std::string &slot) {
  const auto idx = slot_index(slot);
  if (!idx)
    return error(400, "invalid_slot", "slot must be 'old' or 'new'");
  if (!s.slots[*idx])
    return error(409, "slot_not_loaded", "no rule set loaded in slot '" + slot + "'");
  json list = json::array();
  for (const auto &r : find_redundant(s.mgr, *s.slots[*idx]))
    list.push_back({{"index", r.index}, {"line", r.source_line}, {"text", r.text}});
  return {200, {{"slot", slot}, {"redundant", std::move(list)}}};
}

Response Service::stats(Session &s, const std::string &slot) {
  const auto idx = slot_index(slot);
  if (!idx)
    return error(400, "invalid_slot", "slot must be 'old' or 'new'");
  if (!s.slots[*idx])
    return error(409, "slot_not_loaded", "no rule set loaded in slot '" + slot + "'");
  const auto &crs = *s.slots[*idx];
  const auto st = s.mgr.stats(crs.accept);
  return {200,
          {{"slot", slot},
           {"rules", crs.source.size()},
           {"variables", s.layout.variable_count()},
           {"node_count", st.node_count},
           {"max_depth", st.max_depth},
           {"compile_us", s.compile_us[*idx]}}};
}

Response Service::handle(std::string_view method, std::string_view path,
                         const std::map<std::string, std::string> &query,
                         std::string_view body_text) {
  expire_idle(Clock::now());
  json body = json::object();
  if (body_text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    try {
      body = json::parse(body_text);
    } catch (const json::parse_error &e) {
      return error(400, "bad_request", std::string("invalid JSON body: ") + e.what());
    }
  }
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "sessions")
    return error(404, "not_found", "no such endpoint");
  if (parts.size() == 1) {
    if (method != "POST")
      return error(405, "method_not_allowed", "use POST /sessions");
    try {
      return create_session(body);
    } catch (const json::exception &e) {
      return error(400, "bad_request", e.what());
    }
  }

  auto session = find_session(std::string(parts[1]));
  if (!session)
    return error(404, "unknown_session", "no session '" + std::string(parts[1]) + "'");
  std::lock_guard lock(session->mu);

  auto param = [&](const char *key) {
    auto it = query.find(key);
    return it == query.end() ? std::string("old") : it->second;
  };

  try {
    if (parts.size() == 4 && parts[2] == "rulesets") {
      if (method != "PUT")
        return error(405, "method_not_allowed", "use PUT to load a rule set");
      return load(*session, std::string(parts[3]), body);
    }
    if (parts.size() == 3) {
      if (parts[2] == "query" && method == "POST")
        return this->query(*session, body);
      if (parts[2] == "diff" && method == "POST")
        return diff(*session, body);
      if (parts[2] == "redundant" && method == "GET")
        return redundant(*session, param("slot"));
      if (parts[2] == "stats" && method == "GET")
        return stats(*session, param("slot"));
    }
  } catch (const json::exception &e) {
    return error(400, "bad_request", e.what());
  } catch (const std::invalid_argument &e) {
    return error(400, "bad_request", e.what());
  }
  return error(404, "not_found", "no such endpoint");
}

void Service::mount(httplib::Server &server) {
  auto handler = [this](const httplib::Request &req, httplib::Response &res) {
    std::map<std::string, std::string> params;
    for (const auto &[k, v] : req.params)
      params.emplace(k, v);
    const auto r = handle(req.method, req.path, params, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Put(any, handler);
  server.Options(any, [](const httplib::Request &, httplib::Response &res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

bool serve(Service &service, const std::string &address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos)
    return false;
  auto host = address.substr(0, colon);
  if (host.empty())
    host = "0.0.0.0";
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception &) {
    return false;
  }
  httplib::Server server;
  service.mount(server);
  return server.listen(host, port);
}

} // namespace aclbdd
