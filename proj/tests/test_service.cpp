#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "aclbdd/render.hpp"
#include "aclbdd/service.hpp"

using namespace aclbdd;
using nlohmann::json;

namespace {

const char *kDemo =
    "access-list 101 permit icmp 0.0.0.0 255.255.255.255 0.0.0.0 255.255.255.255\n"
    "access-list 101 permit tcp 0.0.0.0 255.255.255.255 120.17.112.100 0.0.0.0 eq 80\n"
    "access-list 101 permit udp 0.0.0.0 255.255.255.255 0.0.0.0 255.255.255.255 eq 53\n"
    "access-list 101 deny gre 0.0.0.0 255.255.255.255 120.0.0.0 0.255.255.255 range 80 90\n"
    "access-list 101 permit gre 0.0.0.0 255.255.255.255 0.0.0.0 255.255.255.255\n";

const char *kTwoRules =
    "access-list 101 permit icmp 0.0.0.0 255.255.255.255 0.0.0.0 255.255.255.255\n"
    "access-list 101 permit tcp 0.0.0.0 255.255.255.255 120.17.112.100 0.0.0.0 eq 80\n";

struct Client {
  Service svc;
  Client() = default;
  explicit Client(Service::Options o) : svc(o) {}

  Service::Response call(std::string_view method, const std::string &path, const json &body = {},
                         std::map<std::string, std::string> q = {}) {
    return svc.handle(method, path, q, body.is_null() ? "" : body.dump());
  }
  std::string session() {
    const auto r = call("POST", "/sessions");
    REQUIRE(r.status == 201);
    return r.body.at("session_id").get<std::string>();
  }
};

} // namespace

TEST_CASE("load, query and stats") {
  Client c;
  const auto id = c.session();
  const auto load = c.call("PUT", "/sessions/" + id + "/rulesets/old", {{"text", kTwoRules}});
  REQUIRE(load.status == 200);
  CHECK(load.body.at("rule_count") == 2);
  CHECK(load.body.at("variables") == 83);

  const auto all = c.call("POST", "/sessions/" + id + "/query", json::object());
  REQUIRE(all.status == 200);
  CHECK(all.body.at("row_count") == 2);
  CHECK(all.body.at("columns").size() == 10);

  const auto ordered =
      c.call("POST", "/sessions/" + id + "/query", {{"order", {"Port", "Proto"}}});
  CHECK(ordered.body.at("columns")[0] == "Port");
  CHECK(ordered.body.at("columns")[1] == "Proto");

  const auto st = c.call("GET", "/sessions/" + id + "/stats");
  REQUIRE(st.status == 200);
  CHECK(st.body.at("rules") == 2);
  CHECK(st.body.at("variables") == 83);
  CHECK(st.body.at("max_depth").get<int>() <= 83);
  CHECK(st.body.at("compile_us").is_number_integer());
}

TEST_CASE("demo queries") {
  Client c;
  const auto id = c.session();
  REQUIRE(c.call("PUT", "/sessions/" + id + "/rulesets/old", {{"text", kDemo}}).status == 200);
  const auto udp = c.call("POST", "/sessions/" + id + "/query",
                          {{"where", "Proto<-udp"}, {"order", {"Port", "Proto"}}});
  REQUIRE(udp.status == 200);
  REQUIRE(udp.body.at("row_count") == 1);
  CHECK(udp.body.at("rows")[0].at("cells")[0] == json{{"lo", 53}, {"hi", 53}});
  CHECK(udp.body.at("rows")[0].at("cells")[1] == json{{"lo", 2}, {"hi", 2}});

  const auto na = c.call("POST", "/sessions/" + id + "/query",
                         {{"where", "Port range (80,90), Proto<-gre"}, {"not_allowed", true}});
  CHECK(na.body.at("row_count") == 1);

  const auto sum = c.call("POST", "/sessions/" + id + "/query",
                          {{"where", "Proto<-tcp"}, {"summary", {"Port", "Proto", "Dest4", "Dest3"}}});
  CHECK(sum.body.at("columns").size() == 4);

  const auto budget = c.call("POST", "/sessions/" + id + "/query",
                             {{"order", {"Dest4", "Src4"}}, {"row_budget", 1}});
  CHECK(budget.status == 422);
  CHECK(budget.body.at("code") == "row_budget_exceeded");
}

TEST_CASE("query responses are deterministic and reconstruct the function") {
  Client c;
  const auto id = c.session();
  c.call("PUT", "/sessions/" + id + "/rulesets/old", {{"text", kDemo}});
  const json q = {{"where", "NOT(Proto<-icmp)"}, {"order", {"Port", "Proto"}}};
  const auto a = c.call("POST", "/sessions/" + id + "/query", q);
  const auto b = c.call("POST", "/sessions/" + id + "/query", q);
  REQUIRE(a.status == 200);
  CHECK(a.body == b.body);

  VariableLayout layout;
  auto mgr = layout.make_manager();
  const auto crs = compile_ruleset(mgr, layout, parse_ruleset(kDemo));
  const auto expect = instantiate(mgr, layout, parse_condition("NOT(Proto<-icmp)"), crs.accept);
  CHECK(table_function(mgr, layout, table_from_json(a.body)) == expect);
}

TEST_CASE("diff and redundancy") {
  Client c;
  const auto id = c.session();
  CHECK(c.call("POST", "/sessions/" + id + "/diff", json::object()).status == 409);
  c.call("PUT", "/sessions/" + id + "/rulesets/old", {{"text", kDemo}});
  c.call("PUT", "/sessions/" + id + "/rulesets/new", {{"text", kDemo}});
  const auto same = c.call("POST", "/sessions/" + id + "/diff", json::object());
  REQUIRE(same.status == 200);
  CHECK(same.body.at("equivalent") == true);
  CHECK(same.body.at("newallow").at("row_count") == 0);
  CHECK(same.body.at("newdeny").at("row_count") == 0);

  c.call("PUT", "/sessions/" + id + "/rulesets/new", {{"text", kTwoRules}});
  const auto d = c.call("POST", "/sessions/" + id + "/diff", {{"order", {"Proto", "Port"}}});
  CHECK(d.body.at("equivalent") == false);
  CHECK(d.body.at("newdeny").at("row_count").get<int>() > 0);

  const std::string dup = std::string(kTwoRules) + kTwoRules;
  c.call("PUT", "/sessions/" + id + "/rulesets/new", {{"text", dup}});
  const auto red = c.call("GET", "/sessions/" + id + "/redundant", {}, {{"slot", "new"}});
  REQUIRE(red.status == 200);
  REQUIRE(red.body.at("redundant").size() == 2);
  CHECK(red.body.at("redundant")[0].at("line") == 3);
  CHECK(red.body.at("redundant")[1].at("line") == 4);
  CHECK(c.call("GET", "/sessions/" + id + "/redundant").body.at("redundant").empty());
}

TEST_CASE("errors") {
  Client c;
  const auto id = c.session();
  const auto bad = c.call("PUT", "/sessions/" + id + "/rulesets/old",
                          {{"text", std::string(kTwoRules) + "access-list 101 permit bogus\n"}});
  CHECK(bad.status == 400);
  CHECK(bad.body.at("code") == "parse_error");
  CHECK(bad.body.at("line") == 3);
  CHECK(bad.body.at("diagnostics").size() == 1);

  CHECK(c.call("POST", "/sessions/" + id + "/query", json::object()).body.at("code") ==
        "slot_not_loaded");
  CHECK(c.call("GET", "/sessions/nope/stats").status == 404);
  CHECK(c.call("PUT", "/sessions/" + id + "/rulesets/middle", {{"text", ""}}).status == 400);
  CHECK(c.call("PUT", "/sessions/" + id + "/rulesets/old", {{"body", 1}}).status == 400);
  CHECK(c.svc.handle("POST", "/sessions/" + id + "/query", {}, "{not json").status == 400);
  CHECK(c.call("GET", "/elsewhere").status == 404);

  c.call("PUT", "/sessions/" + id + "/rulesets/old", {{"text", kTwoRules}});
  CHECK(c.call("POST", "/sessions/" + id + "/query", {{"where", "Proto<-"}}).body.at("code") ==
        "invalid_condition");
  CHECK(c.call("POST", "/sessions/" + id + "/query", {{"order", {"Port", "Port"}}})
            .body.at("code") == "invalid_order");

  Client small(Service::Options{Widths{2, 3, 2}});
  const auto sid = small.session();
  const auto wide = small.call("PUT", "/sessions/" + sid + "/rulesets/old", {{"text", kTwoRules}});
  CHECK(wide.status == 400);
  CHECK(wide.body.at("code") == "compile_error");
  CHECK(wide.body.at("line") == 1);
}

TEST_CASE("idle sessions expire") {
  Service::Options o;
  o.idle_expiry = std::chrono::seconds(10);
  Client c(o);
  c.session();
  c.session();
  CHECK(c.svc.session_count() == 2);
  c.svc.expire_idle(Service::Clock::now() + std::chrono::seconds(5));
  CHECK(c.svc.session_count() == 2);
  c.svc.expire_idle(Service::Clock::now() + std::chrono::seconds(11));
  CHECK(c.svc.session_count() == 0);
}

TEST_CASE("concurrent requests") {
  Client c;
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) {
    ids.push_back(c.session());
    c.call("PUT", "/sessions/" + ids.back() + "/rulesets/old", {{"text", kDemo}});
    c.call("PUT", "/sessions/" + ids.back() + "/rulesets/new", {{"text", kTwoRules}});
  }
  const auto expect = c.call("POST", "/sessions/" + ids[0] + "/diff", json::object()).body;
  std::atomic<int> bad{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int k = 0; k < 10; ++k) {
        const auto r = c.svc.handle("POST", "/sessions/" + ids[t % 4] + "/diff", {}, "{}");
        bad += r.status != 200 || r.body != expect;
      }
    });
  for (auto &th : threads)
    th.join();
  CHECK(bad == 0);
}

TEST_CASE("over HTTP") {
  Service svc;
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/sessions", "{}", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = json::parse(created->body).at("session_id").get<std::string>();
  auto put = client.Put("/sessions/" + id + "/rulesets/old", json{{"text", kDemo}}.dump(),
                        "application/json");
  REQUIRE(put);
  CHECK(put->status == 200);
  auto q = client.Post("/sessions/" + id + "/query",
                       json{{"where", "Proto<-udp"}, {"order", {"Port", "Proto"}}}.dump(),
                       "application/json");
  REQUIRE(q);
  CHECK(json::parse(q->body).at("row_count") == 1);
  CHECK(q->get_header_value("Access-Control-Allow-Origin") == "*");
  auto st = client.Get("/sessions/" + id + "/stats?slot=old");
  REQUIRE(st);
  CHECK(json::parse(st->body).at("rules") == 5);
  auto missing = client.Get("/sessions/" + id + "/stats?slot=new");
  REQUIRE(missing);
  CHECK(missing->status == 409);
  auto opt = client.Options("/sessions");
  REQUIRE(opt);
  CHECK(opt->status == 204);

  server.stop();
  th.join();
}
