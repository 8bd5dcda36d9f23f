#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "aclbdd/cli.hpp"
#include "aclbdd/render.hpp"

namespace fs = std::filesystem;
using namespace aclbdd;
namespace ec = aclbdd::cli;

namespace {

const std::string kData = ACLBDD_DATA_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "aclbdd");
  std::ostringstream out, err;
  const int code = aclbdd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string &text) {
    static int n = 0;
    path = fs::temp_directory_path() /
           ("aclbdd_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n++) + ".acl");
    std::ofstream(path) << text;
  }
  ~TempFile() { fs::remove(path); }
  std::string str() const { return path.string(); }
};

const char *kRuleA = "access-list 101 permit tcp 10.1.0.0 0.0.255.255 0.0.0.0 255.255.255.255\n";
const char *kRuleB = "access-list 101 deny udp 10.2.0.0 0.0.255.255 0.0.0.0 255.255.255.255\n";

} // namespace

TEST_CASE("show") {
  const auto r = run_cli({"show", kData + "/two_rules.acl", "--order", "Proto,Port"});
  CHECK(r.code == ec::kOk);
  CHECK(r.out.find("    3|       80|") != std::string::npos);

  const auto udp = run_cli({"show", kData + "/demo.acl", "--order", "Port,Proto", "--where",
                        "Proto<-udp", "--format", "structured"});
  REQUIRE(udp.code == ec::kOk);
  const auto tables = parse_structured(udp.out);
  REQUIRE(tables.size() == 1);
  REQUIRE(tables[0].second.rows.size() == 1);
  CHECK(tables[0].second.rows[0].cells[0] == Interval{53, 53});

  const auto na = run_cli({"show", kData + "/demo.acl", "--order",
                       "[Proto,Port,Dest1,Dest2,Dest3,Dest4]", "--where",
                       "Port range (80,90), Proto<-gre", "--not-allowed", "--format",
                       "structured"});
  REQUIRE(na.code == ec::kOk);
  CHECK(parse_structured(na.out)[0].second.rows.size() == 1);

  const auto sum = run_cli({"show", kData + "/demo.acl", "--summary", "Port,Proto,Dest4,Dest3",
                        "--where", "Proto<-tcp"});
  CHECK(sum.code == ec::kOk);
  CHECK(sum.out.find("Src") == std::string::npos);
}

TEST_CASE("diff") {
  const auto same = run_cli({"diff", kData + "/demo.acl", kData + "/demo.acl"});
  CHECK(same.code == ec::kOk);
  CHECK(same.out.find("equivalent") != std::string::npos);

  const auto del = run_cli({"diff", kData + "/real1.acl", kData + "/real1a.acl", "--order",
                        "Port,Proto,Dest1,Dest2,Dest3,Dest4,Source1,Source2,Source3",
                        "--format", "structured"});
  CHECK(del.code == ec::kDifferences);
  const auto t = parse_structured(del.out);
  REQUIRE(t.size() == 2);
  CHECK(t[0].first == "newallow");
  CHECK(t[0].second.empty());
  CHECK(t[1].first == "newdeny");
  CHECK(t[1].second.rows.size() == 12);

  const std::string permit = "access-list 101 permit tcp 10.0.0.0 0.255.255.255 0.0.0.0 255.255.255.255\n";
  const std::string deny = "access-list 101 deny tcp 10.1.0.0 0.0.255.255 0.0.0.0 255.255.255.255\n";
  TempFile a(permit + deny), b(deny + permit);
  const auto re = run_cli({"diff", a.str(), b.str(), "--format", "structured"});
  CHECK(re.code == ec::kDifferences);
  CHECK_FALSE(parse_structured(re.out)[1].second.empty());
}

TEST_CASE("check") {
  TempFile dup(std::string(kRuleA) + kRuleA + kRuleB);
  const auto r = run_cli({"check", dup.str()});
  CHECK(r.code == ec::kRedundant);
  CHECK(r.out.find("line 2") != std::string::npos);
  TempFile clean(std::string(kRuleA) + kRuleB +
                 "access-list 101 permit udp 0.0.0.0 255.255.255.255 0.0.0.0 255.255.255.255\n");
  const auto ok = run_cli({"check", clean.str()});
  CHECK(ok.code == ec::kOk);
  CHECK(ok.out == "no redundant rules\n");
}

TEST_CASE("stats") {
  TempFile empty("");
  const auto r = run_cli({"stats", empty.str()});
  CHECK(r.code == ec::kOk);
  CHECK(r.out.find("rules:      0") != std::string::npos);
  CHECK(r.out.find("node_count: 0") != std::string::npos);
  CHECK(r.out.find("variables:  83") != std::string::npos);
  const auto s = run_cli({"stats", kData + "/demo.acl", "--format", "structured"});
  const auto j = nlohmann::json::parse(s.out);
  CHECK(j.at("rules") == 5);
  CHECK(j.at("variables") == 83);
  CHECK(j.at("max_depth").get<int>() <= 83);
  const auto small = run_cli({"stats", kData + "/two_rules.acl", "--widths", "8,16,2"});
  CHECK(small.out.find("variables:  82") != std::string::npos);
}

TEST_CASE("errors and exit codes") {
  TempFile bad("access-list 101 permit tcp 1.2.3.4 0.0.0.0 5.6.7.8 0.0.0.0\n"
               "access-list 101 permit tcp 1.2.3.4 0.0.0.0 5.6.7.8 0.0.0.0 eq 99999\n");
  const auto r = run_cli({"show", bad.str()});
  CHECK(r.code == ec::kInputError);
  CHECK(r.err.find(":2:") != std::string::npos);
  CHECK(run_cli({"show", "/nonexistent.acl"}).code == ec::kInputError);
  CHECK(run_cli({"show", kData + "/demo.acl", "--where", "Proto<-"}).code == ec::kInputError);
  CHECK(run_cli({"show", kData + "/demo.acl", "--order", "Port,Port"}).code == ec::kUsage);
  CHECK(run_cli({"frobnicate"}).code == ec::kUsage);
  CHECK(run_cli({}).code == ec::kUsage);

  TempFile many([] {
    std::string s;
    for (int i = 0; i < 40; ++i)
      s += "access-list 101 permit tcp 10." + std::to_string(i) + ".0.0 0.0.255.255 0.0.0.0 "
           "255.255.255.255 eq " + std::to_string(1000 + 3 * i) + "\n";
    return s;
  }());
  const auto budget = run_cli({"show", many.str(), "--row-budget", "10"});
  CHECK(budget.code == ec::kRowBudget);
  CHECK(budget.err.find("--summary") != std::string::npos);
  CHECK(run_cli({"show", many.str(), "--row-budget", "10", "--summary", "Proto"}).code == ec::kOk);
  CHECK(run_cli({"dot", kData + "/two_rules.acl"}).out.find("digraph") != std::string::npos);
}

TEST_CASE("installed binary exit status") {
  TempFile dup(std::string(kRuleA) + kRuleA);
  const auto cmd = std::string(ACLBDD_CLI_PATH) + " check " + dup.str() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == ec::kRedundant);
}
