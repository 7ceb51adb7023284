#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "dg/diagonal/micro.hpp"
#include "dg/ir/interpreter.hpp"
#include "dg/ir/text.hpp"
#include "dg/report/report.hpp"
#include "support/gen.hpp"

using namespace dg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  Report report() const { return Report::parse(out); }
};

Run dg_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(DG_TEST_DATA) + "/" + name; }
std::string zoo(const std::string& name) { return std::string(DG_ZOO) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("exit codes follow the verdict") {
  struct Row {
    std::vector<std::string> args;
    int code;
  };
  std::vector<Row> rows{
      {{"verify", "exhaustive", "-m", data("id.ir"), "-j", data("eq.judge")}, 0},
      {{"verify", "exhaustive", "-m", data("flip.ir"), "-j", data("eq1.judge")}, 1},
      {{"verify", "exhaustive", "-m", data("id.ir"), "-j", data("eq.judge"), "--max-L", "2"}, 2},
      {{"verify", "regions", "-m", data("net.ir"), "-j", data("range.judge"), "--box", "0,1;0,1"}, 0},
      {{"verify", "regions", "-m", data("net.ir"), "-j", data("range.judge"), "--box", "0,4;0,4"}, 1},
      {{"verify", "regions", "-m", data("net.ir"), "-j", data("range.judge"), "--box", "0,1;0,1", "--max-neurons", "2"}, 2},
      {{"verify", "halting", "-a", data("counter.agent")}, 0},
      {{"verify", "halting", "-a", data("toggle.agent")}, 1},
      {{"verify", "halting", "-a", data("counter.agent"), "--max-state-bits", "1"}, 2},
      {{"verify", "closure", "-a", data("latch.agent")}, 0},
      {{"verify", "closure", "-a", data("counter.agent")}, 1},
      {{"verify", "closure", "-a", data("toggle.agent")}, 1},
      {{"demo", "adversary", "-v", zoo("all.list"), "-j", data("parity.judge")}, 0},
      {{"demo", "adversary", "-v", zoo("diverging.mp"), "-j", data("parity.judge"), "--fuel", "5000"}, 2},
      {{"demo", "reduction", "-m", data("halt.mp"), "--p-pos", data("id.mp")}, 0},
      {{"verify", "exhaustive", "-m", data("missing.ir"), "-j", data("eq.judge")}, 3},
      {{"verify", "exhaustive", "-m", data("id.ir"), "-j", data("eq1.judge")}, 3},
      {{"verify", "exhaustive", "-m", data("id.ir")}, 3},
      {{"verify", "regions", "-m", data("net.ir"), "-j", data("parity.judge"), "--box", "0,1;0,1"}, 3},
      {{"--workers", "0", "verify", "closure", "-a", data("latch.agent")}, 3},
      {{"frobnicate"}, 3},
      {{}, 3},
      {{"--help"}, 0},
  };
  for (const auto& row : rows) {
    auto r = dg_run(row.args);
    std::string joined;
    for (const auto& a : row.args) joined += a + ' ';
    CAPTURE(joined);
    CAPTURE(r.err);
    CHECK(r.code == row.code);
    if (r.code == 3 && !row.args.empty() && row.args[0] != "--help") CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("a trivial judge is undecided") {
  TempDir tmp;
  auto text = slurp(data("eq1.judge"));
  auto at = text.find("neg 0 1");
  REQUIRE(at != std::string::npos);
  text.replace(at, 7, "neg 0 0");
  write(tmp / "trivial.judge", text);
  auto r = dg_run({"verify", "exhaustive", "-m", data("flip.ir"), "-j", tmp / "trivial.judge"});
  CHECK(r.code == 2);
  CHECK(r.report().get("verdict") == "trivial_judge");
  CHECK(dg_run({"guard", "filter", "-m", data("flip.ir"), "-j", tmp / "trivial.judge"}).code == 2);
}

TEST_CASE("reports carry the counterexample") {
  auto r = dg_run({"--deterministic", "verify", "exhaustive", "-m", data("flip.ir"), "-j", data("eq1.judge")});
  auto rep = r.report();
  CHECK(r.out.rfind("schema: " + std::string(Report::kSchema) + "\n", 0) == 0);
  CHECK(rep.get("verdict") == "misaligned");
  CHECK(rep.get("counterexample.input") == "0");
  CHECK(rep.get("counterexample.output") == "1");
  CHECK_FALSE(rep.get("timestamp"));
  auto timed = dg_run({"verify", "exhaustive", "-m", data("flip.ir"), "-j", data("eq1.judge")}).report();
  CHECK(timed.get("timestamp"));
  CHECK(timed.get("wall_ms"));
  CHECK_FALSE(timed.get("workers"));
}

TEST_CASE("report text round trips") {
  test::Rng rng(401);
  for (int n = 0; n < 50; ++n) {
    Report r;
    for (int k = test::uniform(rng, 0, 8); k > 0; --k) {
      std::string key = "k" + std::to_string(test::uniform(rng, 0, 99)) + (test::coin(rng) ? ".x" : "");
      if (test::coin(rng)) {
        r.add(key, static_cast<std::uint64_t>(test::uniform(rng, 0, 1 << 30)));
      } else {
        std::string v;
        for (int c = test::uniform(rng, 0, 6); c > 0; --c) v += "ab 01,[]/:"[test::uniform(rng, 0, 9)];
        while (!v.empty() && v.back() == ' ') v.pop_back();
        while (!v.empty() && v.front() == ' ') v.erase(v.begin());
        r.add(key, v);
      }
    }
    CHECK(Report::parse(r.render()) == r);
  }
  CHECK_THROWS_AS(Report::parse("schema: other/9\n"), ParseError);
  CHECK_THROWS_AS(Report::parse("no colon here\n"), ParseError);
}

TEST_CASE("guard outputs re-parse and keep their guarantees") {
  TempDir tmp;
  auto f = dg_run({"-o", tmp / "g.ir", "guard", "filter", "-m", data("flip.ir"), "-j", data("eq1.judge")});
  REQUIRE(f.code == 0);
  CHECK_NOTHROW(ir::parse_program(slurp(tmp / "g.ir")));
  CHECK(dg_run({"verify", "exhaustive", "-m", tmp / "g.ir", "-j", data("eq1.judge")}).code == 0);

  REQUIRE(dg_run({"-o", tmp / "m.ir", "guard", "misalign", "-m", data("id.ir"), "-j", data("eq.judge")}).code == 0);
  auto v = dg_run({"verify", "exhaustive", "-m", tmp / "m.ir", "-j", data("eq.judge")});
  CHECK(v.code == 1);
  CHECK(v.report().get("counterexample") == "000 → 111");

  REQUIRE(dg_run({"-o", tmp / "c.ir", "guard", "clip", "-m", data("net.ir"), "--lo", "0", "--hi", "1"}).code == 0);
  auto clipped = ir::parse_program(slurp(tmp / "c.ir"));
  test::Rng rng(402);
  for (int n = 0; n < 500; ++n) {
    ir::Vector x{Rat(test::uniform(rng, -100, 100), test::uniform(rng, 1, 16)),
                 Rat(test::uniform(rng, -100, 100), test::uniform(rng, 1, 16))};
    auto y = ir::eval_values(clipped, x).output;
    REQUIRE(y.size() == 1);
    CHECK(Rat(0) <= y[0]);
    CHECK(y[0] <= Rat(1));
  }
  CHECK(dg_run({"verify", "regions", "-m", tmp / "c.ir", "-j", data("range.judge"), "--box", "0,9;0,9"}).code == 0);
  CHECK(dg_run({"guard", "clip", "-m", data("net.ir"), "--lo", "1", "--hi", "0"}).code == 3);
}

TEST_CASE("assembler commands round trip") {
  TempDir tmp;
  REQUIRE(dg_run({"asm", data("counter.mpa"), "-o", tmp / "c.mp"}).code == 0);
  CHECK(slurp(tmp / "c.mp") == slurp(data("counter.mp")));
  auto d = dg_run({"disasm", tmp / "c.mp"});
  REQUIRE(d.code == 0);
  CHECK(diag::assemble(d.out) == diag::assemble(slurp(data("counter.mpa"))));
  REQUIRE(dg_run({"zoo", "--dir", tmp / "zoo"}).code == 0);
  for (const char* f : {"all.list", "constant_true.mp", "diverging.mp"}) CHECK(slurp(tmp / ("zoo/" + std::string(f))) == slurp(zoo(f)));
}

TEST_CASE("reports are identical for any worker count") {
  std::vector<std::vector<std::string>> commands{
      {"verify", "exhaustive", "-m", data("flip.ir"), "-j", data("eq1.judge")},
      {"verify", "exhaustive", "-m", data("id.ir"), "-j", data("eq.judge")},
      {"verify", "regions", "-m", data("net.ir"), "-j", data("range.judge"), "--box", "0,3;0,3", "--cross-check", "2"},
      {"verify", "closure", "-a", data("counter.agent")},
      {"demo", "adversary", "-v", zoo("all.list"), "-j", data("parity.judge")},
  };
  for (const auto& cmd : commands) {
    std::optional<std::string> first;
    for (const char* w : {"1", "4", "8"}) {
      std::vector<std::string> args{"--deterministic", "--workers", w};
      args.insert(args.end(), cmd.begin(), cmd.end());
      auto r = dg_run(args);
      CHECK(r.code != 3);
      if (!first) first = r.out;
      CHECK(r.out == *first);
    }
  }
}
