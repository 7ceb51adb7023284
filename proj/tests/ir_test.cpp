#include <doctest.h>

#include <algorithm>

#include "dg/ir/agent.hpp"
#include "dg/ir/interpreter.hpp"
#include "dg/ir/text.hpp"
#include "dg/kernel/errors.hpp"
#include "support/gen.hpp"

using namespace dg;
using namespace dg::ir;

namespace {

Vector vec(std::initializer_list<long> v) {
  Vector out;
  for (long x : v) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("forward pass matches hand computation") {
  // h = relu(W1 x + b1), y = W2 h + b2
  TotalProgram p(seq({affine({vec({1, -2}), {Rat(1, 2), Rat(3)}}, {Rat(0), Rat(-1)}), relu(),
                      affine({vec({2, -1})}, {Rat(1, 3)})}),
                 2);
  for (long a = -3; a <= 3; ++a) {
    for (long b = -3; b <= 3; ++b) {
      Rat x0(a), x1(b, 2);
      Rat h0 = max(Rat(0), x0 - Rat(2) * x1);
      Rat h1 = max(Rat(0), Rat(1, 2) * x0 + Rat(3) * x1 - Rat(1));
      Rat y = Rat(2) * h0 - h1 + Rat(1, 3);
      auto r = eval_values(p, std::vector<Rat>{x0, x1});
      REQUIRE(r.output.size() == 1);
      CHECK(r.output[0] == y);
      CHECK(r.steps_used == p.fuel_bound());
    }
  }
}

TEST_CASE("static costs follow the node rules") {
  CHECK(infer_shape(*affine({vec({1, 2, 3}), vec({4, 5, 6})}, vec({0, 0})), 3).fuel == 2 * 4);
  CHECK(infer_shape(*relu(), 7).fuel == 7);
  CHECK(infer_shape(*decode(5), 5).fuel == 5);
  CHECK(infer_shape(*encode(5), 5).fuel == 5);
  CHECK(infer_shape(*slice(1, 2), 4).fuel == 1);
  CHECK(infer_shape(*constant(vec({1, 2, 3})), 9).fuel == 3);
  CHECK(infer_shape(*seq({relu(), step()}), 4).fuel == 8);
  CHECK(infer_shape(*parallel({relu(), slice(0, 1)}), 4).fuel == 5);
  auto body = affine({vec({1})}, vec({1}));
  auto pred = seq({affine({vec({1})}, vec({-3})), step()});
  CHECK(infer_shape(*repeat(body, 5, pred, BitVec(1)), 1).fuel == 5 * (2 + 3) + 1);
  auto sel = select(step(), constant(vec({1})), seq({relu(), relu()}));
  CHECK(infer_shape(*sel, 1).fuel == 1 + 1 + 2);
}

TEST_CASE("repeat exits early or yields the terminal output") {
  auto body = affine({vec({1})}, vec({1}));
  auto pred = seq({affine({vec({1})}, vec({-3})), step()});
  TotalProgram p(repeat(body, 5, pred, BitVec::parse("1")), 1);
  auto early = eval_values(p, vec({0}));
  CHECK(early.output == vec({3}));
  CHECK(early.steps_used == 3 * 5 + 1);
  auto late = eval_values(p, vec({-10}));
  CHECK(late.output == vec({1}));
  CHECK(late.steps_used == 5 * 5 + 1);
  CHECK_THROWS_AS(TotalProgram(repeat(body, 0, pred, BitVec(1)), 1), StructureError);
}

TEST_CASE("select charges the branch it takes") {
  TotalProgram p(select(step(), constant(vec({7})), seq({relu(), relu()})), 1);
  auto a = eval_values(p, vec({0}));
  CHECK(a.output == vec({7}));
  CHECK(a.steps_used == 1 + 1 + 1);
  auto b = eval_values(p, vec({-1}));
  CHECK(b.output == vec({0}));
  CHECK(b.steps_used == 1 + 1 + 2);
}

TEST_CASE("encode thresholds at one half") {
  TotalProgram p(seq({affine({{Rat(1)}, {Rat(1)}, {Rat(1)}}, {Rat(-1, 2), Rat(0), Rat(-1, 3)}), encode(3)}), 1);
  auto r = eval_values(p, std::vector<Rat>{Rat(1, 2)});
  CHECK(r.output == vec({0, 1, 0}));
  auto s = eval_values(p, std::vector<Rat>{Rat(5, 6)});
  CHECK(s.output == vec({0, 1, 1}));
}

TEST_CASE("malformed trees and inputs are rejected") {
  CHECK_THROWS_AS(TotalProgram(seq({affine({vec({1, 1})}, vec({0})), affine({vec({1, 1})}, vec({0}))}), 2),
                  StructureError);
  CHECK_THROWS_AS(TotalProgram(slice(2, 3), 4), StructureError);
  CHECK_THROWS_AS(TotalProgram(select(relu(), relu(), relu()), 2), StructureError);
  TotalProgram p(decode(3), 3);
  CHECK_THROWS_AS(eval_values(p, vec({1, 0})), WidthError);
  CHECK_THROWS_AS(eval(TotalProgram(affine({vec({2})}, vec({0})), 1), BitVec::parse("1")), WidthError);
}

TEST_CASE("threshold circuits evaluate like their integer oracle") {
  test::Rng rng(21);
  for (int n = 0; n < 100; ++n) {
    std::size_t in = static_cast<std::size_t>(test::uniform(rng, 1, 6));
    std::size_t out = static_cast<std::size_t>(test::uniform(rng, 1, 4));
    auto net = test::random_threshold_net(rng, in, out, static_cast<std::size_t>(test::uniform(rng, 1, 3)));
    TotalProgram p(net.to_ir(), in);
    for (std::uint64_t v = 0; v < (1u << in); ++v) {
      BitVec x = BitVec::from_uint(v, in);
      CHECK(eval(p, x).output == test::from_ints(net.eval(test::to_ints(x))));
    }
  }
}

TEST_CASE("interpretation never exceeds the static fuel bound") {
  test::Rng rng(22);
  for (int n = 0; n < 300; ++n) {
    std::size_t in = static_cast<std::size_t>(test::uniform(rng, 1, 6));
    auto p = test::random_total_model(rng, in, static_cast<std::size_t>(test::uniform(rng, 1, 3)));
    for (int k = 0; k < 8; ++k) {
      auto r = eval(p, test::random_bits(rng, in));
      CHECK(r.steps_used <= p.fuel_bound());
      CHECK(r.output.width() == p.output_dim());
    }
  }
}

TEST_CASE("program text round-trips") {
  test::Rng rng(23);
  for (int n = 0; n < 200; ++n) {
    std::size_t in = static_cast<std::size_t>(test::uniform(rng, 1, 5));
    auto p = test::random_total_model(rng, in, static_cast<std::size_t>(test::uniform(rng, 1, 3)));
    auto text = print(p);
    auto q = parse_program(text);
    CHECK(q == p);
    CHECK(print(q) == text);
  }
  auto with_comments = parse_program("# c\n(program 2\n  (seq (act relu) # inline\n   (act (clip -1/2 1))))\n");
  CHECK(with_comments.input_dim() == 2);
  CHECK_THROWS_AS(parse_program("(seq (act relu)"), ParseError);
  CHECK_THROWS_AS(parse_program("(affine 1x2 [[1]] [0])"), ParseError);
  CHECK_THROWS_AS(parse_program("(frobnicate)"), ParseError);
}

TEST_CASE("agent traces respect theta") {
  // state' = state + 1 (2-bit counter), output = input
  auto step_model = parse_node(
      "(seq (affine 4x3 [[1,0,0],[0,1,0],[1,1,0],[0,0,1]] [0,0,-2,0]) "
      "(par (slice 0 2) (seq (slice 2 1) (act step)) (slice 3 1)) "
      "(affine 3x4 [[1,1,-2,0],[0,-1,0,0],[0,0,0,1]] [0,1,0]))");
  AgentLoop halting(TotalProgram(step_model, 3), 2, 1, 8, {BitVec::parse("11")});
  auto t = run_agent(halting, BitVec::parse("1"), BitVec::parse("00"));
  CHECK(t.halted_by == HaltReason::kTerminalState);
  CHECK(t.steps.size() == 3);
  CHECK(t.steps.back().state == BitVec::parse("11"));
  CHECK(t.steps.back().output == BitVec::parse("1"));
  CHECK_FALSE(t.forced_output);

  AgentLoop capped(TotalProgram(step_model, 3), 2, 1, 2, {BitVec::parse("11")}, BitVec::parse("0"));
  auto u = run_agent(capped, BitVec::parse("1"), BitVec::parse("00"));
  CHECK(u.halted_by == HaltReason::kThetaExhausted);
  CHECK(u.steps.size() == 2);
  CHECK(u.forced_output == BitVec::parse("0"));

  CHECK(parse_agent(print_agent(capped)) == capped);
  std::vector<BitVec> many;
  for (std::uint64_t s = 0; s < 8; ++s) many.push_back(BitVec::from_uint(s, 3));
  CHECK_THROWS_AS(AgentLoop(TotalProgram(identity(4), 4), 3, 1, 4, many, {}, 4), BudgetError);
  CHECK_THROWS_AS(AgentLoop(TotalProgram(identity(4), 4), 3, 2, 4, {BitVec(3)}), WidthError);
  CHECK_THROWS_AS(AgentLoop(TotalProgram(identity(4), 4), 3, 1, 4, {}), StructureError);
  CHECK_THROWS_AS(AgentLoop(TotalProgram(identity(4), 4), 3, 1, 0, {BitVec(3)}), StructureError);
}

TEST_CASE("agent traces agree with a plain loop") {
  test::Rng rng(24);
  for (int n = 0; n < 100; ++n) {
    auto a = test::random_agent(rng, 4, 2, 2, 20);
    AgentLoop loop(TotalProgram(a.step.to_ir(), 6), 4, 2, 20, a.finals, BitVec(2));
    BitVec x = test::random_bits(rng, 2), s = test::random_bits(rng, 4);
    auto trace = run_agent(loop, x, s);
    std::vector<std::pair<BitVec, BitVec>> expected;
    bool reached = false;
    for (int t = 0; t < 20 && !reached; ++t) {
      auto out = test::from_ints(a.step.eval(test::to_ints(s.concat(x))));
      s = out.slice(0, 4);
      expected.emplace_back(s, out.slice(4, 2));
      reached = std::find(a.finals.begin(), a.finals.end(), s) != a.finals.end();
    }
    REQUIRE(trace.steps.size() == expected.size());
    for (std::size_t t = 0; t < expected.size(); ++t) {
      CHECK(trace.steps[t].state == expected[t].first);
      CHECK(trace.steps[t].output == expected[t].second);
    }
    CHECK((trace.halted_by == HaltReason::kTerminalState) == reached);
    CHECK(trace.forced_output.has_value() == !reached);
  }
}
