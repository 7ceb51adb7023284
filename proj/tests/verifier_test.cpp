#include <doctest.h>

#include <algorithm>
#include <set>

#include "dg/ir/interpreter.hpp"
#include "dg/kernel/errors.hpp"
#include "dg/verifier/agent_checks.hpp"
#include "dg/verifier/exhaustive.hpp"
#include "dg/verifier/fourier_motzkin.hpp"
#include "dg/verifier/quantize.hpp"
#include "dg/verifier/regions.hpp"
#include "support/gen.hpp"
#include "support/judges.hpp"
#include "support/oracles.hpp"

using namespace dg;
using namespace dg::verify;

namespace {

struct Expected {
  bool aligned = true;
  BitVec input, output;
};

Expected first_violation(std::size_t in_bits, const std::function<std::vector<int>(const std::vector<int>&)>& model,
                         const test::JudgeCase& jc) {
  for (std::uint64_t n = 0; n < (std::uint64_t{1} << in_bits); ++n) {
    auto i = test::to_ints(BitVec::from_uint(n, in_bits));
    auto o = model(i);
    if (!jc.oracle(i, o)) return {false, test::from_ints(i), test::from_ints(o)};
  }
  return {};
}

void check_against(const Verdict& v, const Expected& e) {
  if (e.aligned) {
    CHECK(v.outcome == Verdict::Outcome::kAligned);
    return;
  }
  REQUIRE(v.outcome == Verdict::Outcome::kMisaligned);
  CHECK(BitVec::from_rats(v.counterexample->input) == e.input);
  CHECK(BitVec::from_rats(v.counterexample->output) == e.output);
}

Constraint con(std::vector<long> c, long k, bool strict = false) {
  Constraint out;
  for (long x : c) out.coeffs.emplace_back(x);
  out.constant = Rat(k);
  out.strict = strict;
  return out;
}

}  // namespace

TEST_CASE("exhaustive verdicts match the integer oracle on threshold circuits") {
  test::Rng rng(101);
  auto judges = test::matrix_judges();
  int misaligned = 0;
  for (int n = 0; n < 40; ++n) {
    auto net = test::random_threshold_net(rng, 8, 2, static_cast<std::size_t>(test::uniform(rng, 1, 3)));
    ir::TotalProgram model(net.to_ir(), 8);
    for (const auto& jc : judges) {
      auto e = first_violation(8, [&](const auto& i) { return net.eval(i); }, jc);
      auto v = verify_exhaustive(model, jc.judge, 8);
      check_against(v, e);
      misaligned += !e.aligned;
    }
  }
  CHECK(misaligned > 0);
  CHECK(misaligned < 200);
}

TEST_CASE("exhaustive verdicts match on models using every node kind") {
  test::Rng rng(102);
  auto judges = test::matrix_judges();
  for (int n = 0; n < 40; ++n) {
    auto model = test::random_total_model(rng, 8, 2);
    for (const auto& jc : judges) {
      auto e = first_violation(
          8, [&](const auto& i) { return test::to_ints(ir::eval(model, test::from_ints(i)).output); }, jc);
      check_against(verify_exhaustive(model, jc.judge, 8), e);
    }
  }
}

TEST_CASE("exhaustive verdicts do not depend on the worker count") {
  test::Rng rng(103);
  auto judges = test::matrix_judges();
  for (int n = 0; n < 10; ++n) {
    auto model = test::random_total_model(rng, 8, 2);
    for (const auto& jc : judges) {
      auto base = verify_exhaustive(model, jc.judge, 8, {kDefaultMaxInputBits, 1});
      for (unsigned w : {2u, 4u, 8u}) CHECK(verify_exhaustive(model, jc.judge, 8, {kDefaultMaxInputBits, w}) == base);
    }
  }
}

TEST_CASE("exhaustive refuses trivial judges and oversized inputs") {
  auto eq = test::equality_judge(3);
  ir::TotalProgram id(ir::identity(3), 3);
  CHECK(verify_exhaustive(id, eq, 3).is_aligned());

  auto bad_witness = Judge::linear("w", 3, 3, *eq.formula(), ir::TotalProgram(ir::constant(BitVec(3)), 3),
                                   eq.neg_input(), eq.neg_output());
  CHECK(verify_exhaustive(id, bad_witness, 3).outcome == Verdict::Outcome::kTrivialJudge);

  auto bad_neg = Judge::linear("n", 3, 3, *eq.formula(), eq.witness(), eq.neg_input(), eq.neg_input());
  CHECK(verify_exhaustive(id, bad_neg, 3).outcome == Verdict::Outcome::kTrivialJudge);

  auto wide = test::equality_judge(6);
  auto v = verify_exhaustive(ir::TotalProgram(ir::identity(6), 6), wide, 6, {5, 1});
  CHECK(v.outcome == Verdict::Outcome::kResourceExceeded);
  CHECK(v.limit == 5);
}

TEST_CASE("fourier-motzkin on small hand systems") {
  CHECK_FALSE(find_point({con({1}, 0, true), con({-1}, 0, true)}, 1));
  CHECK_FALSE(find_point({con({1}, 0, true), con({-1}, 0)}, 1));
  auto p = find_point({con({1}, 0), con({-1}, 0)}, 1);
  REQUIRE(p);
  CHECK((*p)[0] == Rat(0));
  // x + y > 1, x < 1/2 strictly, y < 1/2 strictly: infeasible
  CHECK_FALSE(find_point({con({1, 1}, -1, true), con({-2, 0}, 1, true), con({0, -2}, 1, true)}, 2));
  auto q = find_point({con({1, 1}, -1, true), con({-1, 0}, 1, true), con({0, -1}, 1, true)}, 2);
  REQUIRE(q);
  CHECK((*q)[0] + (*q)[1] > Rat(1));
  CHECK(find_point({}, 3));
}

TEST_CASE("fourier-motzkin agrees with vertex enumeration on bounded systems") {
  test::Rng rng(104);
  int feasible = 0;
  for (int n = 0; n < 400; ++n) {
    std::vector<Constraint> cs{con({1, 0}, 5), con({-1, 0}, 5), con({0, 1}, 5), con({0, -1}, 5)};
    int extra = static_cast<int>(test::uniform(rng, 1, 4));
    for (int k = 0; k < extra; ++k) {
      cs.push_back(con({test::uniform(rng, -3, 3), test::uniform(rng, -3, 3)}, test::uniform(rng, -6, 6)));
    }
    // a closed bounded polytope is non-empty iff one of its vertex candidates is inside
    bool oracle = false;
    for (std::size_t a = 0; a < cs.size() && !oracle; ++a) {
      for (std::size_t b = a + 1; b < cs.size() && !oracle; ++b) {
        Rat det = cs[a].coeffs[0] * cs[b].coeffs[1] - cs[a].coeffs[1] * cs[b].coeffs[0];
        if (det == Rat(0)) continue;
        std::vector<Rat> x{(-cs[a].constant * cs[b].coeffs[1] + cs[b].constant * cs[a].coeffs[1]) / det,
                           (-cs[b].constant * cs[a].coeffs[0] + cs[a].constant * cs[b].coeffs[0]) / det};
        oracle = std::all_of(cs.begin(), cs.end(), [&](const Constraint& c) { return c.satisfied_by(x); });
      }
    }
    auto p = find_point(cs, 2);
    CHECK(p.has_value() == oracle);
    if (p) {
      ++feasible;
      for (const auto& c : cs) CHECK(c.satisfied_by(*p));
    }
  }
  CHECK(feasible > 50);
  CHECK(feasible < 400);
}

TEST_CASE("three lines in general position cut the plane into seven regions") {
  std::vector<AffineLayer> hidden{{{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}}, {Rat(0), Rat(0), Rat(-1)}}};
  PwlNetwork net(hidden, {{{Rat(1), Rat(1), Rat(1)}}, {Rat(0)}});
  auto box = Box::parse("-10,10;-10,10");
  auto regions = enumerate_regions(net, box);
  CHECK(regions.size() == 7);
  CHECK(test::brute_force_patterns(net, box).size() == 7);
  for (const auto& r : regions) {
    CHECK(box.contains(r.interior_point));
    CHECK(net.pattern(r.interior_point) == r.pattern);
    CHECK(r.apply(r.interior_point) == net.eval(r.interior_point));
  }
}

TEST_CASE("region enumeration matches brute force over all patterns") {
  test::Rng rng(105);
  for (int n = 0; n < 60; ++n) {
    auto d = static_cast<std::size_t>(test::uniform(rng, 1, 3));
    std::vector<std::size_t> widths{static_cast<std::size_t>(test::uniform(rng, 1, 4))};
    if (test::coin(rng)) widths.push_back(static_cast<std::size_t>(test::uniform(rng, 1, 3)));
    auto net = test::random_relu_net(rng, d, widths, 1, 2);
    Box box;
    for (std::size_t k = 0; k < d; ++k) {
      box.lo.emplace_back(-2);
      box.hi.emplace_back(2);
    }
    auto regions = enumerate_regions(net, box);
    std::set<std::vector<std::uint8_t>> got;
    for (const auto& r : regions) {
      got.insert(r.pattern);
      CHECK(net.pattern(r.interior_point) == r.pattern);
    }
    CHECK(got.size() == regions.size());
    CHECK(got == test::brute_force_patterns(net, box));
    RegionOptions four;
    four.workers = 4;
    auto again = enumerate_regions(net, box, four);
    REQUIRE(again.size() == regions.size());
    for (std::size_t k = 0; k < regions.size(); ++k) CHECK(again[k].pattern == regions[k].pattern);
  }
}

TEST_CASE("region enumeration enforces its budgets") {
  test::Rng rng(106);
  auto net = test::random_relu_net(rng, 2, {12}, 1);
  RegionOptions small;
  small.max_neurons = 8;
  CHECK_THROWS_AS(enumerate_regions(net, Box::parse("0,1;0,1"), small), BudgetError);
  auto judge = Judge::linear("cap", 2, 1, Formula::leaf(test::ineq(5, {0, 0, -1})),
                             ir::TotalProgram(ir::affine({{Rat(0), Rat(0)}}, {Rat(0)}), 2), {Rat(0), Rat(0)}, {Rat(6)});
  auto v = verify_regions(net, judge, Box::parse("0,1;0,1"), small);
  CHECK(v.outcome == Verdict::Outcome::kResourceExceeded);
  CHECK(v.limit == 8);
}


TEST_CASE("region verdicts agree with exhaustive search on the quantized model") {
  test::Rng rng(107);
  int misaligned = 0;
  for (int n = 0; n < 80; ++n) {
    auto d = static_cast<std::size_t>(test::uniform(rng, 1, 2));
    auto net = test::grid_aligned_net(rng, d);
    auto judge = test::grid_judge(rng, d);
    Grid grid;
    grid.bits_per_dim = 2;
    for (std::size_t k = 0; k < d; ++k) {
      grid.box.lo.emplace_back(0);
      grid.box.hi.emplace_back(3);
    }
    auto rv = verify_regions(net, judge, grid.box);
    auto ev = verify_exhaustive(quantize_model(net, grid), quantize_judge(judge, grid), grid.input_bits());
    REQUIRE(rv.outcome != Verdict::Outcome::kTrivialJudge);
    CHECK(rv.is_aligned() == ev.is_aligned());
    if (rv.is_misaligned()) {
      ++misaligned;
      const auto& cex = *rv.counterexample;
      CHECK(grid.box.contains(cex.input));
      CHECK(net.eval(cex.input) == cex.output);
      CHECK_FALSE(judge.eval(cex.input, cex.output));
    }
  }
  CHECK(misaligned > 5);
  CHECK(misaligned < 75);
}

TEST_CASE("region verification rejects predicate judges") {
  auto net = PwlNetwork::from_program(ir::TotalProgram(ir::affine({{Rat(1)}}, {Rat(0)}), 1));
  auto pred = Judge::predicate("p", 1, 1, ir::TotalProgram(ir::constant({Rat(1)}), 2),
                               ir::TotalProgram(ir::identity(1), 1), {Rat(0)}, {Rat(1)});
  CHECK_THROWS_AS(verify_regions(net, pred, Box::parse("0,1")), JudgeKindError);
}

TEST_CASE("halting verdicts match cycle detection") {
  test::Rng rng(108);
  int halts = 0, diverges = 0;
  for (int n = 0; n < 300; ++n) {
    auto sb = static_cast<std::size_t>(test::uniform(rng, 1, 10));
    auto a = test::random_agent(rng, sb, 1, 1);
    auto loop = a.loop();
    BitVec x(1);
    auto f = [&](std::uint64_t s) { return a.next_state(BitVec::from_uint(s, sb), x).to_uint(); };
    auto fin = [&](std::uint64_t s) { return loop.is_final(BitVec::from_uint(s, sb)); };
    auto oracle = test::brent_halting(0, f, fin);
    auto r = verify_halting(loop);
    if (oracle.halts) {
      ++halts;
      CHECK(r.status == HaltingResult::Status::kHalts);
      CHECK(r.steps == oracle.steps);
    } else {
      ++diverges;
      CHECK(r.status == HaltingResult::Status::kDiverges);
      CHECK(r.cycle_start == oracle.cycle_start);
      CHECK(r.cycle_length == oracle.cycle_length);
    }
  }
  CHECK(halts > 30);
  CHECK(diverges > 30);
}

TEST_CASE("halting respects memory and step budgets") {
  test::Rng rng(109);
  auto a = test::random_agent(rng, 6, 1, 1);
  HaltingOptions o;
  o.memory_bound = 5;
  auto r = verify_halting(a.loop(), o);
  CHECK(r.status == HaltingResult::Status::kResourceExceeded);
  CHECK(r.budget == "max-state-bits");
  o.memory_bound = 30;
  CHECK(verify_halting(a.loop(), o).status == HaltingResult::Status::kResourceExceeded);

  auto still = ir::parse_agent("agent state=4 in=1 theta=32\nfinal 1111\nstep (slice 0 4)\n");
  auto r2 = verify_halting(still);
  CHECK(r2.status == HaltingResult::Status::kDiverges);
  CHECK(r2.cycle_start == 0);
  CHECK(r2.cycle_length == 1);
  HaltingOptions none;
  none.step_budget = 0;
  auto r3 = verify_halting(still, none);
  CHECK(r3.status == HaltingResult::Status::kResourceExceeded);
  CHECK(r3.budget == "step-budget");
}

TEST_CASE("closure violations match a full transition scan") {
  test::Rng rng(110);
  int violations = 0;
  for (int n = 0; n < 200; ++n) {
    auto sb = static_cast<std::size_t>(test::uniform(rng, 1, 8));
    auto ib = static_cast<std::size_t>(test::uniform(rng, 1, 3));
    auto a = test::random_agent(rng, sb, ib, 1);
    auto loop = a.loop();
    std::optional<std::pair<BitVec, BitVec>> first;
    for (const auto& s : loop.final_states()) {
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << ib) && !first; ++x) {
        auto in = BitVec::from_uint(x, ib);
        if (!loop.is_final(a.next_state(s, in))) first.emplace(s, in);
      }
      if (first) break;
    }
    auto r = check_final_closure(loop, {16, 16, static_cast<unsigned>(1 + n % 4)});
    if (first) {
      ++violations;
      REQUIRE(r.status == ClosureResult::Status::kViolation);
      CHECK(r.state == first->first);
      CHECK(r.input == first->second);
      CHECK(r.successor == a.next_state(first->first, first->second));
    } else {
      CHECK(r.status == ClosureResult::Status::kOk);
      CHECK(r.transitions_checked == loop.final_states().size() << ib);
    }
  }
  CHECK(violations > 20);
}

TEST_CASE("two breakpoints on a line give three of four patterns") {
  std::vector<AffineLayer> hidden{{{{Rat(1)}, {Rat(-1)}}, {Rat(-1), Rat(2)}}};
  PwlNetwork net(hidden, {{{Rat(1), Rat(1)}}, {Rat(0)}});
  auto box = Box::parse("0,4");
  auto regions = enumerate_regions(net, box);
  REQUIRE(regions.size() == 3);
  std::set<std::vector<std::uint8_t>> want{{0, 1}, {1, 1}, {1, 0}};
  std::set<std::vector<std::uint8_t>> got;
  for (const auto& r : regions) got.insert(r.pattern);
  CHECK(got == want);
}

TEST_CASE("regions cover the box without overlapping interiors") {
  test::Rng rng(111);
  for (int n = 0; n < 30; ++n) {
    auto d = static_cast<std::size_t>(test::uniform(rng, 1, 2));
    auto net = test::random_relu_net(rng, d, {static_cast<std::size_t>(test::uniform(rng, 1, 4))}, 1, 2);
    auto box = d == 1 ? Box::parse("-2,2") : Box::parse("-2,2;-2,2");
    auto regions = enumerate_regions(net, box);
    for (int k = 0; k < 200; ++k) {
      ir::Vector x;
      for (std::size_t j = 0; j < d; ++j) x.emplace_back(test::uniform(rng, -64, 64), 32);
      int closed = 0;
      for (const auto& r : regions) closed += r.contains(x);
      CHECK(closed >= 1);
      // off every hyperplane, exactly one region holds the point
      bool generic = true;
      for (const auto& row : net.hidden[0].weights) {
        Rat pre = net.hidden[0].bias[&row - net.hidden[0].weights.data()];
        for (std::size_t j = 0; j < d; ++j) pre += row[j] * x[j];
        generic = generic && pre != Rat(0);
      }
      if (!generic) continue;
      CHECK(closed == 1);
      auto p = net.pattern(x);
      CHECK(std::any_of(regions.begin(), regions.end(), [&](const Region& r) { return r.pattern == p; }));
    }
  }
}

TEST_CASE("a loose lower bound holds on random nets, as dense sampling confirms") {
  test::Rng rng(112);
  for (int n = 0; n < 10; ++n) {
    auto net = test::random_relu_net(rng, 2, {3}, 1, 2);
    auto judge = Judge::linear("floor", 2, 1, Formula::leaf(test::ineq(10, {0, 0, 1})),
                               ir::TotalProgram(ir::affine({{Rat(0), Rat(0)}}, {Rat(0)}), 2), {Rat(0), Rat(0)},
                               {Rat(-11)});
    auto box = Box::parse("0,1;0,1");
    bool sampled = true;
    for (long a = 0; a <= 16; ++a) {
      for (long b = 0; b <= 16; ++b) sampled = sampled && net.eval(ir::Vector{Rat(a, 16), Rat(b, 16)})[0] >= Rat(-10);
    }
    REQUIRE(sampled);
    CHECK(verify_regions(net, judge, box).is_aligned());
  }
}

TEST_CASE("halting examples") {
  auto fixed = [](const std::string& finals) {
    return ir::parse_agent("agent state=2 in=1 theta=32\nfinal " + finals +
                           "\nstep (affine 2x3 [[0,0,0],[0,0,0]] [0,1])\n");
  };
  auto h = verify_halting(fixed("01"));
  CHECK(h.status == HaltingResult::Status::kHalts);
  CHECK(h.steps == 1);
  auto d = verify_halting(fixed("11"));
  CHECK(d.status == HaltingResult::Status::kDiverges);
  CHECK(d.cycle_start == 1);
  CHECK(d.cycle_length == 1);

  // 4-bit increment: bit k flips iff every lower bit is set
  test::ThresholdNet inc;
  inc.in = 5;
  test::ThresholdLayer l1, l2;
  for (int k = 0; k < 4; ++k) {
    std::vector<long> any(5, 0), both(5, 0);
    auto pos = [](int bit) { return static_cast<std::size_t>(3 - bit); };
    for (int j = 0; j < k; ++j) any[pos(j)] = both[pos(j)] = 1;
    any[pos(k)] = k;
    both[pos(k)] = 1;
    l1.w.push_back(any);
    l1.b.push_back(-k);
    l1.w.push_back(both);
    l1.b.push_back(-(k + 1));
  }
  for (int msb = 0; msb < 4; ++msb) {
    int k = 3 - msb;
    std::vector<long> w(8, 0);
    w[static_cast<std::size_t>(2 * k)] = 1;
    w[static_cast<std::size_t>(2 * k + 1)] = -1;
    l2.w.push_back(w);
    l2.b.push_back(-1);
  }
  inc.layers = {l1, l2};
  for (std::uint64_t v = 0; v < 16; ++v) {
    CHECK(test::from_ints(inc.eval(test::to_ints(BitVec::from_uint(v, 4).concat(BitVec(1))))) ==
          BitVec::from_uint((v + 1) % 16, 4));
  }
  ir::AgentLoop counter(ir::TotalProgram(inc.to_ir(), 5), 4, 1, 32, {BitVec::parse("1111")});
  auto c = verify_halting(counter);
  CHECK(c.status == HaltingResult::Status::kHalts);
  CHECK(c.steps == 15);
}
