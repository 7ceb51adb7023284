#include <doctest.h>

#include "dg/kernel/bitvec.hpp"
#include "dg/kernel/errors.hpp"
#include "dg/kernel/judge.hpp"
#include "dg/kernel/rat.hpp"
#include "dg/kernel/verdict.hpp"
#include "support/gen.hpp"

using namespace dg;

TEST_CASE("rat arithmetic is exact") {
  Rat third(1, 3);
  CHECK(third + third + third == Rat(1));
  CHECK(Rat::parse("-6/4") == Rat(-3, 2));
  CHECK(Rat::parse("7").is_integer());
  CHECK((Rat(1, 2) < Rat(2, 3)));
  CHECK(abs(Rat(-5, 7)) == Rat(5, 7));
  CHECK(Rat(-3, 2).to_string() == "-3/2");
  CHECK_THROWS_AS(Rat::parse("1/0"), ParseError);
  CHECK_THROWS_AS(Rat::parse("x"), ParseError);
}

TEST_CASE("bitvec order is lexicographic and numeric") {
  test::Rng rng(11);
  for (int n = 0; n < 200; ++n) {
    std::size_t w = static_cast<std::size_t>(test::uniform(rng, 1, 16));
    auto a = static_cast<std::uint64_t>(test::uniform(rng, 0, (1L << w) - 1));
    auto b = static_cast<std::uint64_t>(test::uniform(rng, 0, (1L << w) - 1));
    BitVec x = BitVec::from_uint(a, w), y = BitVec::from_uint(b, w);
    CHECK(((x < y) == (a < b)));
    CHECK(x.to_uint() == a);
    CHECK(BitVec::parse(x.to_string()) == x);
  }
  BitVec v = BitVec::parse("0110");
  CHECK(v.slice(1, 2).to_string() == "11");
  CHECK(v.concat(BitVec::parse("1")).to_string() == "01101");
  CHECK_THROWS_AS(BitVec::from_rats(std::vector<Rat>{Rat(1, 2)}), WidthError);
  CHECK_THROWS_AS(BitVec::parse("012"), ParseError);
}

namespace {

const char* kEq = R"(judge eq kind=linear in=2 out=2
neg 00 11
witness (affine 2x2 [[1,0],[0,1]] [0,0])
linear x1 - x3 >= 0; x3 - x1 >= 0; x2 - x4 >= 0; x4 - x2 >= 0
)";

const char* kParity = R"(judge parity kind=predicate in=3 out=1
neg 000 1
body (seq (affine 4x4 [[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]] [-1,-2,-3,-4]) (act step) (affine 1x4 [[-1,1,-1,1]] [1]))
witness (seq (affine 3x3 [[1,1,1],[1,1,1],[1,1,1]] [-1,-2,-3]) (act step) (affine 1x3 [[1,-1,1]] [0]))
)";

}  // namespace

TEST_CASE("linear judge matches its truth table") {
  Judge j = parse_judge(kEq);
  for (std::uint64_t i = 0; i < 4; ++i) {
    for (std::uint64_t o = 0; o < 4; ++o) {
      CHECK(eval_judge(j, BitVec::from_uint(i, 2), BitVec::from_uint(o, 2)) == (i == o ? 1 : 0));
    }
  }
  CHECK(check_nontrivial(j, 2).ok());
}

TEST_CASE("predicate judge matches xor truth table") {
  Judge j = parse_judge(kParity);
  for (std::uint64_t i = 0; i < 8; ++i) {
    int parity = __builtin_popcountll(i) & 1;
    for (int o = 0; o < 2; ++o) {
      CHECK(eval_judge(j, BitVec::from_uint(i, 3), BitVec::from_uint(static_cast<std::uint64_t>(o), 1)) ==
            (o == parity ? 1 : 0));
    }
  }
  CHECK(check_nontrivial(j, 3).ok());
}

TEST_CASE("judge text round-trips") {
  for (const char* text : {kEq, kParity}) {
    Judge j = parse_judge(text);
    CHECK(parse_judge(print_judge(j)) == j);
  }
  Judge nested = Judge::linear(
      "nested", 1, 1,
      Formula::all({Formula::any({Formula::leaf({Rat(1, 2), {Rat(1), Rat(-1)}}),
                                  Formula::all({Formula::leaf({Rat(0), {Rat(0), Rat(1)}})})})}),
      ir::TotalProgram(ir::affine({{Rat(0)}}, {Rat(1)}), 1), {Rat(0)}, {Rat(0)});
  CHECK(parse_judge(print_judge(nested)) == nested);
}

TEST_CASE("trivial judges are detected") {
  // Accepts everything: the recorded negative pair is not negative.
  Judge all = parse_judge(R"(judge all kind=linear in=1 out=1
neg 0 0
witness (affine 1x1 [[0]] [0])
linear 1 >= 0
)");
  auto c = check_nontrivial(all, 1);
  CHECK(c.status == NontrivialCheck::Status::kTrivialJudge);
  CHECK(c.reason == "negative example not negative");

  // The witness fails at input 1.
  Judge bad = parse_judge(R"(judge bad kind=linear in=1 out=1
neg 0 1
witness (affine 1x1 [[0]] [0])
linear x1 - x2 >= 0; x2 - x1 >= 0
)");
  auto d = check_nontrivial(bad, 1);
  CHECK(d.status == NontrivialCheck::Status::kTrivialJudge);
  CHECK(d.reason.find("i=1") != std::string::npos);

  CHECK(check_nontrivial(parse_judge(kEq), 2, 1).status == NontrivialCheck::Status::kResourceExceeded);
  CHECK_THROWS_AS(check_nontrivial(parse_judge(kEq), 3), WidthError);
}

TEST_CASE("judge construction rejects bad shapes") {
  CHECK_THROWS_AS(parse_judge("judge x kind=linear in=1 out=1\nneg 0 1\nwitness (affine 2x1 [[1],[1]] [0,0])\nlinear x1 >= 0\n"),
                  WidthError);
  CHECK_THROWS_AS(parse_judge("judge x kind=magic in=1 out=1\n"), ParseError);
  CHECK_THROWS_AS(parse_formula("x3 >= 0", 2), ParseError);
  Formula deep = Formula::leaf({Rat(0), {Rat(1)}});
  for (int k = 0; k < 9; ++k) deep = Formula::any({deep});
  CHECK_THROWS_AS(Judge::linear("deep", 1, 0, deep, ir::TotalProgram(ir::affine({}, {}), 1), {Rat(0)}, {}),
                  StructureError);
}

TEST_CASE("inequality parsing normalizes signs and sides") {
  CHECK(print_ineq(parse_ineq("x1 + -1*x2 >= 0", 2)) == print_ineq(parse_ineq("x1 >= x2", 2)));
  CHECK(print_ineq(parse_ineq("2 - x1 >= 0", 1)) == print_ineq(parse_ineq("x1 <= 2", 1)));
  LinearIneq a = parse_ineq("1/2 + 3*x2 - - x1 >= 0", 2);
  CHECK(a.constant == Rat(1, 2));
  CHECK(a.coeffs == std::vector<Rat>{Rat(1), Rat(3)});
}

TEST_CASE("verdict outcomes print") {
  CHECK(std::string(to_string(Verdict::Outcome::kAligned)) == "aligned");
  CHECK(std::string(to_string(Verdict::Outcome::kMisaligned)) == "misaligned");
  CHECK(std::string(to_string(Verdict::Outcome::kTrivialJudge)) == "trivial_judge");
  CHECK(std::string(to_string(Verdict::Outcome::kResourceExceeded)) == "resource_exceeded");
}
