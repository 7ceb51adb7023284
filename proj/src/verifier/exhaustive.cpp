#include "dg/verifier/exhaustive.hpp"

#include <string>

#include "dg/ir/interpreter.hpp"
#include "dg/kernel/errors.hpp"
#include "dg/util/parallel.hpp"

namespace dg::verify {

Verdict verify_exhaustive(const ir::TotalProgram& model, const Judge& judge, std::size_t input_bits,
                          const ExhaustiveOptions& options) {
  if (input_bits > options.max_input_bits || input_bits >= 63) {
    return Verdict::resource_exceeded("max-L", options.max_input_bits);
  }
  if (model.input_dim() != input_bits || judge.in_width() != input_bits) {
    throw WidthError("model/judge input width must equal L=" + std::to_string(input_bits));
  }
  if (model.output_dim() != judge.out_width()) {
    throw WidthError("model output width " + std::to_string(model.output_dim()) + " does not match judge out=" +
                     std::to_string(judge.out_width()));
  }
  auto nontrivial = check_nontrivial(judge, input_bits, options.max_input_bits);
  if (nontrivial.status == NontrivialCheck::Status::kTrivialJudge) return Verdict::trivial_judge(nontrivial.reason);
  if (nontrivial.status == NontrivialCheck::Status::kResourceExceeded) {
    return Verdict::resource_exceeded("max-L", options.max_input_bits);
  }

  const std::uint64_t n = std::uint64_t{1} << input_bits;
  auto scan = util::ordered_scan(n, options.workers, [&](std::uint64_t idx, std::uint64_t& cost) {
    auto in = BitVec::from_uint(idx, input_bits).to_rats();
    auto r = ir::eval_values(model, in);
    cost += r.steps_used;
    return judge.eval(in, r.output);
  });

  Verdict v = Verdict::aligned();
  if (scan.first_failure) {
    auto in = BitVec::from_uint(*scan.first_failure, input_bits).to_rats();
    auto out = ir::eval_values(model, in).output;
    v = Verdict::misaligned({std::move(in), std::move(out)});
  }
  v.stats = {{"nontriviality_inputs", n}, {"inputs_evaluated", scan.items}, {"model_steps", scan.cost}};
  return v;
}

}  // namespace dg::verify
