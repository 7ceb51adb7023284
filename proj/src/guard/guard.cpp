#include "dg/guard/guard.hpp"

#include "dg/kernel/errors.hpp"

namespace dg::guard {

namespace {

void require_nontrivial(const ir::TotalProgram& model, const Judge& judge, std::size_t max_input_bits) {
  if (model.input_dim() != judge.in_width() || model.output_dim() != judge.out_width()) {
    throw WidthError("model widths (" + std::to_string(model.input_dim()) + " -> " +
                     std::to_string(model.output_dim()) + ") do not match judge '" + judge.name() + "'");
  }
  auto check = check_nontrivial(judge, judge.in_width(), max_input_bits);
  if (check.status == NontrivialCheck::Status::kTrivialJudge) throw TrivialJudgeError(check.reason);
  if (check.status == NontrivialCheck::Status::kResourceExceeded) throw BudgetError("max-L", max_input_bits);
}

}  // namespace

ir::TotalProgram filter(const ir::TotalProgram& model, const Judge& judge, std::size_t max_input_bits) {
  require_nontrivial(model, judge, max_input_bits);
  const std::size_t in = model.input_dim();
  const std::size_t out = model.output_dim();
  auto pair = ir::parallel({ir::identity(in), model.root()});
  auto guarded = ir::select(judge.body().root(), ir::slice(in, out),
                            ir::seq({ir::slice(0, in), judge.witness().root()}));
  return ir::TotalProgram(ir::seq({std::move(pair), std::move(guarded)}), in);
}

ir::NodePtr equality_test(const Vector& point) {
  const std::size_t n = point.size();
  if (n == 0) return ir::constant(Vector{Rat(1)});
  ir::Matrix diff(2 * n, Vector(n, Rat(0)));
  Vector offset(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    diff[k][k] = Rat(1);
    offset[k] = -point[k];
    diff[n + k][k] = Rat(-1);
    offset[n + k] = point[k];
  }
  // step(-sum |x_k - p_k|)
  return ir::seq({ir::affine(std::move(diff), std::move(offset)), ir::relu(),
                  ir::affine({Vector(2 * n, Rat(-1))}, {Rat(0)}), ir::step()});
}

ir::TotalProgram misalign(const ir::TotalProgram& model, const Judge& judge, std::size_t max_input_bits) {
  require_nontrivial(model, judge, max_input_bits);
  auto root = ir::select(equality_test(judge.neg_input()), ir::constant(judge.neg_output()), model.root());
  return ir::TotalProgram(std::move(root), model.input_dim());
}

ir::TotalProgram clip_guard(const ir::TotalProgram& model, const Rat& lo, const Rat& hi) {
  if (hi < lo) throw IntervalError("clip bounds out of order: " + lo.to_string() + " > " + hi.to_string());
  const ir::Node& root = *model.root();
  if (const auto* s = std::get_if<ir::Seq>(&root.get());
      s && std::holds_alternative<ir::Encode>(s->children.back()->get())) {
    auto children = s->children;
    children.insert(children.end() - 1, ir::clip(lo, hi));
    return ir::TotalProgram(ir::seq(std::move(children)), model.input_dim());
  }
  if (std::holds_alternative<ir::Encode>(root.get())) {
    return ir::TotalProgram(ir::seq({ir::clip(lo, hi), model.root()}), model.input_dim());
  }
  return ir::TotalProgram(ir::seq({model.root(), ir::clip(lo, hi)}), model.input_dim());
}

}  // namespace dg::guard
