#include "dg/verifier/quantize.hpp"

namespace dg::verify {

namespace {

Rat step_size(const Grid& g, std::size_t k) {
  return (g.box.hi[k] - g.box.lo[k]) / Rat((std::int64_t{1} << g.bits_per_dim) - 1);
}

LinearIneq substitute(const LinearIneq& a, const Grid& g, std::size_t d) {
  const std::size_t q = g.bits_per_dim;
  LinearIneq out;
  out.constant = a.constant;
  out.coeffs.assign(d * q + (a.coeffs.size() - d), Rat(0));
  for (std::size_t k = 0; k < d; ++k) {
    const Rat& c = a.coeffs[k];
    out.constant += c * g.box.lo[k];
    Rat h = step_size(g, k);
    for (std::size_t j = 0; j < q; ++j) {
      out.coeffs[k * q + j] = c * h * Rat(std::int64_t{1} << (q - 1 - j));
    }
  }
  for (std::size_t o = d; o < a.coeffs.size(); ++o) out.coeffs[d * q + (o - d)] = a.coeffs[o];
  return out;
}

Formula substitute(const Formula& f, const Grid& g, std::size_t d) {
  if (f.op == Formula::Op::kAtom) return Formula::leaf(substitute(f.atom, g, d));
  std::vector<Formula> kids;
  for (const auto& c : f.children) kids.push_back(substitute(c, g, d));
  return f.op == Formula::Op::kAll ? Formula::all(std::move(kids)) : Formula::any(std::move(kids));
}

}  // namespace

Vector Grid::point(const BitVec& b) const {
  if (b.width() != input_bits()) throw WidthError("grid point needs " + std::to_string(input_bits()) + " bits");
  Vector x(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k) {
    std::uint64_t v = b.slice(k * bits_per_dim, bits_per_dim).to_uint();
    x[k] = box.lo[k] + step_size(*this, k) * Rat(static_cast<std::int64_t>(v));
  }
  return x;
}

std::optional<BitVec> Grid::bits(const Vector& x) const {
  if (x.size() != box.dim()) return std::nullopt;
  BitVec out;
  for (std::size_t k = 0; k < box.dim(); ++k) {
    Rat v = (x[k] - box.lo[k]) / step_size(*this, k);
    if (!v.is_integer() || v.sign() < 0 || v > Rat((std::int64_t{1} << bits_per_dim) - 1)) return std::nullopt;
    out = out.concat(BitVec::from_uint(v.raw().get_num().get_ui(), bits_per_dim));
  }
  return out;
}

ir::NodePtr Grid::dequantizer() const {
  const std::size_t d = box.dim(), q = bits_per_dim;
  ir::Matrix w(d, Vector(d * q, Rat(0)));
  for (std::size_t k = 0; k < d; ++k) {
    Rat h = step_size(*this, k);
    for (std::size_t j = 0; j < q; ++j) w[k][k * q + j] = h * Rat(std::int64_t{1} << (q - 1 - j));
  }
  return ir::affine(std::move(w), box.lo);
}

ir::TotalProgram quantize_model(const PwlNetwork& net, const Grid& grid) {
  if (net.input_dim() != grid.box.dim()) throw WidthError("grid and network dimensions differ");
  return ir::TotalProgram(
      ir::seq({ir::decode(grid.input_bits()), grid.dequantizer(), net.to_program().root()}), grid.input_bits());
}

Judge quantize_judge(const Judge& judge, const Grid& grid) {
  if (judge.kind() != JudgeKind::kLinear) throw JudgeKindError("only linear judges can be quantized");
  const std::size_t d = grid.box.dim();
  if (judge.in_width() != d) throw WidthError("judge input width differs from the grid dimension");
  auto neg = grid.bits(judge.neg_input());
  if (!neg) throw WidthError("negative input is not a grid point");
  ir::TotalProgram witness(ir::seq({grid.dequantizer(), judge.witness().root()}), grid.input_bits());
  return Judge::linear(judge.name(), grid.input_bits(), judge.out_width(), substitute(*judge.formula(), grid, d),
                       std::move(witness), neg->to_rats(), judge.neg_output());
}

}  // namespace dg::verify
