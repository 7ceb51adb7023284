#include "dg/kernel/judge.hpp"

#include <cctype>
#include <sstream>

#include "dg/ir/interpreter.hpp"
#include "dg/ir/text.hpp"
#include "dg/kernel/errors.hpp"
#include "dg/util/strings.hpp"

namespace dg {

Rat LinearIneq::lhs(std::span<const Rat> x) const {
  Rat acc = constant;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!coeffs[k].is_zero() && !x[k].is_zero()) acc += coeffs[k] * x[k];
  }
  return acc;
}

Formula Formula::leaf(LinearIneq ineq) {
  Formula f;
  f.op = Op::kAtom;
  f.atom = std::move(ineq);
  return f;
}

Formula Formula::all(std::vector<Formula> children) {
  Formula f;
  f.op = Op::kAll;
  f.children = std::move(children);
  return f;
}

Formula Formula::any(std::vector<Formula> children) {
  Formula f;
  f.op = Op::kAny;
  f.children = std::move(children);
  return f;
}

bool Formula::holds(std::span<const Rat> x) const {
  switch (op) {
    case Op::kAtom:
      return atom.lhs(x).sign() >= 0;
    case Op::kAll:
      for (const auto& c : children) {
        if (!c.holds(x)) return false;
      }
      return true;
    case Op::kAny:
      for (const auto& c : children) {
        if (c.holds(x)) return true;
      }
      return false;
  }
  return false;
}

std::size_t Formula::depth() const {
  if (op == Op::kAtom) return 0;
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

namespace {

void check_formula(const Formula& f, std::size_t arity) {
  if (f.op == Formula::Op::kAtom) {
    if (f.atom.coeffs.size() != arity) throw WidthError("inequality arity mismatch");
    return;
  }
  if (f.children.empty()) throw StructureError("empty all{}/any{} group");
  for (const auto& c : f.children) check_formula(c, arity);
}

ir::NodePtr compile_node(const Formula& f, std::size_t arity) {
  if (f.op == Formula::Op::kAtom) {
    return ir::seq({ir::affine({f.atom.coeffs}, {f.atom.constant}), ir::step()});
  }
  std::vector<ir::NodePtr> parts;
  for (const auto& c : f.children) parts.push_back(compile_node(c, arity));
  long m = static_cast<long>(parts.size());
  // all: sum >= m - 1/2; any: sum >= 1/2
  Rat bias = f.op == Formula::Op::kAll ? Rat(1 - 2 * m, 2) : Rat(-1, 2);
  return ir::seq({ir::parallel(std::move(parts)), ir::affine({ir::Vector(static_cast<std::size_t>(m), Rat(1))}, {bias}),
                  ir::step()});
}

}  // namespace

ir::TotalProgram compile_formula(const Formula& f, std::size_t arity) {
  check_formula(f, arity);
  return ir::TotalProgram(compile_node(f, arity), arity);
}

Judge::Judge(std::string name, JudgeKind kind, std::size_t in_width, std::size_t out_width,
             ir::TotalProgram body, std::optional<Formula> formula, ir::TotalProgram witness, Vector neg_input,
             Vector neg_output)
    : name_(std::move(name)),
      kind_(kind),
      in_width_(in_width),
      out_width_(out_width),
      body_(std::move(body)),
      formula_(std::move(formula)),
      witness_(std::move(witness)),
      neg_input_(std::move(neg_input)),
      neg_output_(std::move(neg_output)) {
  if (body_.input_dim() != in_width_ + out_width_ || body_.output_dim() != 1) {
    throw WidthError("judge body must map " + std::to_string(in_width_ + out_width_) + " values to 1");
  }
  if (witness_.input_dim() != in_width_ || witness_.output_dim() != out_width_) {
    throw WidthError("judge witness must map " + std::to_string(in_width_) + " values to " +
                     std::to_string(out_width_));
  }
  if (neg_input_.size() != in_width_ || neg_output_.size() != out_width_) {
    throw WidthError("judge negative example width mismatch");
  }
}

Judge Judge::predicate(std::string name, std::size_t in_width, std::size_t out_width, ir::TotalProgram body,
                       ir::TotalProgram witness, Vector neg_input, Vector neg_output) {
  return Judge(std::move(name), JudgeKind::kPredicate, in_width, out_width, std::move(body), std::nullopt,
               std::move(witness), std::move(neg_input), std::move(neg_output));
}

Judge Judge::linear(std::string name, std::size_t in_width, std::size_t out_width, Formula formula,
                    ir::TotalProgram witness, Vector neg_input, Vector neg_output) {
  if (formula.op != Formula::Op::kAll) formula = Formula::all({std::move(formula)});
  if (formula.depth() > kMaxFormulaDepth) {
    throw StructureError("linear judge nesting deeper than " + std::to_string(kMaxFormulaDepth));
  }
  auto body = compile_formula(formula, in_width + out_width);
  return Judge(std::move(name), JudgeKind::kLinear, in_width, out_width, std::move(body), std::move(formula),
               std::move(witness), std::move(neg_input), std::move(neg_output));
}

bool Judge::eval(std::span<const Rat> input, std::span<const Rat> output) const {
  if (input.size() != in_width_ || output.size() != out_width_) {
    throw WidthError("judge '" + name_ + "' expects widths in=" + std::to_string(in_width_) +
                     " out=" + std::to_string(out_width_) + ", got in=" + std::to_string(input.size()) +
                     " out=" + std::to_string(output.size()));
  }
  Vector x(input.begin(), input.end());
  x.insert(x.end(), output.begin(), output.end());
  if (formula_) return formula_->holds(x);
  return ir::eval_values(body_, x).output.front() >= Rat(1, 2);
}

bool operator==(const Judge& a, const Judge& b) {
  return a.name_ == b.name_ && a.kind_ == b.kind_ && a.in_width_ == b.in_width_ && a.out_width_ == b.out_width_ &&
         a.body_ == b.body_ && a.formula_ == b.formula_ && a.witness_ == b.witness_ &&
         a.neg_input_ == b.neg_input_ && a.neg_output_ == b.neg_output_;
}

int eval_judge(const Judge& judge, const BitVec& input, const BitVec& output) {
  return judge.eval(input.to_rats(), output.to_rats()) ? 1 : 0;
}

NontrivialCheck check_nontrivial(const Judge& judge, std::size_t input_width, std::size_t max_input_bits) {
  if (input_width != judge.in_width()) throw WidthError("judge input width does not match L");
  if (input_width > max_input_bits || input_width >= 63) {
    return {NontrivialCheck::Status::kResourceExceeded, "max-L=" + std::to_string(max_input_bits)};
  }
  if (judge.eval(judge.neg_input(), judge.neg_output())) {
    return {NontrivialCheck::Status::kTrivialJudge, "negative example not negative"};
  }
  const std::uint64_t n = std::uint64_t{1} << input_width;
  for (std::uint64_t v = 0; v < n; ++v) {
    auto in = BitVec::from_uint(v, input_width).to_rats();
    auto o = ir::eval_values(judge.witness(), in).output;
    if (!judge.eval(in, o)) {
      return {NontrivialCheck::Status::kTrivialJudge,
              "no positive witness at i=" + BitVec::from_uint(v, input_width).to_string()};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class IneqLexer {
 public:
  IneqLexer(std::string_view s, std::size_t arity) : s_(s), arity_(arity) {}

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool starts_with(std::string_view t) {
    skip();
    return s_.substr(pos_, t.size()) == t;
  }
  void advance(std::size_t n) { pos_ += n; }

  Rat number() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
    if (b == pos_) fail("expected a number");
    return Rat::parse(s_.substr(b, pos_ - b));
  }

  std::size_t variable() {
    skip();
    if (peek() != 'x') fail("expected a variable x<k>");
    ++pos_;
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) fail("expected a variable index after 'x'");
    std::size_t k = util::parse_size(s_.substr(b, pos_ - b));
    if (k < 1 || k > arity_) fail("variable x" + std::to_string(k) + " out of range 1.." + std::to_string(arity_));
    return k - 1;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " in inequality '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

// Accumulates one side of an inequality into (constant, coeffs) scaled by `side`.
void parse_side(IneqLexer& lx, LinearIneq& acc, int side) {
  bool first = true;
  while (true) {
    int sign = 1;
    char c = lx.peek();
    if (c != '+' && c != '-' && !first) break;
    while (c == '+' || c == '-') {
      if (c == '-') sign = -sign;
      lx.advance(1);
      c = lx.peek();
    }
    first = false;
    c = lx.peek();
    Rat coeff(1);
    bool has_number = false;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      coeff = lx.number();
      has_number = true;
      if (lx.peek() == '*') {
        lx.advance(1);
        std::size_t k = lx.variable();
        acc.coeffs[k] += Rat(sign * side) * coeff;
        continue;
      }
    }
    if (lx.peek() == 'x') {
      std::size_t k = lx.variable();
      acc.coeffs[k] += Rat(sign * side) * coeff;
    } else if (has_number) {
      acc.constant += Rat(sign * side) * coeff;
    } else {
      lx.fail("expected a term");
    }
  }
}

std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}') --depth;
    if (depth < 0) throw ParseError("unbalanced '}' in linear formula");
    if (text[i] == ';' && depth == 0) {
      out.push_back(util::trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced '{' in linear formula");
  auto last = util::trim(text.substr(start));
  if (!last.empty()) out.push_back(last);
  return out;
}

Formula parse_item(std::string_view item, std::size_t arity) {
  for (auto [kw, op] : {std::pair{std::string_view("all{"), Formula::Op::kAll},
                        std::pair{std::string_view("any{"), Formula::Op::kAny}}) {
    if (item.substr(0, kw.size()) == kw) {
      if (item.back() != '}') throw ParseError("group '" + std::string(item) + "' must end with '}'");
      std::vector<Formula> children;
      for (const auto& part : split_top_level(item.substr(kw.size(), item.size() - kw.size() - 1))) {
        children.push_back(parse_item(part, arity));
      }
      if (children.empty()) throw ParseError("empty group in linear formula");
      Formula f;
      f.op = op;
      f.children = std::move(children);
      return f;
    }
  }
  return Formula::leaf(parse_ineq(item, arity));
}

void print_formula_to(std::ostringstream& os, const Formula& f, bool top) {
  if (f.op == Formula::Op::kAtom) {
    os << print_ineq(f.atom);
    return;
  }
  if (!top) os << (f.op == Formula::Op::kAll ? "all{" : "any{");
  for (std::size_t i = 0; i < f.children.size(); ++i) {
    if (i) os << "; ";
    print_formula_to(os, f.children[i], false);
  }
  if (!top) os << '}';
}

std::string header_value(const std::vector<std::string>& words, const std::string& key, std::size_t line) {
  for (const auto& w : words) {
    if (w.rfind(key + "=", 0) == 0) return w.substr(key.size() + 1);
  }
  throw ParseError("judge header lacks " + key + "=", line);
}

}  // namespace

LinearIneq parse_ineq(std::string_view text, std::size_t arity) {
  IneqLexer lx(text, arity);
  LinearIneq acc{Rat(0), Vector(arity, Rat(0))};
  parse_side(lx, acc, 1);
  int side;
  if (lx.starts_with(">=")) {
    side = -1;
  } else if (lx.starts_with("<=")) {
    side = 1;
    // a <= b  is  b - a >= 0: flip what was read so far
    acc.constant = -acc.constant;
    for (auto& c : acc.coeffs) c = -c;
  } else {
    lx.fail("expected '>=' or '<='");
  }
  lx.advance(2);
  parse_side(lx, acc, side);
  if (!lx.done()) lx.fail("trailing characters");
  return acc;
}

std::string print_ineq(const LinearIneq& ineq) {
  std::ostringstream os;
  os << ineq.constant;
  for (std::size_t k = 0; k < ineq.coeffs.size(); ++k) {
    if (ineq.coeffs[k].is_zero()) continue;
    os << " + " << ineq.coeffs[k] << "*x" << (k + 1);
  }
  os << " >= 0";
  return os.str();
}

Formula parse_formula(std::string_view text, std::size_t arity) {
  std::vector<Formula> items;
  for (const auto& part : split_top_level(text)) items.push_back(parse_item(part, arity));
  if (items.empty()) throw ParseError("empty linear formula");
  return Formula::all(std::move(items));
}

std::string print_formula(const Formula& f) {
  std::ostringstream os;
  print_formula_to(os, f, f.op == Formula::Op::kAll);
  return os.str();
}

std::string print_point(const Vector& v) {
  if (!v.empty() && all_binary(v)) return BitVec::from_rats(v).to_string();
  return ir::print_vector(v);
}

Vector parse_point(std::string_view text) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ParseError("malformed point '" + std::string(text) + "'");
    Vector v;
    auto inner = util::trim(text.substr(1, text.size() - 2));
    if (inner.empty()) return v;
    for (const auto& part : util::split(inner, ',')) v.push_back(Rat::parse(util::trim(part)));
    return v;
  }
  return BitVec::parse(text).to_rats();
}

Judge parse_judge(std::string_view text) {
  auto lines = util::split_lines(text);
  std::optional<std::vector<std::string>> header;
  std::size_t header_line = 0;
  std::optional<std::pair<Vector, Vector>> neg;
  std::optional<std::pair<std::string, std::size_t>> body, witness, linear;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string line = util::trim(lines[n]);
    if (line.empty() || line[0] == '#') continue;
    auto sp = line.find_first_of(" \t");
    std::string kw = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : util::trim(line.substr(sp));
    try {
      if (kw == "judge") {
        header = util::split_ws(line);
        header_line = n + 1;
      } else if (kw == "neg") {
        auto words = util::split_ws(rest);
        if (words.size() != 2) throw ParseError("neg expects '<input> <output>'");
        neg = {parse_point(words[0]), parse_point(words[1])};
      } else if (kw == "body") {
        body = {rest, n + 1};
      } else if (kw == "witness") {
        witness = {rest, n + 1};
      } else if (kw == "linear") {
        linear = {rest, n + 1};
      } else {
        throw ParseError("unknown judge directive '" + kw + "'");
      }
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), n + 1);
    }
  }
  if (!header || header->size() < 2) throw ParseError("missing 'judge <name> ...' header");
  std::string name = (*header)[1];
  std::string kind = header_value(*header, "kind", header_line);
  std::size_t in = util::parse_size(header_value(*header, "in", header_line), header_line);
  std::size_t out = util::parse_size(header_value(*header, "out", header_line), header_line);
  if (!neg) throw ParseError("judge lacks a 'neg' line");
  if (!witness) throw ParseError("judge lacks a 'witness' line");

  auto with_line = [](const std::pair<std::string, std::size_t>& src, auto&& fn) {
    try {
      return fn(src.first);
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), src.second);
    }
  };
  auto wit = with_line(*witness, [&](const std::string& s) { return ir::TotalProgram(ir::parse_node(s), in); });
  if (kind == "predicate") {
    if (!body) throw ParseError("predicate judge lacks a 'body' line");
    auto b = with_line(*body, [&](const std::string& s) { return ir::TotalProgram(ir::parse_node(s), in + out); });
    return Judge::predicate(name, in, out, std::move(b), std::move(wit), neg->first, neg->second);
  }
  if (kind == "linear") {
    if (!linear) throw ParseError("linear judge lacks a 'linear' line");
    auto f = with_line(*linear, [&](const std::string& s) { return parse_formula(s, in + out); });
    return Judge::linear(name, in, out, std::move(f), std::move(wit), neg->first, neg->second);
  }
  throw ParseError("unknown judge kind '" + kind + "'", header_line);
}

std::string print_judge(const Judge& j) {
  std::ostringstream os;
  os << "judge " << j.name() << " kind=" << (j.kind() == JudgeKind::kLinear ? "linear" : "predicate")
     << " in=" << j.in_width() << " out=" << j.out_width() << '\n';
  os << "neg " << (j.neg_input().empty() ? "[]" : print_point(j.neg_input())) << ' '
     << (j.neg_output().empty() ? "[]" : print_point(j.neg_output())) << '\n';
  if (j.kind() == JudgeKind::kLinear) {
    os << "linear " << print_formula(*j.formula()) << '\n';
  } else {
    os << "body " << ir::print(*j.body().root()) << '\n';
  }
  os << "witness " << ir::print(*j.witness().root()) << '\n';
  return os.str();
}

}  // namespace dg
