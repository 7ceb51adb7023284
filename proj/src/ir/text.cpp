#include "dg/ir/text.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "dg/kernel/errors.hpp"

namespace dg::ir {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  // Single-character punctuation or a maximal run of atom characters.
  std::string_view peek() {
    skip();
    if (pos_ >= text_.size()) return {};
    char c = text_[pos_];
    if (is_punct(c)) return text_.substr(pos_, 1);
    std::size_t end = pos_;
    while (end < text_.size() && !is_punct(text_[end]) && !std::isspace(static_cast<unsigned char>(text_[end])) &&
           text_[end] != '#') {
      ++end;
    }
    return text_.substr(pos_, end - pos_);
  }

  std::string_view next() {
    auto tok = peek();
    if (tok.empty()) fail("unexpected end of input");
    pos_ += tok.size();
    return tok;
  }

  void expect(std::string_view tok) {
    auto got = next();
    if (got != tok) fail("expected '" + std::string(tok) + "', found '" + std::string(got) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) line += text_[i] == '\n';
    throw ParseError(what, line);
  }

 private:
  static bool is_punct(char c) { return c == '(' || c == ')' || c == '[' || c == ']' || c == ','; }

  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::uint64_t parse_uint(Lexer& lx, std::string_view tok) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    lx.fail("expected a non-negative integer, found '" + std::string(tok) + "'");
  }
  return v;
}

Rat parse_rat(Lexer& lx, std::string_view tok) {
  try {
    return Rat::parse(tok);
  } catch (const ParseError& e) {
    lx.fail(e.what());
  }
}

Vector parse_vector(Lexer& lx) {
  lx.expect("[");
  Vector v;
  if (lx.peek() == "]") {
    lx.next();
    return v;
  }
  while (true) {
    v.push_back(parse_rat(lx, lx.next()));
    auto sep = lx.next();
    if (sep == "]") break;
    if (sep != ",") lx.fail("expected ',' or ']' in vector");
  }
  return v;
}

Matrix parse_matrix(Lexer& lx) {
  lx.expect("[");
  Matrix m;
  if (lx.peek() == "]") {
    lx.next();
    return m;
  }
  while (true) {
    m.push_back(parse_vector(lx));
    auto sep = lx.next();
    if (sep == "]") break;
    if (sep != ",") lx.fail("expected ',' or ']' in matrix");
  }
  return m;
}

NodePtr parse_node_impl(Lexer& lx);

std::vector<NodePtr> parse_children(Lexer& lx) {
  std::vector<NodePtr> out;
  while (lx.peek() == "(") out.push_back(parse_node_impl(lx));
  if (out.empty()) lx.fail("expected at least one child node");
  return out;
}

NodePtr parse_node_impl(Lexer& lx) {
  lx.expect("(");
  std::string head(lx.next());
  NodePtr node;
  if (head == "seq") {
    node = seq(parse_children(lx));
  } else if (head == "par") {
    node = parallel(parse_children(lx));
  } else if (head == "decode") {
    node = decode(parse_uint(lx, lx.next()));
  } else if (head == "encode") {
    node = encode(parse_uint(lx, lx.next()));
  } else if (head == "affine") {
    std::string_view shape = lx.next();
    auto x = shape.find('x');
    if (x == std::string_view::npos) lx.fail("affine shape must look like ROWSxCOLS");
    auto rows = parse_uint(lx, shape.substr(0, x));
    auto cols = parse_uint(lx, shape.substr(x + 1));
    Matrix w = parse_matrix(lx);
    Vector b = parse_vector(lx);
    if (w.size() != rows) lx.fail("affine row count does not match its shape");
    for (const auto& row : w) {
      if (row.size() != cols) lx.fail("affine column count does not match its shape");
    }
    node = affine(std::move(w), std::move(b));
  } else if (head == "act") {
    if (lx.peek() == "(") {
      lx.next();
      lx.expect("clip");
      Rat lo = parse_rat(lx, lx.next());
      Rat hi = parse_rat(lx, lx.next());
      lx.expect(")");
      node = clip(std::move(lo), std::move(hi));
    } else {
      auto kind = lx.next();
      if (kind == "relu") {
        node = relu();
      } else if (kind == "sign") {
        node = sign();
      } else if (kind == "step") {
        node = step();
      } else {
        lx.fail("unknown activation '" + std::string(kind) + "'");
      }
    }
  } else if (head == "repeat") {
    auto theta = parse_uint(lx, lx.next());
    NodePtr body = parse_node_impl(lx);
    NodePtr pred = parse_node_impl(lx);
    auto bits = lx.next();
    if (bits.substr(0, 2) != "b:") lx.fail("repeat terminal output must be written b:<bits>");
    BitVec out;
    try {
      out = BitVec::parse(bits.substr(2));
    } catch (const ParseError& e) {
      lx.fail(e.what());
    }
    node = repeat(std::move(body), theta, std::move(pred), std::move(out));
  } else if (head == "select") {
    NodePtr c = parse_node_impl(lx);
    NodePtr t = parse_node_impl(lx);
    NodePtr e = parse_node_impl(lx);
    node = select(std::move(c), std::move(t), std::move(e));
  } else if (head == "slice") {
    auto off = parse_uint(lx, lx.next());
    auto len = parse_uint(lx, lx.next());
    node = slice(off, len);
  } else if (head == "const") {
    node = constant(parse_vector(lx));
  } else {
    lx.fail("unknown node '" + head + "'");
  }
  lx.expect(")");
  return node;
}

void print_to(std::ostringstream& os, const Node& node);

void print_children(std::ostringstream& os, const std::vector<NodePtr>& cs) {
  for (const auto& c : cs) {
    os << ' ';
    print_to(os, *c);
  }
}

void print_to(std::ostringstream& os, const Node& node) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Affine>) {
          std::size_t cols = x.weights.empty() ? 0 : x.weights.front().size();
          os << "(affine " << x.weights.size() << 'x' << cols << " [";
          for (std::size_t r = 0; r < x.weights.size(); ++r) {
            if (r) os << ',';
            os << print_vector(x.weights[r]);
          }
          os << "] " << print_vector(x.bias) << ')';
        } else if constexpr (std::is_same_v<T, Act>) {
          switch (x.act.kind) {
            case ActKind::kRelu: os << "(act relu)"; break;
            case ActKind::kSign: os << "(act sign)"; break;
            case ActKind::kStep: os << "(act step)"; break;
            case ActKind::kClip: os << "(act (clip " << x.act.lo << ' ' << x.act.hi << "))"; break;
          }
        } else if constexpr (std::is_same_v<T, Seq>) {
          os << "(seq";
          print_children(os, x.children);
          os << ')';
        } else if constexpr (std::is_same_v<T, Parallel>) {
          os << "(par";
          print_children(os, x.children);
          os << ')';
        } else if constexpr (std::is_same_v<T, Decode>) {
          os << "(decode " << x.width << ')';
        } else if constexpr (std::is_same_v<T, Encode>) {
          os << "(encode " << x.width << ')';
        } else if constexpr (std::is_same_v<T, Repeat>) {
          os << "(repeat " << x.theta << ' ';
          print_to(os, *x.body);
          os << ' ';
          print_to(os, *x.terminal_pred);
          os << " b:" << x.terminal_output.to_string() << ')';
        } else if constexpr (std::is_same_v<T, Select>) {
          os << "(select ";
          print_to(os, *x.cond);
          os << ' ';
          print_to(os, *x.then_branch);
          os << ' ';
          print_to(os, *x.else_branch);
          os << ')';
        } else if constexpr (std::is_same_v<T, Slice>) {
          os << "(slice " << x.offset << ' ' << x.length << ')';
        } else {
          os << "(const " << print_vector(x.values) << ')';
        }
      },
      node.get());
}

}  // namespace

NodePtr parse_node(std::string_view text) {
  Lexer lx(text);
  NodePtr n = parse_node_impl(lx);
  if (!lx.at_end()) lx.fail("trailing input after expression");
  return n;
}

TotalProgram parse_program(std::string_view text) {
  Lexer lx(text);
  NodePtr root;
  std::optional<std::size_t> declared;
  {
    Lexer probe = lx;
    probe.expect("(");
    if (probe.peek() == "program") {
      lx.expect("(");
      lx.expect("program");
      declared = parse_uint(lx, lx.next());
      root = parse_node_impl(lx);
      lx.expect(")");
    } else {
      root = parse_node_impl(lx);
    }
  }
  if (!lx.at_end()) lx.fail("trailing input after program");
  if (declared) return TotalProgram(root, *declared);
  return TotalProgram(root);
}

std::string print_vector(const Vector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i].to_string();
  }
  return s + "]";
}

std::string print(const Node& node) {
  std::ostringstream os;
  print_to(os, node);
  return os.str();
}

std::string print(const TotalProgram& p) {
  auto natural = natural_input_dim(*p.root());
  if (natural && *natural == p.input_dim()) return print(*p.root());
  return "(program " + std::to_string(p.input_dim()) + ' ' + print(*p.root()) + ')';
}

}  // namespace dg::ir
