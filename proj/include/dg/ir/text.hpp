#pragma once

#include <string>
#include <string_view>

#include "dg/ir/program.hpp"

namespace dg::ir {

// Parenthesized IR text, e.g.
//   (seq (decode 4) (affine 4x4 [[1,0,0,0],...] [0,0,0,0]) (act relu) (encode 4))
// A bare node must fix its own input dimension; otherwise wrap it as
// (program N node). Grammar: docs/ir-format.md.
TotalProgram parse_program(std::string_view text);
NodePtr parse_node(std::string_view text);

// Canonical single-line form; parse_program(print(p)) == p.
std::string print(const TotalProgram& p);
std::string print(const Node& node);

std::string print_vector(const Vector& v);

}  // namespace dg::ir
