#pragma once

#include <string>
#include <vector>

#include "dg/diagonal/micro.hpp"

namespace dg::diag {

// Candidate verifiers read u32le(|judge|) ++ judge table bytes ++ model code
// and write a single byte: 1 for aligned, 0 for misaligned.
struct Candidate {
  std::string name;
  MicroProgram program;
};

MicroProgram constant_verifier(bool verdict);
// Runs the model on the first 16 rows of the judge table with 10000 fuel
// each and checks every output against the accept table.
MicroProgram simulating_verifier(std::size_t rows = 16, std::int32_t fuel_per_row = 10000);
// Aligned iff the model has an even number of zero bytes.
MicroProgram bytes_hash_verifier();
// Misaligned iff the model contains the SELF opcode byte anywhere.
MicroProgram self_reference_verifier();
// Never answers.
MicroProgram diverging_verifier();

// The bundled deciders, in a fixed order.
std::vector<Candidate> verifier_zoo();

}  // namespace dg::diag
