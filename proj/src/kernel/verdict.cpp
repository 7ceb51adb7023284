#include "dg/kernel/verdict.hpp"

namespace dg {

const char* to_string(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::kAligned: return "aligned";
    case Verdict::Outcome::kMisaligned: return "misaligned";
    case Verdict::Outcome::kTrivialJudge: return "trivial_judge";
    case Verdict::Outcome::kResourceExceeded: return "resource_exceeded";
  }
  return "unknown";
}

}  // namespace dg
