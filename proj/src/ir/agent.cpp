#include "dg/ir/agent.hpp"

#include <algorithm>
#include <sstream>

#include "dg/ir/interpreter.hpp"
#include "dg/ir/text.hpp"
#include "dg/kernel/errors.hpp"
#include "dg/util/strings.hpp"

namespace dg::ir {

AgentLoop::AgentLoop(TotalProgram step_model, std::size_t state_width, std::size_t input_width,
                     std::uint64_t theta, std::vector<BitVec> final_states, BitVec terminal_output,
                     std::size_t final_state_bound)
    : step_model_(std::move(step_model)),
      state_width_(state_width),
      input_width_(input_width),
      theta_(theta),
      final_states_(std::move(final_states)),
      terminal_output_(std::move(terminal_output)) {
  if (theta_ == 0) throw StructureError("agent theta must be at least 1");
  if (step_model_.input_dim() != state_width_ + input_width_) {
    throw WidthError("step model must read state ++ input (" + std::to_string(state_width_ + input_width_) +
                     " values), reads " + std::to_string(step_model_.input_dim()));
  }
  if (step_model_.output_dim() < state_width_) throw WidthError("step model output narrower than the state");
  output_width_ = step_model_.output_dim() - state_width_;
  if (terminal_output_.width() == 0 && output_width_ != 0) terminal_output_ = BitVec(output_width_);
  if (terminal_output_.width() != output_width_) throw WidthError("terminal output width mismatch");
  std::sort(final_states_.begin(), final_states_.end());
  final_states_.erase(std::unique(final_states_.begin(), final_states_.end()), final_states_.end());
  if (final_states_.empty()) throw StructureError("agent needs at least one final state");
  if (final_states_.size() > final_state_bound) {
    throw BudgetError("final-state set size", final_state_bound);
  }
  for (const auto& s : final_states_) {
    if (s.width() != state_width_) throw WidthError("final state width mismatch");
  }
}

bool AgentLoop::is_final(const BitVec& state) const {
  return std::binary_search(final_states_.begin(), final_states_.end(), state);
}

AgentLoop::Step AgentLoop::step(const BitVec& state, const BitVec& input) const {
  if (state.width() != state_width_) throw WidthError("agent state width mismatch");
  if (input.width() != input_width_) throw WidthError("agent input width mismatch");
  BitVec out = eval(step_model_, state.concat(input)).output;
  return {out.slice(0, state_width_), out.slice(state_width_, output_width_)};
}

Trace run_agent(const AgentLoop& agent, const BitVec& input, const BitVec& initial_state) {
  Trace trace;
  BitVec state = initial_state;
  for (std::uint64_t t = 0; t < agent.theta(); ++t) {
    auto s = agent.step(state, input);
    state = s.state;
    trace.steps.push_back(std::move(s));
    if (agent.is_final(state)) {
      trace.halted_by = HaltReason::kTerminalState;
      return trace;
    }
  }
  trace.halted_by = HaltReason::kThetaExhausted;
  trace.forced_output = agent.terminal_output();
  return trace;
}

namespace {

std::size_t header_uint(const std::vector<std::string>& fields, const std::string& key, std::size_t line) {
  for (const auto& f : fields) {
    if (f.rfind(key + "=", 0) == 0) return util::parse_size(f.substr(key.size() + 1), line);
  }
  throw ParseError("agent header lacks " + key + "=", line);
}

}  // namespace

AgentLoop parse_agent(std::string_view text, std::size_t final_state_bound) {
  auto lines = util::split_lines(text);
  std::optional<std::vector<std::string>> header;
  std::vector<BitVec> finals;
  BitVec terminal;
  std::string step_text;
  std::size_t header_line = 0;
  bool in_step = false;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string line = util::trim(lines[n]);
    if (in_step) {
      step_text += '\n' + lines[n];
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    auto words = util::split_ws(line);
    const std::string& kw = words[0];
    try {
      if (kw == "agent") {
        header = words;
        header_line = n + 1;
      } else if (kw == "final") {
        for (std::size_t i = 1; i < words.size(); ++i) finals.push_back(BitVec::parse(words[i]));
      } else if (kw == "terminal") {
        terminal = BitVec::parse(words.size() > 1 ? words[1] : "");
      } else if (kw == "step") {
        in_step = true;
        step_text = line.substr(4);
      } else {
        throw ParseError("unknown agent directive '" + kw + "'", n + 1);
      }
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), n + 1);
    }
  }
  if (!header) throw ParseError("missing 'agent' header line");
  if (!in_step) throw ParseError("missing 'step' program");
  std::size_t sw = header_uint(*header, "state", header_line);
  std::size_t iw = header_uint(*header, "in", header_line);
  std::size_t theta = header_uint(*header, "theta", header_line);
  NodePtr root = parse_node(step_text);
  return AgentLoop(TotalProgram(root, sw + iw), sw, iw, theta, std::move(finals), std::move(terminal),
                   final_state_bound);
}

std::string print_agent(const AgentLoop& agent) {
  std::ostringstream os;
  os << "agent state=" << agent.state_width() << " in=" << agent.input_width() << " theta=" << agent.theta()
     << '\n';
  os << "final";
  for (const auto& s : agent.final_states()) os << ' ' << s.to_string();
  os << '\n';
  if (agent.output_width() > 0) os << "terminal " << agent.terminal_output().to_string() << '\n';
  os << "step " << print(*agent.step_model().root()) << '\n';
  return os.str();
}

}  // namespace dg::ir
