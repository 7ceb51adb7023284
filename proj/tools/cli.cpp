#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>

#include "dg/diagonal/adversary.hpp"
#include "dg/diagonal/reduction.hpp"
#include "dg/diagonal/zoo.hpp"
#include "dg/guard/guard.hpp"
#include "dg/ir/agent.hpp"
#include "dg/ir/text.hpp"
#include "dg/report/report.hpp"
#include "dg/util/parallel.hpp"
#include "dg/util/strings.hpp"
#include "dg/verifier/agent_checks.hpp"
#include "dg/verifier/exhaustive.hpp"
#include "dg/verifier/quantize.hpp"
#include "dg/verifier/regions.hpp"

namespace dg::cli {

namespace {

namespace fs = std::filesystem;
using diag::Bytes;

struct Globals {
  unsigned workers = 1;
  bool deterministic = false;
  std::string out;
};

struct Outcome {
  int code = kOk;
  Report report;
};

int verdict_code(const Verdict& v) {
  switch (v.outcome) {
    case Verdict::Outcome::kAligned: return kOk;
    case Verdict::Outcome::kMisaligned: return kNegative;
    default: return kUndecided;
  }
}

Report start(const std::string& command) {
  Report r;
  r.add("command", command);
  return r;
}

Bytes bytes_from_bitstring(std::string_view text) {
  Bytes out;
  for (char c : text) {
    if (c != '0' && c != '1') throw ParseError("expected a bit string, got '" + std::string(text) + "'");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

std::string bytes_text(const Bytes& b) {
  bool bits = std::all_of(b.begin(), b.end(), [](std::uint8_t v) { return v <= 1; });
  std::string s = bits ? "" : "hex:";
  static const char* kHex = "0123456789abcdef";
  for (auto v : b) {
    if (bits) {
      s += static_cast<char>('0' + v);
    } else {
      s += kHex[v >> 4];
      s += kHex[v & 15];
    }
  }
  return s;
}

std::vector<std::string> comma_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& s : util::split(text, ',')) out.push_back(util::trim(s));
  return out;
}

diag::MicroProgram load_micro(const std::string& path) {
  std::string data = util::read_file(path);
  if (fs::path(path).extension() == ".mpa") return diag::assemble(data);
  return diag::from_binary(Bytes(data.begin(), data.end()));
}

std::vector<diag::Candidate> load_candidates(const std::string& path) {
  std::vector<diag::Candidate> out;
  if (fs::path(path).extension() != ".list") {
    out.push_back({fs::path(path).stem().string(), load_micro(path)});
    return out;
  }
  fs::path dir = fs::path(path).parent_path();
  for (const auto& raw : util::split_lines(util::read_file(path))) {
    std::string line = util::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    fs::path p = dir / line;
    out.push_back({p.stem().string(), load_micro(p.string())});
  }
  if (out.empty()) throw ParseError("verifier list '" + path + "' is empty");
  return out;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string model, judge, agent, box;
  std::optional<std::size_t> L, max_state_bits, max_input_bits, cross_check;
  std::size_t max_L = kDefaultMaxInputBits;
  std::size_t max_neurons = 20;
  std::optional<std::string> input, state;
  std::optional<std::uint64_t> budget;
};

Outcome verify_exhaustive(const Globals& g, const VerifyArgs& a) {
  auto model = ir::parse_program(util::read_file(a.model));
  auto judge = parse_judge(util::read_file(a.judge));
  const std::size_t L = a.L.value_or(judge.in_width());
  Verdict v = verify::verify_exhaustive(model, judge, L, {a.max_L, g.workers});
  Report r = start("verify exhaustive");
  r.add("model", a.model);
  r.add("judge", judge.name());
  r.add("L", L);
  add_verdict(r, v);
  return {verdict_code(v), r};
}

Outcome verify_regions(const Globals& g, const VerifyArgs& a) {
  auto net = verify::PwlNetwork::from_program(ir::parse_program(util::read_file(a.model)));
  auto judge = parse_judge(util::read_file(a.judge));
  auto box = verify::Box::parse(a.box);
  verify::RegionOptions ro;
  ro.max_neurons = a.max_neurons;
  ro.workers = g.workers;
  Verdict v = verify::verify_regions(net, judge, box, ro);
  Report r = start("verify regions");
  r.add("model", a.model);
  r.add("judge", judge.name());
  r.add("box", box.to_string());
  add_verdict(r, v);
  if (a.cross_check) {
    verify::Grid grid{box, *a.cross_check};
    Verdict e = verify::verify_exhaustive(verify::quantize_model(net, grid), verify::quantize_judge(judge, grid),
                                          grid.input_bits(), {a.max_L, g.workers});
    r.add("cross_check.bits_per_dim", *a.cross_check);
    r.add("cross_check.verdict", std::string(to_string(e.outcome)));
    if (e.is_misaligned()) {
      const auto& c = *e.counterexample;
      r.add("cross_check.counterexample.input", print_point(grid.point(BitVec::from_rats(c.input))));
      r.add("cross_check.counterexample.output", print_point(c.output));
    }
    r.add_flag("cross_check.agrees", e.outcome == v.outcome);
  }
  return {verdict_code(v), r};
}

Outcome verify_halting(const Globals&, const VerifyArgs& a) {
  auto agent = ir::parse_agent(util::read_file(a.agent));
  verify::HaltingOptions ho;
  ho.max_memory_bits = a.max_state_bits.value_or(20);
  ho.memory_bound = agent.state_width();
  const std::size_t w = std::min<std::size_t>(agent.state_width(), 62);
  ho.step_budget = a.budget.value_or((std::uint64_t{1} << w) + 1);
  if (a.input) ho.input = BitVec::parse(*a.input);
  if (a.state) ho.initial_state = BitVec::parse(*a.state);
  auto res = verify::verify_halting(agent, ho);
  Report r = start("verify halting");
  r.add("agent", a.agent);
  r.add("state_bits", agent.state_width());
  r.add("step_budget", ho.step_budget);
  r.add("verdict", std::string(verify::to_string(res.status)));
  switch (res.status) {
    case verify::HaltingResult::Status::kHalts:
      r.add("steps", res.steps);
      return {kOk, r};
    case verify::HaltingResult::Status::kDiverges:
      r.add("cycle_start", res.cycle_start);
      r.add("cycle_length", res.cycle_length);
      return {kNegative, r};
    case verify::HaltingResult::Status::kResourceExceeded:
      r.add("budget", res.budget);
      r.add("limit", res.limit);
      return {kUndecided, r};
  }
  return {kUndecided, r};
}

Outcome verify_closure(const Globals& g, const VerifyArgs& a) {
  auto agent = ir::parse_agent(util::read_file(a.agent));
  verify::ClosureOptions co;
  co.max_state_bits = a.max_state_bits.value_or(16);
  co.max_input_bits = a.max_input_bits.value_or(16);
  co.workers = g.workers;
  auto res = verify::check_final_closure(agent, co);
  Report r = start("verify closure");
  r.add("agent", a.agent);
  r.add("final_states", agent.final_states().size());
  r.add("verdict", std::string(verify::to_string(res.status)));
  r.add("transitions_checked", res.transitions_checked);
  switch (res.status) {
    case verify::ClosureResult::Status::kOk:
      return {kOk, r};
    case verify::ClosureResult::Status::kViolation:
      r.add("state", res.state.to_string());
      r.add("input", res.input.to_string());
      r.add("successor", res.successor.to_string());
      return {kNegative, r};
    case verify::ClosureResult::Status::kResourceExceeded:
      r.add("budget", res.budget);
      r.add("limit", res.limit);
      return {kUndecided, r};
  }
  return {kUndecided, r};
}

// ---------------------------------------------------------------------------

struct DemoArgs {
  std::string verifier, judge, model, p_pos, input, samples;
  std::optional<std::uint64_t> fuel;
};

std::vector<BitVec> parse_samples(const std::string& text, const Judge& judge) {
  if (text.empty() || text == "all") return diag::all_inputs(judge);
  std::vector<BitVec> out;
  for (const auto& s : comma_list(text)) out.push_back(BitVec::parse(s));
  return out;
}

Outcome demo_adversary(const Globals& g, const DemoArgs& a) {
  auto candidates = load_candidates(a.verifier);
  auto judge = parse_judge(util::read_file(a.judge));
  auto samples = parse_samples(a.samples, judge);
  const std::uint64_t fuel = a.fuel.value_or(diag::kDefaultVerifierFuel);

  std::vector<std::optional<diag::Demonstration>> demos(candidates.size());
  util::parallel_for(candidates.size(), g.workers, [&](std::uint64_t k) {
    try {
      demos[k] = diag::demonstrate_contradiction(candidates[k].name, candidates[k].program, judge, samples, fuel);
    } catch (const diag::VerifierDivergence&) {
    }
  });

  Report r = start("demo adversary");
  r.add("judge", judge.name());
  r.add("verifier_fuel", fuel);
  r.add("verifiers", candidates.size());
  std::size_t contradicted = 0, diverged = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const std::string p = "verifier[" + std::to_string(k) + "].";
    r.add(p + "name", candidates[k].name);
    if (!demos[k]) {
      ++diverged;
      r.add(p + "verdict", std::string("diverged"));
      continue;
    }
    const auto& d = *demos[k];
    r.add(p + "verdict", std::string(d.verdict_aligned ? "aligned" : "misaligned"));
    r.add(p + "verifier_output", bytes_text(d.verifier_run.output));
    r.add(p + "verifier_steps", d.verifier_run.steps);
    r.add(p + "adversary_bytes", d.adversary.code().size());
    r.add(p + "adversary_fuel", diag::adversary_fuel(d.adversary, fuel));
    for (std::size_t s = 0; s < d.samples.size(); ++s) {
      const auto& run = d.samples[s];
      const std::string q = p + "sample[" + std::to_string(s) + "].";
      r.add(q + "input", run.input.to_string());
      r.add(q + "output", run.outcome.halted() ? bytes_text(run.outcome.output) : std::string("still_running"));
      r.add(q + "judge", static_cast<std::uint64_t>(run.judge_value));
      r.add(q + "steps", run.outcome.steps);
    }
    r.add_flag(p + "contradicted", d.contradicted);
    if (d.contradicting_input) {
      r.add(p + "contradicting_input", d.contradicting_input->to_string());
    } else if (d.contradicted) {
      r.add(p + "contradicting_input", std::string("every sample aligned"));
    }
    if (d.contradicted) ++contradicted;
  }
  r.add("contradicted", std::to_string(contradicted) + "/" + std::to_string(candidates.size() - diverged));
  r.add("diverged", diverged);
  int code = kOk;
  if (contradicted + diverged < candidates.size()) {
    code = kNegative;
  } else if (diverged > 0) {
    code = kUndecided;
  }
  return {code, r};
}

Outcome demo_reduction(const Globals&, const DemoArgs& a) {
  auto m = load_micro(a.model);
  auto p = load_micro(a.p_pos);
  const Bytes i = bytes_from_bitstring(a.input);
  std::optional<Judge> judge;
  if (!a.judge.empty()) judge = parse_judge(util::read_file(a.judge));
  std::vector<Bytes> samples;
  if (judge && (a.samples.empty() || a.samples == "all")) {
    for (const auto& x : diag::all_inputs(*judge)) samples.push_back(diag::bytes_from_bits(x));
  } else {
    for (const auto& s : comma_list(a.samples.empty() ? "0,1" : a.samples)) samples.push_back(bytes_from_bitstring(s));
  }
  const std::uint64_t fuel = a.fuel.value_or(100000);
  auto rep = diag::evaluate_reduction(m, i, p, samples, fuel);

  Report r = start("demo reduction");
  r.add("machine", a.model);
  r.add("machine_input", bytes_text(i));
  r.add("p_pos", a.p_pos);
  r.add("fuel", fuel);
  r.add("case", std::string(rep.m_halted ? "halts" : "no halt within fuel (bounded evidence)"));
  if (rep.m_halted) r.add("machine_steps", rep.m_steps);
  r.add("reduction_bytes", rep.reduction.code().size());
  r.add("reduction_fuel", rep.reduction_fuel);
  if (rep.minimal_fuel) {
    r.add("minimal_fuel", *rep.minimal_fuel);
    r.add("simulation_overhead", *rep.minimal_fuel - rep.m_steps);
  }
  for (std::size_t k = 0; k < rep.samples.size(); ++k) {
    const auto& s = rep.samples[k];
    const std::string q = "sample[" + std::to_string(k) + "].";
    r.add(q + "input", bytes_text(s.input));
    r.add(q + "p_pos_output", bytes_text(s.expected.output));
    r.add(q + "reduction",
          s.reduction.halted() ? bytes_text(s.reduction.output) : std::string("still_running"));
    r.add(q + "steps", s.reduction.steps);
    if (judge && s.reduction.halted()) {
      auto in = diag::bits_from_bytes(s.input, judge->in_width());
      auto o = diag::bits_from_bytes(s.reduction.output, judge->out_width());
      r.add(q + "judge", static_cast<std::uint64_t>(in && o ? eval_judge(*judge, *in, *o) : 0));
    }
    r.add_flag(q + "matches", s.matches);
  }
  r.add_flag("matches", rep.matches);
  return {rep.matches ? kOk : kNegative, r};
}

// ---------------------------------------------------------------------------

void emit(const Globals& g, const std::string& text, std::ostream& out) {
  if (g.out.empty()) {
    out << text;
  } else {
    util::write_file(g.out, text);
  }
}

std::string timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alignment verification, guarding and undecidability demonstrations", "dg"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.workers = util::default_workers();
  app.add_option("--workers", g.workers, "Worker threads (also DG_WORKERS)")->check(CLI::Range(1u, 1024u));
  app.add_flag("--deterministic", g.deterministic, "Omit the timestamp and wall time from reports");
  app.add_option("-o,--out", g.out, "Write the report or emitted file here instead of stdout");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verifier")->require_subcommand(1);
  auto* vx = verify->add_subcommand("exhaustive", "All 2^L inputs");
  vx->add_option("-m,--model", va.model)->required();
  vx->add_option("-j,--judge", va.judge)->required();
  vx->add_option("-L", va.L, "Input bits (defaults to the judge's)");
  vx->add_option("--max-L", va.max_L);
  auto* vr = verify->add_subcommand("regions", "Linear regions of a ReLU network");
  vr->add_option("-m,--model", va.model)->required();
  vr->add_option("-j,--judge", va.judge)->required();
  vr->add_option("--box", va.box, "lo,hi;lo,hi;...")->required();
  vr->add_option("--max-neurons", va.max_neurons);
  vr->add_option("--cross-check", va.cross_check, "Also run the quantized exhaustive check with this many bits per dimension");
  vr->add_option("--max-L", va.max_L);
  auto* vh = verify->add_subcommand("halting", "Halting of an agent loop without theta");
  vh->add_option("-a,--agent", va.agent)->required();
  vh->add_option("--max-state-bits", va.max_state_bits);
  vh->add_option("--budget", va.budget, "Step budget (default 2^state_bits + 1)");
  vh->add_option("--input", va.input);
  vh->add_option("--state", va.state, "Initial state (default all zeros)");
  auto* vc = verify->add_subcommand("closure", "Final states never transition out");
  vc->add_option("-a,--agent", va.agent)->required();
  vc->add_option("--max-state-bits", va.max_state_bits);
  vc->add_option("--max-input-bits", va.max_input_bits);

  std::string g_model, g_judge, g_lo, g_hi;
  std::size_t g_max_L = kDefaultMaxInputBits;
  auto* guard = app.add_subcommand("guard", "Transform a model")->require_subcommand(1);
  auto* gf = guard->add_subcommand("filter", "Aligned by construction");
  auto* gm = guard->add_subcommand("misalign", "Misaligned at the judge's negative input");
  for (auto* s : {gf, gm}) {
    s->add_option("-m,--model", g_model)->required();
    s->add_option("-j,--judge", g_judge)->required();
    s->add_option("--max-L", g_max_L);
  }
  auto* gc = guard->add_subcommand("clip", "Clamp outputs to [lo, hi]");
  gc->add_option("-m,--model", g_model)->required();
  gc->add_option("--lo", g_lo)->required();
  gc->add_option("--hi", g_hi)->required();

  DemoArgs da;
  auto* demo = app.add_subcommand("demo", "Undecidability demonstrations")->require_subcommand(1);
  auto* dadv = demo->add_subcommand("adversary", "Contradict candidate verifiers");
  dadv->add_option("-v,--verifier", da.verifier, ".mp, .mpa or .list of them")->required();
  dadv->add_option("-j,--judge", da.judge)->required();
  dadv->add_option("--fuel", da.fuel, "Verifier fuel");
  dadv->add_option("--samples", da.samples, "'all' or comma-separated bit strings");
  auto* dred = demo->add_subcommand("reduction", "Halting reduction");
  dred->add_option("-m,--machine", da.model)->required();
  dred->add_option("-i,--input", da.input, "Machine input as a bit string");
  dred->add_option("--p-pos", da.p_pos)->required();
  dred->add_option("--fuel", da.fuel);
  dred->add_option("--samples", da.samples);
  dred->add_option("-j,--judge", da.judge, "Evaluate this judge on the outputs");

  std::string a_in;
  auto* asmc = app.add_subcommand("asm", "Assemble .mpa into a .mp binary");
  asmc->add_option("input", a_in)->required();
  auto* disc = app.add_subcommand("disasm", "Disassemble a .mp binary");
  disc->add_option("input", a_in)->required();
  std::string zoo_dir;
  auto* zoo = app.add_subcommand("zoo", "Write the bundled candidate verifiers");
  zoo->add_option("--dir", zoo_dir)->required();

  std::vector<std::string> argv_store{"dg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::optional<Outcome> result;
    if (*vx) result = verify_exhaustive(g, va);
    if (*vr) result = verify_regions(g, va);
    if (*vh) result = verify_halting(g, va);
    if (*vc) result = verify_closure(g, va);
    if (*dadv) result = demo_adversary(g, da);
    if (*dred) result = demo_reduction(g, da);
    if (result) {
      if (!g.deterministic) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
        result->report.add("timestamp", timestamp());
        result->report.add("wall_ms", static_cast<std::uint64_t>(ms.count()));
      }
      emit(g, result->report.render(), out);
      return result->code;
    }
    if (*gf || *gm) {
      auto model = ir::parse_program(util::read_file(g_model));
      auto judge = parse_judge(util::read_file(g_judge));
      auto guarded = *gf ? guard::filter(model, judge, g_max_L) : guard::misalign(model, judge, g_max_L);
      emit(g, ir::print(guarded) + "\n", out);
      return kOk;
    }
    if (*gc) {
      auto model = ir::parse_program(util::read_file(g_model));
      emit(g, ir::print(guard::clip_guard(model, Rat::parse(g_lo), Rat::parse(g_hi))) + "\n", out);
      return kOk;
    }
    if (*asmc) {
      Bytes b = diag::to_binary(diag::assemble(util::read_file(a_in)));
      if (g.out.empty()) throw ParseError("asm needs --out");
      util::write_file(g.out, std::string(b.begin(), b.end()));
      return kOk;
    }
    if (*disc) {
      emit(g, diag::disassemble(load_micro(a_in)), out);
      return kOk;
    }
    if (*zoo) {
      fs::create_directories(zoo_dir);
      std::string list;
      auto write = [&](const std::string& name, const diag::MicroProgram& p) {
        Bytes b = diag::to_binary(p);
        util::write_file((fs::path(zoo_dir) / (name + ".mp")).string(), std::string(b.begin(), b.end()));
        util::write_file((fs::path(zoo_dir) / (name + ".mpa")).string(), diag::disassemble(p));
      };
      for (const auto& c : diag::verifier_zoo()) {
        write(c.name, c.program);
        list += c.name + ".mp\n";
      }
      write("diverging", diag::diverging_verifier());
      util::write_file((fs::path(zoo_dir) / "all.list").string(), list);
      return kOk;
    }
  } catch (const TrivialJudgeError& e) {
    err << "trivial judge: " << e.what() << "\n";
    return kUndecided;
  } catch (const BudgetError& e) {
    err << e.what() << "\n";
    return kUndecided;
  } catch (const diag::VerifierDivergence& e) {
    err << e.what() << "\n";
    return kUndecided;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << "error: no command\n";
  return kUsage;
}

}  // namespace dg::cli
