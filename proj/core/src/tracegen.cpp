#include "wcp/tracegen.hpp"

#include <utility>

namespace wcp::gen {

namespace {

/// Builds a named example trace one numbered line at a time.
class ExampleBuilder {
 public:
  explicit ExampleBuilder(std::string name) : name_(std::move(name)) {}

  /// `op` is one of acq, rel, r, w, sync, acrl.
  ExampleBuilder& line(std::string_view tid, std::string_view op, std::string_view operand) {
    ++line_;
    const std::string loc = name_ + ':' + std::to_string(line_);
    if (op == "sync") {
      const std::string var = std::string(operand) + "Var";
      trace_.add(tid, EventKind::Acquire, operand, loc);
      trace_.add(tid, EventKind::Read, var, loc);
      trace_.add(tid, EventKind::Write, var, loc);
      trace_.add(tid, EventKind::Release, operand, loc);
    } else if (op == "acrl") {
      trace_.add(tid, EventKind::Acquire, operand, loc);
      trace_.add(tid, EventKind::Release, operand, loc);
    } else {
      trace_.add(tid, kind_of(op), operand, loc);
    }
    return *this;
  }

  Trace take() { return std::move(trace_); }

 private:
  static EventKind kind_of(std::string_view op) {
    if (op == "acq") return EventKind::Acquire;
    if (op == "rel") return EventKind::Release;
    if (op == "r") return EventKind::Read;
    return EventKind::Write;
  }

  std::string name_;
  int line_ = 0;
  Trace trace_;
};

std::map<std::string, Trace> build_fixtures() {
  std::map<std::string, Trace> out;

  out["fig1a"] = ExampleBuilder("fig1a")
                     .line("t1", "acq", "l").line("t1", "r", "x").line("t1", "w", "x")
                     .line("t1", "rel", "l")
                     .line("t2", "acq", "l").line("t2", "r", "x").line("t2", "w", "x")
                     .line("t2", "rel", "l")
                     .take();

  out["fig1b"] = ExampleBuilder("fig1b")
                     .line("t1", "w", "y").line("t1", "acq", "l").line("t1", "r", "x")
                     .line("t1", "rel", "l")
                     .line("t2", "acq", "l").line("t2", "r", "x").line("t2", "rel", "l")
                     .line("t2", "r", "y")
                     .take();

  out["fig2a"] = ExampleBuilder("fig2a")
                     .line("t1", "w", "y").line("t1", "acq", "l").line("t1", "w", "x")
                     .line("t1", "rel", "l")
                     .line("t2", "acq", "l").line("t2", "r", "x").line("t2", "r", "y")
                     .line("t2", "rel", "l")
                     .take();

  out["fig2b"] = ExampleBuilder("fig2b")
                     .line("t1", "w", "y").line("t1", "acq", "l").line("t1", "w", "x")
                     .line("t1", "rel", "l")
                     .line("t2", "acq", "l").line("t2", "r", "y").line("t2", "r", "x")
                     .line("t2", "rel", "l")
                     .take();

  out["fig3"] = ExampleBuilder("fig3")
                    .line("t1", "acq", "l").line("t1", "sync", "x").line("t1", "r", "z")
                    .line("t1", "rel", "l")
                    .line("t2", "sync", "x").line("t2", "acq", "l").line("t2", "acq", "n")
                    .line("t2", "rel", "n").line("t2", "rel", "l")
                    .line("t3", "acq", "n").line("t3", "rel", "n").line("t3", "w", "z")
                    .take();

  out["fig4"] = ExampleBuilder("fig4")
                    .line("t1", "acq", "l").line("t1", "acq", "m").line("t1", "rel", "m")
                    .line("t1", "r", "z").line("t1", "rel", "l")
                    .line("t2", "acq", "m").line("t2", "acq", "n").line("t2", "sync", "x")
                    .line("t2", "rel", "n").line("t2", "rel", "m")
                    .line("t3", "acq", "n").line("t3", "acq", "l").line("t3", "rel", "l")
                    .line("t3", "sync", "x").line("t3", "w", "z").line("t3", "rel", "n")
                    .take();

  out["fig5"] = ExampleBuilder("fig5")
                    .line("t1", "acq", "l").line("t1", "acq", "m").line("t1", "rel", "m")
                    .line("t1", "r", "z").line("t1", "rel", "l")
                    .line("t2", "acq", "m").line("t2", "acq", "n").line("t2", "sync", "x")
                    .line("t2", "rel", "n")
                    .line("t3", "acq", "n").line("t3", "acq", "l").line("t3", "rel", "l")
                    .line("t3", "sync", "x").line("t3", "w", "z").line("t3", "rel", "n")
                    .line("t3", "sync", "y")
                    .line("t2", "sync", "y").line("t2", "rel", "m")
                    .take();

  out["fig7"] = ExampleBuilder("fig7")
                    .line("t1", "acq", "l0").line("t1", "w", "x")
                    .line("t3", "acq", "m").line("t3", "acrl", "y")
                    .line("t1", "acrl", "y").line("t1", "rel", "l0")
                    .line("t1", "acq", "l1").line("t1", "acrl", "y")
                    .line("t3", "acrl", "y").line("t3", "rel", "m").line("t3", "acq", "m")
                    .line("t3", "acrl", "y")
                    .line("t1", "acrl", "y").line("t1", "rel", "l1")
                    .line("t3", "rel", "m")
                    .line("t2", "acq", "l0").line("t2", "w", "x").line("t2", "rel", "l0")
                    .line("t2", "acq", "m").line("t2", "rel", "m")
                    .line("t2", "acq", "l1").line("t2", "rel", "l1")
                    .line("t2", "acq", "m").line("t2", "rel", "m")
                    .take();
  return out;
}

void check_bits(std::string_view bits) {
  if (bits.empty()) throw std::invalid_argument("empty bit string");
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bit string '" + std::string(bits) + "' contains non-binary digit");
    }
  }
}

std::string bit_lock(char bit) { return bit == '0' ? "l0" : "l1"; }

}  // namespace

const std::map<std::string, Trace>& fixtures() {
  static const std::map<std::string, Trace> all = build_fixtures();
  return all;
}

const Trace& fixture(std::string_view name) {
  const auto& all = fixtures();
  auto it = all.find(std::string(name));
  if (it == all.end()) throw std::out_of_range("unknown fixture '" + std::string(name) + "'");
  return it->second;
}

Trace gen_equality_trace(std::string_view u, std::string_view v) {
  if (u.size() != v.size()) {
    throw LengthMismatch("bit strings differ in length: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
  check_bits(u);
  check_bits(v);

  ExampleBuilder b("eq");
  b.line("t1", "acq", bit_lock(u[0])).line("t1", "w", "x");
  b.line("t3", "acq", "m").line("t3", "acrl", "y");
  b.line("t1", "acrl", "y").line("t1", "rel", bit_lock(u[0]));
  for (std::size_t i = 1; i < u.size(); ++i) {
    b.line("t1", "acq", bit_lock(u[i])).line("t1", "acrl", "y");
    b.line("t3", "acrl", "y").line("t3", "rel", "m").line("t3", "acq", "m").line("t3", "acrl", "y");
    b.line("t1", "acrl", "y").line("t1", "rel", bit_lock(u[i]));
  }
  b.line("t3", "w", "z").line("t3", "rel", "m");

  b.line("t2", "acq", bit_lock(v[0])).line("t2", "w", "x").line("t2", "rel", bit_lock(v[0]));
  b.line("t2", "acq", "m").line("t2", "rel", "m");
  for (std::size_t j = 1; j < v.size(); ++j) {
    b.line("t2", "acq", bit_lock(v[j])).line("t2", "rel", bit_lock(v[j]));
    b.line("t2", "acq", "m").line("t2", "rel", "m");
  }
  b.line("t2", "w", "z");
  return b.take();
}

std::pair<EventIdx, EventIdx> equality_writes(const Trace& trace) {
  const VarId z = trace.symbols.vars.find("z");
  std::vector<EventIdx> writes;
  for (const Event& e : trace.events) {
    if (e.kind == EventKind::Write && e.operand == z) writes.push_back(e.idx);
  }
  if (writes.size() != 2) throw std::invalid_argument("not an equality trace");
  return {writes[0], writes[1]};
}

void GenParams::check() const {
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (vars < 1) throw std::invalid_argument("vars must be at least 1");
  if (!(p_lock >= 0.0 && p_lock <= 1.0)) throw std::invalid_argument("p_lock must be in [0,1]");
  if (!(p_write >= 0.0 && p_write <= 1.0)) throw std::invalid_argument("p_write must be in [0,1]");
}

Trace gen_random(const GenParams& params) {
  params.check();
  std::mt19937_64 rng(params.seed);
  std::bernoulli_distribution lock_step(params.p_lock);
  std::bernoulli_distribution write_step(params.p_write);
  std::bernoulli_distribution close_step(0.4);
  std::uniform_int_distribution<std::uint32_t> pick_thread(0, params.threads - 1);
  std::uniform_int_distribution<std::uint32_t> pick_var(0, params.vars - 1);

  auto name = [](char prefix, std::uint32_t i) { return std::string(1, prefix) + std::to_string(i); };

  Trace trace;
  // Intern in a fixed order so ids equal the generator's indices.
  for (std::uint32_t t = 0; t < params.threads; ++t) trace.symbols.threads.intern(name('t', t));
  for (std::uint32_t l = 0; l < params.locks; ++l) trace.symbols.locks.intern(name('l', l));
  for (std::uint32_t x = 0; x < params.vars; ++x) trace.symbols.vars.intern(name('x', x));

  std::vector<std::vector<std::uint32_t>> open(params.threads);
  std::vector<bool> held(params.locks, false);
  std::size_t open_total = 0;

  auto emit = [&](std::uint32_t t, EventKind kind, const std::string& operand) {
    const std::string tid = name('t', t);
    const std::string loc = tid + '.' + std::string(kind_token(kind)) + '.' + operand;
    trace.add(tid, kind, operand, loc);
  };

  if (params.fork_join) {
    for (std::uint32_t t = 1; t < params.threads; ++t) trace.add("t0", EventKind::Fork, name('t', t));
  }
  const std::size_t budget = params.events + trace.events.size();

  while (trace.events.size() + (params.dangling ? 0 : open_total) < budget) {
    const std::uint32_t t = pick_thread(rng);
    auto& stack = open[t];
    if (lock_step(rng)) {
      if (!stack.empty() && (close_step(rng) || stack.size() >= params.max_nesting)) {
        held[stack.back()] = false;
        emit(t, EventKind::Release, name('l', stack.back()));
        stack.pop_back();
        --open_total;
        continue;
      }
      std::vector<std::uint32_t> free;
      for (std::uint32_t l = 0; l < params.locks; ++l) {
        if (!held[l]) free.push_back(l);
      }
      // Acquiring needs room for the matching release within the budget.
      const bool room = params.dangling || trace.events.size() + open_total + 2 <= budget;
      if (!free.empty() && stack.size() < params.max_nesting && room) {
        std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
        const std::uint32_t l = free[pick(rng)];
        held[l] = true;
        stack.push_back(l);
        ++open_total;
        emit(t, EventKind::Acquire, name('l', l));
        continue;
      }
    } else if (!stack.empty() && close_step(rng) && close_step(rng)) {
      // Sections also end on access steps, keeping them short when p_lock is low.
      held[stack.back()] = false;
      emit(t, EventKind::Release, name('l', stack.back()));
      stack.pop_back();
      --open_total;
      continue;
    }
    emit(t, write_step(rng) ? EventKind::Write : EventKind::Read, name('x', pick_var(rng)));
  }

  if (!params.dangling) {
    for (std::uint32_t t = 0; t < params.threads; ++t) {
      while (!open[t].empty()) {
        emit(t, EventKind::Release, name('l', open[t].back()));
        open[t].pop_back();
      }
    }
  }
  if (params.fork_join) {
    for (std::uint32_t t = 1; t < params.threads; ++t) trace.add("t0", EventKind::Join, name('t', t));
  }
  return trace;
}

ScalingWorkload::ScalingWorkload(std::uint32_t threads, std::uint32_t locks, std::uint64_t seed)
    : threads_(threads), locks_(locks), rng_(seed), scripts_(threads), held_(locks, false) {
  if (threads < 1 || locks < threads) {
    throw std::invalid_argument("workload needs at least one thread and one lock per thread");
  }
  for (std::uint32_t t = 0; t < threads; ++t) symbols_.threads.intern("t" + std::to_string(t));
  for (std::uint32_t l = 0; l < locks; ++l) symbols_.locks.intern("l" + std::to_string(l));
  for (std::uint32_t l = 0; l < locks; ++l) symbols_.vars.intern("x" + std::to_string(l));
  for (std::uint32_t t = 0; t < threads; ++t) symbols_.vars.intern("v" + std::to_string(t));
}

void ScalingWorkload::refill(std::uint32_t t) {
  auto& script = scripts_[t];
  auto ev = [&](EventKind kind, std::uint32_t operand) {
    Event e;
    e.tid = t;
    e.kind = kind;
    e.operand = operand;
    return e;
  };
  // Built in reverse; next() pops from the back.
  const std::uint32_t local = locks_ + t;
  const auto locals = static_cast<std::uint32_t>(rng_() % 4);
  for (std::uint32_t i = 0; i < locals; ++i) {
    script.push_back(ev(rng_() % 2 ? EventKind::Write : EventKind::Read, local));
  }
  std::uint32_t l = static_cast<std::uint32_t>(rng_() % locks_);
  while (held_[l]) l = (l + 1) % locks_;
  held_[l] = true;
  script.push_back(ev(EventKind::Release, l));
  script.push_back(ev(EventKind::Write, l));
  if (rng_() % 2) script.push_back(ev(EventKind::Read, l));
  script.push_back(ev(EventKind::Acquire, l));
}

Event ScalingWorkload::next() {
  const auto t = static_cast<std::uint32_t>(rng_() % threads_);
  if (scripts_[t].empty()) refill(t);
  Event e = scripts_[t].back();
  scripts_[t].pop_back();
  if (e.kind == EventKind::Release) held_[e.operand] = false;
  e.idx = next_idx_++;
  return e;
}

}  // namespace wcp::gen
