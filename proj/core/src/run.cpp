#include "ebrus/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

#include "ebrus/bounds.hpp"
#include "ebrus/error.hpp"
#include "ebrus/io.hpp"
#include "ebrus/tangent.hpp"

namespace ebrus {

namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"simulate",  "verify-bounds", "residuals", "lyapunov",
                                             "dim-bound", "sweep",         "constants"};
  return c;
}

int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("BRUSSELATOR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<int>(std::min<long>(v, 1024));
  }
  return n;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::mt19937_64 run_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

ModalState random_initial(const SineBasis& basis, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> nd;
  const double r = radius * (1.0 - U(rng));
  const std::size_t M = basis.mode_count();
  ModalState g(M);
  for (int c = 0; c < kComponents; ++c) {
    for (std::size_t k = 0; k < M; ++k) {
      const auto& j = basis.index(k);
      double j2 = 0.0;
      for (int a = 0; a < basis.dim(); ++a) j2 += double(j[a]) * j[a];
      g.coef[c * M + k] = nd(rng) / j2;
    }
  }
  double n2 = 0.0;
  for (double x : g.coef) n2 += x * x;
  const double s = n2 > 0 ? r / std::sqrt(n2) : 0.0;
  for (double& x : g.coef) x *= s;
  return g;
}

ModalState make_initial(const RunConfig& cfg, const SineBasis& basis, std::size_t index) {
  switch (cfg.initial.kind) {
    case InitialKind::Random: {
      auto rng = run_rng(cfg.seed, index);
      return random_initial(basis, cfg.initial.radius, rng);
    }
    case InitialKind::Modes: {
      ModalState g(basis.mode_count());
      for (const auto& mv : cfg.initial.modes) {
        if (static_cast<std::size_t>(mv.mode) >= basis.mode_count()) {
          throw Error("shell", "initial_modes: mode " + std::to_string(mv.mode) +
                                   " exceeds the basis size " +
                                   std::to_string(basis.mode_count()));
        }
        g.coef[mv.component * basis.mode_count() + mv.mode] = mv.value;
      }
      return g;
    }
    case InitialKind::Checkpoint:
      return checkpoint_load(cfg.initial.checkpoint, basis);
  }
  throw Error("shell", "unknown initial-data kind");
}

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(double x, int p = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", p, x);
  return buf;
}

class Context {
 public:
  Context(const std::string& cmd, const RunConfig& cfg, std::ostream& log)
      : cfg_(cfg), log_(log), basis_(cfg.domain, cfg.modes), prm_(cfg.parameters()) {
    validate(cfg);
    threads_ = thread_count();
    fs::create_directories(cfg.out_dir);
    res_.report.command = cmd;
    res_.report.config_text = emit_config(cfg);
    res_.report.config_hash = fnv1a_hex(res_.report.config_text);
    res_.report.seed = cfg.seed;
    res_.report.threads = threads_;
    start_ = std::chrono::steady_clock::now();
  }

  const RunConfig& cfg() const { return cfg_; }
  const SineBasis& basis() const { return basis_; }
  const Parameters& prm() const { return prm_; }
  std::ostream& log() { return log_; }
  int threads() const { return threads_; }
  RunResult& result() { return res_; }

  std::string path(const std::string& name) const { return (fs::path(cfg_.out_dir) / name).string(); }

  void write(const std::string& name, const std::string& text) {
    write_text(path(name), text);
    res_.files.push_back(path(name));
  }

  const EmbeddingConstants& embedding() {
    if (!res_.report.embedding) {
      res_.report.embedding = embedding_constants(basis_, cfg_.embedding_samples, cfg_.seed);
    }
    return *res_.report.embedding;
  }

  BoundSet bounds_for(const Parameters& prm) {
    BoundSet bs = compute_bound_set(prm, BasisConstants::from(basis_, embedding()));
    if (cfg_.scale_bounds != 1.0) bs = bs.scaled(cfg_.scale_bounds);
    return bs;
  }

  /// Finishes the report and writes report.json.
  RunResult finish(int status) {
    res_.exit_status = status;
    res_.report.exit_status = status;
    res_.report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write("report.json", to_json(res_.report));
    return std::move(res_);
  }

 private:
  RunConfig cfg_;
  std::ostream& log_;
  SineBasis basis_;
  Parameters prm_;
  int threads_ = 1;
  RunResult res_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<Trajectory> ensemble(Context& ctx, const Parameters& prm, const IntegratorConfig& ic) {
  const auto n = static_cast<std::size_t>(ctx.cfg().ensemble);
  std::vector<Trajectory> out(n);
  parallel_for(n, ctx.threads(), [&](std::size_t i) {
    out[i] = simulate(make_initial(ctx.cfg(), ctx.basis(), i), ctx.basis(), prm, ic);
  });
  return out;
}

std::vector<BoundVerdict> verdicts_for(Context& ctx, const std::vector<Trajectory>& runs,
                                       const BoundSet& bs, const Parameters& prm) {
  std::vector<std::vector<BoundVerdict>> all;
  for (const auto& t : runs) {
    auto v = verify_absorption(t, bs, ctx.cfg().tail_fraction, 0.0);
    auto env = verify_envelope(t, prm, ctx.basis().gamma(), ctx.basis().volume(), ctx.cfg().tol_rel);
    if (bs.scale != 1.0) env.bound *= Magnitude(bs.scale);
    env.pass = env.observed <= env.bound.to_double() * (1.0 + ctx.cfg().tol_rel);
    env.violations = env.pass ? 0 : 1;
    v.push_back(env);
    all.push_back(std::move(v));
  }
  return merge_verdicts(all);
}

std::string verdict_table(const std::vector<BoundVerdict>& vs) {
  std::string s = "name,observable,t_tail,t_end,observed,bound,margin,runs,violations,pass\n";
  for (const auto& v : vs) {
    s += v.name + "," + v.observable + "," + g17(v.t_tail) + "," + g17(v.t_end) + "," +
         g17(v.observed) + "," + (v.bound.representable() ? g17(v.bound.x()) : v.bound.str(17)) +
         "," + g17(v.margin) + "," + std::to_string(v.runs) + "," +
         std::to_string(v.violations) + "," + (v.pass ? "pass" : "FAIL") + "\n";
  }
  return s;
}

void print_verdicts(std::ostream& log, const std::vector<BoundVerdict>& vs) {
  for (const auto& v : vs) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-12s %-34s observed %-12s bound %-16s %s\n",
                  v.name.c_str(), v.observable.c_str(), fmt(v.observed).c_str(),
                  v.bound.str(6).c_str(), v.pass ? "pass" : "FAIL");
    log << line;
  }
}

bool all_pass(const std::vector<BoundVerdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const BoundVerdict& v) { return v.pass; });
}

// ---- commands ----------------------------------------------------------------

RunResult cmd_constants(Context& ctx) {
  const BoundSet bs = ctx.bounds_for(ctx.prm());
  ctx.result().report.bounds = bs;
  const auto& ec = *ctx.result().report.embedding;
  ctx.log() << "embedding (subspace witnesses, M=" << ctx.cfg().modes << "): delta "
            << fmt(ec.delta) << ", eta " << fmt(ec.eta) << ", C " << fmt(ec.c_gn) << "\n";
  for (const auto& e : bs.entries()) {
    ctx.log() << "  " << e.name << " = " << e.value.str(12) << "    [" << e.formula << "]\n";
  }
  return ctx.finish(0);
}

RunResult cmd_simulate(Context& ctx) {
  const auto runs = ensemble(ctx, ctx.prm(), ctx.cfg().integrator);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
    ctx.write(name, trajectory_csv(runs[i].samples));
    std::snprintf(name, sizeof name, "final_%03zu.ckpt", i);
    checkpoint_save(runs[i].final_state, ctx.basis(), ctx.path(name));
    ctx.result().files.push_back(ctx.path(name));
  }
  if (!runs.empty()) ctx.write("trajectory_000.svg", trajectory_svg(runs[0].samples, {}));
  ctx.log() << "simulated " << runs.size() << " run(s) to t = " << fmt(ctx.cfg().integrator.t_end)
            << "\n";
  return ctx.finish(0);
}

RunResult cmd_verify(Context& ctx) {
  const BoundSet bs = ctx.bounds_for(ctx.prm());
  ctx.result().report.bounds = bs;
  const auto runs = ensemble(ctx, ctx.prm(), ctx.cfg().integrator);
  auto vs = verdicts_for(ctx, runs, bs, ctx.prm());
  ctx.write("verdicts.csv", verdict_table(vs));
  if (!runs.empty()) ctx.write("trajectory_000.svg", trajectory_svg(runs[0].samples, vs));
  ctx.log() << "verdicts over " << runs.size() << " run(s)"
            << (bs.scale != 1.0 ? " (bounds scaled by " + fmt(bs.scale) + ")" : "") << ":\n";
  print_verdicts(ctx.log(), vs);
  const bool ok = all_pass(vs);
  ctx.result().report.verdicts = std::move(vs);
  return ctx.finish(ok ? 0 : 1);
}

RunResult cmd_residuals(Context& ctx) {
  IntegratorConfig ic = ctx.cfg().integrator;
  if (ic.store_every == 0) ic.store_every = 1;
  const BoundSet bs = ctx.bounds_for(ctx.prm());
  const auto n = static_cast<std::size_t>(ctx.cfg().ensemble);
  std::vector<ResidualReport> reps(n);
  parallel_for(n, ctx.threads(), [&](std::size_t i) {
    const auto t = simulate(make_initial(ctx.cfg(), ctx.basis(), i), ctx.basis(), ctx.prm(), ic);
    reps[i] = inequality_residuals(t, ctx.basis(), ctx.prm(), bs.K1, ctx.cfg().tol_rel);
  });
  std::vector<ResidualCheck> merged;
  for (const auto& r : reps) {
    for (const auto& c : r.checks) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const ResidualCheck& m) { return m.name == c.name; });
      if (it == merged.end()) {
        merged.push_back(c);
        continue;
      }
      it->evaluated += c.evaluated;
      it->pass = it->pass && c.pass;
      it->max_excess = std::max(it->max_excess, c.max_excess);
      if (c.worst_ratio > it->worst_ratio) {
        it->worst_ratio = c.worst_ratio;
        it->rhs_at_worst = c.rhs_at_worst;
      }
    }
  }
  std::string csv = "name,evaluated,max_excess,worst_ratio,rhs_at_worst,tol_rel,pass\n";
  bool ok = true;
  for (const auto& c : merged) {
    ok = ok && c.pass;
    csv += c.name + "," + std::to_string(c.evaluated) + "," + g17(c.max_excess) + "," +
           g17(c.worst_ratio) + "," + g17(c.rhs_at_worst) + "," + g17(c.tol_rel) + "," +
           (c.pass ? "pass" : "FAIL") + "\n";
    ctx.log() << "  " << c.name << ": worst (lhs-rhs)/rhs = " << fmt(c.worst_ratio) << " over "
              << c.evaluated << " states: " << (c.pass ? "pass" : "FAIL") << "\n";
  }
  ctx.write("residuals.csv", csv);
  ctx.result().report.residuals = std::move(merged);
  return ctx.finish(ok ? 0 : 1);
}

std::vector<LyapunovReport> lyapunov_ensemble(Context& ctx) {
  TangentConfig tc;
  tc.m = std::min<int>(ctx.cfg().m_max, static_cast<int>(kComponents * ctx.basis().mode_count()));
  tc.renorm_every = ctx.cfg().renorm_every;
  tc.discard_time = ctx.cfg().discard_time;
  tc.seed = ctx.cfg().seed;
  const auto n = static_cast<std::size_t>(ctx.cfg().ensemble);
  std::vector<LyapunovReport> reps(n);
  parallel_for(n, ctx.threads(), [&](std::size_t i) {
    reps[i] = evolve_tangents(make_initial(ctx.cfg(), ctx.basis(), i), ctx.basis(), ctx.prm(),
                              ctx.cfg().integrator, tc);
  });
  return reps;
}

void write_lyapunov(Context& ctx, const std::vector<LyapunovReport>& reps, const QmSummary& qs) {
  std::string csv = "run,m,exponent,qm,qm_first,qm_second\n";
  for (std::size_t r = 0; r < reps.size(); ++r) {
    for (std::size_t j = 0; j < reps[r].exponents.size(); ++j) {
      csv += std::to_string(r) + "," + std::to_string(j + 1) + "," + g17(reps[r].exponents[j]) +
             "," + g17(reps[r].qm[j]) + "," + g17(reps[r].qm_first[j]) + "," +
             g17(reps[r].qm_second[j]) + "\n";
    }
  }
  ctx.write("lyapunov.csv", csv);
  std::string hist = "run,t";
  const std::size_t m = reps.empty() ? 0 : reps[0].exponents.size();
  for (std::size_t j = 0; j < m; ++j) hist += ",lambda" + std::to_string(j + 1);
  hist += "\n";
  for (std::size_t r = 0; r < reps.size(); ++r) {
    for (std::size_t k = 0; k < reps[r].history.size(); ++k) {
      hist += std::to_string(r) + "," + g17(reps[r].history_times[k]);
      for (double x : reps[r].history[k]) hist += "," + g17(x);
      hist += "\n";
    }
  }
  ctx.write("lyapunov_history.csv", hist);
  ctx.log() << "q_m (ensemble max over " << qs.runs << " run(s)):";
  for (std::size_t j = 0; j < qs.qm.size(); ++j) ctx.log() << " " << fmt(qs.qm[j], 4);
  ctx.log() << "\nm* = " << qs.m_star << (qs.m_star == 0 ? " (no q_m < 0 found)" : "") << "\n";
  if (!reps.empty()) {
    ctx.log() << "exponents (run 0):";
    for (double x : reps[0].exponents) ctx.log() << " " << fmt(x, 5);
    ctx.log() << "\nKaplan-Yorke dimension (run 0): " << fmt(reps[0].kaplan_yorke) << "\n";
  }
}

RunResult cmd_lyapunov(Context& ctx) {
  auto reps = lyapunov_ensemble(ctx);
  const QmSummary qs = qm_average(reps);
  write_lyapunov(ctx, reps, qs);
  ctx.result().report.lyapunov = std::move(reps);
  ctx.result().report.qm = qs;
  return ctx.finish(0);
}

RunResult cmd_dim_bound(Context& ctx) {
  const BoundSet bs = ctx.bounds_for(ctx.prm());
  ctx.result().report.bounds = bs;
  const auto& ec = *ctx.result().report.embedding;
  const Magnitude q3 = q3_constant(ctx.basis().dim(), ec.delta, ec.c_gn, bs.Q1 + bs.Q2,
                                   ctx.prm().d0());
  const DimensionBound db = analytic_dimension_bound(ctx.prm(), ctx.basis().dim(),
                                                     ctx.basis().volume(), ctx.cfg().qstar, q3);
  auto reps = lyapunov_ensemble(ctx);
  const QmSummary qs = qm_average(reps);
  write_lyapunov(ctx, reps, qs);
  std::string csv = "quantity,value,level,x\n";
  auto row = [&](const std::string& n, const Magnitude& m) {
    csv += n + "," + m.str(17) + "," + std::to_string(m.level()) + "," + g17(m.x()) + "\n";
  };
  row("Q3", db.Q3);
  row("B", db.B);
  row("m", db.m);
  row("d_H_bound", db.dH);
  row("d_F_bound", db.dF);
  row("m_star", Magnitude(qs.m_star));
  row("Qstar", Magnitude(db.Qstar));
  ctx.write("dimension.csv", csv);
  const bool consistent = qs.m_star > 0 && Magnitude(qs.m_star) <= db.m;
  ctx.log() << "Q3 = " << db.Q3.str() << " (delta " << fmt(ec.delta) << ", C " << fmt(ec.c_gn)
            << ", Q1+Q2 = " << (bs.Q1 + bs.Q2).str() << ")\n"
            << "analytic: m = " << db.m.str(12) << " with Q* = " << fmt(db.Qstar)
            << "  =>  d_H <= " << db.dH.str(12) << ", d_F <= " << db.dF.str(12) << "\n"
            << "empirical m* = " << qs.m_star << (consistent ? " <= m" : "  (inconsistent)")
            << "\n";
  ctx.result().report.lyapunov = std::move(reps);
  ctx.result().report.qm = qs;
  ctx.result().report.dimension = db;
  return ctx.finish(consistent ? 0 : 1);
}

RunResult cmd_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg();
  if (cfg.sweep_param.empty()) throw Error("shell", "sweep needs analysis.sweep_param");
  const auto& names = Coefficients::names();
  const auto idx = static_cast<std::size_t>(
      std::find_if(names.begin(), names.end(),
                   [&](const char* s) { return cfg.sweep_param == s; }) -
      names.begin());
  std::string csv = "value,name,observed,bound,margin,pass\n";
  bool ok = true;
  for (double value : cfg.sweep_values) {
    Coefficients c = cfg.coefficients;
    c[idx] = value;
    const Parameters prm(c);
    const BoundSet bs = ctx.bounds_for(prm);
    const auto runs = ensemble(ctx, prm, cfg.integrator);
    SweepRow row;
    row.value = value;
    row.verdicts = verdicts_for(ctx, runs, bs, prm);
    for (const auto& v : row.verdicts) {
      csv += g17(value) + "," + v.name + "," + g17(v.observed) + "," + v.bound.str(17) + "," +
             g17(v.margin) + "," + (v.pass ? "pass" : "FAIL") + "\n";
    }
    const bool rp = all_pass(row.verdicts);
    ok = ok && rp;
    ctx.log() << "  " << cfg.sweep_param << " = " << fmt(value) << ": "
              << (rp ? "all verdicts pass" : "FAIL") << "\n";
    ctx.result().report.sweep.push_back(std::move(row));
  }
  ctx.write("sweep.csv", csv);
  return ctx.finish(ok ? 0 : 1);
}

}  // namespace

RunResult run(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    std::string list;
    for (const auto& c : commands()) list += (list.empty() ? "" : ", ") + c;
    throw Error("shell", "unknown command '" + command + "' (expected one of " + list + ")");
  }
  Context ctx(command, cfg, log);
  if (command == "constants") return cmd_constants(ctx);
  if (command == "simulate") return cmd_simulate(ctx);
  if (command == "verify-bounds") return cmd_verify(ctx);
  if (command == "residuals") return cmd_residuals(ctx);
  if (command == "lyapunov") return cmd_lyapunov(ctx);
  if (command == "dim-bound") return cmd_dim_bound(ctx);
  return cmd_sweep(ctx);
}

}  // namespace ebrus
