#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "phasehpss/audio_io.hpp"
#include "phasehpss/error.hpp"
#include "phasehpss/hpss.hpp"
#include "phasehpss/metrics.hpp"
#include "phasehpss/synth.hpp"

namespace phasehpss::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kCsvHeader =
    "track,method,SDR_h,SIR_h,SAR_h,SDR_p,SIR_p,SAR_p,SDR_avg,SIR_avg,SAR_avg";

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

void write_row(std::ostream& out, const std::string& track, const std::string& method,
               const HpScores& s) {
  const SourceScores a = s.average();
  out << track << ',' << method;
  for (const SourceScores* x : {&s.harmonic, &s.percussive, &a}) {
    out << ',' << fmt(x->sdr) << ',' << fmt(x->sir) << ',' << fmt(x->sar);
  }
  out << '\n';
}

HpScores mean_scores(const std::vector<HpScores>& rows) {
  HpScores m;
  for (const auto& r : rows) {
    for (auto [dst, src] : {std::pair{&m.harmonic, &r.harmonic}, {&m.percussive, &r.percussive}}) {
      dst->sdr += src->sdr / rows.size();
      dst->sir += src->sir / rows.size();
      dst->sar += src->sar / rows.size();
    }
  }
  return m;
}

// Opens `path` for writing, or returns `fallback` when the path is empty.
class OutputTarget {
public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path);
    if (!file_) throw IoError("cannot open " + path + " for writing");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("write failed");
    }
  }

private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

// Shared solver flags with the method defaults.
struct SolverFlags {
  double lambda = 0.5;
  double kappa = 0.001;
  int iters = 100;
  double mu1 = 1.0;
  double mu2 = 0.25;
  double alpha = 0.5;
  std::size_t win = 4096;
  std::size_t hop = 1024;

  void add_to(CLI::App& app) {
    app.add_option("--lambda", lambda, "Weight of the frame-sparsity term")->capture_default_str();
    app.add_option("--kappa", kappa, "Floor of the normalized pre-estimate in the weight")
        ->capture_default_str();
    app.add_option("--iters", iters, "Primal-dual iterations")->capture_default_str();
    app.add_option("--mu1", mu1, "Primal step size")->capture_default_str();
    app.add_option("--mu2", mu2, "Dual step size")->capture_default_str();
    app.add_option("--alpha", alpha, "Relaxation parameter in (0, 2)")->capture_default_str();
    app.add_option("--win", win, "Window length in samples (even)")->capture_default_str();
    app.add_option("--hop", hop, "Hop size in samples (divides --win)")->capture_default_str();
  }

  HpssConfig config() const {
    HpssConfig c;
    c.solver.lambda = lambda;
    c.kappa = kappa;
    c.solver.n_iters = iters;
    c.solver.mu1 = mu1;
    c.solver.mu2 = mu2;
    c.solver.alpha = alpha;
    c.win_len = win;
    c.hop = hop;
    return c;
  }
};

// ---- separate --------------------------------------------------------------

struct SeparateArgs {
  std::string input, out_h, out_p, if_source = "mix", method = "prop", trace, config;
  SolverFlags flags;
};

int cmd_separate(const SeparateArgs& a, std::ostream& out) {
  HpssConfig cfg = a.flags.config();
  std::optional<std::string> oracle_path;
  if (a.if_source == "mix") {
    cfg.if_source = IfSource::Mixture;
  } else if (a.if_source.rfind("oracle:", 0) == 0 && a.if_source.size() > 7) {
    cfg.if_source = IfSource::Oracle;
    oracle_path = a.if_source.substr(7);
  } else {
    throw InvalidArgument("--if-source must be 'mix' or 'oracle:PATH'");
  }
  if (!a.config.empty()) cfg = load_config(a.config, cfg);
  validate(cfg);

  const Signal x = read_wav(a.input);
  SignalPair pair;
  if (a.method == "mf") {
    pair = mf_separate(x, StftConfig::hann(cfg.win_len, cfg.hop), cfg.median);
  } else {
    std::optional<Signal> oracle;
    if (cfg.if_source == IfSource::Oracle) {
      if (!oracle_path) throw InvalidArgument("oracle IF source needs --if-source oracle:PATH");
      oracle = read_wav(*oracle_path);
      if (oracle->size() != x.size()) throw ShapeError("oracle length differs from the input");
    }
    SeparationResult r = separate(x, cfg, oracle);
    pair = std::move(r.pair);
    if (!a.trace.empty()) {
      OutputTarget t(a.trace, out);
      write_trace_csv(t.get(), r.trace);
      t.finish();
    }
  }
  write_wav(a.out_h, pair.harmonic, BitDepth::Float32);
  write_wav(a.out_p, pair.percussive, BitDepth::Float32);
  return kOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string ref_h, ref_p, est_h, est_p, manifest, out, track, method = "est";
  int filter_len = kDefaultFilterLen;
};

HpScores eval_files(const fs::path& ref_h, const fs::path& ref_p, const fs::path& est_h,
                    const fs::path& est_p, int filter_len) {
  const Signal rh = read_wav(ref_h), rp = read_wav(ref_p);
  const Signal eh = read_wav(est_h), ep = read_wav(est_p);
  const std::size_t n = rh.size();
  if (rp.size() != n || eh.size() != n || ep.size() != n) {
    throw ShapeError("reference and estimate lengths differ");
  }
  return bss_eval_hp(rh.view(), rp.view(), eh.view(), ep.view(), filter_len);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    const auto b = f.find_first_not_of(" \t\r");
    const auto e = f.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
  }
  return fields;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.filter_len < 1) throw InvalidArgument("--filter-len must be >= 1");
  OutputTarget target(a.out, out);
  std::ostream& o = target.get();

  if (a.manifest.empty()) {
    if (a.ref_h.empty() || a.ref_p.empty() || a.est_h.empty() || a.est_p.empty()) {
      throw InvalidArgument("eval needs --ref-h, --ref-p, --est-h and --est-p, or --manifest");
    }
    const HpScores s = eval_files(a.ref_h, a.ref_p, a.est_h, a.est_p, a.filter_len);
    const std::string track = a.track.empty() ? fs::path(a.est_h).stem().string() : a.track;
    o << kCsvHeader << '\n';
    write_row(o, track, a.method, s);
    target.finish();
    return kOk;
  }

  // Manifest lines: track,ref_h,ref_p,est_h,est_p[,method]. Relative paths
  // are resolved against the manifest's directory.
  std::ifstream in(a.manifest);
  if (!in) throw IoError("cannot open manifest " + a.manifest);
  const fs::path base = fs::path(a.manifest).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  std::vector<std::string> methods;
  std::map<std::string, std::vector<HpScores>> by_method;
  o << kCsvHeader << '\n';
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto f = split_csv(line);
    if (f.size() < 5 || f.size() > 6) {
      throw InvalidArgument("manifest line " + std::to_string(lineno) +
                            ": expected track,ref_h,ref_p,est_h,est_p[,method]");
    }
    const std::string method = f.size() == 6 ? f[5] : a.method;
    const HpScores s = eval_files(resolve(f[1]), resolve(f[2]), resolve(f[3]), resolve(f[4]),
                                  a.filter_len);
    write_row(o, f[0], method, s);
    if (!by_method.count(method)) methods.push_back(method);
    by_method[method].push_back(s);
  }
  if (methods.empty()) throw InvalidArgument("manifest lists no tracks");
  for (const auto& m : methods) write_row(o, "mean", m, mean_scores(by_method[m]));
  target.finish();
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::uint64_t seed = 7;
  std::size_t tracks = 10;
  double seconds = 3.0;
  int filter_len = kDefaultFilterLen;
  std::string out, trace;
  SolverFlags flags;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  HpssConfig cfg = a.flags.config();
  validate(cfg);
  const auto corpus = synth::corpus(a.seed, a.tracks, a.seconds);

  OutputTarget table(a.out, out);
  std::optional<OutputTarget> trace;
  if (!a.trace.empty()) {
    trace.emplace(a.trace, out);
    trace->get() << "track,method,iteration,total,smooth_term,sparse_term,primal_increment\n"
                 << std::setprecision(17);
  }
  const std::vector<std::string> methods = {"prop-mix", "prop-ora", "mf"};
  std::map<std::string, std::vector<HpScores>> scores;
  table.get() << kCsvHeader << '\n';
  for (const auto& t : corpus) {
    for (const auto& m : methods) {
      SignalPair est;
      if (m == "mf") {
        est = mf_separate(t.mixture, StftConfig::hann(cfg.win_len, cfg.hop), cfg.median);
      } else {
        HpssConfig c = cfg;
        c.if_source = m == "prop-ora" ? IfSource::Oracle : IfSource::Mixture;
        SeparationResult r = separate(t.mixture, c, t.harmonic);
        if (trace) {
          for (const auto& row : r.trace.rows) {
            trace->get() << t.name << ',' << m << ',' << row.iteration << ',' << row.total << ','
                         << row.smooth << ',' << row.sparse << ',' << row.primal_increment << '\n';
          }
        }
        est = std::move(r.pair);
      }
      const HpScores s = bss_eval_hp(t.harmonic.view(), t.percussive.view(),
                                     est.harmonic.view(), est.percussive.view(), a.filter_len);
      write_row(table.get(), t.name, m, s);
      scores[m].push_back(s);
    }
  }
  for (const auto& m : methods) write_row(table.get(), "mean", m, mean_scores(scores[m]));
  table.finish();
  if (trace) trace->finish();
  return kOk;
}

// ---- dump-spec -------------------------------------------------------------

struct DumpArgs {
  std::string input, out, kind = "spec";
  std::size_t win = 4096, hop = 1024;
  double if_eps = kDefaultIfEps;
};

int cmd_dump(const DumpArgs& a) {
  const StftConfig c = StftConfig::hann(a.win, a.hop);
  const Signal x = read_wav(a.input);
  if (a.kind == "spec") {
    dump_spectrogram(a.out, forward(x, c), c);
  } else if (a.kind == "mag") {
    dump_real_grid(a.out, magnitude(forward(x, c)), c);
  } else if (a.kind == "if") {
    dump_real_grid(a.out, estimate_if(x.view(), c, a.if_eps).v, c);
  } else {
    throw InvalidArgument("--kind must be spec, mag or if");
  }
  return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-aware harmonic/percussive source separation"};
  app.name("phasehpss");
  app.require_subcommand(1);

  SeparateArgs sep;
  auto* s = app.add_subcommand("separate", "Split a WAV file into harmonic and percussive parts");
  s->add_option("input", sep.input, "Input WAV file")->required();
  s->add_option("--out-h", sep.out_h, "Harmonic output WAV")->required();
  s->add_option("--out-p", sep.out_p, "Percussive output WAV")->required();
  sep.flags.add_to(*s);
  s->add_option("--if-source", sep.if_source,
                "Instantaneous-frequency source: mix, or oracle:PATH to a harmonic stem")
      ->capture_default_str();
  s->add_option("--method", sep.method, "prop (proposed) or mf (median-filter baseline)")
      ->check(CLI::IsMember({"prop", "mf"}))
      ->capture_default_str();
  s->add_option("--trace", sep.trace, "Write the per-iteration objective trace as CSV");
  s->add_option("--config", sep.config, "key = value file; its entries override the flags");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score estimates against references with BSS-Eval");
  e->add_option("--ref-h", ev.ref_h, "Harmonic reference WAV");
  e->add_option("--ref-p", ev.ref_p, "Percussive reference WAV");
  e->add_option("--est-h", ev.est_h, "Harmonic estimate WAV");
  e->add_option("--est-p", ev.est_p, "Percussive estimate WAV");
  e->add_option("--filter-len", ev.filter_len, "Distortion filter taps")->capture_default_str();
  e->add_option("--manifest", ev.manifest,
                "Batch file of track,ref_h,ref_p,est_h,est_p[,method] lines");
  e->add_option("--track", ev.track, "Track label (default: estimate file stem)");
  e->add_option("--method", ev.method, "Method label")->capture_default_str();
  e->add_option("--out", ev.out, "Write the CSV here instead of stdout");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Compare prop-mix, prop-ora and mf on a synthetic corpus");
  b->add_option("--seed", bn.seed, "Corpus seed")->capture_default_str();
  b->add_option("--tracks", bn.tracks, "Number of mixtures")->capture_default_str();
  b->add_option("--seconds", bn.seconds, "Length of each mixture")->capture_default_str();
  b->add_option("--filter-len", bn.filter_len, "Distortion filter taps")->capture_default_str();
  bn.flags.add_to(*b);
  b->add_option("--out", bn.out, "Write the score table here instead of stdout");
  b->add_option("--trace", bn.trace, "Write the solver traces as CSV");

  DumpArgs dp;
  auto* d = app.add_subcommand("dump-spec", "Write a spectrogram, magnitude or IF map as binary");
  d->add_option("input", dp.input, "Input WAV file")->required();
  d->add_option("--out", dp.out, "Output file")->required();
  d->add_option("--kind", dp.kind, "spec, mag or if")
      ->check(CLI::IsMember({"spec", "mag", "if"}))
      ->capture_default_str();
  d->add_option("--win", dp.win, "Window length")->capture_default_str();
  d->add_option("--hop", dp.hop, "Hop size")->capture_default_str();
  d->add_option("--if-eps", dp.if_eps, "Relative magnitude floor of the IF estimate")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands()[0]->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kBadArgs;
  }

  try {
    if (s->parsed()) return cmd_separate(sep, out);
    if (e->parsed()) return cmd_eval(ev, out);
    if (b->parsed()) return cmd_bench(bn, out);
    if (d->parsed()) return cmd_dump(dp);
  } catch (const DivergenceError& ex) {
    err << "error: " << ex.what() << '\n';
    return kDiverged;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kBadArgs;
  }
  return kBadArgs;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

} // namespace phasehpss::cli
