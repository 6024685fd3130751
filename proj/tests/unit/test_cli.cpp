#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "phasehpss/audio_io.hpp"
#include "phasehpss/baseline.hpp"
#include "phasehpss/stft.hpp"
#include "phasehpss/synth.hpp"

using namespace phasehpss;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Scratch directory holding a short mixture and its stems, all inside [-1, 1].
struct Fixture {
  fs::path dir;
  fs::path mix, harm, perc;
  Signal x, h, p;

  Fixture() {
    dir = fs::temp_directory_path() / "phasehpss_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::size_t n = 16000;
    auto t = synth::mix_equal_energy("t", synth::on_bin_sinusoid(24, 512, n, 16000, 0.5, 0.4),
                                     synth::impulse_train(n, 4000, 1500, 16000));
    const double g = 0.9 / max_abs(t.mixture.view());
    for (Signal* s : {&t.harmonic, &t.percussive, &t.mixture}) {
      for (auto& v : s->samples) v = static_cast<float>(v * g);
    }
    // keep the float32 mixture equal to the float32 stems' sum
    for (std::size_t i = 0; i < n; ++i) {
      t.mixture.samples[i] = static_cast<float>(t.harmonic.samples[i] + t.percussive.samples[i]);
    }
    x = t.mixture;
    h = t.harmonic;
    p = t.percussive;
    mix = dir / "mix.wav";
    harm = dir / "harm.wav";
    perc = dir / "perc.wav";
    write_wav(mix, x);
    write_wav(harm, h);
    write_wav(perc, p);
  }
  ~Fixture() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::string> small(std::vector<std::string> args) {
  for (const char* a : {"--win", "512", "--hop", "128"}) args.push_back(a);
  return args;
}

} // namespace

TEST_CASE("separate with defaults writes two files that sum to the input") {
  Fixture f;
  const Run r = cli_run({"separate", f.mix.string(), "--out-h", f.path("h.wav"), "--out-p",
                         f.path("p.wav")});
  REQUIRE(r.code == 0);
  const Signal h = read_wav(f.path("h.wav"));
  const Signal p = read_wav(f.path("p.wav"));
  REQUIRE(h.size() == f.x.size());
  CHECK(h.sample_rate == 16000);
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(std::abs(h.samples[i] + p.samples[i] - f.x.samples[i]) <= std::ldexp(1.0, -23));
  }
}

TEST_CASE("separate --method mf and --iters 0 give the median-filter split") {
  Fixture f;
  const SignalPair mf = mf_separate(f.x, StftConfig::hann(512, 128), MedianConfig{});
  for (auto extra : {std::vector<std::string>{"--method", "mf"},
                     std::vector<std::string>{"--iters", "0"}}) {
    auto args = small({"separate", f.mix.string(), "--out-h", f.path("h.wav"), "--out-p",
                       f.path("p.wav")});
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(cli_run(args).code == 0);
    const Signal h = read_wav(f.path("h.wav"));
    for (std::size_t i = 0; i < h.size(); ++i) {
      CHECK(h.samples[i] == static_cast<float>(mf.harmonic.samples[i]));
    }
  }
}

TEST_CASE("config file entries override flags") {
  Fixture f;
  std::ofstream(f.path("cfg.txt")) << "n_iters = 0\nwin_len = 512\nhop = 128\n";
  REQUIRE(cli_run({"separate", f.mix.string(), "--out-h", f.path("h.wav"), "--out-p",
                   f.path("p.wav"), "--iters", "50", "--config", f.path("cfg.txt")})
              .code == 0);
  const SignalPair mf = mf_separate(f.x, StftConfig::hann(512, 128), MedianConfig{});
  const Signal h = read_wav(f.path("h.wav"));
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(h.samples[i] == static_cast<float>(mf.harmonic.samples[i]));
  }
}

TEST_CASE("separate with an oracle IF source and a trace") {
  Fixture f;
  const Run r = cli_run(small({"separate", f.mix.string(), "--out-h", f.path("h.wav"), "--out-p",
                               f.path("p.wav"), "--iters", "5", "--if-source",
                               "oracle:" + f.harm.string(), "--trace", f.path("trace.csv")}));
  REQUIRE(r.code == 0);
  std::ifstream in(f.path("trace.csv"));
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line == "iteration,total,smooth_term,sparse_term,primal_increment");
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 5);
}

TEST_CASE("separate exit codes") {
  Fixture f;
  const std::string h = f.path("h.wav"), p = f.path("p.wav");
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", h}).code == 1);
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", h, "--out-p", p, "--bogus"}).code == 1);
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", h, "--out-p", p, "--alpha", "2.5"}).code == 1);
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", h, "--out-p", p, "--if-source", "psychic"})
            .code == 1);
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", h, "--out-p", p, "--method", "nmf"}).code == 1);
  CHECK(cli_run({"separate", f.path("missing.wav"), "--out-h", h, "--out-p", p}).code == 2);
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", f.path("no/such/dir/h.wav"), "--out-p", p})
            .code == 2);
  CHECK(cli_run({"separate", f.mix.string(), "--out-h", h, "--out-p", p, "--config",
                 f.path("missing.cfg")})
            .code == 2);
  CHECK(cli_run({}).code == 1);
  // Steps far beyond the stability bound blow the iterates up.
  CHECK(cli_run(small({"separate", f.mix.string(), "--out-h", h, "--out-p", p, "--mu1", "1e8",
                       "--mu2", "1e8", "--alpha", "1.9"}))
            .code == 3);
}

TEST_CASE("help lists every flag with its default") {
  const Run r = cli_run({"separate", "--help"});
  CHECK(r.code == 0);
  for (const char* flag : {"--out-h", "--out-p", "--lambda", "--kappa", "--iters", "--mu1", "--mu2",
                           "--alpha", "--win", "--hop", "--if-source", "--method", "--trace",
                           "--config"}) {
    CHECK(r.out.find(flag) != std::string::npos);
  }
  for (const char* def : {"0.5", "0.001", "100", "0.25", "4096", "1024", "mix", "prop"}) {
    CHECK(r.out.find(def) != std::string::npos);
  }
  const Run top = cli_run({"--help"});
  CHECK(top.code == 0);
  for (const char* cmd : {"separate", "eval", "bench", "dump-spec"}) {
    CHECK(top.out.find(cmd) != std::string::npos);
  }
}

TEST_CASE("eval of perfect estimates") {
  Fixture f;
  const Run r = cli_run({"eval", "--ref-h", f.harm.string(), "--ref-p", f.perc.string(), "--est-h",
                         f.harm.string(), "--est-p", f.perc.string(), "--filter-len", "16"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "track,method,SDR_h,SIR_h,SAR_h,SDR_p,SIR_p,SAR_p,SDR_avg,SIR_avg,SAR_avg");
  std::stringstream ss(row);
  std::string field;
  std::getline(ss, field, ',');
  CHECK(field == "harm");
  std::getline(ss, field, ',');
  int values = 0;
  while (std::getline(ss, field, ',')) {
    CHECK(std::stod(field) >= 100.0);
    ++values;
  }
  CHECK(values == 9);
}

TEST_CASE("eval of swapped estimates has negative SIR") {
  Fixture f;
  const Run r = cli_run({"eval", "--ref-h", f.harm.string(), "--ref-p", f.perc.string(), "--est-h",
                         f.perc.string(), "--est-p", f.harm.string(), "--filter-len", "16"});
  REQUIRE(r.code == 0);
  const std::string row = r.out.substr(r.out.find('\n') + 1);
  std::stringstream ss(row);
  std::vector<std::string> fields;
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 11);
  CHECK(std::stod(fields[3]) < 0.0);
  CHECK(std::stod(fields[6]) < 0.0);
}

TEST_CASE("eval errors") {
  Fixture f;
  write_wav(f.path("short.wav"), Signal{std::vector<double>(100, 0.1), 16000});
  CHECK(cli_run({"eval", "--ref-h", f.harm.string(), "--ref-p", f.perc.string(), "--est-h",
                 f.path("short.wav"), "--est-p", f.perc.string()})
            .code == 1);
  CHECK(cli_run({"eval", "--ref-h", f.harm.string()}).code == 1);
  CHECK(cli_run({"eval", "--manifest", f.path("missing.txt")}).code == 2);
}

TEST_CASE("eval manifest appends the mean row") {
  Fixture f;
  std::ofstream(f.path("manifest.txt")) << "# three tracks\n"
                                         << "a,harm.wav,perc.wav,harm.wav,perc.wav\n"
                                         << "b,harm.wav,perc.wav,mix.wav,perc.wav\n"
                                         << "c,harm.wav,perc.wav,harm.wav,mix.wav\n";
  const Run r = cli_run({"eval", "--manifest", f.path("manifest.txt"), "--filter-len", "8",
                         "--method", "x"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    names.push_back(field);
    std::getline(ss, field, ',');
    CHECK(field == "x");
    rows.emplace_back();
    while (std::getline(ss, field, ',')) rows.back().push_back(std::stod(field));
  }
  REQUIRE(names == std::vector<std::string>{"a", "b", "c", "mean"});
  for (std::size_t j = 0; j < 9; ++j) {
    const double mean = (rows[0][j] + rows[1][j] + rows[2][j]) / 3.0;
    CHECK(rows[3][j] == Catch::Approx(mean).margin(2e-4));
  }
}

TEST_CASE("bench is bit-deterministic") {
  Fixture f;
  auto args = [&](const std::string& tag) {
    return small({"bench", "--tracks", "2", "--seconds", "0.5", "--iters", "3", "--filter-len",
                  "8", "--out", f.path("table" + tag + ".csv"), "--trace",
                  f.path("trace" + tag + ".csv")});
  };
  REQUIRE(cli_run(args("1")).code == 0);
  REQUIRE(cli_run(args("2")).code == 0);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string t1 = slurp(f.path("table1.csv"));
  CHECK(t1 == slurp(f.path("table2.csv")));
  CHECK(slurp(f.path("trace1.csv")) == slurp(f.path("trace2.csv")));
  for (const char* m : {"mean,prop-mix", "mean,prop-ora", "mean,mf"}) {
    CHECK(t1.find(m) != std::string::npos);
  }
  // 2 tracks x 2 proposed variants x 3 iterations, plus the header
  const std::string tr = slurp(f.path("trace1.csv"));
  CHECK(std::count(tr.begin(), tr.end(), '\n') == 13);
}

TEST_CASE("dump-spec writes loadable dumps") {
  Fixture f;
  for (const char* kind : {"spec", "mag", "if"}) {
    REQUIRE(cli_run({"dump-spec", f.mix.string(), "--out", f.path("d.bin"), "--kind", kind, "--win",
                     "256", "--hop", "64"})
                .code == 0);
    const SpectrogramDump d = load_dump(f.path("d.bin"));
    CHECK(d.win_len == 256);
    CHECK(d.hop == 64);
    CHECK(d.spec.bins() == 129);
    CHECK(d.spec.frames() == StftConfig::hann(256, 64).n_frames(f.x.size()));
    CHECK(d.complex_payload == (std::string(kind) == "spec"));
  }
  CHECK(cli_run({"dump-spec", f.mix.string(), "--out", f.path("d.bin"), "--kind", "phase"}).code == 1);
}
