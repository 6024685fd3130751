#include <charconv>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

#include "phasehpss/error.hpp"
#include "phasehpss/hpss.hpp"

namespace phasehpss {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(v), &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + std::string(key) + "': not a number: " +
                          std::string(v));
  }
}

long to_int(std::string_view key, std::string_view v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidArgument("config key '" + std::string(key) + "': not an integer: " +
                          std::string(v));
  }
  return out;
}

} // namespace

HpssConfig parse_config(std::istream& in, HpssConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(s.substr(0, eq));
    const auto val = trim(s.substr(eq + 1));

    if (key == "win_len") cfg.win_len = static_cast<std::size_t>(to_int(key, val));
    else if (key == "hop") cfg.hop = static_cast<std::size_t>(to_int(key, val));
    else if (key == "kappa") cfg.kappa = to_double(key, val);
    else if (key == "lambda") cfg.solver.lambda = to_double(key, val);
    else if (key == "mu1") cfg.solver.mu1 = to_double(key, val);
    else if (key == "mu2") cfg.solver.mu2 = to_double(key, val);
    else if (key == "alpha") cfg.solver.alpha = to_double(key, val);
    else if (key == "n_iters") cfg.solver.n_iters = static_cast<int>(to_int(key, val));
    else if (key == "harm_kernel") cfg.median.harm_kernel = static_cast<int>(to_int(key, val));
    else if (key == "perc_kernel") cfg.median.perc_kernel = static_cast<int>(to_int(key, val));
    else if (key == "mask_power") cfg.median.mask_power = to_double(key, val);
    else if (key == "if_eps") cfg.if_eps = to_double(key, val);
    else if (key == "if_source") {
      if (val == "mixture" || val == "mix") cfg.if_source = IfSource::Mixture;
      else if (val == "oracle") cfg.if_source = IfSource::Oracle;
      else throw InvalidArgument("config key 'if_source' must be mixture or oracle");
    } else {
      throw InvalidArgument("unknown config key '" + std::string(key) + "'");
    }
  }
  validate(cfg);
  return cfg;
}

HpssConfig load_config(const std::filesystem::path& path, HpssConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

} // namespace phasehpss
