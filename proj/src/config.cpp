#include "lqml/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lqml/errors.hpp"

namespace lqml {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw ValidationError("config key '" + key + "': invalid value '" + value + "' (" + why + ")");
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) bad(key, v, "expected an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad(key, v, "expected a number");
    return d;
  } catch (const std::logic_error&) {
    bad(key, v, "expected a number");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "expected true or false");
}

Extents parse_extents(const std::string& key, const std::string& v) {
  const auto items = split_list(v);
  if (items.size() != 4) bad(key, v, "expected four comma-separated integers");
  Extents e{};
  for (int i = 0; i < 4; ++i) e[i] = static_cast<int>(parse_int(key, items[i]));
  return e;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string fmt_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "lattice.dims",   "ranks.grid",      "block.b",          "block.layout",
      "dirac.m0",       "gauge.mode",      "clover.mode",      "clover.scale",
      "seed",           "threads",         "solver.tol",       "solver.restart_len",
      "solver.restarts", "solver.odd_even", "solver.fixed_iterations", "bench.warmup",
      "bench.repetitions", "output.format", "output.path"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "lattice.dims") {
    dims = parse_extents(key, v);
  } else if (key == "ranks.grid") {
    grid = parse_extents(key, v);
  } else if (key == "block.b") {
    std::vector<int> out;
    for (const auto& s : split_list(v)) {
      const long long b = parse_int(key, s);
      if (b < 1) bad(key, v, "block sizes must be >= 1");
      out.push_back(static_cast<int>(b));
    }
    if (out.empty()) bad(key, v, "empty list");
    b = out;
  } else if (key == "block.layout") {
    std::vector<Layout> out;
    for (const auto& s : split_list(v)) {
      const long long l = parse_int(key, s);
      if (l != 1 && l != 2) bad(key, v, "layouts are 1 or 2");
      out.push_back(layout_from_int(static_cast<int>(l)));
    }
    if (out.empty()) bad(key, v, "empty list");
    layouts = out;
  } else if (key == "dirac.m0") {
    m0 = parse_double(key, v);
  } else if (key == "gauge.mode") {
    if (v == "random") gauge_mode = GaugeMode::random;
    else if (v == "unit") gauge_mode = GaugeMode::unit;
    else bad(key, v, "expected random or unit");
  } else if (key == "clover.mode") {
    if (v == "random") clover_mode = CloverMode::random_hermitian;
    else if (v == "zero") clover_mode = CloverMode::zero;
    else bad(key, v, "expected random or zero");
  } else if (key == "clover.scale") {
    clover_scale = parse_double(key, v);
    if (clover_scale < 0) bad(key, v, "must be >= 0");
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) bad(key, v, "must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "threads") {
    threads = static_cast<int>(parse_int(key, v));
    if (threads < 0) bad(key, v, "must be >= 0");
  } else if (key == "solver.tol") {
    tol = parse_double(key, v);
    if (!(tol > 0)) bad(key, v, "must be > 0");
  } else if (key == "solver.restart_len") {
    restart_len = static_cast<int>(parse_int(key, v));
    if (restart_len < 1) bad(key, v, "must be >= 1");
  } else if (key == "solver.restarts") {
    restarts = static_cast<int>(parse_int(key, v));
    if (restarts < 1) bad(key, v, "must be >= 1");
  } else if (key == "solver.odd_even") {
    odd_even = parse_bool(key, v);
  } else if (key == "solver.fixed_iterations") {
    fixed_iterations = parse_bool(key, v);
  } else if (key == "bench.warmup") {
    warmup = static_cast<int>(parse_int(key, v));
    if (warmup < 0) bad(key, v, "must be >= 0");
  } else if (key == "bench.repetitions") {
    repetitions = static_cast<int>(parse_int(key, v));
    if (repetitions < 1) bad(key, v, "must be >= 1");
  } else if (key == "output.format") {
    if (v != "json" && v != "csv") bad(key, v, "expected json or csv");
    output_format = v;
  } else if (key == "output.path") {
    output_path = v;
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  for (int mu = 0; mu < 4; ++mu) {
    if (dims[mu] < 2 || dims[mu] % 2 != 0) {
      throw ValidationError("lattice.dims: every extent must be even and >= 2, got " +
                            to_string(dims));
    }
    if (grid[mu] < 1) throw ValidationError("ranks.grid: entries must be >= 1");
    if (dims[mu] % grid[mu] != 0) {
      throw ValidationError("ranks.grid " + to_string(grid) + " does not divide lattice.dims " +
                            to_string(dims));
    }
    const int local = dims[mu] / grid[mu];
    if (local < 2 || local % 2 != 0) {
      throw ValidationError("ranks.grid " + to_string(grid) +
                            " leaves an odd or unit local extent along dimension " +
                            std::to_string(mu));
    }
  }
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::vector<int> lay;
  for (Layout l : layouts) lay.push_back(static_cast<int>(l));
  auto ext = [](const Extents& e) {
    return std::to_string(e[0]) + "," + std::to_string(e[1]) + "," + std::to_string(e[2]) + "," +
           std::to_string(e[3]);
  };
  return {
      {"lattice.dims", ext(dims)},
      {"ranks.grid", ext(grid)},
      {"block.b", join_ints(b)},
      {"block.layout", join_ints(lay)},
      {"dirac.m0", fmt_double(m0)},
      {"gauge.mode", gauge_mode == GaugeMode::random ? "random" : "unit"},
      {"clover.mode", clover_mode == CloverMode::random_hermitian ? "random" : "zero"},
      {"clover.scale", fmt_double(clover_scale)},
      {"seed", std::to_string(seed)},
      {"threads", std::to_string(threads)},
      {"solver.tol", fmt_double(tol)},
      {"solver.restart_len", std::to_string(restart_len)},
      {"solver.restarts", std::to_string(restarts)},
      {"solver.odd_even", odd_even ? "true" : "false"},
      {"solver.fixed_iterations", fixed_iterations ? "true" : "false"},
      {"bench.warmup", std::to_string(warmup)},
      {"bench.repetitions", std::to_string(repetitions)},
      {"output.format", output_format},
      {"output.path", output_path},
  };
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : to_map()) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

}  // namespace lqml
