#include "qcawalk/experiment.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "qcawalk/errors.hpp"
#include "qcawalk/metrics.hpp"
#include "qcawalk/rng.hpp"

#ifndef QCAWALK_VERSION
#define QCAWALK_VERSION "0.0.0"
#endif

namespace qcaw {

using nlohmann::json;

namespace {

// ------------------------------------------------------------- line index

// Maps JSON pointers ("/runs/0/steps") to the 1-based line where the value
// (or its key) starts. The text is already known to be valid JSON.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : s_(text) {
    skip_ws();
    value("");
  }

  int line_of(const std::string& ptr) const {
    // fall back to the closest recorded ancestor
    std::string p = ptr;
    while (true) {
      if (const auto it = lines_.find(p); it != lines_.end()) return it->second;
      if (p.empty()) return 1;
      p.erase(p.rfind('/'));
    }
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') {
        out += s_[i_++];
      }
      out += s_[i_++];
    }
    ++i_;
    return out;
  }

  void value(const std::string& ptr) {
    lines_.emplace(ptr, line_);
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      while (i_ < s_.size() && s_[i_] != '}') {
        const int key_line = line_;
        const std::string key = string_token();
        skip_ws();
        ++i_;  // ':'
        skip_ws();
        const std::string child = ptr + "/" + key;
        lines_[child] = key_line;
        const int keep = key_line;
        value(child);
        lines_[child] = keep;
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') {
          ++i_;
          skip_ws();
        }
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip_ws();
      for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(ptr + "/" + std::to_string(k));
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') {
          ++i_;
          skip_ws();
        }
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != ',' &&
             s_[i_] != '}' && s_[i_] != ']') {
        ++i_;
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// ---------------------------------------------------------- field reader

struct Ctx {
  const LineIndex* lines = nullptr;
};

std::string display_path(const std::string& ptr) {
  std::string out;
  std::size_t pos = 1;
  while (pos <= ptr.size() && !ptr.empty()) {
    const auto next = ptr.find('/', pos);
    const std::string tok = ptr.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!tok.empty() && std::all_of(tok.begin(), tok.end(), ::isdigit)) {
      out += "[" + tok + "]";
    } else {
      out += (out.empty() ? "" : ".") + tok;
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out.empty() ? "<root>" : out;
}

[[noreturn]] void fail(const Ctx& ctx, const std::string& ptr, const std::string& msg) {
  throw ConfigError("line " + std::to_string(ctx.lines->line_of(ptr)) + ": field " +
                    display_path(ptr) + ": " + msg);
}

class Obj {
 public:
  Obj(const Ctx& ctx, const json& j, std::string ptr, std::initializer_list<const char*> allowed)
      : ctx_(ctx), j_(j), ptr_(std::move(ptr)) {
    if (!j.is_object()) fail(ctx_, ptr_, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!ok.contains(k)) fail(ctx_, ptr_ + "/" + k, "unknown key");
    }
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  const json& at(const std::string& k) const { return j_.at(k); }
  std::string ptr(const std::string& k) const { return ptr_ + "/" + k; }
  const Ctx& ctx() const { return ctx_; }

  void require(const std::string& k) const {
    if (!has(k)) fail(ctx_, ptr_ + "/" + k, "required key missing");
  }

  std::int64_t integer(const std::string& k, std::int64_t def, std::int64_t min) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (!v.is_number_integer()) fail(ctx_, ptr(k), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < min) fail(ctx_, ptr(k), "must be >= " + std::to_string(min));
    return x;
  }

  std::uint64_t unsigned_int(const std::string& k, std::uint64_t def) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (!v.is_number_unsigned()) fail(ctx_, ptr(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  double number(const std::string& k, double def, double min) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (!v.is_number()) fail(ctx_, ptr(k), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < min) fail(ctx_, ptr(k), "must be finite and >= " + std::to_string(min));
    return x;
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    if (!at(k).is_boolean()) fail(ctx_, ptr(k), "expected true or false");
    return at(k).get<bool>();
  }

  std::string string(const std::string& k, const std::string& def) const {
    if (!has(k)) return def;
    if (!at(k).is_string()) fail(ctx_, ptr(k), "expected a string");
    return at(k).get<std::string>();
  }

  std::string choice(const std::string& k, const std::string& def,
                     std::initializer_list<const char*> options) const {
    const std::string v = string(k, def);
    for (const char* o : options) {
      if (v == o) return v;
    }
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    fail(ctx_, ptr(k), "expected one of {" + list + "}, got \"" + v + "\"");
  }

 private:
  const Ctx& ctx_;
  const json& j_;
  std::string ptr_;
};

std::pair<int, int> parse_site(const Ctx& ctx, const json& v, const std::string& ptr) {
  if (v.is_number_integer()) {
    const auto x = v.get<std::int64_t>();
    if (x < 0) fail(ctx, ptr, "vertex must be >= 0");
    return {static_cast<int>(x), -1};  // -1: plain vertex id
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer() &&
      v[0].get<std::int64_t>() >= 0 && v[1].get<std::int64_t>() >= 0) {
    return {v[0].get<int>(), v[1].get<int>()};
  }
  fail(ctx, ptr, "expected a vertex id or [i, j] coordinates");
}

NoiseSpec parse_noise(const Ctx& ctx, const json& v, const std::string& ptr) {
  NoiseSpec spec;
  if (v.is_string()) {
    if (v.get<std::string>() != "calibrate") fail(ctx, ptr, "expected an object or \"calibrate\"");
    spec.calibrate = true;
    return spec;
  }
  const Obj o(ctx, v, ptr, {"K", "delta", "sqrt_iswap_ns", "single_qubit_ns", "idle_decay", "calibrate"});
  spec.model.relaxation_rate = o.number("K", 0.0, 0.0);
  spec.model.dephasing_rate = o.number("delta", 0.0, 0.0);
  const double sq_ns = o.number("sqrt_iswap_ns", 25.0, 0.0);
  const double sg_ns = o.number("single_qubit_ns", 8.0, 0.0);
  if (sq_ns <= 0.0) fail(ctx, o.ptr("sqrt_iswap_ns"), "must be > 0");
  if (sg_ns <= 0.0) fail(ctx, o.ptr("single_qubit_ns"), "must be > 0");
  spec.model.gamma = std::numbers::pi / (4.0 * sq_ns * 1e-9);
  spec.model.single_qubit_duration = sg_ns * 1e-9;
  spec.model.idle_decay = o.boolean("idle_decay", true);
  spec.calibrate = o.boolean("calibrate", false);
  return spec;
}

Backend parse_backend(const Ctx& ctx, const json& v, const std::string& ptr) {
  Backend b;
  const std::string bptr = ptr;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "statevector") return b;
    if (s == "density") {
      b.kind = BackendKind::density;
      return b;
    }
    if (s == "trajectories") {
      b.kind = BackendKind::trajectories;
      return b;
    }
    fail(ctx, ptr, "unknown backend \"" + s + "\"");
  }
  const Obj o(ctx, v, ptr, {"kind", "n_traj", "density_cap"});
  o.require("kind");
  const auto kind = o.choice("kind", "", {"statevector", "density", "trajectories"});
  b.kind = kind == "statevector"   ? BackendKind::statevector
           : kind == "density"     ? BackendKind::density
                                   : BackendKind::trajectories;
  b.n_traj = o.unsigned_int("n_traj", b.n_traj);
  if (b.n_traj == 0) fail(ctx, o.ptr("n_traj"), "must be >= 1");
  b.density_cap = static_cast<int>(o.integer("density_cap", b.density_cap, 1));
  return b;
}

RunSpec parse_run(const Ctx& ctx, const json& v, const std::string& ptr) {
  const Obj o(ctx, v, ptr,
              {"id", "lattice", "variant", "steps", "init", "marked", "theta", "backends", "noise",
               "bitstrings"});
  RunSpec r;
  o.require("id");
  r.id = o.string("id", "");
  if (r.id.empty() || !std::all_of(r.id.begin(), r.id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
      })) {
    fail(ctx, o.ptr("id"), "must be non-empty and use only [A-Za-z0-9_.-]");
  }

  o.require("lattice");
  {
    const Obj l(ctx, o.at("lattice"), o.ptr("lattice"), {"kind", "size", "sizes"});
    l.require("kind");
    r.lattice = l.choice("kind", "", {"cycle", "torus"}) == "cycle" ? Lattice::Kind::cycle
                                                                   : Lattice::Kind::torus;
    if (l.has("size") == l.has("sizes")) fail(ctx, l.ptr("size"), "give exactly one of size / sizes");
    auto check = [&](const json& s, const std::string& p) {
      if (!s.is_number_integer()) fail(ctx, p, "expected an integer");
      const auto n = s.get<std::int64_t>();
      if (n < 4 || n % 2 != 0 || n > 30) fail(ctx, p, "size must be even and in [4, 30]");
      r.sizes.push_back(static_cast<int>(n));
    };
    if (l.has("size")) {
      check(l.at("size"), l.ptr("size"));
    } else {
      const auto& arr = l.at("sizes");
      if (!arr.is_array() || arr.empty()) fail(ctx, l.ptr("sizes"), "expected a non-empty array");
      for (std::size_t k = 0; k < arr.size(); ++k) check(arr[k], l.ptr("sizes") + "/" + std::to_string(k));
    }
  }

  r.variant = o.choice("variant", "walk", {"walk", "search"}) == "walk" ? Variant::walk : Variant::search;
  if (o.has("steps")) r.steps = static_cast<int>(o.integer("steps", 0, 0));
  if (o.has("init")) {
    const Obj in(ctx, o.at("init"), o.ptr("init"), {"kind", "site", "mode"});
    if (in.has("kind")) {
      const auto k = in.choice("kind", "", {"single", "symmetric", "search_uniform"});
      r.init = k == "single" ? InitKind::single : k == "symmetric" ? InitKind::symmetric
                                                                   : InitKind::search_uniform;
    }
    if (in.has("site")) r.init_site = parse_site(ctx, in.at("site"), in.ptr("site"));
    r.init_mode = in.choice("mode", "exact", {"exact", "literal"}) == "exact" ? InitializerMode::exact
                                                                             : InitializerMode::literal;
  }
  if (o.has("marked")) {
    if (r.variant != Variant::search) fail(ctx, o.ptr("marked"), "only allowed with variant \"search\"");
    r.marked = parse_site(ctx, o.at("marked"), o.ptr("marked"));
  }
  r.theta = o.number("theta", r.theta, -1e9);
  if (o.has("backends")) {
    const auto& arr = o.at("backends");
    if (!arr.is_array() || arr.empty()) fail(ctx, o.ptr("backends"), "expected a non-empty array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      r.backends.push_back(parse_backend(ctx, arr[k], o.ptr("backends") + "/" + std::to_string(k)));
    }
  } else {
    r.backends.push_back(Backend{});
  }
  if (o.has("noise")) r.noise = parse_noise(ctx, o.at("noise"), o.ptr("noise"));
  r.bitstrings = o.boolean("bitstrings", false);
  return r;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int resolve_site(const Lattice& lat, std::pair<int, int> site, const std::string& what) {
  const auto [i, j] = site;
  try {
    if (j < 0) {
      if (!lat.contains(i)) throw DomainError("out of range");
      return i;
    }
    return lat.vertex_id(i, j);
  } catch (const DomainError&) {
    throw ConfigError(what + " outside " + lat.name());
  }
}

json dist_json(const Distribution& d) {
  json o = json::object();
  for (const auto& [k, p] : d.probabilities()) o[k.label(d.bit_width())] = p;
  return o;
}

json counts_json(const Distribution& d) {
  json o = json::object();
  for (const auto& [k, c] : d.counts()) o[k.label(d.bit_width())] = c;
  return o;
}

std::vector<Distribution> exact_series(const WalkResult& r) {
  std::vector<Distribution> out;
  for (const auto& s : r.per_step) out.push_back(s.exact);
  return out;
}

}  // namespace

// ----------------------------------------------------------------- parsing

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // locate the byte offset
    int line = 1;
    for (std::size_t k = 0; k < std::min<std::size_t>(e.byte, text.size()); ++k) {
      if (text[k] == '\n') ++line;
    }
    throw ConfigError("line " + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const LineIndex lines(text);
  const Ctx ctx{&lines};
  const Obj o(ctx, doc, "",
              {"schema_version", "name", "seed", "shots", "output_dir", "formats", "noise", "runs"});

  ExperimentConfig c;
  o.require("schema_version");
  c.schema_version = static_cast<int>(o.integer("schema_version", 0, 0));
  if (c.schema_version != kConfigSchemaVersion) {
    fail(ctx, o.ptr("schema_version"),
         "unsupported version " + std::to_string(c.schema_version) + " (expected " +
             std::to_string(kConfigSchemaVersion) + ")");
  }
  c.name = o.string("name", "experiment");
  c.seed = o.unsigned_int("seed", 0);
  c.shots = o.unsigned_int("shots", 10000);
  c.output_dir = o.string("output_dir", "");
  if (o.has("formats")) {
    const auto& f = o.at("formats");
    if (!f.is_array()) fail(ctx, o.ptr("formats"), "expected an array");
    c.write_csv = false;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::string p = o.ptr("formats") + "/" + std::to_string(k);
      if (!f[k].is_string()) fail(ctx, p, "expected a string");
      const auto s = f[k].get<std::string>();
      if (s == "csv") {
        c.write_csv = true;
      } else if (s != "json") {
        fail(ctx, p, "unknown format \"" + s + "\" (json, csv)");
      }
    }
  }
  if (o.has("noise")) c.noise = parse_noise(ctx, o.at("noise"), o.ptr("noise"));
  o.require("runs");
  const auto& runs = o.at("runs");
  if (!runs.is_array() || runs.empty()) fail(ctx, o.ptr("runs"), "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const std::string p = o.ptr("runs") + "/" + std::to_string(k);
    c.runs.push_back(parse_run(ctx, runs[k], p));
    if (!ids.insert(c.runs.back().id).second) fail(ctx, p + "/id", "duplicate run id");
  }
  c.source = std::move(doc);

  // Semantic checks that need the resolved lattice, one run at a time so the
  // diagnostic can point at it.
  for (std::size_t k = 0; k < c.runs.size(); ++k) {
    ExperimentConfig one;
    one.noise = c.noise;
    one.runs = {c.runs[k]};
    try {
      expand_points(one);
    } catch (const ConfigError& e) {
      fail(ctx, "/runs/" + std::to_string(k), e.what());
    } catch (const DomainError& e) {
      fail(ctx, "/runs/" + std::to_string(k), e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const ExperimentConfig& config) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << fnv1a(config.source.dump());
  return os.str();
}

int workers_from_env() {
  const char* v = std::getenv(kWorkersEnv);
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) {
    throw ConfigError(std::string(kWorkersEnv) + " must be an integer in [1, 1024], got \"" + v + "\"");
  }
  return static_cast<int>(n);
}

// --------------------------------------------------------------- expansion

std::vector<RunPoint> expand_points(const ExperimentConfig& config) {
  std::vector<RunPoint> points;
  std::optional<NoiseModel> calibrated;
  auto resolve_noise = [&](const NoiseSpec& spec) {
    if (!spec.calibrate) return spec.model;
    NoiseModel templ = spec.model;
    auto res = calibrate_rates(reference_gate_fidelities(), templ);
    return res.model;
  };

  for (std::size_t ri = 0; ri < config.runs.size(); ++ri) {
    const RunSpec& run = config.runs[ri];
    const NoiseSpec& nspec = run.noise ? *run.noise : config.noise;
    std::optional<NoiseModel> noise;

    std::vector<Backend> backends = run.backends;
    const bool noisy = std::any_of(backends.begin(), backends.end(),
                                   [](const Backend& b) { return b.kind != BackendKind::statevector; });
    const bool has_ideal = std::any_of(backends.begin(), backends.end(), [](const Backend& b) {
      return b.kind == BackendKind::statevector;
    });
    // Noisy runs are always scored against the ideal one.
    if (noisy && !has_ideal) backends.insert(backends.begin(), Backend{});

    for (std::size_t si = 0; si < run.sizes.size(); ++si) {
      const int size = run.sizes[si];
      const Lattice lat =
          run.lattice == Lattice::Kind::cycle ? Lattice::cycle(size) : Lattice::torus(size);
      const std::uint64_t point_seed =
          derive_seed(derive_seed(config.seed, StreamTag::run, ri), StreamTag::run, si);

      for (std::size_t bi = 0; bi < backends.size(); ++bi) {
        const Backend& b = backends[bi];
        RunPoint p;
        p.run_index = ri;
        p.size = size;
        p.bitstrings = run.bitstrings;
        p.id = run.id + "/" + lat.name() + "/" + to_string(b.kind);
        WalkConfig& w = p.walk;
        w.lattice = lat;
        w.variant = run.variant;
        w.steps = run.steps.value_or(run.lattice == Lattice::Kind::cycle ? 50 : 20);
        w.init_mode = run.init_mode;
        w.walk_theta = run.theta;
        w.shots = config.shots;
        w.seed = derive_seed(point_seed, StreamTag::run, bi);
        w.backend = b;
        w.record_bitstrings = run.bitstrings;
        if (b.kind != BackendKind::statevector) {
          if (!noise) {
            if (nspec.calibrate && !calibrated) calibrated = resolve_noise(nspec);
            noise = nspec.calibrate ? *calibrated : nspec.model;
          }
          w.noise = *noise;
        } else {
          // timings still matter for the gate list; rates do not
          w.noise = nspec.model;
          w.noise.relaxation_rate = 0.0;
          w.noise.dephasing_rate = 0.0;
        }
        if (run.variant == Variant::search) {
          w.marked = run.marked ? resolve_site(lat, *run.marked, "marked vertex")
                                : (run.lattice == Lattice::Kind::cycle ? 2 : lat.vertex_id(3 % size, 0));
          w.init = run.init.value_or(InitKind::search_uniform);
        } else {
          w.init = run.init.value_or(InitKind::symmetric);
        }
        if (w.init != InitKind::search_uniform) {
          const int mid = size / 2 - 1;
          w.init_vertex = run.init_site
                              ? resolve_site(lat, *run.init_site, "init site")
                              : (run.lattice == Lattice::Kind::cycle ? mid : lat.vertex_id(mid, mid));
        }
        try {
          w.validate();
        } catch (const DomainError& e) {
          throw ConfigError(run.id + ": " + e.what());
        } catch (const ConfigError& e) {
          throw ConfigError(run.id + ": " + e.what());
        }
        if (b.kind == BackendKind::density && lat.vertex_count() > b.density_cap) {
          throw ConfigError(run.id + ": density backend is capped at " + std::to_string(b.density_cap) +
                            " qubits but " + lat.name() + " has " +
                            std::to_string(lat.vertex_count()) +
                            "; use backend \"trajectories\" for this lattice");
        }
        points.push_back(std::move(p));
      }
    }
  }
  return points;
}

// --------------------------------------------------------------- execution

nlohmann::json noise_json(const NoiseModel& n) {
  return {{"K", n.relaxation_rate},
          {"delta", n.dephasing_rate},
          {"sqrt_iswap_ns", std::numbers::pi / (4.0 * n.gamma) * 1e9},
          {"single_qubit_ns", n.single_qubit_duration * 1e9},
          {"idle_decay", n.idle_decay}};
}

nlohmann::json calibration_json(const CalibrationResult& r) {
  json j;
  j["noise"] = noise_json(r.model);
  j["target"] = r.target;
  j["achieved"] = r.achieved;
  j["residual"] = r.residual;
  j["max_abs_residual"] = r.max_abs_residual;
  j["within_tolerance"] = r.within_tolerance;
  return j;
}

namespace {

json point_json(const RunPoint& p, const WalkResult& r, const WalkResult* ideal) {
  const WalkConfig& w = p.walk;
  json j;
  j["id"] = p.id;
  j["lattice"] = {{"kind", w.lattice.kind() == Lattice::Kind::cycle ? "cycle" : "torus"},
                  {"size", w.lattice.side()},
                  {"vertices", w.lattice.vertex_count()},
                  {"name", w.lattice.name()}};
  j["variant"] = to_string(w.variant);
  j["backend"] = {{"kind", to_string(w.backend.kind)}};
  if (w.backend.kind == BackendKind::trajectories) j["backend"]["n_traj"] = w.backend.n_traj;
  if (w.backend.kind == BackendKind::density) j["backend"]["density_cap"] = w.backend.density_cap;
  j["noise"] = noise_json(w.noise);
  j["steps"] = w.steps;
  j["shots"] = w.shots;
  j["seed"] = w.seed;
  j["marked"] = w.marked ? json(*w.marked) : json(nullptr);
  json init = {{"kind", to_string(w.init)},
               {"mode", to_string(w.init_mode)},
               {"two_qubit_gates", r.init_two_qubit_gates}};
  if (w.init != InitKind::search_uniform) init["site"] = w.init_vertex;
  json amps = json::array();
  for (const auto& a : r.init_sector_amplitudes) amps.push_back({a.real(), a.imag()});
  init["sector_amplitudes"] = amps;
  j["init"] = init;
  j["step_two_qubit_gates"] = r.step_two_qubit_gates;
  if (w.backend.kind == BackendKind::trajectories) j["trajectory_jumps"] = r.trajectory_jumps;

  json steps = json::array();
  for (std::size_t t = 0; t < r.per_step.size(); ++t) {
    const auto& s = r.per_step[t];
    json e = {{"step", t}, {"exact", dist_json(s.exact)}, {"leakage", s.leakage}};
    if (s.empirical) e["counts"] = counts_json(*s.empirical);
    if (s.bitstrings) e["bitstrings"] = dist_json(*s.bitstrings);
    steps.push_back(std::move(e));
  }
  j["per_step"] = std::move(steps);

  // metrics
  json m = json::object();
  const auto exact = exact_series(r);
  if (w.variant == Variant::search) {
    const int v = *w.marked;
    std::vector<double> mp;
    for (const auto& d : exact) mp.push_back(d.prob(Outcome::vertex(static_cast<std::uint64_t>(v))));
    m["marked_probability"] = mp;
    const Peak peak = success_probability(exact, v);
    m["success_probability"] = peak.probability;
    m["hitting_time"] = peak.step;
    const Selectivity sel = selectivity(exact[static_cast<std::size_t>(peak.step)], v);
    m["selectivity"] = sel.infinite ? json(nullptr) : json(sel.value);
    m["selectivity_infinite"] = sel.infinite;
    if (ideal != nullptr) {
      const Peak ip = success_probability(exact_series(*ideal), v);
      if (ip.probability > 0.0) m["degraded_ratio"] = degraded_ratio(peak.probability, ip.probability);
    }
  }
  if (ideal != nullptr) {
    const auto ref = exact_series(*ideal);
    m["hellinger_fidelity"] = hellinger_series(ref, exact).values;
    m["l1_distance"] = l1_series(ref, exact).values;
    if (w.shots > 0) {
      std::vector<Distribution> emp;
      for (const auto& s : r.per_step) emp.push_back(*s.empirical);
      m["hellinger_fidelity_empirical"] = hellinger_series(ref, emp).values;
      m["l1_distance_empirical"] = l1_series(ref, emp).values;
    }
    if (p.bitstrings) {
      std::vector<Distribution> a;
      std::vector<Distribution> b;
      for (const auto& s : ideal->per_step) a.push_back(*s.bitstrings);
      for (const auto& s : r.per_step) b.push_back(*s.bitstrings);
      m["hellinger_fidelity_bitstring"] = hellinger_series(a, b).values;
      m["l1_distance_bitstring"] = l1_series(a, b).values;
    }
    m["reference"] = p.id.substr(0, p.id.rfind('/')) + "/statevector";
  }
  j["metrics"] = std::move(m);
  return j;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, int workers) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<RunPoint> points = expand_points(config);
  const int pool = std::min<int>(workers, static_cast<int>(points.size()));
  for (auto& p : points) p.walk.workers = pool > 1 ? std::max(1, workers / pool) : workers;

  std::vector<std::optional<WalkResult>> results(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= points.size()) return;
      {
        std::lock_guard lk(mu);
        if (error) return;
      }
      try {
        results[k] = run_walk(points[k].walk);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < pool; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  // ideal reference for each (run, size)
  std::map<std::pair<std::size_t, int>, std::size_t> ideal_of;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].walk.backend.kind == BackendKind::statevector) {
      ideal_of.emplace(std::make_pair(points[k].run_index, points[k].size), k);
    }
  }

  ExperimentOutput out;
  json& res = out.results;
  res["schema_version"] = kRecordSchemaVersion;
  res["tool"] = "qcawalk";
  res["tool_version"] = QCAWALK_VERSION;
  res["name"] = config.name;
  res["config_hash"] = config_hash(config);
  res["seed"] = config.seed;
  res["config"] = config.source;
  res["runs"] = json::array();
  json timings = json::array();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const WalkResult* ideal = nullptr;
    if (points[k].walk.backend.kind != BackendKind::statevector) {
      ideal = &*results[ideal_of.at({points[k].run_index, points[k].size})];
    }
    res["runs"].push_back(point_json(points[k], *results[k], ideal));
    timings.push_back({{"id", points[k].id}, {"seconds", results[k]->elapsed_seconds}});
  }

  // size sweeps of search runs: hitting-time and peak trends
  res["sweeps"] = json::array();
  for (std::size_t ri = 0; ri < config.runs.size(); ++ri) {
    const RunSpec& run = config.runs[ri];
    if (run.variant != Variant::search || run.sizes.size() < 2) continue;
    std::map<std::string, std::vector<std::size_t>> by_backend;
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (points[k].run_index == ri) by_backend[to_string(points[k].walk.backend.kind)].push_back(k);
    }
    for (const auto& [backend, ks] : by_backend) {
      json sw;
      sw["run"] = run.id;
      sw["backend"] = backend;
      std::vector<double> n;
      std::vector<double> ht;
      std::vector<double> sp;
      json pts = json::array();
      for (const std::size_t k : ks) {
        const auto ex = exact_series(*results[k]);
        const Peak peak = success_probability(ex, *points[k].walk.marked);
        const int v = points[k].walk.lattice.vertex_count();
        n.push_back(v);
        ht.push_back(peak.step);
        sp.push_back(peak.probability);
        pts.push_back({{"size", points[k].size},
                       {"vertices", v},
                       {"hitting_time", peak.step},
                       {"success_probability", peak.probability}});
      }
      sw["points"] = pts;
      const LinearFit lf = fit_linear(n, ht);
      sw["hitting_time_fit"] = {{"slope", lf.slope}, {"intercept", lf.intercept}, {"r_squared", lf.r_squared}};
      const InverseFit inv = fit_inverse(n, sp);
      sw["success_probability_fit"] = {
          {"c", inv.c}, {"residuals", inv.residuals}, {"rms_residual", inv.rms_residual}};
      res["sweeps"].push_back(std::move(sw));
    }
  }

  out.timings["config_hash"] = res["config_hash"];
  out.timings["workers"] = workers;
  out.timings["runs"] = timings;
  out.timings["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_outputs(const std::filesystem::path& dir, const ExperimentOutput& out) {
  std::filesystem::create_directories(dir);
  auto write_atomic = [&](const std::string& name, const json& j) {
    const auto target = dir / name;
    const auto tmp = dir / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw ResourceError("cannot write " + tmp.string());
      f << j.dump(1) << '\n';
      if (!f) throw ResourceError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  };
  write_atomic("results.json", out.results);
  write_atomic("timings.json", out.timings);
}

}  // namespace qcaw
