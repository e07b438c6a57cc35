#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netembed/csv.hpp"
#include "netembed/errors.hpp"
#include "netembed/metrics.hpp"
#include "netembed/netsim.hpp"

namespace netembed {

enum class ExperimentKind {
  MeanWidth,
  Embedding,
  Recovery,
  Covering,
  SampleSize,
  FullSweep
};

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::MeanWidth: return "meanwidth";
    case ExperimentKind::Embedding: return "embedding";
    case ExperimentKind::Recovery: return "recovery";
    case ExperimentKind::Covering: return "covering";
    case ExperimentKind::SampleSize: return "samplesize";
    case ExperimentKind::FullSweep: return "fullsweep";
  }
  return "?";
}

// Flat key = value config with [section] headers. Every key is known and
// validated before any computation; unknown keys are parse errors.
struct ExperimentConfig {
  std::optional<ExperimentKind> experiment;
  std::string out_dir = "out";

  // model
  ModelKind model_kind = ModelKind::GMM;
  int n = 128;
  int k = 4;
  int L = 3;
  bool centers = false;
  int points = 200;

  // layers
  std::vector<int> m_list = {64, 256, 1024};
  ActivationKind activation = ActivationKind::ReLU;
  double slope = 1.0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  int depth = 1;
  bool renormalize = true;

  // metrics
  PreMetric pre_metric = PreMetric::Geodesic;
  PostMetric post_metric = PostMetric::HammingVariant;
  std::vector<double> eps_list = {0.25, 0.5, 1.0};
  double slack = 2.0;

  // width
  int probes = 20000;
  int width_cloud = 512;

  // recovery
  int trials = 20;
  int max_iter = 200;
  double step = 0.0;  // 0 = auto
  double tol = 1e-10;

  // samplesize
  double eps = 0.5;
  double bound_constant = 1.0;

  // seeds
  std::uint64_t master_seed = 1;
  int replicates = 5;

  // run
  int threads = 1;
  bool quiet = false;

  ActivationSpec activation_spec() const {
    switch (activation) {
      case ActivationKind::ReLU: return relu();
      case ActivationKind::Identity: return identity_activation();
      case ActivationKind::TruncatedLinear:
        return truncated_linear(slope, lower, upper);
    }
    return relu();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline ConfigError key_error(int line, const std::string& section,
                             const std::string& key, const std::string& what) {
  return ConfigError("line " + std::to_string(line) + ": key '" + section +
                     "." + key + "': " + what);
}

inline bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes") {
    out = true;
    return true;
  }
  if (v == "false" || v == "0" || v == "no") {
    out = false;
    return true;
  }
  return false;
}

inline bool parse_int(const std::string& v, int& out) {
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  const auto r = std::from_chars(begin, end, out);
  return r.ec == std::errc{} && r.ptr == end;
}

inline bool parse_u64(const std::string& v, std::uint64_t& out) {
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  const auto r = std::from_chars(begin, end, out);
  return r.ec == std::errc{} && r.ptr == end;
}

inline bool parse_double(const std::string& v, double& out) {
  if (v == "inf" || v == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (v == "-inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  try {
    std::size_t used = 0;
    out = std::stod(v, &used);
    return used == v.size();
  } catch (...) {
    return false;
  }
}

template <typename T, typename Parser>
std::vector<T> parse_list(const std::string& v, Parser parse, bool& ok) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  ok = true;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    T value;
    if (item.empty() || !parse(item, value)) {
      ok = false;
      return out;
    }
    out.push_back(value);
  }
  if (out.empty()) ok = false;
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header '" + line + "'");
      section = detail::trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known = {
          "experiment", "model", "layers",     "metrics",
          "width",      "recovery", "samplesize", "seeds",
          "run"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                        "' appears before any [section]");
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) +
                        ": empty key or value");

    auto bad = [&](const std::string& what) {
      return detail::key_error(line_no, section, key, what + " (got '" + value + "')");
    };
    bool ok = true;

    if (section == "experiment") {
      if (key == "kind") {
        if (value == "meanwidth") cfg.experiment = ExperimentKind::MeanWidth;
        else if (value == "embedding") cfg.experiment = ExperimentKind::Embedding;
        else if (value == "recovery") cfg.experiment = ExperimentKind::Recovery;
        else if (value == "covering") cfg.experiment = ExperimentKind::Covering;
        else if (value == "samplesize") cfg.experiment = ExperimentKind::SampleSize;
        else if (value == "fullsweep") cfg.experiment = ExperimentKind::FullSweep;
        else throw bad("expected one of meanwidth/embedding/recovery/covering/samplesize/fullsweep");
      } else if (key == "out") {
        cfg.out_dir = value;
      } else {
        throw detail::key_error(line_no, section, key, "unknown key");
      }
    } else if (section == "model") {
      if (key == "kind") {
        if (value == "gmm") cfg.model_kind = ModelKind::GMM;
        else if (value == "uos") cfg.model_kind = ModelKind::UnionOfSubspaces;
        else throw bad("expected gmm/uos");
      } else if (key == "n") ok = detail::parse_int(value, cfg.n);
      else if (key == "k") ok = detail::parse_int(value, cfg.k);
      else if (key == "L") ok = detail::parse_int(value, cfg.L);
      else if (key == "centers") ok = detail::parse_bool(value, cfg.centers);
      else if (key == "points") ok = detail::parse_int(value, cfg.points);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a number");
    } else if (section == "layers") {
      if (key == "m_list")
        cfg.m_list = detail::parse_list<int>(value, detail::parse_int, ok);
      else if (key == "activation") {
        if (value == "relu") cfg.activation = ActivationKind::ReLU;
        else if (value == "identity") cfg.activation = ActivationKind::Identity;
        else if (value == "truncated") cfg.activation = ActivationKind::TruncatedLinear;
        else throw bad("expected relu/identity/truncated");
      } else if (key == "slope") ok = detail::parse_double(value, cfg.slope);
      else if (key == "lower") ok = detail::parse_double(value, cfg.lower);
      else if (key == "upper") ok = detail::parse_double(value, cfg.upper);
      else if (key == "depth") ok = detail::parse_int(value, cfg.depth);
      else if (key == "renormalize") ok = detail::parse_bool(value, cfg.renormalize);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a valid value");
    } else if (section == "metrics") {
      if (key == "pre") {
        if (value == "euclidean") cfg.pre_metric = PreMetric::Euclidean;
        else if (value == "geodesic") cfg.pre_metric = PreMetric::Geodesic;
        else throw bad("expected euclidean/geodesic");
      } else if (key == "post") {
        if (value == "euclidean") cfg.post_metric = PostMetric::Euclidean;
        else if (value == "hamming") cfg.post_metric = PostMetric::HammingVariant;
        else throw bad("expected euclidean/hamming");
      } else if (key == "eps_list")
        cfg.eps_list = detail::parse_list<double>(value, detail::parse_double, ok);
      else if (key == "slack") ok = detail::parse_double(value, cfg.slack);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a valid value");
    } else if (section == "width") {
      if (key == "probes") ok = detail::parse_int(value, cfg.probes);
      else if (key == "cloud") ok = detail::parse_int(value, cfg.width_cloud);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a number");
    } else if (section == "recovery") {
      if (key == "trials") ok = detail::parse_int(value, cfg.trials);
      else if (key == "max_iter") ok = detail::parse_int(value, cfg.max_iter);
      else if (key == "step") {
        if (value == "auto") cfg.step = 0.0;
        else ok = detail::parse_double(value, cfg.step);
      } else if (key == "tol") ok = detail::parse_double(value, cfg.tol);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a number or 'auto'");
    } else if (section == "samplesize") {
      if (key == "eps") ok = detail::parse_double(value, cfg.eps);
      else if (key == "constant") ok = detail::parse_double(value, cfg.bound_constant);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a number");
    } else if (section == "seeds") {
      if (key == "master") ok = detail::parse_u64(value, cfg.master_seed);
      else if (key == "replicates") ok = detail::parse_int(value, cfg.replicates);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a number");
    } else if (section == "run") {
      if (key == "threads") ok = detail::parse_int(value, cfg.threads);
      else if (key == "quiet") ok = detail::parse_bool(value, cfg.quiet);
      else throw detail::key_error(line_no, section, key, "unknown key");
      if (!ok) throw bad("expected a valid value");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// Field-level validation, run before any computation.
inline void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
  };
  if (cfg.n < 1) fail("model.n", "must be >= 1");
  if (cfg.k < 1) fail("model.k", "must be >= 1");
  if (cfg.k > cfg.n)
    fail("model.k", "k = " + std::to_string(cfg.k) + " exceeds n = " +
                        std::to_string(cfg.n));
  if (cfg.L < 1) fail("model.L", "must be >= 1");
  if (cfg.points < 2) fail("model.points", "must be >= 2");
  if (cfg.model_kind == ModelKind::UnionOfSubspaces && cfg.centers)
    fail("model.centers", "union-of-subspaces components are centerless");
  if (cfg.model_kind == ModelKind::ExplicitCloud)
    fail("model.kind", "explicit clouds are not config-expressible");
  if (cfg.m_list.empty()) fail("layers.m_list", "must be nonempty");
  for (int m : cfg.m_list)
    if (m < 1) fail("layers.m_list", "entries must be >= 1");
  if (!std::is_sorted(cfg.m_list.begin(), cfg.m_list.end()))
    fail("layers.m_list", "must be ascending");
  if (cfg.activation == ActivationKind::TruncatedLinear) {
    if (!(cfg.slope > 0.0 && cfg.slope <= 1.0))
      fail("layers.slope", "must lie in (0, 1]");
    if (cfg.lower > 0.0) fail("layers.lower", "must be <= 0");
    if (cfg.upper < 0.0) fail("layers.upper", "must be >= 0");
  }
  if (cfg.depth < 1) fail("layers.depth", "must be >= 1");
  for (double e : cfg.eps_list)
    if (!(e > 0.0)) fail("metrics.eps_list", "entries must be > 0");
  if (cfg.eps_list.empty()) fail("metrics.eps_list", "must be nonempty");
  if (cfg.slack < 1.0) fail("metrics.slack", "must be >= 1");
  if (cfg.probes < 1) fail("width.probes", "must be >= 1");
  if (cfg.width_cloud < 2) fail("width.cloud", "must be >= 2");
  if (cfg.trials < 10) fail("recovery.trials", "must be >= 10");
  if (cfg.max_iter < 1) fail("recovery.max_iter", "must be >= 1");
  if (cfg.step < 0.0) fail("recovery.step", "must be >= 0 (0 = auto)");
  if (cfg.tol < 0.0) fail("recovery.tol", "must be >= 0");
  if (!(cfg.eps > 0.0)) fail("samplesize.eps", "must be > 0");
  if (!(cfg.bound_constant > 0.0)) fail("samplesize.constant", "must be > 0");
  if (cfg.replicates < 1) fail("seeds.replicates", "must be >= 1");
  if (cfg.threads < 1) fail("run.threads", "must be >= 1");
}

// Deterministic echo of every field, used for the manifest and the hash.
inline std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::string s;
  auto add = [&](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  s += "[experiment]\n";
  add("kind", cfg.experiment ? to_string(*cfg.experiment) : "unset");
  add("out", cfg.out_dir);
  s += "[model]\n";
  add("kind", to_string(cfg.model_kind));
  add("n", std::to_string(cfg.n));
  add("k", std::to_string(cfg.k));
  add("L", std::to_string(cfg.L));
  add("centers", cfg.centers ? "true" : "false");
  add("points", std::to_string(cfg.points));
  s += "[layers]\n";
  std::string ms;
  for (std::size_t i = 0; i < cfg.m_list.size(); ++i)
    ms += (i ? "," : "") + std::to_string(cfg.m_list[i]);
  add("m_list", ms);
  add("activation", to_string(cfg.activation));
  add("slope", format_double(cfg.slope));
  add("lower", format_double(cfg.lower));
  add("upper", format_double(cfg.upper));
  add("depth", std::to_string(cfg.depth));
  add("renormalize", cfg.renormalize ? "true" : "false");
  s += "[metrics]\n";
  add("pre", to_string(cfg.pre_metric));
  add("post", to_string(cfg.post_metric));
  std::string es;
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
    es += (i ? "," : "") + format_double(cfg.eps_list[i]);
  add("eps_list", es);
  add("slack", format_double(cfg.slack));
  s += "[width]\n";
  add("probes", std::to_string(cfg.probes));
  add("cloud", std::to_string(cfg.width_cloud));
  s += "[recovery]\n";
  add("trials", std::to_string(cfg.trials));
  add("max_iter", std::to_string(cfg.max_iter));
  add("step", cfg.step == 0.0 ? "auto" : format_double(cfg.step));
  add("tol", format_double(cfg.tol));
  s += "[samplesize]\n";
  add("eps", format_double(cfg.eps));
  add("constant", format_double(cfg.bound_constant));
  s += "[seeds]\n";
  add("master", format_u64(cfg.master_seed));
  add("replicates", std::to_string(cfg.replicates));
  s += "[run]\n";
  add("threads", std::to_string(cfg.threads));
  add("quiet", cfg.quiet ? "true" : "false");
  return s;
}

// FNV-1a over the canonical text. Thread count, verbosity, and destination
// directory are execution details, not experiment identity, so they are
// masked before hashing.
inline std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig keyed = cfg;
  keyed.threads = 1;
  keyed.quiet = false;
  keyed.out_dir = "out";
  const std::string text = canonical_config_text(keyed);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xF];
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace netembed
