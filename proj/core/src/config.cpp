#include "ebrus/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ebrus {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"domain", {"dim", "L1", "L2", "L3", "modes"}},
      {"parameters", {"d1", "d2", "d3", "D1", "D2", "D3", "a", "b", "k", "lambda", "N"}},
      {"integrator",
       {"dt", "scheme", "t_end", "sample_every", "store_every", "adaptive", "safety"}},
      {"analysis",
       {"ensemble", "tail_fraction", "tol_rel", "m_max", "renorm_every", "discard_time", "qstar",
        "embedding_samples", "scale_bounds", "sweep_param", "sweep_values", "out", "seed",
        "initial", "radius", "initial_modes", "checkpoint"}},
  };
  return s;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t bd = static_cast<std::size_t>(-1);
  for (const auto& c : candidates) {
    const std::size_t d = levenshtein(key, c);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Reads one key into `out`; failures are appended to `errs`.
class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& errs) : tree_(tree), errs_(errs) {}

  const pt::ptree* section(const std::string& name) const {
    auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const pt::ptree* s = section(sec);
    if (!s) return std::nullopt;
    auto it = s->find(key);
    if (it == s->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  void number(const std::string& sec, const std::string& key, double& out) {
    auto r = raw(sec, key);
    if (!r) return;
    if (*r == "pi") {
      out = std::numbers::pi;
      return;
    }
    try {
      std::size_t pos = 0;
      const double v = std::stod(*r, &pos);
      if (pos != r->size()) throw std::invalid_argument("trailing");
      out = v;
    } catch (const std::exception&) {
      errs_.push_back(sec + "." + key + ": '" + *r + "' is not a number");
    }
  }

  template <class Int>
  void integer(const std::string& sec, const std::string& key, Int& out) {
    auto r = raw(sec, key);
    if (!r) return;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(*r, &pos);
      if (pos != r->size()) throw std::invalid_argument("trailing");
      out = static_cast<Int>(v);
    } catch (const std::exception&) {
      errs_.push_back(sec + "." + key + ": '" + *r + "' is not an integer");
    }
  }

  void u64(const std::string& sec, const std::string& key, std::uint64_t& out) {
    auto r = raw(sec, key);
    if (!r) return;
    try {
      std::size_t pos = 0;
      if (!r->empty() && (*r)[0] == '-') throw std::invalid_argument("negative");
      const unsigned long long v = std::stoull(*r, &pos);
      if (pos != r->size()) throw std::invalid_argument("trailing");
      out = v;
    } catch (const std::exception&) {
      errs_.push_back(sec + "." + key + ": '" + *r + "' is not an unsigned integer");
    }
  }

  void boolean(const std::string& sec, const std::string& key, bool& out) {
    auto r = raw(sec, key);
    if (!r) return;
    if (*r == "true" || *r == "1" || *r == "yes") {
      out = true;
    } else if (*r == "false" || *r == "0" || *r == "no") {
      out = false;
    } else {
      errs_.push_back(sec + "." + key + ": '" + *r + "' is not a boolean");
    }
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& errs_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void collect_violations(const RunConfig& c, std::vector<std::string>& errs) {
  if (c.domain.dim < 1 || c.domain.dim > 3) errs.push_back("domain.dim must be 1, 2 or 3");
  for (int i = 0; i < 3; ++i) {
    if (!(c.domain.lengths[i] > 0.0) || !std::isfinite(c.domain.lengths[i])) {
      errs.push_back("domain.L" + std::to_string(i + 1) + " must be positive");
    }
  }
  if (c.modes < 1) errs.push_back("domain.modes must be >= 1");
  const auto& names = Coefficients::names();
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) {
    const double v = c.coefficients[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      errs.push_back("parameters." + std::string(names[i]) + " = " + fmt(v) +
                     ": all reaction-diffusion coefficients must be positive constants");
    }
  }
  const auto& ic = c.integrator;
  if (!(ic.dt > 0.0)) errs.push_back("integrator.dt must be positive");
  if (!(ic.t_end > 0.0)) errs.push_back("integrator.t_end must be positive");
  if (ic.sample_every < 1) errs.push_back("integrator.sample_every must be >= 1");
  if (ic.store_every < 0) errs.push_back("integrator.store_every must be >= 0");
  if (!(ic.safety > 0.0)) errs.push_back("integrator.safety must be positive");
  if (c.ensemble < 1) errs.push_back("analysis.ensemble must be >= 1");
  if (!(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0)) {
    errs.push_back("analysis.tail_fraction must lie in (0, 1]");
  }
  if (!(c.tol_rel >= 0.0)) errs.push_back("analysis.tol_rel must be >= 0");
  if (c.m_max < 1) errs.push_back("analysis.m_max must be >= 1");
  if (c.renorm_every < 1) errs.push_back("analysis.renorm_every must be >= 1");
  if (!(c.discard_time >= 0.0)) errs.push_back("analysis.discard_time must be >= 0");
  if (!(c.qstar > 0.0)) errs.push_back("analysis.qstar must be positive");
  if (c.embedding_samples < 1000) errs.push_back("analysis.embedding_samples must be >= 1000");
  if (!(c.scale_bounds > 0.0)) errs.push_back("analysis.scale_bounds must be positive");
  if (!(c.initial.radius > 0.0)) errs.push_back("analysis.radius must be positive");
  if (c.initial.kind == InitialKind::Checkpoint && c.initial.checkpoint.empty()) {
    errs.push_back("analysis.checkpoint is required when initial = checkpoint");
  }
  for (const auto& mv : c.initial.modes) {
    if (mv.component < 0 || mv.component >= kComponents || mv.mode < 0) {
      errs.push_back("analysis.initial_modes: bad entry for component " +
                     std::to_string(mv.component) + ", mode " + std::to_string(mv.mode));
    }
  }
  if (!c.sweep_param.empty()) {
    const auto& n = Coefficients::names();
    if (std::find_if(n.begin(), n.end(), [&](const char* s) { return c.sweep_param == s; }) ==
        n.end()) {
      errs.push_back("analysis.sweep_param '" + c.sweep_param + "' is not a parameter name");
    }
    if (c.sweep_values.empty()) errs.push_back("analysis.sweep_values is empty");
  }
  if (c.out_dir.empty()) errs.push_back("analysis.out must not be empty");
}

std::string describe(const std::vector<std::string>& v) {
  std::string s = "invalid configuration (" + std::to_string(v.size()) + " problem" +
                  (v.size() == 1 ? "" : "s") + "):";
  for (const auto& e : v) s += "\n  - " + e;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error("shell", describe(violations)), violations_(std::move(violations)) {}

const std::vector<std::string>& config_keys(const std::string& section) {
  static const std::vector<std::string> none;
  auto it = schema().find(section);
  return it == schema().end() ? none : it->second;
}

void validate(const RunConfig& cfg) {
  std::vector<std::string> errs;
  collect_violations(cfg, errs);
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }

  std::vector<std::string> errs;
  std::vector<std::string> sections;
  for (const auto& [k, v] : schema()) sections.push_back(k);
  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) {
      errs.push_back("key '" + name + "' outside of any section");
      continue;
    }
    if (!schema().count(name)) {
      errs.push_back("unknown section [" + name + "]; did you mean [" + nearest(name, sections) +
                     "]?");
      continue;
    }
    const auto& keys = schema().at(name);
    for (const auto& [key, val] : sec) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        errs.push_back("unknown key '" + key + "' in [" + name + "]; did you mean '" +
                       nearest(key, keys) + "'?");
      }
    }
  }

  RunConfig c;
  Reader r(tree, errs);
  r.integer("domain", "dim", c.domain.dim);
  r.number("domain", "L1", c.domain.lengths[0]);
  r.number("domain", "L2", c.domain.lengths[1]);
  r.number("domain", "L3", c.domain.lengths[2]);
  r.integer("domain", "modes", c.modes);
  const auto& names = Coefficients::names();
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) {
    r.number("parameters", names[i], c.coefficients[i]);
  }
  r.number("integrator", "dt", c.integrator.dt);
  if (auto s = r.raw("integrator", "scheme")) {
    try {
      c.integrator.scheme = scheme_from_string(*s);
    } catch (const Error& e) {
      errs.push_back(std::string("integrator.scheme: ") + e.what());
    }
  }
  r.number("integrator", "t_end", c.integrator.t_end);
  r.integer("integrator", "sample_every", c.integrator.sample_every);
  r.integer("integrator", "store_every", c.integrator.store_every);
  r.boolean("integrator", "adaptive", c.integrator.adaptive);
  r.number("integrator", "safety", c.integrator.safety);

  r.integer("analysis", "ensemble", c.ensemble);
  r.number("analysis", "tail_fraction", c.tail_fraction);
  r.number("analysis", "tol_rel", c.tol_rel);
  r.integer("analysis", "m_max", c.m_max);
  r.integer("analysis", "renorm_every", c.renorm_every);
  r.number("analysis", "discard_time", c.discard_time);
  r.number("analysis", "qstar", c.qstar);
  r.integer("analysis", "embedding_samples", c.embedding_samples);
  r.number("analysis", "scale_bounds", c.scale_bounds);
  if (auto s = r.raw("analysis", "sweep_param")) c.sweep_param = *s;
  if (auto s = r.raw("analysis", "sweep_values")) {
    c.sweep_values.clear();
    for (const auto& tok : split(*s, ',')) {
      try {
        c.sweep_values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        errs.push_back("analysis.sweep_values: '" + tok + "' is not a number");
      }
    }
  }
  if (auto s = r.raw("analysis", "out")) c.out_dir = *s;
  r.u64("analysis", "seed", c.seed);
  if (auto s = r.raw("analysis", "initial")) {
    if (*s == "random") {
      c.initial.kind = InitialKind::Random;
    } else if (*s == "modes") {
      c.initial.kind = InitialKind::Modes;
    } else if (*s == "checkpoint") {
      c.initial.kind = InitialKind::Checkpoint;
    } else {
      errs.push_back("analysis.initial: '" + *s + "' (expected random, modes or checkpoint)");
    }
  }
  r.number("analysis", "radius", c.initial.radius);
  if (auto s = r.raw("analysis", "initial_modes")) {
    // component:mode:value entries separated by ';'
    for (const auto& tok : split(*s, ';')) {
      const auto parts = split(tok, ':');
      try {
        if (parts.size() != 3) throw std::invalid_argument("shape");
        c.initial.modes.push_back({std::stoi(parts[0]), std::stoi(parts[1]), std::stod(parts[2])});
      } catch (const std::exception&) {
        errs.push_back("analysis.initial_modes: '" + tok + "' is not component:mode:value");
      }
    }
  }
  if (auto s = r.raw("analysis", "checkpoint")) c.initial.checkpoint = *s;

  collect_violations(c, errs);
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("shell", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[domain]\n"
    << "dim = " << c.domain.dim << "\n"
    << "L1 = " << fmt(c.domain.lengths[0]) << "\n"
    << "L2 = " << fmt(c.domain.lengths[1]) << "\n"
    << "L3 = " << fmt(c.domain.lengths[2]) << "\n"
    << "modes = " << c.modes << "\n\n[parameters]\n";
  const auto& names = Coefficients::names();
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) {
    o << names[i] << " = " << fmt(c.coefficients[i]) << "\n";
  }
  const auto& ic = c.integrator;
  o << "\n[integrator]\n"
    << "dt = " << fmt(ic.dt) << "\n"
    << "scheme = " << to_string(ic.scheme) << "\n"
    << "t_end = " << fmt(ic.t_end) << "\n"
    << "sample_every = " << ic.sample_every << "\n"
    << "store_every = " << ic.store_every << "\n"
    << "adaptive = " << (ic.adaptive ? "true" : "false") << "\n"
    << "safety = " << fmt(ic.safety) << "\n\n[analysis]\n"
    << "ensemble = " << c.ensemble << "\n"
    << "tail_fraction = " << fmt(c.tail_fraction) << "\n"
    << "tol_rel = " << fmt(c.tol_rel) << "\n"
    << "m_max = " << c.m_max << "\n"
    << "renorm_every = " << c.renorm_every << "\n"
    << "discard_time = " << fmt(c.discard_time) << "\n"
    << "qstar = " << fmt(c.qstar) << "\n"
    << "embedding_samples = " << c.embedding_samples << "\n"
    << "scale_bounds = " << fmt(c.scale_bounds) << "\n";
  if (!c.sweep_param.empty()) o << "sweep_param = " << c.sweep_param << "\n";
  if (!c.sweep_values.empty()) {
    o << "sweep_values = ";
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
      o << (i ? ", " : "") << fmt(c.sweep_values[i]);
    }
    o << "\n";
  }
  o << "out = " << c.out_dir << "\n"
    << "seed = " << c.seed << "\n";
  const char* kinds[] = {"random", "modes", "checkpoint"};
  o << "initial = " << kinds[static_cast<int>(c.initial.kind)] << "\n"
    << "radius = " << fmt(c.initial.radius) << "\n";
  if (!c.initial.modes.empty()) {
    o << "initial_modes = ";
    for (std::size_t i = 0; i < c.initial.modes.size(); ++i) {
      const auto& m = c.initial.modes[i];
      o << (i ? "; " : "") << m.component << ":" << m.mode << ":" << fmt(m.value);
    }
    o << "\n";
  }
  if (!c.initial.checkpoint.empty()) o << "checkpoint = " << c.initial.checkpoint << "\n";
  return o.str();
}

}  // namespace ebrus
