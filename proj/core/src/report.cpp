#include "ebrus/report.hpp"

#include <cstdio>

#include "ebrus/error.hpp"
#include "json.hpp"

namespace ebrus {

using nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Non-finite doubles become strings so the document stays valid JSON.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double unnum(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw Error("shell", "report: bad number '" + s + "'");
}

json mag(const Magnitude& m) {
  json j = {{"level", m.level()}, {"x", num(m.x())}};
  j["value"] = m.representable() ? num(m.x()) : json(nullptr);
  j["display"] = m.str(8);
  return j;
}

Magnitude unmag(const json& j) { return Magnitude::tower(j.at("level").get<int>(), unnum(j.at("x"))); }

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> unvec(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(unnum(x));
  return v;
}

json verdict(const BoundVerdict& v) {
  return {{"name", v.name},         {"observable", v.observable}, {"t_tail", num(v.t_tail)},
          {"t_end", num(v.t_end)},  {"observed", num(v.observed)}, {"bound", mag(v.bound)},
          {"margin", num(v.margin)}, {"runs", v.runs},           {"violations", v.violations},
          {"pass", v.pass}};
}

BoundVerdict unverdict(const json& j) {
  BoundVerdict v;
  v.name = j.at("name");
  v.observable = j.at("observable");
  v.t_tail = unnum(j.at("t_tail"));
  v.t_end = unnum(j.at("t_end"));
  v.observed = unnum(j.at("observed"));
  v.bound = unmag(j.at("bound"));
  v.margin = unnum(j.at("margin"));
  v.runs = j.at("runs");
  v.violations = j.at("violations");
  v.pass = j.at("pass");
  return v;
}

json bounds(const BoundSet& b) {
  json e = json::array();
  for (const auto& en : b.entries()) {
    json x = mag(en.value);
    x["name"] = en.name;
    x["formula"] = en.formula;
    e.push_back(x);
  }
  json coeffs = json::object();
  const auto& names = Coefficients::names();
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) coeffs[names[i]] = num(b.coefficients[i]);
  return {{"coefficients", coeffs},
          {"inputs",
           {{"dim", b.inputs.dim},
            {"gamma", num(b.inputs.gamma)},
            {"volume", num(b.inputs.volume)},
            {"delta", num(b.inputs.delta)},
            {"eta", num(b.inputs.eta)}}},
          {"sup_factor", num(b.sup_factor)},
          {"scale", num(b.scale)},
          {"entries", e}};
}

BoundSet unbounds(const json& j) {
  BoundSet b;
  const auto& names = Coefficients::names();
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) {
    b.coefficients[i] = unnum(j.at("coefficients").at(names[i]));
  }
  const auto& in = j.at("inputs");
  b.inputs.dim = in.at("dim");
  b.inputs.gamma = unnum(in.at("gamma"));
  b.inputs.volume = unnum(in.at("volume"));
  b.inputs.delta = unnum(in.at("delta"));
  b.inputs.eta = unnum(in.at("eta"));
  b.sup_factor = unnum(j.at("sup_factor"));
  b.scale = unnum(j.at("scale"));
  for (const auto& e : j.at("entries")) {
    const std::string n = e.at("name");
    const Magnitude m = unmag(e);
    if (n == "R0") b.R0 = m.x();
    else if (n == "R1") b.R1 = m.x();
    else if (n == "R2") b.R2 = m.x();
    else if (n == "K1") b.K1 = m.x();
    else if (n == "K2") b.K2 = m.x();
    else if (n == "K3") b.K3 = m.x();
    else if (n == "C14") b.C14 = m.x();
    else if (n == "C15") b.C15 = m.x();
    else if (n == "C16") b.C16 = m.x();
    else if (n == "C18") b.C18 = m.x();
    else if (n == "Q1") b.Q1 = m;
    else if (n == "C17") b.C17 = m;
    else if (n == "Q2") b.Q2 = m;
  }
  return b;
}

}  // namespace

std::string to_json(const Report& r, int indent) {
  json j;
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["config"] = r.config_text;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["runtime_seconds"] = num(r.runtime_seconds);
  j["threads"] = r.threads;
  j["exit_status"] = r.exit_status;
  if (r.embedding) {
    const auto& e = *r.embedding;
    j["embedding"] = {{"delta", num(e.delta)}, {"eta", num(e.eta)}, {"c_gn", num(e.c_gn)},
                      {"samples", e.samples},  {"seed", e.seed},
                      {"note", "subspace lower witnesses, not certified constants"}};
  }
  if (r.bounds) j["bounds"] = bounds(*r.bounds);
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict(v));
  j["residuals"] = json::array();
  for (const auto& c : r.residuals) {
    j["residuals"].push_back({{"name", c.name},
                              {"evaluated", c.evaluated},
                              {"max_excess", num(c.max_excess)},
                              {"worst_ratio", num(c.worst_ratio)},
                              {"rhs_at_worst", num(c.rhs_at_worst)},
                              {"tol_rel", num(c.tol_rel)},
                              {"pass", c.pass}});
  }
  j["lyapunov"] = json::array();
  for (const auto& l : r.lyapunov) {
    j["lyapunov"].push_back({{"exponents", vec(l.exponents)},
                             {"qm", vec(l.qm)},
                             {"qm_first", vec(l.qm_first)},
                             {"qm_second", vec(l.qm_second)},
                             {"m_star", l.m_star},
                             {"kaplan_yorke", num(l.kaplan_yorke)},
                             {"averaging_time", num(l.averaging_time)},
                             {"renormalizations", l.renormalizations},
                             {"renorm_every", l.renorm_every},
                             {"min_log_diag", num(l.min_log_diag)}});
  }
  if (r.qm) {
    j["qm"] = {{"qm", vec(r.qm->qm)},
               {"m_star", r.qm->m_star},
               {"runs", r.qm->runs},
               {"note", "ensemble maximum: a lower witness of the sup over the attractor"}};
  }
  if (r.dimension) {
    const auto& d = *r.dimension;
    j["dimension"] = {{"B", mag(d.B)},   {"m", mag(d.m)},   {"d_H_bound", mag(d.dH)},
                      {"d_F_bound", mag(d.dF)}, {"Q3", mag(d.Q3)}, {"Qstar", num(d.Qstar)}};
  }
  j["sweep"] = json::array();
  for (const auto& row : r.sweep) {
    json vs = json::array();
    for (const auto& v : row.verdicts) vs.push_back(verdict(v));
    j["sweep"].push_back({{"value", num(row.value)}, {"verdicts", vs}});
  }
  return j.dump(indent);
}

Report report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("shell", std::string("report is not valid JSON: ") + e.what());
  }
  try {
    Report r;
    r.schema_version = j.at("schema_version");
    r.command = j.at("command");
    r.config_text = j.at("config");
    r.config_hash = j.at("config_hash");
    r.seed = j.at("seed");
    r.runtime_seconds = unnum(j.at("runtime_seconds"));
    r.threads = j.at("threads");
    r.exit_status = j.at("exit_status");
    if (j.contains("embedding")) {
      EmbeddingConstants e;
      const auto& x = j["embedding"];
      e.delta = unnum(x.at("delta"));
      e.eta = unnum(x.at("eta"));
      e.c_gn = unnum(x.at("c_gn"));
      e.samples = x.at("samples");
      e.seed = x.at("seed");
      r.embedding = e;
    }
    if (j.contains("bounds")) r.bounds = unbounds(j["bounds"]);
    for (const auto& v : j.at("verdicts")) r.verdicts.push_back(unverdict(v));
    for (const auto& c : j.at("residuals")) {
      ResidualCheck rc;
      rc.name = c.at("name");
      rc.evaluated = c.at("evaluated");
      rc.max_excess = unnum(c.at("max_excess"));
      rc.worst_ratio = unnum(c.at("worst_ratio"));
      rc.rhs_at_worst = unnum(c.at("rhs_at_worst"));
      rc.tol_rel = unnum(c.at("tol_rel"));
      rc.pass = c.at("pass");
      r.residuals.push_back(rc);
    }
    for (const auto& l : j.at("lyapunov")) {
      LyapunovReport lr;
      lr.exponents = unvec(l.at("exponents"));
      lr.qm = unvec(l.at("qm"));
      lr.qm_first = unvec(l.at("qm_first"));
      lr.qm_second = unvec(l.at("qm_second"));
      lr.m_star = l.at("m_star");
      lr.kaplan_yorke = unnum(l.at("kaplan_yorke"));
      lr.averaging_time = unnum(l.at("averaging_time"));
      lr.renormalizations = l.at("renormalizations");
      lr.renorm_every = l.at("renorm_every");
      lr.min_log_diag = unnum(l.at("min_log_diag"));
      r.lyapunov.push_back(std::move(lr));
    }
    if (j.contains("qm")) {
      QmSummary q;
      q.qm = unvec(j["qm"].at("qm"));
      q.m_star = j["qm"].at("m_star");
      q.runs = j["qm"].at("runs");
      r.qm = q;
    }
    if (j.contains("dimension")) {
      const auto& d = j["dimension"];
      DimensionBound db;
      db.B = unmag(d.at("B"));
      db.m = unmag(d.at("m"));
      db.dH = unmag(d.at("d_H_bound"));
      db.dF = unmag(d.at("d_F_bound"));
      db.Q3 = unmag(d.at("Q3"));
      db.Qstar = unnum(d.at("Qstar"));
      r.dimension = db;
    }
    for (const auto& row : j.at("sweep")) {
      SweepRow s;
      s.value = unnum(row.at("value"));
      for (const auto& v : row.at("verdicts")) s.verdicts.push_back(unverdict(v));
      r.sweep.push_back(std::move(s));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error("shell", std::string("report does not match the schema: ") + e.what());
  }
}

}  // namespace ebrus
