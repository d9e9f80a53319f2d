#include "stargraph/config.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "stargraph/oracle.hpp"

namespace stargraph {

using nlohmann::json;

std::string to_string(Task t) {
  switch (t) {
    case Task::Simulate: return "simulate";
    case Task::Resolvent: return "resolvent";
    case Task::Verify: return "verify";
    case Task::Export: return "export";
  }
  return "simulate";
}

namespace {

std::string join_violations(const std::vector<SchemaViolation>& vs) {
  std::string s;
  for (const auto& v : vs) s += (s.empty() ? "" : "; ") + v.path + ": " + v.message;
  return s;
}

std::string num17(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Collects violations while walking the document.
class Reader {
 public:
  std::vector<SchemaViolation> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

  const json* member(const json& obj, const std::string& key, const std::string& path,
                     bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "/" + key, "required");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                               bool required, bool positive = false, bool nonneg = true) {
    const json* v = member(obj, key, path, required);
    if (!v) return std::nullopt;
    const std::string p = path + "/" + key;
    if (!v->is_number()) {
      fail(p, "must be a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(p, "must be finite");
      return std::nullopt;
    }
    if (positive && !(d > 0.0)) {
      fail(p, "must be > 0");
      return std::nullopt;
    }
    if (nonneg && d < 0.0) {
      fail(p, "must be >= 0");
      return std::nullopt;
    }
    return d;
  }

  void no_extra(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
  }

  std::optional<EdgeId> edge(const json& v, const std::string& path, const StarGraph& g) {
    if (!v.is_string()) {
      fail(path, "must be an edge name");
      return std::nullopt;
    }
    const auto name = v.get<std::string>();
    for (EdgeId e = 0; e < g.size(); ++e)
      if (g.name(e) == name) return e;
    fail(path, "unknown edge '" + name + "'");
    return std::nullopt;
  }
};

std::optional<EdgeTail> parse_tail(Reader& rd, const json& v, const std::string& path) {
  if (!v.is_object()) {
    rd.fail(path, "must be an object");
    return std::nullopt;
  }
  rd.no_extra(v, path, {"family", "params"});
  const json* fam = rd.member(v, "family", path, true);
  const json* params = rd.member(v, "params", path, true);
  if (!fam || !params) return std::nullopt;
  const std::string pp = path + "/params";
  if (!params->is_object()) {
    rd.fail(pp, "must be an object");
    return std::nullopt;
  }
  if (*fam == "power_tail") {
    rd.no_extra(*params, pp, {"c", "beta"});
    auto c = rd.number(*params, "c", pp, true, true);
    auto beta = rd.number(*params, "beta", pp, true, true);
    if (beta && !(*beta < 1.0)) {
      rd.fail(pp + "/beta", "must lie in (0, 1)");
      beta.reset();
    }
    if (!c || !beta) return std::nullopt;
    return EdgeTail{PowerTail{*c, *beta}, 0.0};
  }
  if (*fam == "exp_tail") {
    rd.no_extra(*params, pp, {"c", "rate"});
    auto c = rd.number(*params, "c", pp, true, true);
    auto rate = rd.number(*params, "rate", pp, true, true);
    if (!c || !rate) return std::nullopt;
    return EdgeTail{ExpTail{*c, *rate}, 0.0};
  }
  rd.fail(path + "/family", "expected \"power_tail\" or \"exp_tail\"");
  return std::nullopt;
}

JumpMeasureSpec parse_p4(Reader& rd, const json& v, const StarGraph& g) {
  const std::string path = "/p4";
  if (!v.is_object()) {
    rd.fail(path, "must be an object");
    return {};
  }
  rd.no_extra(v, path, {"kind", "atoms", "density"});
  const json* kind = rd.member(v, "kind", path, true);
  if (!kind) return {};
  if (*kind == "atoms") {
    std::vector<Atom> atoms;
    const json* list = rd.member(v, "atoms", path, false);
    if (!list) return JumpMeasureSpec::atoms({});
    if (!list->is_array()) {
      rd.fail(path + "/atoms", "must be an array");
      return {};
    }
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string ap = path + "/atoms/" + std::to_string(i);
      const json& a = (*list)[i];
      if (!a.is_object()) {
        rd.fail(ap, "must be an object");
        continue;
      }
      rd.no_extra(a, ap, {"edge", "height", "mass"});
      const json* e = rd.member(a, "edge", ap, true);
      auto edge = e ? rd.edge(*e, ap + "/edge", g) : std::nullopt;
      auto h = rd.number(a, "height", ap, true, true);
      auto m = rd.number(a, "mass", ap, true, true);
      if (edge && h && m) atoms.push_back({*edge, *h, *m});
    }
    return JumpMeasureSpec::atoms(std::move(atoms));
  }
  if (*kind == "density") {
    const json* dens = rd.member(v, "density", path, true);
    if (!dens) return {};
    if (!dens->is_object()) {
      rd.fail(path + "/density", "must be an object");
      return {};
    }
    JumpMeasureSpec::EdgeTails tails;
    for (auto it = dens->begin(); it != dens->end(); ++it)
      rd.edge(json(it.key()), path + "/density/" + it.key(), g);
    for (EdgeId e = 0; e < g.size(); ++e) {
      auto it = dens->find(g.name(e));
      if (it == dens->end()) continue;
      if (auto t = parse_tail(rd, *it, path + "/density/" + g.name(e))) tails.push_back({e, *t});
    }
    return JumpMeasureSpec::density(std::move(tails));
  }
  rd.fail(path + "/kind", "expected \"atoms\" or \"density\"");
  return {};
}

std::optional<FunctionSpec> parse_function(Reader& rd, const json& v, const std::string& path,
                                           const StarGraph& g) {
  if (!v.is_object()) {
    rd.fail(path, "must be an object");
    return std::nullopt;
  }
  const json* kind = rd.member(v, "kind", path, true);
  if (!kind) return std::nullopt;
  FunctionSpec f;
  if (*kind == "constant") {
    rd.no_extra(v, path, {"kind", "value"});
    f.kind = FunctionSpec::Kind::Constant;
    auto c = rd.number(v, "value", path, false, false, false);
    f.value = c.value_or(1.0);
    return f;
  }
  if (*kind == "edge_indicator" || *kind == "exp_bump") {
    const bool bump = *kind == "exp_bump";
    if (bump)
      rd.no_extra(v, path, {"kind", "edge", "rate"});
    else
      rd.no_extra(v, path, {"kind", "edge"});
    f.kind = bump ? FunctionSpec::Kind::ExpBump : FunctionSpec::Kind::EdgeIndicator;
    const json* e = rd.member(v, "edge", path, true);
    auto edge = e ? rd.edge(*e, path + "/edge", g) : std::nullopt;
    if (!edge) return std::nullopt;
    f.edge = *edge;
    if (bump) f.rate = rd.number(v, "rate", path, false).value_or(1.0);
    return f;
  }
  if (*kind == "product") {
    rd.no_extra(v, path, {"kind", "factors"});
    f.kind = FunctionSpec::Kind::Product;
    const json* fs = rd.member(v, "factors", path, true);
    if (!fs) return std::nullopt;
    if (!fs->is_array()) {
      rd.fail(path + "/factors", "must be an array");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < fs->size(); ++i) {
      auto sub = parse_function(rd, (*fs)[i], path + "/factors/" + std::to_string(i), g);
      if (sub) f.factors.push_back(*sub);
    }
    return f;
  }
  rd.fail(path + "/kind", "unknown function kind");
  return std::nullopt;
}

json function_to_json(const FunctionSpec& f, const StarGraph& g) {
  switch (f.kind) {
    case FunctionSpec::Kind::Constant: return {{"kind", "constant"}, {"value", f.value}};
    case FunctionSpec::Kind::EdgeIndicator:
      return {{"kind", "edge_indicator"}, {"edge", g.name(f.edge)}};
    case FunctionSpec::Kind::ExpBump:
      return {{"kind", "exp_bump"}, {"edge", g.name(f.edge)}, {"rate", f.rate}};
    case FunctionSpec::Kind::Product: {
      json fs = json::array();
      for (const auto& s : f.factors) fs.push_back(function_to_json(s, g));
      return {{"kind", "product"}, {"factors", fs}};
    }
  }
  return {};
}

json p4_to_json(const JumpMeasureSpec& p4, const StarGraph& g) {
  if (p4.is_atoms()) {
    json atoms = json::array();
    for (const auto& a : p4.atom_list())
      atoms.push_back({{"edge", g.name(a.edge)}, {"height", a.height}, {"mass", a.mass}});
    return {{"kind", "atoms"}, {"atoms", atoms}};
  }
  json dens = json::object();
  for (const auto& [e, t] : p4.edge_tails()) {
    json params;
    if (const auto* pt = std::get_if<PowerTail>(&t.family))
      params = {{"c", pt->c}, {"beta", pt->beta}};
    else if (const auto* et = std::get_if<ExpTail>(&t.family))
      params = {{"c", et->c}, {"rate", et->rate}};
    dens[g.name(e)] = {{"family", t.family_name()}, {"params", params}};
  }
  return {{"kind", "density"}, {"density", dens}};
}

}  // namespace

ConfigError::ConfigError(std::vector<SchemaViolation> violations)
    : Error(ErrorCode::SchemaError, join_violations(violations)),
      violations_(std::move(violations)) {}

RunConfig parse_config(const json& doc) {
  Reader rd;
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError(
        std::vector<SchemaViolation>{{"", "configuration must be a JSON object"}});
  rd.no_extra(doc, "", {"edges", "p1", "p2", "p3", "p4", "walsh_weights", "numerics", "task",
                        "alpha", "start", "functions", "construction"});

  // graph; nothing below can be checked without it
  const std::size_t before_edges = rd.errors.size();
  std::vector<std::string> names;
  if (const json* e = rd.member(doc, "edges", "", true)) {
    if (!e->is_array() || e->empty()) {
      rd.fail("/edges", "must be a non-empty array of strings");
    } else {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < e->size(); ++i) {
        const json& n = (*e)[i];
        const std::string p = "/edges/" + std::to_string(i);
        if (!n.is_string() || n.get<std::string>().empty()) {
          rd.fail(p, "must be a non-empty string");
        } else if (n == "vertex" || n == "cemetery") {
          rd.fail(p, "reserved name");
        } else if (!seen.insert(n.get<std::string>()).second) {
          rd.fail(p, "duplicate edge");
        } else {
          names.push_back(n.get<std::string>());
        }
      }
    }
  }
  if (rd.errors.size() > before_edges || names.empty()) throw ConfigError(rd.errors);
  cfg.graph = StarGraph(names);
  const StarGraph& g = cfg.graph;

  // weights
  BoundaryWeights& w = cfg.weights;
  w.p1 = rd.number(doc, "p1", "", false).value_or(0.0);
  w.p3 = rd.number(doc, "p3", "", false).value_or(0.0);
  w.p2.assign(g.size(), 0.0);
  if (const json* p2 = rd.member(doc, "p2", "", false)) {
    if (!p2->is_object()) {
      rd.fail("/p2", "must be an object keyed by edge");
    } else {
      for (auto it = p2->begin(); it != p2->end(); ++it)
        if (auto e = rd.edge(json(it.key()), "/p2/" + it.key(), g))
          w.p2[*e] = rd.number(*p2, it.key(), "/p2", true).value_or(0.0);
    }
  }
  if (const json* p4 = rd.member(doc, "p4", "", false)) w.jump = parse_p4(rd, *p4, g);
  if (const json* ww = rd.member(doc, "walsh_weights", "", false)) {
    if (!ww->is_object()) {
      rd.fail("/walsh_weights", "must be an object keyed by edge");
    } else {
      w.walsh_weights_override.assign(g.size(), 0.0);
      for (auto it = ww->begin(); it != ww->end(); ++it)
        if (auto e = rd.edge(json(it.key()), "/walsh_weights/" + it.key(), g))
          w.walsh_weights_override[*e] = rd.number(*ww, it.key(), "/walsh_weights", true).value_or(0.0);
    }
  }

  // numerics
  if (const json* nm = rd.member(doc, "numerics", "", false)) {
    const std::string p = "/numerics";
    if (!nm->is_object()) {
      rd.fail(p, "must be an object");
    } else {
      rd.no_extra(*nm, p, {"dt", "T", "T_max", "eps", "n_paths", "seed", "threads", "bridge_max"});
      Numerics& n = cfg.numerics;
      n.dt = rd.number(*nm, "dt", p, false, true).value_or(n.dt);
      n.T = rd.number(*nm, "T", p, false, true).value_or(n.T);
      n.t_max = rd.number(*nm, "T_max", p, false, true).value_or(n.t_max);
      n.eps = rd.number(*nm, "eps", p, false, true).value_or(n.eps);
      auto integer = [&](const char* key, std::uint64_t lo) -> std::optional<std::uint64_t> {
        const json* v = rd.member(*nm, key, p, false);
        if (!v) return std::nullopt;
        if (!v->is_number_integer() || (v->is_number_integer() && v->get<std::int64_t>() < 0 &&
                                        !v->is_number_unsigned())) {
          rd.fail(p + "/" + key, "must be a non-negative integer");
          return std::nullopt;
        }
        const auto u = v->get<std::uint64_t>();
        if (u < lo) {
          rd.fail(p + "/" + key, "must be >= " + std::to_string(lo));
          return std::nullopt;
        }
        return u;
      };
      if (auto v = integer("n_paths", 1)) n.n_paths = *v;
      if (auto v = integer("threads", 1)) n.threads = static_cast<unsigned>(*v);
      if (auto v = integer("seed", 0)) n.seed = *v;
      if (const json* b = rd.member(*nm, "bridge_max", p, false)) {
        if (b->is_boolean())
          n.bridge_max = b->get<bool>();
        else
          rd.fail(p + "/bridge_max", "must be a boolean");
      }
      if (n.dt > n.T) rd.fail(p + "/dt", "must not exceed T");
    }
  }

  // task
  if (const json* t = rd.member(doc, "task", "", false)) {
    if (*t == "simulate") cfg.task = Task::Simulate;
    else if (*t == "resolvent") cfg.task = Task::Resolvent;
    else if (*t == "verify") cfg.task = Task::Verify;
    else if (*t == "export") cfg.task = Task::Export;
    else rd.fail("/task", "expected simulate, resolvent, verify or export");
  }
  if (cfg.task == Task::Verify && !cfg.numerics.seed)
    rd.fail("/numerics/seed", "required for verify");
  cfg.alpha = rd.number(doc, "alpha", "", false, true).value_or(1.0);

  if (const json* s = rd.member(doc, "start", "", false)) {
    if (*s == "vertex") {
      cfg.start = GraphPoint::vertex();
    } else if (s->is_object()) {
      rd.no_extra(*s, "/start", {"edge", "x"});
      const json* e = rd.member(*s, "edge", "/start", true);
      auto edge = e ? rd.edge(*e, "/start/edge", g) : std::nullopt;
      auto x = rd.number(*s, "x", "/start", true);
      if (edge && x) cfg.start = GraphPoint::on_edge(*edge, *x);
    } else {
      rd.fail("/start", "expected \"vertex\" or {\"edge\", \"x\"}");
    }
  }
  if (const json* fs = rd.member(doc, "functions", "", false)) {
    if (!fs->is_array()) {
      rd.fail("/functions", "must be an array");
    } else {
      for (std::size_t i = 0; i < fs->size(); ++i)
        if (auto f = parse_function(rd, (*fs)[i], "/functions/" + std::to_string(i), g))
          cfg.functions.push_back(*f);
    }
  }
  if (const json* c = rd.member(doc, "construction", "", false)) {
    if (*c == "itomckean") cfg.construction = Construction::ItoMcKean;
    else if (*c == "revival") cfg.construction = Construction::Revival;
    else rd.fail("/construction", "expected \"itomckean\" or \"revival\"");
  }

  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  w.check_admissible();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(
        std::vector<SchemaViolation>{{"", std::string("malformed JSON: ") + ex.what()}});
  }
  return parse_config(doc);
}

json serialize_config(const RunConfig& c) {
  const StarGraph& g = c.graph;
  json doc;
  doc["edges"] = g.names();
  doc["p1"] = c.weights.p1;
  json p2 = json::object();
  for (EdgeId e = 0; e < g.size(); ++e) p2[g.name(e)] = c.weights.p2.at(e);
  doc["p2"] = p2;
  doc["p3"] = c.weights.p3;
  doc["p4"] = p4_to_json(c.weights.jump, g);
  if (!c.weights.walsh_weights_override.empty()) {
    json ww = json::object();
    for (EdgeId e = 0; e < g.size(); ++e) ww[g.name(e)] = c.weights.walsh_weights_override[e];
    doc["walsh_weights"] = ww;
  }
  const Numerics& n = c.numerics;
  json nm = {{"dt", n.dt},           {"T", n.T},
             {"eps", n.eps},         {"n_paths", n.n_paths},
             {"threads", n.threads}, {"bridge_max", n.bridge_max}};
  if (n.t_max > 0.0) nm["T_max"] = n.t_max;
  if (n.seed) nm["seed"] = *n.seed;
  doc["numerics"] = nm;
  doc["task"] = to_string(c.task);
  doc["alpha"] = c.alpha;
  if (c.start.is_vertex())
    doc["start"] = "vertex";
  else
    doc["start"] = {{"edge", g.name(c.start.edge())}, {"x", c.start.x()}};
  json fs = json::array();
  for (const auto& f : c.functions) fs.push_back(function_to_json(f, g));
  doc["functions"] = fs;
  doc["construction"] = to_string(c.construction);
  return doc;
}

json weights_to_json(const BoundaryWeights& w, const StarGraph& g) {
  json p2 = json::object();
  json q = json::object();
  const auto dist = w.edge_distribution();
  for (EdgeId e = 0; e < g.size(); ++e) {
    p2[g.name(e)] = w.p2.at(e);
    q[g.name(e)] = dist.at(e);
  }
  json out = {{"p1", w.p1},
              {"p2", p2},
              {"p3", w.p3},
              {"p4", p4_to_json(w.jump, g)},
              {"q", q},
              {"p4_finite", w.jump.finite_mass()},
              {"admissible", w.admissible()}};
  out["normalizing_sum"] = w.normalizing_sum();
  return out;
}

json jumpset_to_json(const JumpSet& J, const StarGraph& g) {
  json events = json::array();
  for (const auto& ev : J.events())
    events.push_back({{"t", ev.time}, {"edge", g.name(ev.edge)}, {"height", ev.height}});
  return {{"drift", J.drift()}, {"horizon", J.horizon()}, {"eps", J.cutoff()}, {"events", events}};
}

std::string path_to_csv(const GraphPath& path, const StarGraph& g) {
  std::string out = "t,edge,x,ltimeX,alive\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    const GraphPoint& s = path.state[k];
    out += num17(path.times[k]);
    out += ',';
    out += s.is_cemetery() ? "cemetery" : s.is_vertex() ? "vertex" : g.name(s.edge());
    out += ',';
    out += num17(s.x());
    out += ',';
    out += num17(path.ltime[k]);
    out += s.is_cemetery() ? ",0\n" : ",1\n";
  }
  return out;
}

json path_meta_json(const GraphPath& path, const RunConfig& config) {
  json j = {{"construction", to_string(path.meta.construction)},
            {"dt", path.meta.dt},
            {"eps", path.meta.eps},
            {"seed", path.meta.seed},
            {"path_index", path.meta.path_index},
            {"segments", path.meta.segments},
            {"revivals", path.meta.revivals},
            {"nodes", path.size()},
            {"weights", weights_to_json(config.weights, config.graph)}};
  j["lifetime"] = std::isfinite(path.lifetime) ? json(path.lifetime) : json(nullptr);
  return j;
}

namespace {

std::vector<TestFunction> panel_functions(const RunConfig& c) {
  std::vector<TestFunction> fs;
  if (c.functions.empty()) {
    fs.push_back(functions::constant(1.0));
    fs.push_back(functions::edge_indicator(0, c.graph.name(0)));
    fs.push_back(functions::exp_bump(0, 1.0, c.graph.name(0)));
  } else {
    for (const auto& s : c.functions) fs.push_back(make_function(s, c.graph));
  }
  return fs;
}

McOptions mc_options(const RunConfig& c) {
  McOptions o;
  o.n_paths = c.numerics.n_paths;
  o.dt = c.numerics.dt;
  o.t_max = c.numerics.t_max;
  o.eps = c.numerics.eps;
  o.seed = c.numerics.seed.value_or(1);
  o.threads = c.numerics.threads;
  o.bridge_max = c.numerics.bridge_max;
  o.estimate_dt_bias = c.construction == Construction::ItoMcKean;
  return o;
}

std::string point_name(const GraphPoint& g, const StarGraph& graph) {
  return g.is_vertex() ? "vertex" : "(" + graph.name(g.edge()) + "," + num(g.x()) + ")";
}

}  // namespace

VerificationReport run_verify_panel(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  const BoundaryWeights& w = c.weights;
  const double a = c.alpha;
  const auto fs = panel_functions(c);
  const McOptions opts = mc_options(c);
  const std::string at = " @" + point_name(c.start, c.graph);

  // Monte Carlo resolvents against the closed form
  const auto est = mc_resolvent_multi(c.start, a, fs, w, c.construction, opts);
  for (std::size_t j = 0; j < fs.size(); ++j)
    rep.rows.push_back(make_statistical_row("resolvent " + to_string(c.construction) + " " +
                                                fs[j].name + at,
                                            oracle::resolvent_full(a, fs[j], c.start, w), est[j]));

  // boundary condition and resolvent identity
  for (const auto& f : fs)
    rep.rows.push_back(
        make_deterministic_row("boundary residual " + f.name, 0.0,
                               oracle::boundary_residual(a, f, w), 1e-8));
  for (const auto& f : fs) {
    const double b = 2.0 * a;
    const double ua = oracle::resolvent_vertex_full(a, f, w);
    const double ub = oracle::resolvent_vertex_full(b, f, w);
    const double uab = oracle::resolvent_vertex_full(a, oracle::resolvent_as_function(b, f, w), w);
    rep.rows.push_back(
        make_deterministic_row("resolvent equation " + f.name, 0.0, ua - ub + (a - b) * uab, 1e-6));
  }
  BoundaryWeights conservative = w;
  conservative.p1 = 0.0;
  rep.rows.push_back(make_deterministic_row(
      "conservativity (p1=0)", 1.0 / a,
      oracle::resolvent_vertex_full(a, functions::constant(1.0), conservative), 1e-12));

  // Walsh engine laws
  const std::vector<double> alphas{a};
  const std::vector<double> xs{0.5, 1.0, 2.0};
  for (auto& r : passage_time_suite(alphas, xs, opts.n_paths, opts.dt, opts.seed, opts.threads))
    rep.rows.push_back(std::move(r));
  rep.rows.push_back(joint_law_test(1.0, w, opts.n_paths, opts.seed, opts.dt, opts.threads));

  // both constructions, when both apply
  if (w.jump.finite_mass() && w.p2_total() > 0.0) {
    McOptions o = opts;
    o.estimate_dt_bias = false;
    const auto rv = c.construction == Construction::Revival
                        ? est
                        : mc_resolvent_multi(c.start, a, fs, w, Construction::Revival, o);
    o.estimate_dt_bias = true;
    const auto im = c.construction == Construction::ItoMcKean
                        ? est
                        : mc_resolvent_multi(c.start, a, fs, w, Construction::ItoMcKean, o);
    for (std::size_t j = 0; j < fs.size(); ++j)
      rep.rows.push_back(make_cross_row("cross-construction " + fs[j].name + at, rv[j], im[j]));
  }

  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  os << text;
}

GraphPath simulate_one(const RunConfig& c, std::uint64_t index) {
  PathStreams st = PathStreams::for_path(c.numerics.seed.value_or(1), index);
  if (c.construction == Construction::Revival)
    return revival_path(c.start, c.numerics.T, c.numerics.dt, c.weights, st,
                        {c.numerics.bridge_max});
  return itomckean_full_path(c.start, c.numerics.T, c.numerics.dt, c.weights, st,
                             {c.numerics.eps, c.numerics.bridge_max});
}

}  // namespace

namespace {

int run_task(const RunConfig& c, const std::filesystem::path& out_dir, std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  switch (c.task) {
    case Task::Simulate: {
      const auto dir = out_dir / "paths";
      std::filesystem::create_directories(dir);
      json metas = json::array();
      for (std::size_t i = 0; i < c.numerics.n_paths; ++i) {
        const GraphPath p = simulate_one(c, i);
        char name[32];
        std::snprintf(name, sizeof name, "path_%06zu.csv", i);
        write_file(dir / name, path_to_csv(p, c.graph));
        json m = path_meta_json(p, c);
        m["file"] = std::string("paths/") + name;
        metas.push_back(std::move(m));
      }
      write_file(out_dir / "simulate.json",
                 json{{"config", serialize_config(c)}, {"paths", metas}}.dump(2) + "\n");
      log << "wrote " << c.numerics.n_paths << " path(s) to " << dir.string() << "\n";
      return kExitPass;
    }
    case Task::Resolvent: {
      const auto fs = panel_functions(c);
      const auto est = mc_resolvent_multi(c.start, c.alpha, fs, c.weights, c.construction,
                                          mc_options(c));
      json rows = json::array();
      bool ok = true;
      for (std::size_t j = 0; j < fs.size(); ++j) {
        const double o = oracle::resolvent_full(c.alpha, fs[j], c.start, c.weights);
        const auto row = make_statistical_row(fs[j].name, o, est[j]);
        ok = ok && row.pass;
        rows.push_back({{"function", fs[j].name},
                        {"oracle", o},
                        {"mc", est[j].value},
                        {"stderr", est[j].stderr_},
                        {"z", row.z},
                        {"bias_budget", est[j].bias_budget()},
                        {"pass", row.pass}});
        log << fs[j].name << ": oracle " << o << " mc " << est[j].value << " +- "
            << est[j].stderr_ << " z " << row.z << (row.pass ? "  PASS" : "  FAIL") << "\n";
      }
      write_file(out_dir / "resolvent.json",
                 json{{"alpha", c.alpha},
                      {"start", point_name(c.start, c.graph)},
                      {"construction", to_string(c.construction)},
                      {"results", rows}}
                         .dump(2) + "\n");
      return ok ? kExitPass : kExitStatFail;
    }
    case Task::Verify: {
      const auto rep = run_verify_panel(c);
      write_file(out_dir / "verify_report.json", rep.to_json());
      log << rep.to_table();
      return rep.pass() ? kExitPass : kExitStatFail;
    }
    case Task::Export: {
      write_file(out_dir / "weights.json",
                 weights_to_json(c.weights, c.graph).dump(2) + "\n");
      if (c.weights.p2_total() > 0.0 || !c.weights.jump.finite_mass()) {
        Rng rng(c.numerics.seed.value_or(1), 0, Substream::Jumps);
        const JumpSet J = c.weights.jump.is_zero()
                              ? JumpSet(c.weights.p2_total(), {}, c.numerics.T, c.numerics.eps)
                              : sample_jumpset(c.weights.jump, c.weights.p2_total(), c.numerics.T,
                                               c.numerics.eps, c.graph.size(), rng);
        write_file(out_dir / "jumpset.json", jumpset_to_json(J, c.graph).dump(2) + "\n");
      }
      write_file(out_dir / "config.json", serialize_config(c).dump(2) + "\n");
      log << "exported to " << out_dir.string() << "\n";
      return kExitPass;
    }
  }
  return kExitConfigError;
}

}  // namespace

int run(const RunConfig& c, const std::filesystem::path& out_dir, std::ostream& log) {
  try {
    return run_task(c, out_dir, log);
  } catch (const ConfigError& ex) {
    for (const auto& v : ex.violations())
      log << "SCHEMA_ERROR at \"" << v.path << "\": " << v.message << "\n";
  } catch (const Error& ex) {
    log << ex.what() << "\n";
  }
  return kExitConfigError;
}

}  // namespace stargraph
