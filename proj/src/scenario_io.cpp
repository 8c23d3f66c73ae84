#include "qmod/scenario_io.h"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "qmod/errors.h"
#include "qmod/rng.h"

namespace qmod {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json* field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string path_of(const std::string& where, const char* key) { return where + "." + key; }

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_uint(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

Nanos get_duration(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": durations need a unit suffix, e.g. \"2.5us\"");
  try {
    return parse_duration(v.get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

template <class T, class Get>
void read(const json& obj, const char* key, const std::string& where, T& out, Get get) {
  if (const json* v = field(obj, key)) out = static_cast<T>(get(*v, path_of(where, key)));
}

ModuleId get_module(const json& v, const std::string& where) {
  const auto id = get_uint(v, where);
  if (id > UINT32_MAX) throw ConfigError(where + ": module id out of range");
  return static_cast<ModuleId>(id);
}

std::vector<ModuleId> get_modules(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of module ids");
  std::vector<ModuleId> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(get_module(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Link get_link(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected a module pair [i, j]");
  const ModuleId a = get_module(v[0], where);
  const ModuleId b = get_module(v[1], where);
  if (a == b) throw ConfigError(where + ": link endpoints must differ");
  return Link(a, b);
}

std::vector<Link> get_links(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of module pairs");
  std::vector<Link> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(get_link(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

ScalingParams parse_scaling(const json& s) {
  const std::string w = "scaling";
  only_keys(s, w, {"A", "B", "epsilon", "gamma", "eta_trans", "D", "kappa"});
  ScalingParams p;
  read(s, "A", w, p.A, get_number);
  read(s, "B", w, p.B, get_number);
  read(s, "epsilon", w, p.epsilon, get_number);
  read(s, "gamma", w, p.gamma, get_number);
  read(s, "eta_trans", w, p.eta_trans, get_number);
  read(s, "D", w, p.D, get_uint);
  read(s, "kappa", w, p.kappa, get_number);
  p.validate();
  return p;
}

TimingParams parse_timing(const json& s) {
  const std::string w = "timing";
  only_keys(s, w,
            {"tau_q", "tau_q_p", "tau_q_p_fraction", "tau_decode", "tau_ff", "tau_route", "alpha", "refractive_index",
             "light_speed", "safety_margin"});
  TimingParams t;
  read(s, "tau_q", w, t.tau_q, get_duration);
  read(s, "tau_decode", w, t.tau_decode, get_duration);
  read(s, "tau_ff", w, t.tau_ff, get_duration);
  read(s, "tau_route", w, t.tau_route, get_duration);
  read(s, "alpha", w, t.alpha, get_number);
  read(s, "refractive_index", w, t.refractive_index_n, get_number);
  read(s, "light_speed", w, t.light_speed_c, get_number);
  read(s, "safety_margin", w, t.safety_margin, get_number);
  const json* abs = field(s, "tau_q_p");
  const json* frac = field(s, "tau_q_p_fraction");
  if (abs && frac) throw ConfigError("timing: give tau_q_p or tau_q_p_fraction, not both");
  if (abs) {
    t.tau_q_p = get_duration(*abs, "timing.tau_q_p");
  } else {
    t.tau_q_p = deadline_from_fraction(t.tau_q, frac ? get_number(*frac, "timing.tau_q_p_fraction") : 0.001);
  }
  t.validate();
  return t;
}

TopologyConfig parse_topology(const json& s) {
  const std::string w = "topology";
  only_keys(s, w, {"mode", "modules", "edges"});
  TopologyConfig t;
  if (const json* m = field(s, "mode")) {
    const auto mode = get_string(*m, "topology.mode");
    if (mode == "grid") t.mode = Topology::Mode::Grid;
    else if (mode == "graph") t.mode = Topology::Mode::Graph;
    else throw ConfigError("topology.mode: expected \"grid\" or \"graph\"");
  }
  const json* mods = field(s, "modules");
  if (!mods || !mods->is_array()) throw ConfigError("topology.modules: expected an array");
  for (std::size_t k = 0; k < mods->size(); ++k) {
    const std::string mw = "topology.modules[" + std::to_string(k) + "]";
    const json& m = (*mods)[k];
    if (m.is_number()) {
      if (t.mode == Topology::Mode::Grid) throw ConfigError(mw + ": grid modules need a position");
      t.modules.push_back({get_module(m, mw), {}, std::nullopt});
      continue;
    }
    only_keys(m, mw, {"id", "pos", "local_gate"});
    ModuleSpec spec;
    const json* id = field(m, "id");
    if (!id) throw ConfigError(mw + ": missing id");
    spec.id = get_module(*id, mw + ".id");
    if (const json* pos = field(m, "pos")) {
      if (!pos->is_array() || pos->size() != 2 || !(*pos)[0].is_number_integer() || !(*pos)[1].is_number_integer()) {
        throw ConfigError(mw + ".pos: expected [x, y] integers");
      }
      spec.pos = {(*pos)[0].get<std::int64_t>(), (*pos)[1].get<std::int64_t>()};
    } else if (t.mode == Topology::Mode::Grid) {
      throw ConfigError(mw + ": grid modules need a position");
    }
    if (const json* g = field(m, "local_gate")) spec.local_gate_ns = get_duration(*g, mw + ".local_gate");
    t.modules.push_back(spec);
  }
  if (const json* edges = field(s, "edges")) {
    if (t.mode == Topology::Mode::Grid) throw ConfigError("topology.edges: only valid in graph mode");
    if (!edges->is_array()) throw ConfigError("topology.edges: expected an array");
    for (std::size_t k = 0; k < edges->size(); ++k) {
      const std::string ew = "topology.edges[" + std::to_string(k) + "]";
      const json& e = (*edges)[k];
      only_keys(e, ew, {"a", "b", "latency"});
      if (!field(e, "a") || !field(e, "b") || !field(e, "latency")) throw ConfigError(ew + ": needs a, b, latency");
      t.edges.push_back({get_module(e["a"], ew + ".a"), get_module(e["b"], ew + ".b"),
                         get_duration(e["latency"], ew + ".latency")});
    }
  }
  return t;
}

LinkConfig parse_link(const json& s, const std::string& w) {
  only_keys(s, w, {"endpoints", "attempt_period", "eta", "fidelity"});
  LinkConfig l;
  const json* ep = field(s, "endpoints");
  if (!ep) throw ConfigError(w + ": missing endpoints");
  l.endpoints = get_link(*ep, w + ".endpoints");
  read(s, "attempt_period", w, l.attempt_period_ns, get_duration);
  read(s, "eta", w, l.eta_trans, get_number);
  if (const json* f = field(s, "fidelity")) {
    if (f->is_number()) {
      l.fidelity.lo = l.fidelity.hi = f->get<double>();
    } else {
      only_keys(*f, w + ".fidelity", {"min", "max"});
      if (!field(*f, "min") || !field(*f, "max")) throw ConfigError(w + ".fidelity: needs min and max");
      l.fidelity.lo = get_number((*f)["min"], w + ".fidelity.min");
      l.fidelity.hi = get_number((*f)["max"], w + ".fidelity.max");
    }
  }
  l.validate();
  return l;
}

ArrivalSpec parse_arrival(const json& a, const std::string& w) {
  only_keys(a, w, {"at", "participants", "required_links"});
  ArrivalSpec spec;
  if (!field(a, "at") || !field(a, "participants")) throw ConfigError(w + ": needs at and participants");
  spec.at_ns = get_duration(a["at"], w + ".at");
  spec.participants = get_modules(a["participants"], w + ".participants");
  if (const json* l = field(a, "required_links")) spec.required_links = get_links(*l, w + ".required_links");
  return spec;
}

std::vector<ArrivalSpec> load_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path.string());
  std::vector<ArrivalSpec> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    json a;
    try {
      a = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(parse_arrival(a, path.string() + ":" + std::to_string(lineno)));
  }
  return out;
}

WorkloadConfig parse_workload(const json& s, const std::filesystem::path& base_dir) {
  const std::string w = "workload";
  only_keys(s, w,
            {"mode", "period", "start", "participants", "required_links", "max_transactions", "arrivals",
             "trace_file"});
  WorkloadConfig wl;
  const std::string mode = field(s, "mode") ? get_string(s["mode"], "workload.mode") : "none";
  if (mode == "none") wl.mode = WorkloadConfig::Mode::None;
  else if (mode == "periodic") wl.mode = WorkloadConfig::Mode::Periodic;
  else if (mode == "trace") wl.mode = WorkloadConfig::Mode::Trace;
  else throw ConfigError("workload.mode: expected none, periodic or trace");

  read(s, "period", w, wl.period_ns, get_duration);
  read(s, "start", w, wl.start_ns, get_duration);
  if (const json* p = field(s, "participants")) wl.participants = get_modules(*p, "workload.participants");
  if (const json* l = field(s, "required_links")) wl.required_links = get_links(*l, "workload.required_links");
  if (const json* m = field(s, "max_transactions")) wl.max_transactions = get_uint(*m, "workload.max_transactions");
  if (const json* arr = field(s, "arrivals")) {
    if (!arr->is_array()) throw ConfigError("workload.arrivals: expected an array");
    for (std::size_t k = 0; k < arr->size(); ++k) {
      wl.arrivals.push_back(parse_arrival((*arr)[k], "workload.arrivals[" + std::to_string(k) + "]"));
    }
  }
  if (const json* tf = field(s, "trace_file")) {
    auto path = std::filesystem::path(get_string(*tf, "workload.trace_file"));
    if (path.is_relative()) path = base_dir / path;
    auto more = load_trace_file(path);
    wl.arrivals.insert(wl.arrivals.end(), more.begin(), more.end());
  }
  if (wl.mode != WorkloadConfig::Mode::Trace && !wl.arrivals.empty()) {
    throw ConfigError("workload: arrivals are only valid in trace mode");
  }
  if (wl.mode == WorkloadConfig::Mode::Periodic && !field(s, "period")) throw ConfigError("workload: periodic mode needs a period");
  return wl;
}

FaultModel parse_faults(const json& s) {
  const std::string w = "faults";
  only_keys(s, w, {"local_entangle", "measurement", "coordination", "feedforward"});
  FaultModel f;
  read(s, "local_entangle", w, f.p[0], get_number);
  read(s, "measurement", w, f.p[1], get_number);
  read(s, "coordination", w, f.p[2], get_number);
  read(s, "feedforward", w, f.p[3], get_number);
  f.validate();
  return f;
}

ProtocolSettings parse_protocol(const json& s) {
  const std::string w = "protocol";
  only_keys(s, w,
            {"multiplier", "precheck", "jitter", "retries", "retry_spacing", "degradation", "selection", "min_fidelity",
             "stalled_window_as_erasure", "per_hop_decode", "stages"});
  ProtocolSettings p;
  read(s, "multiplier", w, p.multiplier, get_number);
  read(s, "precheck", w, p.precheck, get_bool);
  read(s, "jitter", w, p.jitter, get_number);
  read(s, "retries", w, p.retries, get_uint);
  read(s, "retry_spacing", w, p.retry_spacing, get_duration);
  read(s, "min_fidelity", w, p.min_fidelity, get_number);
  read(s, "stalled_window_as_erasure", w, p.stalled_window_as_erasure, get_bool);
  read(s, "per_hop_decode", w, p.per_hop_decode, get_bool);
  if (const json* d = field(s, "degradation")) {
    const auto v = get_string(*d, "protocol.degradation");
    if (v == "reset") p.degradation = DegradePolicy::Reset;
    else if (v == "measure") p.degradation = DegradePolicy::Measure;
    else throw ConfigError("protocol.degradation: expected reset or measure");
  }
  if (const json* sel = field(s, "selection")) {
    const auto v = get_string(*sel, "protocol.selection");
    if (v == "youngest_first") p.selection = SelectionPolicy::YoungestFirst;
    else if (v == "oldest_first") p.selection = SelectionPolicy::OldestFirst;
    else throw ConfigError("protocol.selection: expected youngest_first or oldest_first");
  }
  if (const json* st = field(s, "stages")) {
    const std::string sw = "protocol.stages";
    only_keys(*st, sw, {"query", "local_entangle", "measurement"});
    read(*st, "query", sw, p.stages.query, get_duration);
    read(*st, "local_entangle", sw, p.stages.local_entangle, get_duration);
    read(*st, "measurement", sw, p.stages.measurement, get_duration);
  }
  p.validate();
  return p;
}

PlatformProfile parse_profile(const json& s, const std::string& w) {
  only_keys(s, w, {"name", "tau_q", "tau_gate", "printed_n_ops"});
  PlatformProfile p;
  if (!field(s, "name") || !field(s, "tau_q")) throw ConfigError(w + ": needs name and tau_q");
  p.name = get_string(s["name"], w + ".name");
  auto range = [&](const json& v, const std::string& rw) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(rw + ": expected [min, max] durations");
    return std::pair{static_cast<double>(get_duration(v[0], rw)) * 1e-9,
                     static_cast<double>(get_duration(v[1], rw)) * 1e-9};
  };
  std::tie(p.tau_q_min, p.tau_q_max) = range(s["tau_q"], w + ".tau_q");
  if (const json* g = field(s, "tau_gate")) {
    auto [lo, hi] = range(*g, w + ".tau_gate");
    p.tau_gate_min = lo;
    p.tau_gate_max = hi;
  }
  if (const json* a = field(s, "printed_n_ops")) p.printed_n_ops = get_string(*a, w + ".printed_n_ops");
  p.validate();
  return p;
}

}  // namespace

ScenarioFile parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  only_keys(doc, "scenario",
            {"schema_version", "seed", "duration", "sweep_period", "snapshot_period", "scaling", "timing", "topology",
             "links", "workload", "faults", "protocol", "metrics", "profiles", "annotations"});
  ScenarioFile s;
  if (const json* v = field(doc, "schema_version")) {
    if (get_uint(*v, "schema_version") != kScenarioSchemaVersion) throw ConfigError("unsupported schema_version");
  }
  if (const json* v = field(doc, "seed")) {
    s.sim.seed = get_uint(*v, "seed");
    s.has_seed = true;
  }
  read(doc, "duration", "scenario", s.sim.duration_ns, get_duration);
  read(doc, "sweep_period", "scenario", s.sim.sweep_period_ns, get_duration);
  read(doc, "snapshot_period", "scenario", s.sim.snapshot_period_ns, get_duration);
  if (const json* v = field(doc, "scaling")) {
    s.sim.scaling = parse_scaling(*v);
    s.has_scaling = true;
  }
  if (const json* v = field(doc, "timing")) s.sim.timing = parse_timing(*v);
  if (const json* v = field(doc, "topology")) s.sim.topology = parse_topology(*v);
  if (const json* v = field(doc, "links")) {
    if (!v->is_array()) throw ConfigError("links: expected an array");
    for (std::size_t k = 0; k < v->size(); ++k) s.sim.links.push_back(parse_link((*v)[k], "links[" + std::to_string(k) + "]"));
  }
  if (const json* v = field(doc, "workload")) s.sim.workload = parse_workload(*v, base_dir);
  if (const json* v = field(doc, "faults")) s.sim.faults = parse_faults(*v);
  if (const json* v = field(doc, "protocol")) s.sim.protocol = parse_protocol(*v);
  if (const json* v = field(doc, "metrics")) {
    only_keys(*v, "metrics", {"residual_depolarizing_rate", "dominance_fraction"});
    read(*v, "residual_depolarizing_rate", "metrics", s.metrics.residual_depolarizing_rate, get_number);
    read(*v, "dominance_fraction", "metrics", s.metrics.dominance_fraction, get_number);
    s.metrics.validate();
  }
  if (const json* v = field(doc, "profiles")) {
    if (!v->is_array()) throw ConfigError("profiles: expected an array");
    for (std::size_t k = 0; k < v->size(); ++k) s.profiles.push_back(parse_profile((*v)[k], "profiles[" + std::to_string(k) + "]"));
  }
  if (const json* v = field(doc, "annotations")) {
    if (!v->is_object()) throw ConfigError("annotations: expected an object");
    s.annotations = ordered_json::parse(v->dump());
  }
  return s;
}

ScenarioFile parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario(doc, base_dir);
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.parent_path());
}

namespace {

ordered_json modules_json(const std::vector<ModuleId>& ids) {
  ordered_json a = ordered_json::array();
  for (ModuleId m : ids) a.push_back(m);
  return a;
}

ordered_json links_json(const std::vector<Link>& links) {
  ordered_json a = ordered_json::array();
  for (const Link& l : links) a.push_back({l.a, l.b});
  return a;
}

}  // namespace

ordered_json serialize_scenario(const ScenarioFile& s) {
  const SimConfig& c = s.sim;
  ordered_json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  if (s.has_seed) doc["seed"] = c.seed;
  doc["duration"] = format_duration(c.duration_ns);
  doc["sweep_period"] = format_duration(c.sweep_period_ns);
  doc["snapshot_period"] = format_duration(c.snapshot_period_ns);
  if (c.scaling) {
    const auto& p = *c.scaling;
    doc["scaling"] = {{"A", p.A},       {"B", p.B},   {"epsilon", p.epsilon}, {"gamma", p.gamma},
                      {"eta_trans", p.eta_trans}, {"D", p.D}, {"kappa", p.kappa}};
  }
  const auto& t = c.timing;
  doc["timing"] = {{"tau_q", format_duration(t.tau_q)},
                   {"tau_q_p", format_duration(t.tau_q_p)},
                   {"tau_decode", format_duration(t.tau_decode)},
                   {"tau_ff", format_duration(t.tau_ff)},
                   {"tau_route", format_duration(t.tau_route)},
                   {"alpha", t.alpha},
                   {"refractive_index", t.refractive_index_n},
                   {"light_speed", t.light_speed_c},
                   {"safety_margin", t.safety_margin}};

  ordered_json topo;
  topo["mode"] = c.topology.mode == Topology::Mode::Grid ? "grid" : "graph";
  topo["modules"] = ordered_json::array();
  for (const auto& m : c.topology.modules) {
    ordered_json mj;
    mj["id"] = m.id;
    if (c.topology.mode == Topology::Mode::Grid) mj["pos"] = {m.pos.x, m.pos.y};
    if (m.local_gate_ns) mj["local_gate"] = format_duration(*m.local_gate_ns);
    topo["modules"].push_back(mj);
  }
  if (c.topology.mode == Topology::Mode::Graph) {
    topo["edges"] = ordered_json::array();
    for (const auto& e : c.topology.edges) {
      topo["edges"].push_back({{"a", e.a}, {"b", e.b}, {"latency", format_duration(e.latency_ns)}});
    }
  }
  doc["topology"] = topo;

  doc["links"] = ordered_json::array();
  for (const auto& l : c.links) {
    ordered_json lj;
    lj["endpoints"] = {l.endpoints.a, l.endpoints.b};
    lj["attempt_period"] = format_duration(l.attempt_period_ns);
    lj["eta"] = l.eta_trans;
    if (l.fidelity.fixed()) lj["fidelity"] = l.fidelity.lo;
    else lj["fidelity"] = {{"min", l.fidelity.lo}, {"max", l.fidelity.hi}};
    doc["links"].push_back(lj);
  }

  const auto& w = c.workload;
  ordered_json wj;
  switch (w.mode) {
    case WorkloadConfig::Mode::None: wj["mode"] = "none"; break;
    case WorkloadConfig::Mode::Periodic: wj["mode"] = "periodic"; break;
    case WorkloadConfig::Mode::Trace: wj["mode"] = "trace"; break;
  }
  if (w.mode == WorkloadConfig::Mode::Periodic) {
    wj["period"] = format_duration(w.period_ns);
    wj["start"] = format_duration(w.start_ns);
    wj["participants"] = modules_json(w.participants);
    wj["required_links"] = links_json(w.required_links);
    if (w.max_transactions) wj["max_transactions"] = *w.max_transactions;
  }
  if (w.mode == WorkloadConfig::Mode::Trace) {
    wj["arrivals"] = ordered_json::array();
    for (const auto& a : w.arrivals) {
      wj["arrivals"].push_back({{"at", format_duration(a.at_ns)},
                                {"participants", modules_json(a.participants)},
                                {"required_links", links_json(a.required_links)}});
    }
  }
  doc["workload"] = wj;

  doc["faults"] = {{"local_entangle", c.faults.p[0]},
                   {"measurement", c.faults.p[1]},
                   {"coordination", c.faults.p[2]},
                   {"feedforward", c.faults.p[3]}};

  const auto& p = c.protocol;
  doc["protocol"] = {{"multiplier", p.multiplier},
                     {"precheck", p.precheck},
                     {"jitter", p.jitter},
                     {"retries", p.retries},
                     {"retry_spacing", format_duration(p.retry_spacing)},
                     {"degradation", p.degradation == DegradePolicy::Reset ? "reset" : "measure"},
                     {"selection", p.selection == SelectionPolicy::YoungestFirst ? "youngest_first" : "oldest_first"},
                     {"min_fidelity", p.min_fidelity},
                     {"stalled_window_as_erasure", p.stalled_window_as_erasure},
                     {"per_hop_decode", p.per_hop_decode},
                     {"stages",
                      {{"query", format_duration(p.stages.query)},
                       {"local_entangle", format_duration(p.stages.local_entangle)},
                       {"measurement", format_duration(p.stages.measurement)}}}};
  doc["metrics"] = {{"residual_depolarizing_rate", s.metrics.residual_depolarizing_rate},
                    {"dominance_fraction", s.metrics.dominance_fraction}};
  if (!s.profiles.empty()) {
    doc["profiles"] = ordered_json::array();
    for (const auto& pr : s.profiles) {
      ordered_json pj;
      pj["name"] = pr.name;
      pj["tau_q"] = {format_duration(round_half_up(pr.tau_q_min * 1e9)), format_duration(round_half_up(pr.tau_q_max * 1e9))};
      if (pr.tau_gate_min) {
        pj["tau_gate"] = {format_duration(round_half_up(*pr.tau_gate_min * 1e9)),
                          format_duration(round_half_up(*pr.tau_gate_max * 1e9))};
      }
      if (!pr.printed_n_ops.empty()) pj["printed_n_ops"] = pr.printed_n_ops;
      doc["profiles"].push_back(pj);
    }
  }
  if (!s.annotations.empty()) doc["annotations"] = s.annotations;
  return doc;
}

std::string config_hash(const ScenarioFile& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_scenario(s).dump())));
  return buf;
}

}  // namespace qmod
