#include "qdl/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qdl/observables.hpp"

namespace qdl {

using nlohmann::json;

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Delta_1: return "Delta_1";
    case SweepAxis::eta: return "eta";
    case SweepAxis::temperature: return "temperature";
    case SweepAxis::Omega: return "Omega";
    case SweepAxis::Delta_p: return "Delta_p";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::Delta_1, SweepAxis::eta, SweepAxis::temperature, SweepAxis::Omega,
                      SweepAxis::Delta_p}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + name + "' (expected Delta_1, eta, temperature, Omega or Delta_p)");
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[i] = start + (stop - start) * double(i) / double(points - 1);
  v.back() = stop;
  return v;
}

void SweepSpec::validate() const {
  if (points < 2) throw ConfigError("sweep.points must be >= 2");
  if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop)) {
    throw ConfigError("sweep needs finite start < stop");
  }
  if (axis == SweepAxis::temperature && start < 0.0) throw ConfigError("temperature sweep must start at >= 0");
  if ((axis == SweepAxis::eta || axis == SweepAxis::Omega) && start < 0.0) {
    throw ConfigError("pump-strength sweep must start at >= 0");
  }
}

void apply_axis(SystemParams& p, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::Delta_1: p.Delta_1 = value; return;
    case SweepAxis::temperature: p.bath.temperature = value; return;
    case SweepAxis::eta:
      if (p.scheme() != PumpScheme::incoherent) throw ConfigError("axis eta needs the incoherent pump scheme");
      p.pump = IncoherentPump{value, value};
      return;
    case SweepAxis::Omega: {
      if (p.scheme() != PumpScheme::coherent) throw ConfigError("axis Omega needs the coherent pump scheme");
      CoherentPump c = p.coherent();
      c.omega_1 = c.omega_2 = value;
      p.pump = c;
      return;
    }
    case SweepAxis::Delta_p: {
      if (p.scheme() != PumpScheme::coherent) throw ConfigError("axis Delta_p needs the coherent pump scheme");
      CoherentPump c = p.coherent();
      c.delta_p = value;
      p.pump = c;
      return;
    }
  }
}

const std::vector<std::string>& output_labels() {
  static const std::vector<std::string> labels = [] {
    std::vector<std::string> l = observable_labels();
    for (const char* s : {"single1_net", "single2_net", "twophoton_net", "variance_sum", "variance_min"}) {
      l.emplace_back(s);
    }
    return l;
  }();
  return labels;
}

// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
  return x;
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

ModelForm parse_form(const std::string& s) {
  if (s == "full") return ModelForm::full;
  if (s == "effective") return ModelForm::effective;
  throw ConfigError("model must be 'full' or 'effective', got '" + s + "'");
}

OmegaPPrefactor parse_prefactor(const std::string& s) {
  if (s == "rabi") return OmegaPPrefactor::rabi;
  if (s == "cavity_frame") return OmegaPPrefactor::cavity_frame;
  throw ConfigError("omega_p_prefactor must be 'rabi' or 'cavity_frame', got '" + s + "'");
}

std::string prefactor_name(OmegaPPrefactor p) { return p == OmegaPPrefactor::rabi ? "rabi" : "cavity_frame"; }

void apply_params(const json& doc, SystemParams& p) {
  const std::string w = "params";
  check_keys(doc, w,
             {"g1", "g2", "delta_x", "Delta_xx", "Delta_1", "Delta_2", "kappa_1", "kappa_2", "kappa", "gamma_1",
              "gamma_2", "gamma_d", "n_max", "n_max1", "n_max2", "omega_p_prefactor"});
  p.g1 = get_number(doc, "g1", w, p.g1);
  p.g2 = get_number(doc, "g2", w, p.g2);
  p.delta_x = get_number(doc, "delta_x", w, p.delta_x);
  p.Delta_xx = get_number(doc, "Delta_xx", w, p.Delta_xx);
  p.Delta_1 = get_number(doc, "Delta_1", w, p.Delta_1);
  p.Delta_2 = get_number(doc, "Delta_2", w, p.Delta_2);
  if (doc.contains("kappa") && (doc.contains("kappa_1") || doc.contains("kappa_2"))) {
    throw ConfigError("params.kappa conflicts with kappa_1/kappa_2");
  }
  const double kappa = get_number(doc, "kappa", w, std::nan(""));
  if (!std::isnan(kappa)) p.kappa_1 = p.kappa_2 = kappa;
  p.kappa_1 = get_number(doc, "kappa_1", w, p.kappa_1);
  p.kappa_2 = get_number(doc, "kappa_2", w, p.kappa_2);
  p.gamma_1 = get_number(doc, "gamma_1", w, p.gamma_1);
  p.gamma_2 = get_number(doc, "gamma_2", w, p.gamma_2);
  p.gamma_d = get_number(doc, "gamma_d", w, p.gamma_d);
  if (doc.contains("n_max") && (doc.contains("n_max1") || doc.contains("n_max2"))) {
    throw ConfigError("params.n_max conflicts with n_max1/n_max2");
  }
  int n1 = p.layout.n_max1(), n2 = p.layout.n_max2();
  if (doc.contains("n_max")) n1 = n2 = get_int(doc, "n_max", w, n1);
  n1 = get_int(doc, "n_max1", w, n1);
  n2 = get_int(doc, "n_max2", w, n2);
  if (n1 < 1 || n2 < 1 || n1 > 40 || n2 > 40) throw ConfigError("photon truncation must lie in [1, 40]");
  p.layout = SpaceLayout(n1, n2);
  if (doc.contains("omega_p_prefactor")) {
    p.omega_p_prefactor = parse_prefactor(get_string(doc, "omega_p_prefactor", w, ""));
  }
}

void apply_pump(const json& doc, SystemParams& p) {
  const std::string w = "pump";
  check_keys(doc, w, {"scheme", "eta", "eta_1", "eta_2", "omega", "omega_1", "omega_2", "delta_p"});
  std::string scheme = get_string(doc, "scheme", w, to_string(p.scheme()));
  if (scheme == "incoherent") {
    for (const char* k : {"omega", "omega_1", "omega_2", "delta_p"}) {
      if (doc.contains(k)) throw ConfigError(std::string("pump.") + k + " needs scheme 'coherent'");
    }
    IncoherentPump ip = p.scheme() == PumpScheme::incoherent ? p.incoherent() : IncoherentPump{};
    if (doc.contains("eta") && (doc.contains("eta_1") || doc.contains("eta_2"))) {
      throw ConfigError("pump.eta conflicts with eta_1/eta_2");
    }
    if (doc.contains("eta")) ip.eta_1 = ip.eta_2 = get_number(doc, "eta", w, 0.0);
    ip.eta_1 = get_number(doc, "eta_1", w, ip.eta_1);
    ip.eta_2 = get_number(doc, "eta_2", w, ip.eta_2);
    p.pump = ip;
  } else if (scheme == "coherent") {
    for (const char* k : {"eta", "eta_1", "eta_2"}) {
      if (doc.contains(k)) throw ConfigError(std::string("pump.") + k + " needs scheme 'incoherent'");
    }
    CoherentPump cp = p.scheme() == PumpScheme::coherent ? p.coherent() : CoherentPump{};
    if (doc.contains("omega") && (doc.contains("omega_1") || doc.contains("omega_2"))) {
      throw ConfigError("pump.omega conflicts with omega_1/omega_2");
    }
    if (doc.contains("omega")) cp.omega_1 = cp.omega_2 = get_number(doc, "omega", w, 0.0);
    cp.omega_1 = get_number(doc, "omega_1", w, cp.omega_1);
    cp.omega_2 = get_number(doc, "omega_2", w, cp.omega_2);
    cp.delta_p = get_number(doc, "delta_p", w, cp.delta_p);
    p.pump = cp;
  } else {
    throw ConfigError("pump.scheme must be 'incoherent' or 'coherent', got '" + scheme + "'");
  }
}

void apply_bath(const json& doc, SystemParams& p) {
  const std::string w = "bath";
  check_keys(doc, w, {"temperature", "alpha_p", "omega_b"});
  PhononBathParams b = p.bath;
  b.temperature = get_number(doc, "temperature", w, b.temperature);
  const double alpha = get_number(doc, "alpha_p", w, b.alpha_p);
  const double omega_b = get_number(doc, "omega_b", w, b.omega_b);
  if (b.temperature < 0.0) throw ConfigError("bath.temperature must be >= 0");
  if (alpha < 0.0 || omega_b <= 0.0) throw ConfigError("bath needs alpha_p >= 0 and omega_b > 0");
  if (alpha != b.alpha_p || omega_b != b.omega_b) {
    b.alpha_p = alpha;
    b.omega_b = omega_b;
    b.g1_absolute = 0.0;
    try {
      b = calibrate_absolute_scale(b);
    } catch (const Error& e) {
      throw ConfigError(std::string("bath calibration failed: ") + e.what());
    }
  }
  p.bath = b;
}

SweepSpec parse_sweep(const json& doc) {
  const std::string w = "sweep";
  check_keys(doc, w, {"axis", "start", "stop", "points"});
  for (const char* k : {"axis", "start", "stop", "points"}) {
    if (!doc.contains(k)) throw ConfigError(std::string("sweep.") + k + " is required");
  }
  SweepSpec s;
  s.axis = parse_axis(get_string(doc, "axis", w, ""));
  s.start = get_number(doc, "start", w, 0.0);
  s.stop = get_number(doc, "stop", w, 0.0);
  s.points = get_int(doc, "points", w, 0);
  s.validate();
  return s;
}

std::vector<std::string> parse_labels(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError(where + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void apply_convergence(const json& doc, ConvergenceSettings& c) {
  const std::string w = "convergence";
  check_keys(doc, w, {"enabled", "observables", "step", "max_n", "rel_tol"});
  if (doc.contains("enabled")) {
    if (!doc.at("enabled").is_boolean()) throw ConfigError("convergence.enabled must be a boolean");
    c.enabled = doc.at("enabled").get<bool>();
  }
  if (doc.contains("observables")) c.observables = parse_labels(doc.at("observables"), "convergence.observables");
  c.step = get_int(doc, "step", w, c.step);
  c.max_n = get_int(doc, "max_n", w, c.max_n);
  c.rel_tol = get_number(doc, "rel_tol", w, c.rel_tol);
}

void apply_witness(const json& doc, WitnessSettings& ws) {
  const std::string w = "witness";
  check_keys(doc, w, {"phi1", "phi2", "scan_points"});
  ws.phi1 = get_number(doc, "phi1", w, ws.phi1);
  ws.phi2 = get_number(doc, "phi2", w, ws.phi2);
  ws.scan_points = get_int(doc, "scan_points", w, ws.scan_points);
}

bool same_sweep(const SweepSpec& a, const SweepSpec& b) {
  return a.axis == b.axis && a.start == b.start && a.stop == b.stop && a.points == b.points;
}

// -- presets ----------------------------------------------------------------

RunConfig incoherent_base() {
  RunConfig c;
  c.base.layout = SpaceLayout(6, 6);
  return c;
}

RunConfig coherent_base(double omega, double delta_p) {
  RunConfig c;
  c.base.pump = CoherentPump{omega, omega, delta_p};
  c.base.layout = SpaceLayout(4, 4);
  c.convergence.max_n = 8;
  return c;
}

void set_temperature(RunConfig& c, double t) { c.base.bath = default_bath(t); }

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2",   "fig3",   "fig4", "fig5", "fig6a", "fig6b",
                                                 "fig7",   "fig8",   "fig9", "fig10a", "fig10b", "fig11",
                                                 "fig12",  "fig13a", "fig13b"};
  return names;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "fig2" || name == "fig3") {
    c = incoherent_base();
    c.sweep = SweepSpec{SweepAxis::Delta_1, 2.0, 8.0, 61};
  } else if (name == "fig4" || name == "fig5") {
    c = incoherent_base();
    c.sweep = SweepSpec{SweepAxis::eta, 0.1, 5.0, 50};
  } else if (name == "fig6a" || name == "fig6b") {
    c = incoherent_base();
    c.model_form = ModelForm::effective;
    set_temperature(c, name == "fig6a" ? 5.0 : 20.0);
    c.sweep = SweepSpec{SweepAxis::eta, 0.1, 3.0, 30};
  } else if (name == "fig7" || name == "fig9") {
    c = coherent_base(2.0, 0.0);
    c.sweep = SweepSpec{SweepAxis::Delta_1, 0.0, 10.0, 51};
  } else if (name == "fig8") {
    // dressed-state doublet, resolved around Delta_1 = -Delta_2 +- Omega_1
    c = coherent_base(2.0, 0.0);
    c.sweep = SweepSpec{SweepAxis::Delta_1, 2.5, 8.5, 61};
  } else if (name == "fig10a" || name == "fig10b") {
    c = coherent_base(2.0, 0.0);
    c.model_form = ModelForm::effective;
    set_temperature(c, name == "fig10a" ? 5.0 : 20.0);
    c.sweep = SweepSpec{SweepAxis::Delta_1, 0.0, 10.0, 51};
  } else if (name == "fig11" || name == "fig12") {
    c = coherent_base(2.0, 7.0);
    c.sweep = SweepSpec{SweepAxis::Delta_1, 0.0, 10.0, 51};
  } else if (name == "fig13a" || name == "fig13b") {
    const bool weak = name == "fig13a";
    c = coherent_base(weak ? 0.5 : 2.0, 7.0);
    set_temperature(c, weak ? 5.0 : 20.0);
    c.sweep = SweepSpec{SweepAxis::Delta_1, 0.0, 10.0, 51};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += " " + n;
    throw ConfigError("unknown preset '" + name + "' (known:" + known + ")");
  }
  c.preset = name;
  return c;
}

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  try {
    base.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  if (sweep) {
    sweep->validate();
    SystemParams probe = base;
    apply_axis(probe, sweep->axis, sweep->start);
  }
  const auto& known = output_labels();
  for (const auto& o : outputs) {
    if (std::find(known.begin(), known.end(), o) == known.end()) {
      throw ConfigError("unknown output label '" + o + "'");
    }
  }
  const auto& obs = observable_labels();
  for (const auto& o : convergence.observables) {
    if (std::find(obs.begin(), obs.end(), o) == obs.end()) {
      throw ConfigError("unknown convergence observable '" + o + "'");
    }
  }
  if (convergence.enabled && convergence.observables.empty()) {
    throw ConfigError("convergence.observables must not be empty");
  }
  if (convergence.step < 1) throw ConfigError("convergence.step must be >= 1");
  if (convergence.max_n < 1 || convergence.max_n > 40) throw ConfigError("convergence.max_n must lie in [1, 40]");
  if (!(convergence.rel_tol > 0.0)) throw ConfigError("convergence.rel_tol must be > 0");
  if (witness.scan_points < 1) throw ConfigError("witness.scan_points must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

json RunConfig::to_json() const {
  json j;
  if (preset) j["preset"] = *preset;
  j["model"] = to_string(model_form);
  j["params"] = {{"g1", base.g1},
                 {"g2", base.g2},
                 {"delta_x", base.delta_x},
                 {"Delta_xx", base.Delta_xx},
                 {"Delta_1", base.Delta_1},
                 {"Delta_2", base.Delta_2},
                 {"kappa_1", base.kappa_1},
                 {"kappa_2", base.kappa_2},
                 {"gamma_1", base.gamma_1},
                 {"gamma_2", base.gamma_2},
                 {"gamma_d", base.gamma_d},
                 {"n_max1", base.layout.n_max1()},
                 {"n_max2", base.layout.n_max2()},
                 {"omega_p_prefactor", prefactor_name(base.omega_p_prefactor)}};
  if (base.scheme() == PumpScheme::incoherent) {
    j["pump"] = {{"scheme", "incoherent"}, {"eta_1", base.incoherent().eta_1}, {"eta_2", base.incoherent().eta_2}};
  } else {
    const CoherentPump& c = base.coherent();
    j["pump"] = {{"scheme", "coherent"}, {"omega_1", c.omega_1}, {"omega_2", c.omega_2}, {"delta_p", c.delta_p}};
  }
  j["bath"] = {{"temperature", base.bath.temperature}, {"alpha_p", base.bath.alpha_p}, {"omega_b", base.bath.omega_b}};
  if (sweep) {
    j["sweep"] = {{"axis", to_string(sweep->axis)}, {"start", sweep->start}, {"stop", sweep->stop},
                  {"points", sweep->points}};
  }
  j["outputs"] = outputs;
  j["output_path"] = output_path;
  j["convergence"] = {{"enabled", convergence.enabled},
                      {"observables", convergence.observables},
                      {"step", convergence.step},
                      {"max_n", convergence.max_n},
                      {"rel_tol", convergence.rel_tol}};
  j["witness"] = {{"phi1", witness.phi1}, {"phi2", witness.phi2}, {"scan_points", witness.scan_points}};
  j["workers"] = workers;
  return j;
}

RunConfig parse_config(const json& doc) {
  if (doc.is_null()) return parse_config(json::object());
  check_keys(doc, "config",
             {"preset", "model", "params", "pump", "bath", "sweep", "outputs", "output_path", "convergence",
              "witness", "workers"});
  RunConfig c;
  if (doc.contains("preset")) {
    if (!doc.at("preset").is_string()) throw ConfigError("preset must be a string");
    c = preset_config(doc.at("preset").get<std::string>());
  }
  if (doc.contains("model")) c.model_form = parse_form(get_string(doc, "model", "config", ""));
  if (doc.contains("params")) apply_params(doc.at("params"), c.base);
  if (doc.contains("pump")) apply_pump(doc.at("pump"), c.base);
  if (doc.contains("bath")) apply_bath(doc.at("bath"), c.base);
  if (doc.contains("sweep")) {
    const SweepSpec s = parse_sweep(doc.at("sweep"));
    if (c.preset && !same_sweep(s, *c.sweep)) {
      throw ConfigError("preset '" + *c.preset + "' fixes its own sweep; remove 'sweep' or 'preset'");
    }
    c.sweep = s;
  }
  if (doc.contains("outputs")) c.outputs = parse_labels(doc.at("outputs"), "outputs");
  c.output_path = get_string(doc, "output_path", "config", c.output_path);
  if (doc.contains("convergence")) apply_convergence(doc.at("convergence"), c.convergence);
  if (doc.contains("witness")) apply_witness(doc.at("witness"), c.witness);
  c.workers = get_int(doc, "workers", "config", c.workers);
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  return parse_config(doc);
}

}  // namespace qdl
