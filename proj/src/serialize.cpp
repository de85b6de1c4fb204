#include "qpnet/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qpnet {

namespace {

Vec vec_from_json(const json& j) { return j.get<Vec>(); }

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.n; ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.n; ++k) row.push_back(m.at(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j) {
  Mat m(j.size());
  for (std::size_t i = 0; i < m.n; ++i) {
    const auto& row = j.at(i);
    if (row.size() != m.n) throw std::invalid_argument("model JSON: non-square matrix");
    for (std::size_t k = 0; k < m.n; ++k) m.at(i, k) = row.at(k).get<double>();
  }
  return m;
}

std::string normalizer_name(NormalizerKind k) {
  return k == NormalizerKind::Atan ? "atan" : "tanh";
}

NormalizerKind normalizer_from_name(const std::string& s) {
  if (s == "atan") return NormalizerKind::Atan;
  if (s == "tanh") return NormalizerKind::Tanh;
  throw std::invalid_argument("unknown normalizer: " + s);
}

std::string gate_name(GateKind k) {
  return k == GateKind::ReluTanh ? "relu_tanh" : "gated_tanh";
}

GateKind gate_from_name(const std::string& s) {
  if (s == "relu_tanh") return GateKind::ReluTanh;
  if (s == "gated_tanh") return GateKind::GatedTanh;
  throw std::invalid_argument("unknown gate: " + s);
}

json sample_to_json(const FunctionSample& f) {
  return json{{"grid", f.grid}, {"values", f.values}};
}

FunctionSample sample_from_json(const json& j) {
  FunctionSample f;
  f.grid = vec_from_json(j.at("grid"));
  f.values = vec_from_json(j.at("values"));
  f.validate();
  return f;
}

}  // namespace

json encoder_to_json(const EncoderSpec& spec) {
  json j;
  if (const auto* p = std::get_if<PointEvalEncoder>(&spec)) {
    j["kind"] = "point_eval";
    j["sites"] = p->sites;
    j["normalizer"] = normalizer_name(p->normalizer.kind);
  } else if (const auto* m = std::get_if<MetricLandmarkEncoder>(&spec)) {
    j["kind"] = "metric_landmark";
    json lms = json::array();
    for (const auto& d : m->landmarks) lms.push_back(sample_to_json(d));
    j["landmarks"] = std::move(lms);
    j["metric"] = m->metric == MetricKind::L2 ? "l2" : "sup";
    j["normalizer"] = normalizer_name(m->normalizer.kind);
  } else if (const auto* l = std::get_if<LinearFunctionalEncoder>(&spec)) {
    j["kind"] = "linear_functional";
    j["weights"] = l->weights;
    j["normalizer"] = normalizer_name(l->normalizer.kind);
  } else {
    const auto& c = std::get<ConvexPreservingEncoder>(spec);
    j["kind"] = "convex_preserving";
    j["functionals"] = c.functionals;
    json ranges = json::array();
    for (const auto& [a, b] : c.ranges) ranges.push_back(json::array({a, b}));
    j["ranges"] = std::move(ranges);
    j["ranges_estimated"] = c.ranges_estimated;
  }
  return j;
}

EncoderSpec encoder_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "point_eval") {
    PointEvalEncoder e;
    e.sites = vec_from_json(j.at("sites"));
    e.normalizer.kind = normalizer_from_name(j.at("normalizer").get<std::string>());
    return e;
  }
  if (kind == "metric_landmark") {
    MetricLandmarkEncoder e;
    for (const auto& d : j.at("landmarks")) e.landmarks.push_back(sample_from_json(d));
    e.metric = j.at("metric").get<std::string>() == "sup" ? MetricKind::Sup : MetricKind::L2;
    e.normalizer.kind = normalizer_from_name(j.at("normalizer").get<std::string>());
    return e;
  }
  if (kind == "linear_functional") {
    LinearFunctionalEncoder e;
    e.weights = j.at("weights").get<std::vector<Vec>>();
    e.normalizer.kind = normalizer_from_name(j.at("normalizer").get<std::string>());
    return e;
  }
  if (kind == "convex_preserving") {
    ConvexPreservingEncoder e;
    e.functionals = j.at("functionals").get<std::vector<Vec>>();
    for (const auto& r : j.at("ranges")) {
      if (r.size() != 2) throw std::invalid_argument("encoder JSON: bad range pair");
      e.ranges.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
    }
    e.ranges_estimated = j.value("ranges_estimated", false);
    return e;
  }
  throw std::invalid_argument("unknown encoder kind: " + kind);
}

json activation_to_json(const ActivationSpec& act) {
  json j;
  if (const auto* r = std::get_if<RankOneActivation>(&act)) {
    j["kind"] = "rank_one";
    j["psi"] = r->psi;
    j["u_plus"] = r->u_plus;
    j["gate"] = gate_name(r->gate);
  } else {
    j["kind"] = "componentwise";
    j["gate"] = gate_name(std::get<ComponentwiseActivation>(act).gate);
  }
  return j;
}

ActivationSpec activation_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rank_one") {
    RankOneActivation r;
    r.psi = vec_from_json(j.at("psi"));
    r.u_plus = vec_from_json(j.at("u_plus"));
    r.gate = gate_from_name(j.at("gate").get<std::string>());
    return r;
  }
  if (kind == "componentwise")
    return ComponentwiseActivation{gate_from_name(j.at("gate").get<std::string>())};
  throw std::invalid_argument("unknown activation kind: " + kind);
}

namespace {

json neurons_to_json(const std::vector<NeuronParams>& neurons) {
  json arr = json::array();
  for (const auto& nr : neurons)
    arr.push_back(json{{"h", nr.h}, {"B", mat_to_json(nr.B)}, {"y", nr.y}});
  return arr;
}

std::vector<NeuronParams> neurons_from_json(const json& arr) {
  std::vector<NeuronParams> out;
  for (const auto& nj : arr) {
    NeuronParams nr;
    nr.h = vec_from_json(nj.at("h"));
    nr.B = mat_from_json(nj.at("B"));
    nr.y = vec_from_json(nj.at("y"));
    out.push_back(std::move(nr));
  }
  return out;
}

json model_header(std::size_t truncation, const ActivationSpec& act,
                  const std::shared_ptr<const EncoderSpec>& enc) {
  json j;
  j["version"] = 1;
  j["truncation"] = truncation;
  j["theta_layout"] = "per-neuron h|B-rowmajor|y";
  j["activation"] = activation_to_json(act);
  if (enc) j["encoder"] = encoder_to_json(*enc);
  return j;
}

}  // namespace

json model_to_json(const ScalarNet& net) {
  json j = model_header(net.truncation, net.activation, net.encoder);
  j["neurons"] = neurons_to_json(net.neurons);
  return j;
}

json model_to_json(const VectorNet& vnet) {
  vnet.validate();
  const auto& first = vnet.components.front();
  json j = model_header(first.truncation, first.activation, first.encoder);
  j["neurons_per_component"] = first.neurons.size();
  json flat = json::array();
  for (const auto& c : vnet.components)
    for (const auto& nr : c.neurons)
      flat.push_back(json{{"h", nr.h}, {"B", mat_to_json(nr.B)}, {"y", nr.y}});
  j["neurons"] = std::move(flat);
  j["out_vectors"] = vnet.out_vectors;
  return j;
}

LoadedModel model_from_json(const json& j) {
  std::size_t truncation = j.at("truncation").get<std::size_t>();
  ActivationSpec act = activation_from_json(j.at("activation"));
  std::shared_ptr<const EncoderSpec> enc;
  if (j.contains("encoder"))
    enc = std::make_shared<const EncoderSpec>(encoder_from_json(j.at("encoder")));

  std::vector<NeuronParams> flat = neurons_from_json(j.at("neurons"));
  if (!j.contains("out_vectors")) {
    ScalarNet net;
    net.truncation = truncation;
    net.activation = std::move(act);
    net.encoder = std::move(enc);
    net.neurons = std::move(flat);
    net.validate();
    return net;
  }
  VectorNet vnet;
  vnet.out_vectors = j.at("out_vectors").get<std::vector<Vec>>();
  std::size_t per = j.at("neurons_per_component").get<std::size_t>();
  if (per == 0 || flat.size() != per * vnet.out_vectors.size())
    throw std::invalid_argument("model JSON: neurons do not tile the components");
  for (std::size_t m = 0; m < vnet.out_vectors.size(); ++m) {
    ScalarNet c;
    c.truncation = truncation;
    c.activation = act;
    c.encoder = enc;
    c.neurons.assign(flat.begin() + static_cast<std::ptrdiff_t>(m * per),
                     flat.begin() + static_cast<std::ptrdiff_t>((m + 1) * per));
    vnet.components.push_back(std::move(c));
  }
  vnet.validate();
  return vnet;
}

json codebook_to_json(const Codebook& cb) {
  json j;
  j["centers"] = cb.centers;
  j["payload_refs"] = cb.payload_refs;
  j["covering_radius"] = cb.covering_radius;
  j["epsilon"] = cb.epsilon;
  return j;
}

Codebook codebook_from_json(const json& j) {
  Codebook cb;
  cb.centers = j.at("centers").get<std::vector<Vec>>();
  cb.payload_refs = j.at("payload_refs").get<std::vector<std::string>>();
  cb.covering_radius = j.at("covering_radius").get<double>();
  cb.epsilon = j.at("epsilon").get<double>();
  if (cb.centers.size() != cb.payload_refs.size())
    throw std::invalid_argument("codebook JSON: centers/payload_refs mismatch");
  return cb;
}

void resolve_payloads(Codebook& cb, const Dataset& ds) {
  cb.payloads.clear();
  for (const auto& ref : cb.payload_refs) {
    bool found = false;
    for (const auto& r : ds.records) {
      if (r.id == ref) {
        cb.payloads.push_back(r.function_target ? *r.function_target : r.x);
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("codebook payload id not in dataset: " + ref);
  }
}

void write_dataset_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  json meta;
  meta["meta"] = json{{"family", ds.meta.family}, {"modes", ds.meta.modes},
                      {"bound", ds.meta.bound},   {"grid", ds.meta.grid},
                      {"count", ds.meta.count},   {"seed", ds.meta.seed},
                      {"split", ds.meta.split},   {"target", ds.meta.target}};
  out << meta.dump() << "\n";
  for (const auto& r : ds.records) {
    json j;
    j["id"] = r.id;
    j["grid"] = r.x.grid;
    j["values"] = r.x.values;
    if (r.scalar_target) j["target"] = *r.scalar_target;
    if (r.vector_target) j["target_vec"] = *r.vector_target;
    if (r.function_target) {
      j["target_grid"] = r.function_target->grid;
      j["target_values"] = r.function_target->values;
    }
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  Dataset ds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (first && j.contains("meta")) {
      const auto& m = j.at("meta");
      ds.meta.family = m.value("family", std::string("fourier"));
      ds.meta.modes = m.value("modes", std::size_t{0});
      ds.meta.bound = m.value("bound", 1.0);
      ds.meta.grid = m.value("grid", std::size_t{2});
      ds.meta.count = m.value("count", std::size_t{0});
      ds.meta.seed = m.value("seed", std::uint64_t{0});
      ds.meta.split = m.value("split", std::string());
      ds.meta.target = m.value("target", std::string("none"));
      first = false;
      continue;
    }
    first = false;
    Record r;
    r.id = j.at("id").get<std::string>();
    r.x.grid = vec_from_json(j.at("grid"));
    r.x.values = vec_from_json(j.at("values"));
    r.x.validate();
    if (j.contains("target")) r.scalar_target = j.at("target").get<double>();
    if (j.contains("target_vec")) r.vector_target = vec_from_json(j.at("target_vec"));
    if (j.contains("target_values")) {
      FunctionSample y;
      y.grid = j.contains("target_grid") ? vec_from_json(j.at("target_grid")) : r.x.grid;
      y.values = vec_from_json(j.at("target_values"));
      y.validate();
      r.function_target = std::move(y);
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

void write_loss_csv(const std::vector<double>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "step,loss\n";
  out.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) out << i << "," << history[i] << "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_str(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_num(const std::string& section, const std::string& key,
                           double fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  if (k == s->second.end()) return fallback;
  return std::stod(k->second);
}

std::string ConfigFile::require(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw std::invalid_argument("config: missing [" + section + "] " + key);
  return sections.at(section).at(key);
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  auto trim = [](std::string s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    cfg.sections[section][key] = val;
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) { return parse_config(read_text_file(path)); }

}  // namespace qpnet
