#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qpnet/dataset.hpp"
#include "qpnet/net.hpp"
#include "qpnet/quantize.hpp"
#include "qpnet/train.hpp"

#include <json.hpp>

namespace qpnet {

using json = nlohmann::json;

// EncoderSpec <-> JSON object with a "kind" tag. Doubles survive the round
// trip bit-exactly (shortest round-trip printing on write, correctly rounded
// parse on read).
json encoder_to_json(const EncoderSpec& spec);
EncoderSpec encoder_from_json(const json& j);

json activation_to_json(const ActivationSpec& act);
ActivationSpec activation_from_json(const json& j);

// Model JSON: {"version":1,"truncation":N,"theta_layout":"per-neuron h|B-rowmajor|y",
// "encoder":{...},"activation":{...},"neurons":[{"h":..,"B":..,"y":..}...]}
// Vector nets add "out_vectors" and "neurons_per_component"; their neurons
// are flattened in component order.
json model_to_json(const ScalarNet& net);
json model_to_json(const VectorNet& vnet);

using LoadedModel = std::variant<ScalarNet, VectorNet>;
LoadedModel model_from_json(const json& j);

json codebook_to_json(const Codebook& cb);
// Payloads are stored by reference; resolve against a dataset to fill them.
Codebook codebook_from_json(const json& j);
void resolve_payloads(Codebook& cb, const Dataset& ds);

// JSONL datasets: one record object per line; an optional leading
// {"meta": {...}} line carries family parameters, seed and split tag.
void write_dataset_jsonl(const Dataset& ds, const std::string& path);
Dataset read_dataset_jsonl(const std::string& path);

void write_loss_csv(const std::vector<double>& history, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Minimal TOML-style config: [section] headers, key = value lines,
// '#' comments, quoted or bare strings.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key, double fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

}  // namespace qpnet
