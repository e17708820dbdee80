#include "edar/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace edar {

std::string to_string(SegVariant v) { return v == SegVariant::S ? "S" : "L"; }

SegVariant seg_variant_from_string(const std::string& s) {
  if (s == "S" || s == "s") return SegVariant::S;
  if (s == "L" || s == "l") return SegVariant::L;
  throw std::invalid_argument("seg_variant must be S or L, got '" + s + "'");
}

void PipelineConfig::validate() const {
  if (!(sigma > 0)) throw std::invalid_argument("config: sigma must be > 0");
  if (!(gamma >= 0 && gamma < 1)) throw std::invalid_argument("config: gamma must be in [0,1)");
  if (!(epsilon_div > 0)) throw std::invalid_argument("config: epsilon_div must be > 0");
  if (roi_pad_multiple < 16 || roi_pad_multiple % 16 != 0)
    throw std::invalid_argument("config: roi_pad_multiple must be a positive multiple of 16");
}

PipelineConfig config_from_json_text(const std::string& text, const PipelineConfig& defaults) {
  nlohmann::json j = nlohmann::json::parse(text);
  PipelineConfig c = defaults;
  c.sigma = j.value("sigma", c.sigma);
  c.gamma = j.value("gamma", c.gamma);
  c.epsilon_div = j.value("epsilon_div", c.epsilon_div);
  if (j.contains("seg_variant")) c.seg_variant = seg_variant_from_string(j.at("seg_variant").get<std::string>());
  c.roi_pad_multiple = j.value("roi_pad_multiple", c.roi_pad_multiple);
  c.rng_seed = j.value("rng_seed", c.rng_seed);
  c.validate();
  return c;
}

PipelineConfig load_config_json(const std::string& path, const PipelineConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json_text(text, defaults);
}

std::string config_to_json_text(const PipelineConfig& config) {
  nlohmann::json j;
  j["sigma"] = config.sigma;
  j["gamma"] = config.gamma;
  j["epsilon_div"] = config.epsilon_div;
  j["seg_variant"] = to_string(config.seg_variant);
  j["roi_pad_multiple"] = config.roi_pad_multiple;
  j["rng_seed"] = config.rng_seed;
  return j.dump(2);
}

}  // namespace edar
