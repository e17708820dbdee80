#pragma once

#include <cstdint>
#include <string>

namespace edar {

enum class SegVariant { S, L };

std::string to_string(SegVariant v);
SegVariant seg_variant_from_string(const std::string& s);

struct PipelineConfig {
  double sigma = 0.30;          // event activation threshold
  double gamma = 0.001;         // event density threshold (0.1%)
  double epsilon_div = 1.0;     // denominator guard for the event map
  SegVariant seg_variant = SegVariant::S;
  int roi_pad_multiple = 16;    // crops padded to this multiple before segmentation
  uint64_t rng_seed = 1;

  void validate() const;  // throws std::invalid_argument on bad values
};

// JSON round trip. load merges file values over the given defaults, so a
// partial config file is fine.
PipelineConfig load_config_json(const std::string& path, const PipelineConfig& defaults = {});
PipelineConfig config_from_json_text(const std::string& text, const PipelineConfig& defaults = {});
std::string config_to_json_text(const PipelineConfig& config);

}  // namespace edar
