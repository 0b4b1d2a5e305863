#pragma once

#include <iosfwd>
#include <string>

namespace i2t {

// Flat experiment settings; a config file holds `key = value` lines with `#`
// comments, and command-line flags override whatever the file says.
struct Config {
  int workers = 1;
  double pad_side = 0.02;          // m
  double standoff = 0.01;          // m
  double approach_fraction = 0.5;  // of standoff
  double penetration_min = 0.5;    // mm
  double penetration_max = 2.0;    // mm
  double train_fraction = 0.8;
  int epochs = 150;
  int batch = 32;
  double lr = 1e-3;
  double aux_weight = 0.5;
  int touches = 10;
  int episodes = 20;
  int frame_candidates = 16;
  int stamp_n = 1280;
  int stamp_epochs = 80;
  int kmeans_k = 5;
};

Config parse_config_text(const std::string& text);
Config parse_config(const std::string& path);

// One `key = value` line per field, in declaration order.
void echo_config(const Config& config, std::ostream& out);

}  // namespace i2t
