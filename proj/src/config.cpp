#include "i2t/config.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "i2t/errors.hpp"

namespace i2t {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t\r");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t\r");
  return s.substr(lo, hi - lo + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ValidationError("malformed config value for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw ValidationError("malformed config value for " + key + ": '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw ValidationError("malformed config value for " + key + ": '" + value + "'");
  }
  if (used != value.size() || v < -1000000000 || v > 1000000000)
    throw ValidationError("malformed config value for " + key + ": '" + value + "'");
  return int(v);
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("malformed config line " + std::to_string(line_no) +
                            ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("malformed config line " + std::to_string(line_no) +
                            ": expected key = value");

    if (key == "workers") config.workers = parse_int(key, value);
    else if (key == "pad_side") config.pad_side = parse_double(key, value);
    else if (key == "standoff") config.standoff = parse_double(key, value);
    else if (key == "approach_fraction") config.approach_fraction = parse_double(key, value);
    else if (key == "penetration_min") config.penetration_min = parse_double(key, value);
    else if (key == "penetration_max") config.penetration_max = parse_double(key, value);
    else if (key == "train_fraction") config.train_fraction = parse_double(key, value);
    else if (key == "epochs") config.epochs = parse_int(key, value);
    else if (key == "batch") config.batch = parse_int(key, value);
    else if (key == "lr") config.lr = parse_double(key, value);
    else if (key == "aux_weight") config.aux_weight = parse_double(key, value);
    else if (key == "touches") config.touches = parse_int(key, value);
    else if (key == "episodes") config.episodes = parse_int(key, value);
    else if (key == "frame_candidates") config.frame_candidates = parse_int(key, value);
    else if (key == "stamp_n") config.stamp_n = parse_int(key, value);
    else if (key == "stamp_epochs") config.stamp_epochs = parse_int(key, value);
    else if (key == "kmeans_k") config.kmeans_k = parse_int(key, value);
    else throw ValidationError("unknown config key: " + key);
  }
  return config;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

void echo_config(const Config& c, std::ostream& out) {
  out << "workers = " << c.workers << "\n"
      << "pad_side = " << c.pad_side << "\n"
      << "standoff = " << c.standoff << "\n"
      << "approach_fraction = " << c.approach_fraction << "\n"
      << "penetration_min = " << c.penetration_min << "\n"
      << "penetration_max = " << c.penetration_max << "\n"
      << "train_fraction = " << c.train_fraction << "\n"
      << "epochs = " << c.epochs << "\n"
      << "batch = " << c.batch << "\n"
      << "lr = " << c.lr << "\n"
      << "aux_weight = " << c.aux_weight << "\n"
      << "touches = " << c.touches << "\n"
      << "episodes = " << c.episodes << "\n"
      << "frame_candidates = " << c.frame_candidates << "\n"
      << "stamp_n = " << c.stamp_n << "\n"
      << "stamp_epochs = " << c.stamp_epochs << "\n"
      << "kmeans_k = " << c.kmeans_k << "\n";
}

}  // namespace i2t
