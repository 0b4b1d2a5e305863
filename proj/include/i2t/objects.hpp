#pragma once

#include <string>
#include <vector>

#include "i2t/geometry.hpp"

namespace i2t {

// Named experiment object sets, all registered at the origin:
//   train      - two large primitives the touch model is trained on
//   primitives - three deliberately similar-sized primitives
//   tools      - three distinct composite shapes
std::vector<ObjectModel> object_set(const std::string& name);

std::vector<std::string> object_set_names();

}  // namespace i2t
