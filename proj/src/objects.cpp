#include "i2t/objects.hpp"

#include "i2t/errors.hpp"

namespace i2t {

namespace {

ObjectModel named(const std::string& name) {
  ObjectModel obj;
  obj.name = name;
  return obj;
}

RigidTransform at(double x, double y, double z) {
  RigidTransform pose;
  pose.translation = Vec3{x, y, z};
  return pose;
}

std::vector<ObjectModel> train_set() {
  ObjectModel box = named("train_box");
  box.parts.push_back(Primitive::box(0.02, 0.025, 0.03));
  ObjectModel cyl = named("train_cyl");
  cyl.parts.push_back(Primitive::cylinder(0.015, 0.03));
  return {box, cyl};
}

std::vector<ObjectModel> primitives_set() {
  // Matched extents on purpose: every shape fits the same ~36 mm bounding
  // cube, so only local surface detail separates them.
  ObjectModel sphere = named("rec_sphere");
  sphere.parts.push_back(Primitive::sphere(0.018));
  ObjectModel cone = named("rec_cone");
  cone.parts.push_back(Primitive::cone(0.018, 0.036, at(0, 0, -0.018)));
  ObjectModel prism = named("rec_prism");
  prism.parts.push_back(Primitive::triangular_prism(0.031, 0.018));
  return {sphere, cone, prism};
}

std::vector<ObjectModel> tools_set() {
  ObjectModel screwdriver = named("screwdriver");
  screwdriver.parts.push_back(Primitive::cylinder(0.012, 0.03));
  screwdriver.parts.push_back(Primitive::cone(0.008, 0.04, at(0, 0, 0.03)));

  ObjectModel hammer = named("hammer");
  hammer.parts.push_back(Primitive::cylinder(0.008, 0.04));
  hammer.parts.push_back(Primitive::box(0.025, 0.012, 0.012, at(0, 0, 0.045)));

  ObjectModel hook = named("hook");
  hook.parts.push_back(Primitive::box(0.008, 0.008, 0.04));
  hook.parts.push_back(Primitive::box(0.02, 0.008, 0.008, at(0.015, 0, 0.032)));
  return {screwdriver, hammer, hook};
}

}  // namespace

std::vector<ObjectModel> object_set(const std::string& name) {
  if (name == "train") return train_set();
  if (name == "primitives") return primitives_set();
  if (name == "tools") return tools_set();
  throw ValidationError("unknown object set '" + name + "' (expected train, primitives, tools)");
}

std::vector<std::string> object_set_names() { return {"train", "primitives", "tools"}; }

}  // namespace i2t
