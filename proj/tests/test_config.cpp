#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "i2t/config.hpp"
#include "i2t/errors.hpp"
#include "i2t/geometry.hpp"
#include "i2t/objects.hpp"

using namespace i2t;

TEST_CASE("empty text yields defaults") {
  Config c = parse_config_text("");
  CHECK(c.workers == 1);
  CHECK(c.pad_side == doctest::Approx(0.02));
  CHECK(c.standoff == doctest::Approx(0.01));
  CHECK(c.approach_fraction == doctest::Approx(0.5));
  CHECK(c.penetration_min == doctest::Approx(0.5));
  CHECK(c.penetration_max == doctest::Approx(2.0));
  CHECK(c.train_fraction == doctest::Approx(0.8));
  CHECK(c.epochs == 150);
  CHECK(c.batch == 32);
  CHECK(c.lr == doctest::Approx(1e-3));
  CHECK(c.aux_weight == doctest::Approx(0.5));
  CHECK(c.touches == 10);
  CHECK(c.episodes == 20);
  CHECK(c.frame_candidates == 16);
  CHECK(c.stamp_n == 1280);
  CHECK(c.stamp_epochs == 80);
  CHECK(c.kmeans_k == 5);
}

TEST_CASE("every key parses and overrides its field") {
  std::string text =
      "workers = 4\n"
      "pad_side = 0.03\n"
      "standoff = 0.012\n"
      "approach_fraction = 0.4\n"
      "penetration_min = 0.25\n"
      "penetration_max = 1.5\n"
      "train_fraction = 0.75\n"
      "epochs = 9\n"
      "batch = 16\n"
      "lr = 0.002\n"
      "aux_weight = 0.125\n"
      "touches = 7\n"
      "episodes = 3\n"
      "frame_candidates = 8\n"
      "stamp_n = 100\n"
      "stamp_epochs = 11\n"
      "kmeans_k = 2\n";
  Config c = parse_config_text(text);
  CHECK(c.workers == 4);
  CHECK(c.pad_side == doctest::Approx(0.03));
  CHECK(c.standoff == doctest::Approx(0.012));
  CHECK(c.approach_fraction == doctest::Approx(0.4));
  CHECK(c.penetration_min == doctest::Approx(0.25));
  CHECK(c.penetration_max == doctest::Approx(1.5));
  CHECK(c.train_fraction == doctest::Approx(0.75));
  CHECK(c.epochs == 9);
  CHECK(c.batch == 16);
  CHECK(c.lr == doctest::Approx(0.002));
  CHECK(c.aux_weight == doctest::Approx(0.125));
  CHECK(c.touches == 7);
  CHECK(c.episodes == 3);
  CHECK(c.frame_candidates == 8);
  CHECK(c.stamp_n == 100);
  CHECK(c.stamp_epochs == 11);
  CHECK(c.kmeans_k == 2);
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  std::string text =
      "# leading comment\n"
      "\n"
      "   \t \n"
      "  epochs   =   25   # trailing comment\n"
      "batch=64\n"
      "\t lr \t=\t 0.01 \r\n";
  Config c = parse_config_text(text);
  CHECK(c.epochs == 25);
  CHECK(c.batch == 64);
  CHECK(c.lr == doctest::Approx(0.01));
  CHECK(c.workers == 1);  // untouched field keeps its default
}

TEST_CASE("last assignment wins on repeated keys") {
  Config c = parse_config_text("epochs = 5\nepochs = 12\n");
  CHECK(c.epochs == 12);
}

TEST_CASE("malformed input is rejected with a line or key message") {
  CHECK_THROWS_WITH_AS(parse_config_text("epochs\n"),
                       "malformed config line 1: expected key = value", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("# ok\n = 5\n"),
                       "malformed config line 2: expected key = value", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("epochs =\n"),
                       "malformed config line 1: expected key = value", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("epochs = twelve\n"),
                       "malformed config value for epochs: 'twelve'", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("epochs = 12extra\n"),
                       "malformed config value for epochs: '12extra'", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("epochs = 99999999999\n"),
                       "malformed config value for epochs: '99999999999'", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("lr = 0.0x\n"),
                       "malformed config value for lr: '0.0x'", ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("cadence = 3\n"), "unknown config key: cadence",
                       ValidationError);
}

TEST_CASE("file parsing and the echoed form round-trip") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "i2t_test_config.cfg";
  {
    std::ofstream out(path);
    out << "# experiment overrides\nepochs = 33\naux_weight = 0.75\n";
  }
  Config c = parse_config(path.string());
  CHECK(c.epochs == 33);
  CHECK(c.aux_weight == doctest::Approx(0.75));

  // echo_config emits valid config text that parses back to the same values.
  std::ostringstream echoed;
  echo_config(c, echoed);
  Config back = parse_config_text(echoed.str());
  CHECK(back.epochs == c.epochs);
  CHECK(back.aux_weight == doctest::Approx(c.aux_weight));
  CHECK(back.pad_side == doctest::Approx(c.pad_side));
  CHECK(back.stamp_n == c.stamp_n);

  fs::remove(path);
  CHECK_THROWS_AS(parse_config(path.string()), IoError);
}

TEST_CASE("object sets expose the documented catalog") {
  auto names = object_set_names();
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "train");
  CHECK(names[1] == "primitives");
  CHECK(names[2] == "tools");

  auto train = object_set("train");
  REQUIRE(train.size() == 2);
  CHECK(train[0].name == "train_box");
  CHECK(train[1].name == "train_cyl");

  auto primitives = object_set("primitives");
  REQUIRE(primitives.size() == 3);
  CHECK(primitives[0].name == "rec_sphere");
  CHECK(primitives[1].name == "rec_cone");
  CHECK(primitives[2].name == "rec_prism");

  auto tools = object_set("tools");
  REQUIRE(tools.size() == 3);
  CHECK(tools[0].name == "screwdriver");
  CHECK(tools[1].name == "hammer");
  CHECK(tools[2].name == "hook");

  // Every catalog object is a non-empty composite whose surface encloses the
  // origin region: the SDF at a far-away point is large and positive.
  for (const auto& set_name : names) {
    for (const auto& obj : object_set(set_name)) {
      REQUIRE(!obj.parts.empty());
      CHECK(sdf(obj, Vec3{0.5, 0.5, 0.5}) > 0.3);
      CHECK(sdf(obj, Vec3{0.5, 0.5, 0.5}) < 1.0);
    }
  }

  CHECK_THROWS_WITH_AS(object_set("household"),
                       "unknown object set 'household' (expected train, primitives, tools)",
                       ValidationError);
}
