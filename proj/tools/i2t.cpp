// Command-line driver for the imagine2touch pipeline: dataset generation,
// touch-model training, recognition episodes, stamp classification, and
// signal clustering. Exit codes: 0 success, 2 validation/io error, 3 failed
// gradient check.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "i2t/analysis.hpp"
#include "i2t/config.hpp"
#include "i2t/dataset.hpp"
#include "i2t/errors.hpp"
#include "i2t/i2t_model.hpp"
#include "i2t/objects.hpp"
#include "i2t/parallel.hpp"
#include "i2t/recognition.hpp"
#include "i2t/shapeclass.hpp"

using nlohmann::json;
using namespace i2t;

namespace {

Config resolve_config(const std::string& path) {
  return path.empty() ? Config{} : parse_config(path);
}

void echo_resolved(const Config& cfg, std::uint64_t seed) {
  std::ostringstream text;
  echo_config(cfg, text);
  std::istringstream lines(text.str());
  std::cout << "resolved config:\n";
  for (std::string line; std::getline(lines, line);) std::cout << "  " << line << "\n";
  std::cout << "seed = " << seed << "\n";
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

CollectParams collect_params(const Config& cfg) {
  CollectParams params;
  params.pad_side = cfg.pad_side;
  params.standoff = cfg.standoff;
  params.approach_fraction = cfg.approach_fraction;
  params.penetration_min = cfg.penetration_min;
  params.penetration_max = cfg.penetration_max;
  return params;
}

int run_gen_data(const Config& cfg, const std::string& set, std::size_t n, std::uint64_t seed,
                 const std::string& out) {
  echo_resolved(cfg, seed);
  if (n == 0) throw ValidationError("gen-data needs --n > 0");
  auto objects = object_set(set);
  CollectParams params = collect_params(cfg);

  Dataset ds;
  ds.object_set = set;
  ds.seed = seed;
  ds.pad_side = cfg.pad_side;
  ds.standoff = cfg.standoff;
  ds.layout = params.layout;
  ds.samples = generate_samples(objects, n, seed, cfg.workers, params);
  ds.split = split_assignment(n, cfg.train_fraction, Rng::derive(seed, n));

  std::vector<TactileSignal> train_raw;
  for (std::size_t k = 0; k < n; ++k)
    if (ds.split[k]) train_raw.push_back(ds.samples[k].signal_raw);
  ds.standardizer = fit_standardizer(train_raw);

  save_dataset(ds, out);
  std::cout << "wrote " << n << " samples (" << train_raw.size() << " train, "
            << (n - train_raw.size()) << " val) of set '" << set << "' to " << out << "\n";
  return 0;
}

int run_train(const Config& cfg, const std::string& data, std::uint64_t seed,
              const std::string& out) {
  echo_resolved(cfg, seed);
  Dataset ds = load_dataset(data);

  TrainHyper hyper;
  hyper.epochs = cfg.epochs;
  hyper.batch = cfg.batch;
  hyper.lr = cfg.lr;
  hyper.aux_weight = cfg.aux_weight;
  hyper.seed = seed;
  auto [model, report] = train(ds, hyper);

  for (std::size_t e = 0; e < report.val_touch_mse.size(); ++e)
    std::cout << "epoch " << (e + 1) << "/" << report.val_touch_mse.size() << "  train_touch "
              << report.train_touch_mse[e] << "  val_touch " << report.val_touch_mse[e]
              << "  val_recon " << report.val_recon_mse[e] << "\n";
  if (report.best_epoch >= 0)
    std::cout << "best epoch " << (report.best_epoch + 1) << "\n";
  else
    std::cout << "no training epochs; saving the seeded initialization\n";
  std::cout << "val_touch_mse = " << report.final_val_touch_mse << "\n"
            << "baseline_val_mse = " << report.baseline_val_touch_mse << "\n"
            << "mse_ratio = " << report.final_val_touch_mse / report.baseline_val_touch_mse
            << "\n";

  save_model(model, out);
  std::cout << "wrote model to " << out << "\n";
  return 0;
}

int run_eval(const Config& cfg, const std::string& data, const std::string& model_path) {
  echo_resolved(cfg, 0);
  Dataset ds = load_dataset(data);
  I2TModel model = load_model(model_path);
  EvalReport report = evaluate_on_split(model, ds);
  std::cout << "val_touch_mse = " << report.touch_mse << "\n"
            << "val_recon_mse = " << report.recon_mse << "\n"
            << "baseline_val_mse = " << report.baseline_mse << "\n"
            << "mse_ratio = " << report.touch_mse / report.baseline_mse << "\n";
  return 0;
}

// Finite-difference audit of every backward pass the pipeline trains with:
// the three touch-model nets under the composite loss, and the stamp
// classifier under cross-entropy. Anything at or above 1e-4 relative error
// is a failure (exit 3).
int run_gradcheck(const Config& cfg, std::uint64_t seed) {
  echo_resolved(cfg, seed);
  constexpr double kTol = 1e-4;
  double worst = 0.0;

  I2TModel m = make_i2t_model(seed, 0.5);
  Rng data_rng(Rng::derive(seed, 1));
  PatchGrid patch;
  for (auto& v : patch) v = data_rng.uniform();
  TactileSignal target;
  target.space = SignalSpace::standardized;
  for (auto& v : target.values) v = data_rng.normal();

  nn::Vector xv(kPatchPixels);
  for (int k = 0; k < kPatchPixels; ++k) xv[k] = patch[k];
  nn::Matrix x = xv;
  nn::Vector tv(15);
  for (int k = 0; k < 15; ++k) tv[k] = target.values[k];
  nn::Matrix t = tv;

  nn::ForwardCache ce, ct, cr;
  nn::Matrix code = nn::forward(m.encoder, x, &ce);
  nn::Matrix touch = nn::forward(m.touch_head, code, &ct);
  nn::Matrix recon = nn::forward(m.recon_head, code, &cr);
  nn::Gradients ge = nn::zero_gradients(m.encoder);
  nn::Gradients gt = nn::zero_gradients(m.touch_head);
  nn::Gradients gr = nn::zero_gradients(m.recon_head);
  nn::Matrix dcode = nn::backward(m.touch_head, ct, nn::mse_grad(touch, t), gt);
  dcode += nn::backward(m.recon_head, cr, nn::Matrix(m.aux_weight * nn::mse_grad(recon, x)), gr);
  nn::backward(m.encoder, ce, dcode, ge);

  Rng probe_rng(Rng::derive(seed, 2));
  auto loss_fn = [&](const nn::DenseNet&) { return total_loss(m, patch, target); };
  struct Check {
    const char* name;
    double err;
  };
  std::vector<Check> checks;
  checks.push_back({"encoder", nn::gradcheck(m.encoder, loss_fn, ge, probe_rng)});
  checks.push_back({"touch_head", nn::gradcheck(m.touch_head, loss_fn, gt, probe_rng)});
  checks.push_back({"recon_head", nn::gradcheck(m.recon_head, loss_fn, gr, probe_rng)});

  Rng cls_rng(Rng::derive(seed, 3));
  nn::DenseNet cls = nn::make_net(
      {15, 500, 10, kStampClasses},
      {nn::Activation::relu, nn::Activation::identity, nn::Activation::identity}, cls_rng);
  const int batch = 8;
  nn::Matrix cx(15, batch);
  std::vector<int> labels(batch);
  for (int c = 0; c < batch; ++c) {
    for (int k = 0; k < 15; ++k) cx(k, c) = cls_rng.normal();
    labels[std::size_t(c)] = c % kStampClasses;
  }
  nn::ForwardCache cc;
  nn::Matrix logits = nn::forward(cls, cx, &cc);
  nn::Gradients gc = nn::zero_gradients(cls);
  nn::backward(cls, cc, nn::cross_entropy_grad(logits, labels), gc);
  auto cls_loss = [&](const nn::DenseNet& net) { return nn::cross_entropy(nn::forward(net, cx), labels); };
  checks.push_back({"classifier", nn::gradcheck(cls, cls_loss, gc, cls_rng)});

  for (const Check& c : checks) {
    std::cout << c.name << " max rel err = " << c.err << "\n";
    worst = std::max(worst, c.err);
  }
  std::cout << "worst = " << worst << " (tolerance " << kTol << ")\n";
  if (!(worst < kTol)) {
    std::cout << "gradcheck FAIL\n";
    return 3;
  }
  std::cout << "gradcheck PASS\n";
  return 0;
}

json frame_json(const SensorFrame& frame) {
  json rot = json::array();
  for (double v : frame.pose.rotation.m) rot.push_back(v);
  return json{{"translation", {frame.pose.translation.x, frame.pose.translation.y,
                               frame.pose.translation.z}},
              {"rotation", rot}};
}

int run_recognize(const Config& cfg, const std::string& model_path, const std::string& set,
                  const std::string& mode_str, std::uint64_t seed, const std::string& out) {
  echo_resolved(cfg, seed);
  I2TModel model = load_model(model_path);
  auto objects = object_set(set);
  RecognitionMode mode =
      mode_str == "i2t" ? RecognitionMode::i2t : RecognitionMode::proprioception;

  EpisodeParams params;
  params.collect = collect_params(cfg);
  params.touches = cfg.touches;
  params.frame_candidates = cfg.frame_candidates;

  if (cfg.episodes < 1) throw ValidationError("recognize needs episodes >= 1");
  const std::size_t per_object = std::size_t(cfg.episodes);
  const std::size_t total = objects.size() * per_object;
  std::vector<EpisodeReport> reports(total);
  parallel_for(total, unsigned(cfg.workers), [&](std::size_t idx) {
    Rng rng(Rng::derive(seed, idx));
    reports[idx] = run_episode(idx / per_object, objects, model, mode, rng, params);
  });

  std::ofstream file(out);
  if (!file) throw IoError("cannot write report file: " + out);
  std::vector<double> accuracy(std::size_t(params.touches), 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const EpisodeReport& rep = reports[idx];
    for (std::size_t t = 0; t < rep.touches.size(); ++t) {
      const TouchOutcome& touch = rep.touches[t];
      json line{{"episode", idx},
                {"set", set},
                {"mode", mode_str},
                {"true_object", rep.true_object},
                {"true_name", objects[rep.true_object].name},
                {"touch", t + 1},
                {"hypothesis", touch.hypothesis},
                {"winner", touch.winner},
                {"posterior", touch.posterior},
                {"correct", touch.correct},
                {"frame", frame_json(touch.frame)}};
      file << line.dump() << "\n";
      if (touch.correct) accuracy[t] += 1.0;
    }
  }
  for (double& a : accuracy) a /= double(total);
  json summary{{"summary", true},
               {"set", set},
               {"mode", mode_str},
               {"episodes", total},
               {"touches", params.touches},
               {"per_touch_accuracy", accuracy},
               {"final_accuracy", accuracy.back()}};
  file << summary.dump() << "\n";

  std::cout << "touch:";
  for (std::size_t t = 0; t < accuracy.size(); ++t) std::cout << "  " << (t + 1);
  std::cout << "\nacc:  ";
  for (double a : accuracy) std::cout << " " << fmt3(a);
  std::cout << "\nfinal-touch accuracy = " << fmt3(accuracy.back()) << " over " << total
            << " episodes (" << mode_str << ", " << set << ")\n"
            << "wrote report to " << out << "\n";
  return 0;
}

int run_shapeclass(const Config& cfg, std::size_t n, std::uint64_t seed) {
  echo_resolved(cfg, seed);
  StampDataset ds = generate_stamp_dataset(n, seed);
  StampTrainHyper hyper;
  hyper.epochs = cfg.stamp_epochs;
  hyper.batch = cfg.batch;
  hyper.lr = cfg.lr;
  hyper.seed = seed;
  auto [net, report] = train_classifier(ds, hyper);
  (void)net;

  std::cout << "Shape    ";
  for (int c = 0; c < kStampClasses; ++c)
    std::cout << " " << std::left << std::setw(9) << stamp_shape_name(StampShape(c));
  std::cout << " Total\n";
  std::cout << "Acc.     ";
  for (int c = 0; c < kStampClasses; ++c)
    std::cout << " " << std::left << std::setw(9) << fmt3(report.per_class_accuracy[std::size_t(c)]);
  std::cout << " " << fmt3(report.total_accuracy) << "\n\n";

  std::cout << "confusion (rows true, cols predicted):\n";
  for (int a = 0; a < kStampClasses; ++a) {
    std::cout << std::left << std::setw(9) << stamp_shape_name(StampShape(a));
    for (int b = 0; b < kStampClasses; ++b)
      std::cout << " " << std::setw(5) << report.confusion[std::size_t(a)][std::size_t(b)];
    std::cout << "  (" << report.test_counts[std::size_t(a)] << " test)\n";
  }
  return 0;
}

int run_cluster(const Config& cfg, const std::string& data, std::uint64_t seed,
                const std::string& out_json, const std::string& pgm_dir) {
  echo_resolved(cfg, seed);
  Dataset ds = load_dataset(data);
  ClusterReport report = cluster_report(ds, cfg.kmeans_k, seed);

  std::cout << "k = " << cfg.kmeans_k << ", inertia = " << report.inertia << "\n";
  for (std::size_t c = 0; c < report.clusters.size(); ++c) {
    const ClusterSummary& s = report.clusters[c];
    double z_sum = s.mean_signal[2] + s.mean_signal[5] + s.mean_signal[8] + s.mean_signal[11] +
                   s.mean_signal[14];
    std::cout << "cluster " << c << ": size " << s.size << ", mean z-signal sum " << z_sum
              << "\n";
  }

  if (!out_json.empty()) {
    json j;
    j["k"] = cfg.kmeans_k;
    j["seed"] = seed;
    j["inertia"] = report.inertia;
    j["assignment"] = report.assignment;
    j["clusters"] = json::array();
    for (const ClusterSummary& s : report.clusters)
      j["clusters"].push_back({{"size", s.size}, {"mean_signal", s.mean_signal}});
    std::ofstream file(out_json);
    if (!file) throw IoError("cannot write cluster report: " + out_json);
    file << j.dump(2) << "\n";
    std::cout << "wrote cluster report to " << out_json << "\n";
  }
  if (!pgm_dir.empty()) {
    std::filesystem::create_directories(pgm_dir);
    for (std::size_t c = 0; c < report.clusters.size(); ++c) {
      std::string path = pgm_dir + "/cluster_" + std::to_string(c) + ".pgm";
      write_pgm(report.clusters[c].mean_patch, path);
    }
    std::cout << "wrote " << report.clusters.size() << " mean-patch images to " << pgm_dir
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imagine2touch: simulated depth-to-tactile pipeline"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "render touches and write a dataset");
  std::string gen_config, gen_set = "train", gen_out;
  std::size_t gen_n = 2000;
  std::uint64_t gen_seed = 0;
  int gen_workers = 1;
  gen->add_option("--config", gen_config, "config file");
  gen->add_option("--objects", gen_set, "object set: train, primitives, tools");
  gen->add_option("--n", gen_n, "number of samples");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output directory")->required();
  auto* gen_workers_opt = gen->add_option("--workers", gen_workers, "worker threads");

  // train
  auto* tr = app.add_subcommand("train", "train the touch model on a dataset");
  std::string tr_config, tr_data, tr_out;
  std::uint64_t tr_seed = 0;
  int tr_epochs = 150, tr_batch = 32;
  double tr_lr = 1e-3, tr_aux = 0.5;
  tr->add_option("--config", tr_config, "config file");
  tr->add_option("--data", tr_data, "dataset directory")->required();
  tr->add_option("--seed", tr_seed, "rng seed");
  tr->add_option("--out", tr_out, "model file to write")->required();
  auto* tr_epochs_opt = tr->add_option("--epochs", tr_epochs, "training epochs");
  auto* tr_batch_opt = tr->add_option("--batch", tr_batch, "minibatch size");
  auto* tr_lr_opt = tr->add_option("--lr", tr_lr, "learning rate");
  auto* tr_aux_opt = tr->add_option("--aux-weight", tr_aux, "reconstruction loss weight");

  // eval
  auto* ev = app.add_subcommand("eval", "held-out error of a trained model");
  std::string ev_config, ev_data, ev_model;
  ev->add_option("--config", ev_config, "config file");
  ev->add_option("--data", ev_data, "dataset directory")->required();
  ev->add_option("--model", ev_model, "model file")->required();

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "finite-difference audit of the backward passes");
  std::string gc_config;
  std::uint64_t gc_seed = 0;
  gc->add_option("--config", gc_config, "config file");
  gc->add_option("--seed", gc_seed, "rng seed");

  // recognize
  auto* rec = app.add_subcommand("recognize", "run recognition episodes against an object set");
  std::string rec_config, rec_model, rec_set = "primitives", rec_mode = "i2t", rec_out;
  std::uint64_t rec_seed = 0;
  int rec_episodes = 20, rec_touches = 10, rec_frames = 16, rec_workers = 1;
  rec->add_option("--config", rec_config, "config file");
  rec->add_option("--model", rec_model, "model file")->required();
  rec->add_option("--set", rec_set, "object set: train, primitives, tools");
  rec->add_option("--mode", rec_mode, "predictor: i2t or prop")
      ->check(CLI::IsMember({"i2t", "prop"}));
  rec->add_option("--seed", rec_seed, "rng seed");
  rec->add_option("--out", rec_out, "jsonl report file")->required();
  auto* rec_episodes_opt = rec->add_option("--episodes", rec_episodes, "episodes per object");
  auto* rec_touches_opt = rec->add_option("--touches", rec_touches, "touches per episode");
  auto* rec_frames_opt =
      rec->add_option("--frame-candidates", rec_frames, "candidate frames per touch");
  auto* rec_workers_opt = rec->add_option("--workers", rec_workers, "worker threads");

  // shapeclass
  auto* sc = app.add_subcommand("shapeclass", "stamp-shape classification experiment");
  std::string sc_config;
  std::size_t sc_n = 1280;
  std::uint64_t sc_seed = 0;
  int sc_epochs = 80;
  sc->add_option("--config", sc_config, "config file");
  auto* sc_n_opt = sc->add_option("--n", sc_n, "number of stamp presses");
  sc->add_option("--seed", sc_seed, "rng seed");
  auto* sc_epochs_opt = sc->add_option("--epochs", sc_epochs, "training epochs");

  // cluster
  auto* cl = app.add_subcommand("cluster", "k-means over a dataset's depth patches");
  std::string cl_config, cl_data, cl_out, cl_pgm;
  std::uint64_t cl_seed = 0;
  int cl_k = 5;
  cl->add_option("--config", cl_config, "config file");
  cl->add_option("--data", cl_data, "dataset directory")->required();
  auto* cl_k_opt = cl->add_option("--k", cl_k, "cluster count");
  cl->add_option("--seed", cl_seed, "rng seed");
  cl->add_option("--out", cl_out, "json report file");
  cl->add_option("--pgm-dir", cl_pgm, "directory for mean-patch images");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Config cfg = resolve_config(gen_config);
      if (gen_workers_opt->count()) cfg.workers = gen_workers;
      return run_gen_data(cfg, gen_set, gen_n, gen_seed, gen_out);
    }
    if (tr->parsed()) {
      Config cfg = resolve_config(tr_config);
      if (tr_epochs_opt->count()) cfg.epochs = tr_epochs;
      if (tr_batch_opt->count()) cfg.batch = tr_batch;
      if (tr_lr_opt->count()) cfg.lr = tr_lr;
      if (tr_aux_opt->count()) cfg.aux_weight = tr_aux;
      return run_train(cfg, tr_data, tr_seed, tr_out);
    }
    if (ev->parsed()) return run_eval(resolve_config(ev_config), ev_data, ev_model);
    if (gc->parsed()) return run_gradcheck(resolve_config(gc_config), gc_seed);
    if (rec->parsed()) {
      Config cfg = resolve_config(rec_config);
      if (rec_episodes_opt->count()) cfg.episodes = rec_episodes;
      if (rec_touches_opt->count()) cfg.touches = rec_touches;
      if (rec_frames_opt->count()) cfg.frame_candidates = rec_frames;
      if (rec_workers_opt->count()) cfg.workers = rec_workers;
      return run_recognize(cfg, rec_model, rec_set, rec_mode, rec_seed, rec_out);
    }
    if (sc->parsed()) {
      Config cfg = resolve_config(sc_config);
      if (sc_n_opt->count() == 0) sc_n = std::size_t(cfg.stamp_n);
      if (sc_epochs_opt->count()) cfg.stamp_epochs = sc_epochs;
      return run_shapeclass(cfg, sc_n, sc_seed);
    }
    if (cl->parsed()) {
      Config cfg = resolve_config(cl_config);
      if (cl_k_opt->count()) cfg.kmeans_k = cl_k;
      return run_cluster(cfg, cl_data, cl_seed, cl_out, cl_pgm);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
