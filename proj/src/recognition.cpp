#include "i2t/recognition.hpp"

#include <algorithm>
#include <cmath>

#include "i2t/errors.hpp"

namespace i2t {

namespace {

constexpr double kTau = 6.283185307179586;

SensorFrame frame_at(const SurfaceSample& surf, double roll, const CollectParams& p) {
  SensorFrame frame;
  frame.pad_side = p.pad_side;
  frame.standoff = p.standoff;
  Vec3 center = surf.point + surf.normal * (p.approach_fraction * p.standoff);
  frame.pose = pose_facing(center, -surf.normal, roll);
  return frame;
}

}  // namespace

BeliefState make_belief(const std::vector<ObjectModel>& candidates) {
  if (candidates.empty()) throw ValidationError("belief needs at least one candidate");
  BeliefState belief;
  belief.candidates = candidates;
  belief.win_counts.assign(candidates.size(), 0);
  return belief;
}

int touch_count(const BeliefState& belief) {
  int n = 0;
  for (int w : belief.win_counts) n += w;
  return n;
}

std::vector<double> posterior(const BeliefState& belief) {
  int n = touch_count(belief);
  if (n < 1) throw ValidationError("posterior needs at least one touch");
  std::vector<double> p(belief.win_counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = double(belief.win_counts[i]) / double(n);
  return p;
}

std::vector<double> per_touch_likelihoods(const TactileSignal& real,
                                          const std::vector<TactileSignal>& predicted) {
  if (predicted.empty()) throw ValidationError("no candidate predictions");
  if (real.space != SignalSpace::standardized)
    throw ValidationError("likelihood needs standardized signals");
  std::vector<double> like(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i].space != SignalSpace::standardized)
      throw ValidationError("likelihood needs standardized signals");
    double sq = 0.0;
    for (int k = 0; k < 15; ++k) {
      double d = real.values[k] - predicted[i].values[k];
      sq += d * d;
    }
    like[i] = std::exp(-std::sqrt(sq));
  }
  return like;
}

std::vector<int> binarize_winner(const std::vector<double>& likelihoods) {
  if (likelihoods.empty()) throw ValidationError("no likelihoods to binarize");
  std::size_t best = 0;
  for (std::size_t i = 1; i < likelihoods.size(); ++i)
    if (likelihoods[i] > likelihoods[best]) best = i;
  std::vector<int> one_hot(likelihoods.size(), 0);
  one_hot[best] = 1;
  return one_hot;
}

void update_belief(BeliefState& belief, const std::vector<int>& one_hot) {
  if (one_hot.size() != belief.win_counts.size())
    throw ValidationError("one-hot size does not match the candidates");
  std::size_t winner = one_hot.size();
  for (std::size_t i = 0; i < one_hot.size(); ++i) {
    if (one_hot[i] == 0) continue;
    if (one_hot[i] != 1 || winner != one_hot.size())
      throw ValidationError("not a one-hot vector");
    winner = i;
  }
  if (winner == one_hot.size()) throw ValidationError("not a one-hot vector");
  belief.win_counts[winner] += 1;
}

std::size_t sample_hypothesis(const BeliefState& belief, Rng& rng) {
  // One pseudo-count per candidate on top of the wins makes the draw exact
  // integer sampling from the smoothed distribution.
  std::uint64_t total = std::uint64_t(touch_count(belief)) + belief.win_counts.size();
  std::uint64_t draw = rng.below(total);
  std::uint64_t cum = 0;
  for (std::size_t i = 0; i < belief.win_counts.size(); ++i) {
    cum += std::uint64_t(belief.win_counts[i]) + 1;
    if (draw < cum) return i;
  }
  return belief.win_counts.size() - 1;
}

TactileSignal predicted_signal(const ObjectModel& object, const SensorFrame& frame,
                               const I2TModel& model) {
  return predict_touch(model, render_depth_patch(object, frame).values);
}

SensorFrame select_touch_location(std::size_t hypothesis, const std::vector<ObjectModel>& objects,
                                  const I2TModel& model, Rng& rng, const EpisodeParams& params) {
  if (hypothesis >= objects.size()) throw ValidationError("hypothesis out of range");
  if (params.frame_candidates < 1) throw ValidationError("need at least one candidate frame");
  SensorFrame best_frame;
  double best_score = -1.0;
  for (int c = 0; c < params.frame_candidates; ++c) {
    SurfaceSample surf = sample_surface_point(objects[hypothesis], rng);
    double roll = rng.uniform(0.0, kTau);
    SensorFrame frame = frame_at(surf, roll, params.collect);
    std::vector<TactileSignal> pred(objects.size());
    for (std::size_t o = 0; o < objects.size(); ++o)
      pred[o] = predicted_signal(objects[o], frame, model);
    double score = 0.0;
    for (std::size_t o = 0; o < objects.size(); ++o) {
      if (o == hypothesis) continue;
      double sq = 0.0;
      for (int k = 0; k < 15; ++k) {
        double d = pred[hypothesis].values[k] - pred[o].values[k];
        sq += d * d;
      }
      score += std::sqrt(sq);
    }
    if (objects.size() > 1) score /= double(objects.size() - 1);
    if (score > best_score) {
      best_score = score;
      best_frame = frame;
    }
  }
  return best_frame;
}

std::vector<double> proprioception_likelihoods(const Vec3& contact,
                                               const std::vector<ObjectModel>& objects) {
  if (objects.empty()) throw ValidationError("no candidate objects");
  std::vector<double> like(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    NearestResult near = nearest_surface_point(objects[i], contact);
    like[i] = std::exp(-(contact - near.point).norm() / kProprioceptionScale);
  }
  return like;
}

ExecutedTouch execute_touch(const ObjectModel& object, const SensorFrame& planned, Rng& rng,
                            const EpisodeParams& params) {
  const CollectParams& cp = params.collect;
  SensorFrame frame = planned;
  for (int attempt = 0; attempt < 32; ++attempt) {
    PatchGrid h = heightfield(object, frame);
    double t_min = frame.standoff;
    bool hit = false;
    for (double t : h) {
      if (t < frame.standoff - 1e-12) {
        hit = true;
        t_min = std::min(t_min, t);
      }
    }
    if (!hit) {
      // The pad saw nothing; grope for a fresh touch point instead.
      SurfaceSample surf = sample_surface_point(object, rng);
      double roll = rng.uniform(0.0, kTau);
      frame = frame_at(surf, roll, cp);
      continue;
    }

    double shift = t_min - cp.approach_fraction * frame.standoff;
    Vec3 axis = frame.pose.rotate(Vec3{0.0, 0.0, 1.0});
    frame.pose.translation = frame.pose.translation + axis * shift;

    PatchGrid settled = heightfield(object, frame);
    double stop = frame.standoff;
    bool contact = false;
    for (double t : settled) {
      if (t < frame.standoff - 1e-12) {
        contact = true;
        stop = std::min(stop, t);
      }
    }
    if (!contact) continue;  // lost it while settling; grope on the next pass

    ExecutedTouch out;
    out.frame = frame;
    for (int k = 0; k < kPatchPixels; ++k)
      out.patch[k] = (frame.standoff - settled[k]) / frame.standoff;
    out.penetration = rng.uniform(cp.penetration_min, cp.penetration_max);
    PatchGrid mm;
    for (int k = 0; k < kPatchPixels; ++k) mm[k] = settled[k] * 1000.0;
    IndentationField field =
        indentation_from_heightfield(mm, out.penetration, frame.standoff * 1000.0,
                                     frame.pad_side * 1000.0 / kPatchSize);
    out.raw = simulate_tactile(field, cp.layout);
    out.contact_estimate = frame.pose.apply(Vec3{0.0, 0.0, stop});
    return out;
  }
  throw Error("touch execution found no contact");
}

EpisodeReport run_episode(std::size_t true_object, const std::vector<ObjectModel>& objects,
                          const I2TModel& model, RecognitionMode mode, Rng& rng,
                          const EpisodeParams& params, const PredictorFn& predictor) {
  if (true_object >= objects.size()) throw ValidationError("true object out of range");
  if (params.touches < 1) throw ValidationError("need at least one touch");

  BeliefState belief = make_belief(objects);
  EpisodeReport report;
  report.true_object = true_object;
  report.mode = mode;
  report.touches.reserve(std::size_t(params.touches));

  for (int i = 0; i < params.touches; ++i) {
    std::size_t hyp = sample_hypothesis(belief, rng);
    SensorFrame planned = select_touch_location(hyp, objects, model, rng, params);
    ExecutedTouch touch = execute_touch(objects[true_object], planned, rng, params);
    TactileSignal real = apply(model.standardizer, touch.raw);

    std::vector<TactileSignal> predictions;
    std::vector<double> like;
    if (mode == RecognitionMode::i2t) {
      if (predictor) {
        predictions = predictor(objects, touch);
        if (predictions.size() != objects.size())
          throw ValidationError("predictor returned the wrong candidate count");
      } else {
        predictions.reserve(objects.size());
        for (const ObjectModel& o : objects)
          predictions.push_back(predicted_signal(o, touch.frame, model));
      }
      like = per_touch_likelihoods(real, predictions);
    } else {
      like = proprioception_likelihoods(touch.contact_estimate, objects);
    }

    std::vector<int> one_hot = binarize_winner(like);
    update_belief(belief, one_hot);
    belief.history.push_back(TouchRecord{touch.frame, real, std::move(predictions)});

    TouchOutcome outcome;
    outcome.frame = touch.frame;
    outcome.hypothesis = hyp;
    outcome.winner =
        std::size_t(std::find(one_hot.begin(), one_hot.end(), 1) - one_hot.begin());
    outcome.posterior = posterior(belief);
    std::size_t map = 0;
    for (std::size_t o = 1; o < outcome.posterior.size(); ++o)
      if (outcome.posterior[o] > outcome.posterior[map]) map = o;
    outcome.correct = (map == true_object);
    report.touches.push_back(std::move(outcome));
  }
  return report;
}

}  // namespace i2t
