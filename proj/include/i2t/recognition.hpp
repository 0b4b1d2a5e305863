#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "i2t/dataset.hpp"
#include "i2t/i2t_model.hpp"

namespace i2t {

// Distance scale of the contact-only baseline: likelihood exp(-d / 5 mm).
inline constexpr double kProprioceptionScale = 0.005;  // meters

enum class RecognitionMode { i2t, proprioception };

struct EpisodeParams {
  CollectParams collect;      // pad geometry, penetration range, sensor layout
  int touches = 10;
  int frame_candidates = 16;  // surface frames scored per touch selection
};

// One executed touch on the real object: the planned frame slid along its
// own axis until the nearest visible point sits at the collection contact
// depth, then re-rendered and pressed.
struct ExecutedTouch {
  SensorFrame frame;         // settled
  PatchGrid patch{};         // processed render at the settled frame
  TactileSignal raw;         // noise-free simulated response
  Vec3 contact_estimate;     // pad-axis point at the stop depth (world)
  double penetration = 0.0;  // mm
};

struct TouchRecord {
  SensorFrame frame;
  TactileSignal real;                    // standardized
  std::vector<TactileSignal> predicted;  // per candidate; empty when unused
};

struct BeliefState {
  std::vector<ObjectModel> candidates;
  std::vector<int> win_counts;  // sums to the number of touches taken
  std::vector<TouchRecord> history;
};

BeliefState make_belief(const std::vector<ObjectModel>& candidates);
int touch_count(const BeliefState& belief);
// Win frequencies; needs at least one touch.
std::vector<double> posterior(const BeliefState& belief);

// L(o') = exp(-||tau - tau_o'||_2) over standardized signals; 1 iff exact.
std::vector<double> per_touch_likelihoods(const TactileSignal& real,
                                          const std::vector<TactileSignal>& predicted);
// 1 at the argmax, ties to the lowest index.
std::vector<int> binarize_winner(const std::vector<double>& likelihoods);
void update_belief(BeliefState& belief, const std::vector<int>& one_hot);
// Laplace-smoothed draw: P(o') = (wins(o') + 1) / (touches + |O|), so the
// zero-touch belief is uniform.
std::size_t sample_hypothesis(const BeliefState& belief, Rng& rng);

// Render the candidate at the frame and run the touch predictor on it.
TactileSignal predicted_signal(const ObjectModel& object, const SensorFrame& frame,
                               const I2TModel& model);

// Score frame_candidates random frames on the hypothesis object and keep
// the one whose predicted signal stands out most from the other candidates'
// (mean Euclidean separation); ties keep the earliest frame.
SensorFrame select_touch_location(std::size_t hypothesis, const std::vector<ObjectModel>& objects,
                                  const I2TModel& model, Rng& rng,
                                  const EpisodeParams& params = {});

// Contact-only baseline: L(o') = exp(-d / kProprioceptionScale) with d the
// distance from the contact estimate to o's nearest surface point.
std::vector<double> proprioception_likelihoods(const Vec3& contact,
                                               const std::vector<ObjectModel>& objects);

// Advance (or retract) the planned frame to contact depth and press with a
// random penetration. A frame that sees nothing falls back to fresh random
// touches on the object until one lands.
ExecutedTouch execute_touch(const ObjectModel& object, const SensorFrame& planned, Rng& rng,
                            const EpisodeParams& params = {});

struct TouchOutcome {
  SensorFrame frame;
  std::size_t hypothesis = 0;  // sampled candidate the frame was chosen for
  std::size_t winner = 0;      // per-touch likelihood argmax
  std::vector<double> posterior;
  bool correct = false;  // posterior argmax (ties low) is the true object
};

struct EpisodeReport {
  std::size_t true_object = 0;
  RecognitionMode mode = RecognitionMode::i2t;
  std::vector<TouchOutcome> touches;
};

// Per-candidate standardized predictions for one executed touch; overrides
// the model-based predictor (e.g. a ground-truth oracle in tests).
using PredictorFn = std::function<std::vector<TactileSignal>(
    const std::vector<ObjectModel>& objects, const ExecutedTouch& touch)>;

// The full loop: hypothesize, pick a frame, touch the true object, score
// every candidate, vote, repeat. Deterministic given the rng state.
EpisodeReport run_episode(std::size_t true_object, const std::vector<ObjectModel>& objects,
                          const I2TModel& model, RecognitionMode mode, Rng& rng,
                          const EpisodeParams& params = {}, const PredictorFn& predictor = {});

}  // namespace i2t
