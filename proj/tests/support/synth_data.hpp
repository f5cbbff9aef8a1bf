// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fera/features.hpp"
#include "fera/mdt/dataset.hpp"
#include "fera/synth.hpp"

namespace fera::test {

struct SynthDataset {
  std::vector<std::shared_ptr<const FeatureSequence>> sequences;
  std::vector<AnnotatedSequence> annotations;
  std::vector<mdt::TrainingExample> examples;
};

/// Left-fencer clips of `steps_per_clip` segments drawn from `classes`.
/// Labels come straight from the generator.
inline SynthDataset synth_dataset(const std::vector<MoveSet>& classes, int clips, int steps_per_clip,
                                  std::uint64_t seed, double noise_px = 0.5) {
  SynthDataset out;
  Rng rng(seed);
  for (int i = 0; i < clips; ++i) {
    std::vector<synth::ScriptStep> script;
    for (int s = 0; s < steps_per_clip; ++s) {
      synth::ScriptStep step;
      step.moves = classes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(classes.size()) - 1))];
      script.push_back(step);
    }
    const std::string id = "clip_" + std::to_string(i);
    const FrameSize frame{1280, 720};
    const auto motion = synth::generate_fencer(script, Rng::derive(seed, static_cast<std::uint64_t>(i)), Side::Left,
                                               id, noise_px, frame);
    PoseTrack track;
    track.clip_id = id;
    track.frame_size = frame;
    for (std::size_t t = 0; t < motion.frames.size(); ++t)
      track.frames.push_back({static_cast<std::int64_t>(t), motion.frames[t], true});
    auto seq = std::make_shared<FeatureSequence>(assemble_features(track));
    out.sequences.push_back(seq);
    out.annotations.push_back(motion.annotations);
  }
  out.examples = mdt::build_examples(out.sequences, out.annotations).examples;
  return out;
}

}  // namespace fera::test
