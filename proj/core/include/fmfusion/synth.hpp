#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fmfusion/manifest.hpp"
#include "fmfusion/types.hpp"

namespace fmfusion {

/// Configuration for the synthetic dataset generator.
///
/// FM+ snippets carry an additive band-limited oscillation (0.5-3 Hz) in all
/// three raw modalities, with amplitude proportional to `separability`,
/// superimposed on the shared low-frequency baseline motion and white noise
/// that FM- snippets consist of. At separability 0 the class-conditional
/// distributions coincide by construction: the oscillation term is gated by
/// a multiplicative amplitude, and all random draws come from streams that
/// do not depend on the assigned label.
struct SynthConfig {
    int n_subjects = 12;
    int snippets_per_subject = 20;
    double class_balance = 0.5;  // fraction of FM+ per subject, in (0,1)
    std::uint64_t seed = 1;
    double separability = 1.0;  // in [0,1]
    std::string name = "synthetic";
    // Each modality draws from its own derived streams, so disabling one
    // leaves the others bit-identical.
    bool with_video = true;
    bool with_mat = true;
    bool with_imu = true;
};

struct SynthDataset {
    DatasetManifest manifest;  // paths filled with canonical relative names
    std::vector<Snippet> snippets;
};

/// Pure function of the config: equal configs give bit-identical datasets.
/// Per-subject random effects (body scale, orientation, baseline amplitude,
/// noise level) make subject-grouped evaluation genuinely harder than a
/// random split.
SynthDataset synthesize_dataset(const SynthConfig& cfg);

/// Writes manifest.txt plus one numeric text file per modality per snippet
/// under `dir`. Rerunning with the same dataset produces byte-identical
/// files.
void save_dataset(const SynthDataset& ds, const std::filesystem::path& dir);

}  // namespace fmfusion
