#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "docrebench/model.hpp"

namespace docrebench {

/// Layout recipe for a synthetic annotation document. The seed fully
/// determines the output.
struct SynthSpec {
    double page_width = 2480;
    double page_height = 3508;
    int regions = 4;  // text regions
    int lines_per_region_min = 2;
    int lines_per_region_max = 5;
    int words_per_line_min = 3;
    int words_per_line_max = 8;
    int image_regions = 0;
    int table_regions = 0;
    std::vector<std::string> vocabulary;  // empty -> built-in Latin+Bengali tokens
    std::uint64_t seed = 0;
    std::string domain;    // empty -> derived from seed
    std::string image_id;  // empty -> "synth_<seed>"
};

struct PerturbationSpec {
    double p_drop = 0.0;        // probability a gt word is deleted
    double p_spurious = 0.0;    // expected spurious words per region
    double p_char_sub = 0.0;    // per-character substitution probability
    double box_jitter = 0.0;    // max fractional offset of word boxes, [0, 0.5)
    double region_split_prob = 0.0;  // probability a region is emitted as two halves
    std::uint64_t seed = 0;
};

struct RegionOutcome {
    std::string gt_region_id;
    std::vector<std::string> expected_pred_regions;  // sorted
    std::string gt_text;
    std::string pred_text;
};

/// Realized (sampled) bookkeeping of a perturbation; all quantities are exact
/// by construction, not expectations.
struct ExpectedOutcome {
    long dropped = 0;
    long spurious = 0;
    long substituted = 0;  // survivors whose text no longer matches
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
    double cer = 0.0;
    double wer = 0.0;
    std::vector<RegionOutcome> regions;
};

/// Grid-laid regions, lines and axis-aligned word boxes; deterministic in the
/// seed and always valid. Throws LayoutOverflowError when the requested
/// counts cannot fit the page.
DocumentAnnotation generate_document(const SynthSpec& spec);

/// Applies drops, spurious insertions, character substitutions, sub-threshold
/// box jitter and region splits, returning the prediction document plus exact
/// expected metrics. Split regions become two mutually overlapping halves
/// that each keep IOU > 0.5 with the original region (verified
/// constructively), so both halves match and pooling restores the word set.
std::pair<DocumentAnnotation, ExpectedOutcome> perturb(const DocumentAnnotation& gt,
                                                       const PerturbationSpec& spec);

/// Runs matching + metrics end-to-end and compares with the bookkeeping.
/// Returns one message per disagreeing quantity; empty means agreement.
std::vector<std::string> oracle_check(const DocumentAnnotation& gt,
                                      const DocumentAnnotation& pred,
                                      const ExpectedOutcome& expected);

std::string expected_to_json(const ExpectedOutcome& outcome);
ExpectedOutcome expected_from_json(const std::string& text);

/// Splitmix-based generator with stable cross-platform output.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double next_double();                     // [0, 1)
    std::int64_t next_int(std::int64_t lo, std::int64_t hi);  // inclusive
    bool bernoulli(double p);
    long poisson(double lambda);

  private:
    std::uint64_t state_;
};

}  // namespace docrebench
