// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcscene/dataio.hpp"
#include "dcscene/types.hpp"

namespace dcscene {

/// raw: plain dot product of the stored vectors.
/// cosine: both vectors are L2-normalized first (the default; percentile
/// bounds downstream are scale-sensitive).
enum class ScorePolicy { raw, cosine };

ScorePolicy score_policy_from_string(std::string_view s);
std::string_view to_string(ScorePolicy policy);

/// Unit-length copy of v, accumulation in double.
/// Throws UsageError on a zero vector.
std::vector<double> l2_normalize(std::span<const double> v);
std::vector<double> l2_normalize(std::span<const float> v);

/// Alignment score of a single scene/text pair.
/// Throws UsageError on dimension mismatch (message names both dims).
double clip_score(std::span<const float> scene_vec, std::span<const float> text_vec,
                  ScorePolicy policy = ScorePolicy::cosine);

/// Batch scoring: one QualityPoint per joined sample, input order preserved.
/// Every score matches the scalar clip_score of the same pair within 1e-6;
/// the batch kernel accumulates in double but may reorder reductions.
/// Safe to call with tables shared across threads.
std::vector<QualityPoint> score_all(const EmbeddingTable& scene_emb,
                                    const EmbeddingTable& text_emb,
                                    std::span<const JoinedSample> samples,
                                    ScorePolicy policy = ScorePolicy::cosine);

}  // namespace dcscene
