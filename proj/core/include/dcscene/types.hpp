// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcscene {

/// Sample ids are plain strings validated at the I/O boundary:
/// non-empty, at most 256 bytes, no control characters.
using SampleId = std::string;

inline constexpr std::size_t kMaxSampleIdBytes = 256;

bool is_valid_sample_id(std::string_view id) noexcept;

/// Throws IntegrityError if `id` violates the id rules. `context` prefixes
/// the message (typically a file path or field name).
void validate_sample_id(std::string_view id, std::string_view context = {});

/// One caption as it appears in a caption index. Several captions may share
/// a scene_id; token_ids are only populated by synthetic benches.
struct CaptionRecord {
  SampleId sample_id;
  std::string scene_id;
  std::optional<std::string> text;
  std::optional<std::vector<std::uint32_t>> token_ids;

  bool operator==(const CaptionRecord&) const = default;
};

/// Externally measured per-sample caption loss, in nats. Non-negative, finite.
struct LossRecord {
  SampleId sample_id;
  double loss = 0.0;

  bool operator==(const LossRecord&) const = default;
};

/// One scored scene-caption pair; the atom every filter operates on.
struct QualityPoint {
  SampleId sample_id;
  std::string scene_id;
  double clip_score = 0.0;
  double caption_loss = 0.0;

  bool operator==(const QualityPoint&) const = default;
};

/// A caption resolved against both embedding tables and its latest loss.
/// Row indices refer to the tables the join was performed with.
struct JoinedSample {
  SampleId sample_id;
  std::string scene_id;
  std::size_t scene_row = 0;
  std::size_t text_row = 0;
  double caption_loss = 0.0;

  bool operator==(const JoinedSample&) const = default;
};

}  // namespace dcscene
