// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dcscene/types.hpp"

namespace dcscene {

/// Dense row-major f32 embedding matrix with one id per row.
///
/// On-disk DCSE v1 layout, all integers little-endian:
///   magic "DCSE" | u32 version = 1 | u64 count | u32 dim | u32 flags
///   count id entries (u16 byte length + UTF-8 bytes)
///   count * dim f32 payload, row-major
/// flags bit 0 = normalized; the remaining bits are reserved and must be zero.
struct EmbeddingTable {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<float> rows;    // count * dim values
  std::vector<SampleId> ids;  // count entries, unique
  bool normalized = false;

  std::span<const float> row(std::size_t i) const {
    return {rows.data() + i * dim, dim};
  }
};

/// Throws (IntegrityError/UsageError) unless `t` satisfies every table
/// invariant: shape, unique valid ids, finite values, and unit rows within
/// 1e-4 when the normalized flag is set.
void validate_table(const EmbeddingTable& t);

EmbeddingTable read_embedding_table(const std::filesystem::path& path);
void write_embedding_table(const EmbeddingTable& table, const std::filesystem::path& path);

/// Loss log: JSON-lines, one {"sample_id": ..., "loss": ...} object per line.
/// Duplicate ids are allowed here; last-wins resolution happens in the join.
std::vector<LossRecord> read_loss_log(const std::filesystem::path& path);
void write_loss_log(std::span<const LossRecord> records, const std::filesystem::path& path);

/// Caption index: JSON-lines with sample_id, scene_id, optional text,
/// optional token_ids. Sample ids must be unique within one index.
std::vector<CaptionRecord> read_caption_index(const std::filesystem::path& path);
void write_caption_index(std::span<const CaptionRecord> captions,
                         const std::filesystem::path& path);

/// Quality points: JSON-lines with sample_id, scene_id, clip_score,
/// caption_loss. The interchange format consumed by every downstream stage.
std::vector<QualityPoint> read_quality_points(const std::filesystem::path& path);
void write_quality_points(std::span<const QualityPoint> points,
                          const std::filesystem::path& path);

/// Per-cause drop counts from a join. joined + sum of drops == caption count.
struct JoinReport {
  std::size_t joined = 0;
  std::size_t missing_scene_embedding = 0;
  std::size_t missing_text_embedding = 0;
  std::size_t missing_loss = 0;

  std::size_t dropped() const {
    return missing_scene_embedding + missing_text_embedding + missing_loss;
  }
};

struct JoinResult {
  std::vector<JoinedSample> samples;
  JoinReport report;
};

/// Resolves each caption against the scene table (by scene_id), the text
/// table (by sample_id) and the loss log (last record wins). Unresolvable
/// captions are dropped and counted, never fatal; the first failing lookup
/// (scene, then text, then loss) decides the drop cause. Output preserves
/// caption order.
JoinResult join_dataset(std::span<const CaptionRecord> captions,
                        const EmbeddingTable& scene_emb,
                        const EmbeddingTable& text_emb,
                        std::span<const LossRecord> losses);

}  // namespace dcscene
