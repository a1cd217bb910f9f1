// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcscene/types.hpp"

namespace dcscene {

/// SplitMix64 with the published constants. The entire reproducibility
/// contract for manifests rests on this generator being implementable
/// identically in any language.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

/// 64-bit FNV-1a over the ids sorted ascending, each id's UTF-8 bytes
/// followed by a single '\n'.
std::uint64_t pool_digest(std::span<const SampleId> ids);

/// Fisher-Yates from the last index down with j = next() mod (i+1) at
/// position i, over the ids sorted ascending, so the permutation depends
/// only on (id set, seed). Throws IntegrityError on duplicate ids.
std::vector<SampleId> shuffle_deterministic(std::span<const SampleId> ids,
                                            std::uint64_t seed);

/// One stage's training manifest.
///
/// File format, UTF-8:
///   line 1: #dcscene-manifest v1
///   line 2: #stage=<k> mode=<mode> seed=<u64> digest=<16-hex>
///   then one sample id per line (the shuffled order).
struct Manifest {
  int stage_k = 0;
  std::uint64_t seed = 0;
  std::string mode;
  std::uint64_t digest = 0;  // FNV-1a over the sorted entry list
  std::vector<SampleId> entries;

  bool operator==(const Manifest&) const = default;
};

/// Shuffles the pool ids deterministically and writes the manifest file.
/// Output bytes depend only on (pool id set, stage_k, mode, seed).
Manifest emit_manifest(std::span<const QualityPoint> pool, int stage_k,
                       std::string_view mode, std::uint64_t seed,
                       const std::filesystem::path& path);

/// Throws FormatError (with a line number) on any malformed line.
Manifest read_manifest(const std::filesystem::path& path);

struct ManifestVerification {
  bool digest_ok = true;      // header digest == digest recomputed from entries
  bool entries_unique = true;
  bool set_equal = true;      // entries == pool ids as sets
  std::size_t duplicate_entries = 0;
  std::size_t missing_from_manifest = 0;  // in pool, not in file
  std::size_t not_in_pool = 0;            // in file, not in pool

  bool passed() const { return digest_ok && entries_unique && set_equal; }
};

/// Parses the manifest (format errors throw) and checks digest, entry
/// uniqueness, and set-equality against the pool ids.
ManifestVerification verify_manifest(const std::filesystem::path& path,
                                     std::span<const QualityPoint> pool);

}  // namespace dcscene
