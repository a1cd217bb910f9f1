// SPDX-License-Identifier: Apache-2.0
#include "dcscene/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include "dcscene/errors.hpp"

namespace dcscene {

namespace {

constexpr std::string_view kHeaderLine = "#dcscene-manifest v1";

std::string digest_hex(std::uint64_t digest) {
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = hex[digest & 0xf];
    digest >>= 4;
  }
  return out;
}

std::vector<SampleId> sorted_unique_ids(std::span<const SampleId> ids) {
  std::vector<SampleId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) throw IntegrityError("duplicate sample id: " + *dup);
  return sorted;
}

std::uint64_t fnv1a_ids(std::span<const SampleId> sorted) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  for (const auto& id : sorted) {
    for (unsigned char c : id) mix(c);
    mix('\n');
  }
  return h;
}

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw FormatError(path.string() + ": line " + std::to_string(line) + ": " + what);
}

// Consumes "<key>=" then a token up to the next space or end of line.
std::string_view take_field(std::string_view& rest, std::string_view key,
                            const std::filesystem::path& path) {
  if (!rest.starts_with(key) || rest.size() == key.size() || rest[key.size()] != '=')
    line_error(path, 2, "expected " + std::string(key) + "=<value>");
  rest.remove_prefix(key.size() + 1);
  const auto space = rest.find(' ');
  std::string_view value = rest.substr(0, space);
  rest.remove_prefix(space == std::string_view::npos ? rest.size() : space + 1);
  if (value.empty()) line_error(path, 2, "empty " + std::string(key) + " value");
  return value;
}

template <typename Int>
Int parse_int(std::string_view text, std::string_view key,
              const std::filesystem::path& path) {
  Int value{};
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size())
    line_error(path, 2, "bad " + std::string(key) + " value: " + std::string(text));
  return value;
}

}  // namespace

std::uint64_t pool_digest(std::span<const SampleId> ids) {
  std::vector<SampleId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  return fnv1a_ids(sorted);
}

std::vector<SampleId> shuffle_deterministic(std::span<const SampleId> ids,
                                            std::uint64_t seed) {
  auto out = sorted_unique_ids(ids);
  SplitMix64 rng(seed);
  for (std::size_t i = out.size(); i-- > 1;) {
    const std::size_t j = std::size_t(rng.next() % (i + 1));
    std::swap(out[i], out[j]);
  }
  return out;
}

Manifest emit_manifest(std::span<const QualityPoint> pool, int stage_k,
                       std::string_view mode, std::uint64_t seed,
                       const std::filesystem::path& path) {
  if (stage_k < 0) throw UsageError("emit_manifest: stage index must be non-negative");
  if (mode.empty()) throw UsageError("emit_manifest: empty mode");
  for (unsigned char c : mode) {
    if (c <= 0x20 || c == 0x7f)
      throw UsageError("emit_manifest: mode must not contain spaces or control characters");
  }

  std::vector<SampleId> ids;
  ids.reserve(pool.size());
  for (const auto& p : pool) ids.push_back(p.sample_id);

  Manifest m;
  m.stage_k = stage_k;
  m.seed = seed;
  m.mode = std::string(mode);
  m.entries = shuffle_deterministic(ids, seed);  // also rejects duplicates
  m.digest = fnv1a_ids(sorted_unique_ids(ids));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << kHeaderLine << '\n';
  out << "#stage=" << m.stage_k << " mode=" << m.mode << " seed=" << m.seed
      << " digest=" << digest_hex(m.digest) << '\n';
  for (const auto& id : m.entries) out << id << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) line_error(path, 1, "empty file");
  if (line != kHeaderLine)
    line_error(path, 1, "expected \"" + std::string(kHeaderLine) + "\"");

  if (!std::getline(in, line)) line_error(path, 2, "missing metadata line");
  if (!line.starts_with('#')) line_error(path, 2, "metadata line must start with '#'");
  std::string_view rest = std::string_view(line).substr(1);

  Manifest m;
  m.stage_k = parse_int<int>(take_field(rest, "stage", path), "stage", path);
  if (m.stage_k < 0) line_error(path, 2, "negative stage index");
  m.mode = std::string(take_field(rest, "mode", path));
  m.seed = parse_int<std::uint64_t>(take_field(rest, "seed", path), "seed", path);
  const auto digest_text = take_field(rest, "digest", path);
  if (digest_text.size() != 16) line_error(path, 2, "digest must be 16 hex digits");
  std::uint64_t digest = 0;
  const auto [p, ec] =
      std::from_chars(digest_text.data(), digest_text.data() + 16, digest, 16);
  if (ec != std::errc() || p != digest_text.data() + 16)
    line_error(path, 2, "bad digest value");
  m.digest = digest;
  if (!rest.empty()) line_error(path, 2, "unexpected trailing metadata");

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_valid_sample_id(line))
      line_error(path, line_no, "invalid sample id entry");
    m.entries.push_back(line);
  }
  return m;
}

ManifestVerification verify_manifest(const std::filesystem::path& path,
                                     std::span<const QualityPoint> pool) {
  const Manifest m = read_manifest(path);

  ManifestVerification v;
  v.digest_ok = pool_digest(m.entries) == m.digest;

  std::vector<SampleId> sorted(m.entries.begin(), m.entries.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end();
       it = std::adjacent_find(it + 1, sorted.end())) {
    ++v.duplicate_entries;
  }
  v.entries_unique = v.duplicate_entries == 0;

  std::unordered_set<std::string_view> pool_ids;
  pool_ids.reserve(pool.size());
  for (const auto& p : pool) pool_ids.insert(p.sample_id);
  std::unordered_set<std::string_view> entry_ids;
  entry_ids.reserve(m.entries.size());
  for (const auto& id : m.entries) entry_ids.insert(id);

  for (const auto& id : pool_ids) {
    if (!entry_ids.contains(id)) ++v.missing_from_manifest;
  }
  for (const auto& id : entry_ids) {
    if (!pool_ids.contains(id)) ++v.not_in_pool;
  }
  v.set_equal = v.missing_from_manifest == 0 && v.not_in_pool == 0;
  return v;
}

}  // namespace dcscene
