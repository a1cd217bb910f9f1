// SPDX-License-Identifier: Apache-2.0
#include "dcscene/dataio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dcscene/errors.hpp"

namespace dcscene {

namespace {

constexpr char kMagic[4] = {'D', 'C', 'S', 'E'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kFlagNormalized = 1u;
constexpr std::size_t kHeaderBytes = 24;  // magic + version + count + dim + flags
constexpr double kNormTolerance = 1e-4;

void append_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(char(v & 0xff));
  buf.push_back(char((v >> 8) & 0xff));
}

void append_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

void append_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint16_t load_u16(const unsigned char* p) {
  return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}

std::uint32_t load_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t load_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

[[noreturn]] void format_error_at(const std::filesystem::path& path, std::uint64_t offset,
                                  const std::string& what) {
  throw FormatError(path.string() + ": " + what + " at byte offset " +
                    std::to_string(offset));
}

double row_norm(std::span<const float> row) {
  double ss = 0.0;
  for (float x : row) ss += double(x) * double(x);
  return std::sqrt(ss);
}

// Reads exactly n bytes or reports truncation at the current offset.
void read_exact(std::ifstream& in, const std::filesystem::path& path, char* dst,
                std::size_t n, std::uint64_t offset) {
  in.read(dst, std::streamsize(n));
  if (std::size_t(in.gcount()) != n) {
    format_error_at(path, offset + std::uint64_t(std::max<std::streamsize>(in.gcount(), 0)),
                    "truncated file");
  }
}

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void line_error_format(const std::filesystem::path& path, std::size_t line,
                                    const std::string& what) {
  throw FormatError(path.string() + ": line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void line_error_integrity(const std::filesystem::path& path, std::size_t line,
                                       const std::string& what) {
  throw IntegrityError(path.string() + ": line " + std::to_string(line) + ": " + what);
}

// Applies fn to every non-empty line parsed as a JSON object.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error_format(path, line_no, std::string("JSON parse error: ") + e.what());
    }
    if (!obj.is_object()) line_error_format(path, line_no, "expected a JSON object");
    fn(line_no, obj);
  }
}

std::string require_string(const json& obj, const char* key,
                           const std::filesystem::path& path, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    line_error_format(path, line, std::string("missing or non-string \"") + key + "\"");
  return it->get<std::string>();
}

double require_number(const json& obj, const char* key,
                      const std::filesystem::path& path, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    line_error_format(path, line, std::string("missing or non-numeric \"") + key + "\"");
  return it->get<double>();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void validate_table(const EmbeddingTable& t) {
  if (t.dim == 0) throw UsageError("embedding table dimension must be positive");
  if (t.rows.size() != t.count * t.dim)
    throw UsageError("embedding table shape mismatch: " + std::to_string(t.rows.size()) +
                     " values for count " + std::to_string(t.count) + " x dim " +
                     std::to_string(t.dim));
  if (t.ids.size() != t.count)
    throw UsageError("embedding table has " + std::to_string(t.ids.size()) +
                     " ids for count " + std::to_string(t.count));
  std::unordered_set<std::string_view> seen;
  seen.reserve(t.count);
  for (const auto& id : t.ids) {
    validate_sample_id(id, "embedding table id");
    if (!seen.insert(id).second)
      throw IntegrityError("duplicate embedding table id: " + id);
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (!std::isfinite(t.rows[i]))
      throw IntegrityError("non-finite value in embedding row " +
                           std::to_string(i / t.dim));
  }
  if (t.normalized) {
    for (std::size_t r = 0; r < t.count; ++r) {
      const double norm = row_norm(t.row(r));
      if (std::abs(norm - 1.0) > kNormTolerance)
        throw IntegrityError("table flagged normalized but row " + std::to_string(r) +
                             " (id " + t.ids[r] + ") has norm " + std::to_string(norm));
    }
  }
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  char header[kHeaderBytes];
  read_exact(in, path, header, kHeaderBytes, 0);
  const auto* h = reinterpret_cast<const unsigned char*>(header);

  if (std::memcmp(header, kMagic, 4) != 0) format_error_at(path, 0, "bad magic");
  const std::uint32_t version = load_u32(h + 4);
  if (version != kFormatVersion)
    format_error_at(path, 4, "unsupported format version " + std::to_string(version));
  const std::uint64_t count = load_u64(h + 8);
  const std::uint32_t dim = load_u32(h + 16);
  const std::uint32_t flags = load_u32(h + 20);
  if (dim == 0) format_error_at(path, 16, "dimension must be positive");
  if (flags & ~kFlagNormalized) format_error_at(path, 20, "unknown flag bits set");

  // Reject counts that could not fit in the payload arithmetic.
  if (count > std::numeric_limits<std::uint64_t>::max() / (std::uint64_t(dim) * 4))
    format_error_at(path, 8, "implausible row count " + std::to_string(count));

  EmbeddingTable t;
  t.count = std::size_t(count);
  t.dim = dim;
  t.normalized = (flags & kFlagNormalized) != 0;
  t.ids.reserve(t.count);

  std::uint64_t offset = kHeaderBytes;
  std::string id;
  for (std::uint64_t i = 0; i < count; ++i) {
    char lenbuf[2];
    read_exact(in, path, lenbuf, 2, offset);
    const std::uint16_t len = load_u16(reinterpret_cast<const unsigned char*>(lenbuf));
    offset += 2;
    id.resize(len);
    if (len > 0) read_exact(in, path, id.data(), len, offset);
    offset += len;
    validate_sample_id(id, path.string() + ": id entry " + std::to_string(i));
    t.ids.push_back(id);
  }

  const std::uint64_t payload_offset = offset;
  const std::uint64_t payload_bytes = count * std::uint64_t(dim) * 4;
  t.rows.resize(std::size_t(count) * dim);
  in.read(reinterpret_cast<char*>(t.rows.data()), std::streamsize(payload_bytes));
  const auto got = std::uint64_t(std::max<std::streamsize>(in.gcount(), 0));
  if (got < payload_bytes) {
    format_error_at(path, payload_offset + got,
                    "truncated payload: header promises " + std::to_string(count) +
                        " rows x dim " + std::to_string(dim));
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    format_error_at(path, payload_offset + payload_bytes,
                    "trailing data after payload");
  }

  static_assert(sizeof(float) == 4);
  if constexpr (std::endian::native != std::endian::little) {
    for (auto& x : t.rows) {
      auto bits = std::bit_cast<std::uint32_t>(x);
      bits = __builtin_bswap32(bits);
      x = std::bit_cast<float>(bits);
    }
  }

  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (!std::isfinite(t.rows[i])) {
      format_error_at(path, payload_offset + std::uint64_t(i) * 4,
                      "non-finite value in row " + std::to_string(i / t.dim));
    }
  }

  std::unordered_set<std::string_view> seen;
  seen.reserve(t.count);
  for (const auto& tid : t.ids) {
    if (!seen.insert(tid).second)
      throw IntegrityError(path.string() + ": duplicate id: " + tid);
  }

  if (t.normalized) {
    for (std::size_t r = 0; r < t.count; ++r) {
      const double norm = row_norm(t.row(r));
      if (std::abs(norm - 1.0) > kNormTolerance)
        throw IntegrityError(path.string() + ": flagged normalized but row " +
                             std::to_string(r) + " (id " + t.ids[r] + ") has norm " +
                             std::to_string(norm));
    }
  }
  return t;
}

void write_embedding_table(const EmbeddingTable& table, const std::filesystem::path& path) {
  validate_table(table);

  std::string head;
  head.reserve(kHeaderBytes + table.count * 12);
  head.append(kMagic, 4);
  append_u32(head, kFormatVersion);
  append_u64(head, table.count);
  append_u32(head, std::uint32_t(table.dim));
  append_u32(head, table.normalized ? kFlagNormalized : 0);
  for (const auto& id : table.ids) {
    append_u16(head, std::uint16_t(id.size()));
    head.append(id);
  }

  auto out = open_output(path);
  out.write(head.data(), std::streamsize(head.size()));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(table.rows.data()),
              std::streamsize(table.rows.size() * 4));
  } else {
    for (float x : table.rows) {
      auto bits = __builtin_bswap32(std::bit_cast<std::uint32_t>(x));
      out.write(reinterpret_cast<const char*>(&bits), 4);
    }
  }
  finish_output(out, path);
}

std::vector<LossRecord> read_loss_log(const std::filesystem::path& path) {
  std::vector<LossRecord> records;
  for_each_jsonl(path, [&](std::size_t line, const json& obj) {
    LossRecord r;
    r.sample_id = require_string(obj, "sample_id", path, line);
    if (!is_valid_sample_id(r.sample_id))
      line_error_integrity(path, line, "invalid sample id");
    r.loss = require_number(obj, "loss", path, line);
    if (!std::isfinite(r.loss) || r.loss < 0.0)
      line_error_integrity(path, line, "loss must be finite and non-negative");
    records.push_back(std::move(r));
  });
  return records;
}

void write_loss_log(std::span<const LossRecord> records, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& r : records) {
    validate_sample_id(r.sample_id, "loss record");
    if (!std::isfinite(r.loss) || r.loss < 0.0)
      throw IntegrityError("loss record " + r.sample_id +
                           ": loss must be finite and non-negative");
    ordered_json j;
    j["sample_id"] = r.sample_id;
    j["loss"] = r.loss;
    out << j.dump() << '\n';
  }
  finish_output(out, path);
}

std::vector<CaptionRecord> read_caption_index(const std::filesystem::path& path) {
  std::vector<CaptionRecord> captions;
  std::unordered_set<std::string> seen;
  for_each_jsonl(path, [&](std::size_t line, const json& obj) {
    CaptionRecord c;
    c.sample_id = require_string(obj, "sample_id", path, line);
    if (!is_valid_sample_id(c.sample_id))
      line_error_integrity(path, line, "invalid sample id");
    c.scene_id = require_string(obj, "scene_id", path, line);
    if (c.scene_id.empty()) line_error_integrity(path, line, "empty scene_id");
    if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) line_error_format(path, line, "\"text\" must be a string");
      c.text = it->get<std::string>();
    }
    if (auto it = obj.find("token_ids"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) line_error_format(path, line, "\"token_ids\" must be an array");
      std::vector<std::uint32_t> tokens;
      tokens.reserve(it->size());
      for (const auto& tok : *it) {
        if (!tok.is_number_integer())
          line_error_format(path, line, "token ids must be integers");
        const auto v = tok.get<std::int64_t>();
        if (v < 0 || v > std::int64_t(std::numeric_limits<std::uint32_t>::max()))
          line_error_integrity(path, line, "token id out of range");
        tokens.push_back(std::uint32_t(v));
      }
      c.token_ids = std::move(tokens);
    }
    if (!seen.insert(c.sample_id).second)
      line_error_integrity(path, line, "duplicate sample id: " + c.sample_id);
    captions.push_back(std::move(c));
  });
  return captions;
}

void write_caption_index(std::span<const CaptionRecord> captions,
                         const std::filesystem::path& path) {
  auto out = open_output(path);
  std::unordered_set<std::string_view> seen;
  for (const auto& c : captions) {
    validate_sample_id(c.sample_id, "caption record");
    if (c.scene_id.empty()) throw IntegrityError("caption " + c.sample_id + ": empty scene_id");
    if (!seen.insert(c.sample_id).second)
      throw IntegrityError("duplicate caption sample id: " + c.sample_id);
    ordered_json j;
    j["sample_id"] = c.sample_id;
    j["scene_id"] = c.scene_id;
    if (c.text) j["text"] = *c.text;
    if (c.token_ids) j["token_ids"] = *c.token_ids;
    out << j.dump() << '\n';
  }
  finish_output(out, path);
}

std::vector<QualityPoint> read_quality_points(const std::filesystem::path& path) {
  std::vector<QualityPoint> points;
  for_each_jsonl(path, [&](std::size_t line, const json& obj) {
    QualityPoint p;
    p.sample_id = require_string(obj, "sample_id", path, line);
    if (!is_valid_sample_id(p.sample_id))
      line_error_integrity(path, line, "invalid sample id");
    p.scene_id = require_string(obj, "scene_id", path, line);
    if (p.scene_id.empty()) line_error_integrity(path, line, "empty scene_id");
    p.clip_score = require_number(obj, "clip_score", path, line);
    p.caption_loss = require_number(obj, "caption_loss", path, line);
    if (!std::isfinite(p.clip_score))
      line_error_integrity(path, line, "clip_score must be finite");
    if (!std::isfinite(p.caption_loss) || p.caption_loss < 0.0)
      line_error_integrity(path, line, "caption_loss must be finite and non-negative");
    points.push_back(std::move(p));
  });
  return points;
}

void write_quality_points(std::span<const QualityPoint> points,
                          const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& p : points) {
    validate_sample_id(p.sample_id, "quality point");
    if (p.scene_id.empty()) throw IntegrityError("point " + p.sample_id + ": empty scene_id");
    if (!std::isfinite(p.clip_score))
      throw IntegrityError("point " + p.sample_id + ": clip_score must be finite");
    if (!std::isfinite(p.caption_loss) || p.caption_loss < 0.0)
      throw IntegrityError("point " + p.sample_id +
                           ": caption_loss must be finite and non-negative");
    ordered_json j;
    j["sample_id"] = p.sample_id;
    j["scene_id"] = p.scene_id;
    j["clip_score"] = p.clip_score;
    j["caption_loss"] = p.caption_loss;
    out << j.dump() << '\n';
  }
  finish_output(out, path);
}

JoinResult join_dataset(std::span<const CaptionRecord> captions,
                        const EmbeddingTable& scene_emb,
                        const EmbeddingTable& text_emb,
                        std::span<const LossRecord> losses) {
  std::unordered_map<std::string_view, std::size_t> scene_ix;
  scene_ix.reserve(scene_emb.count);
  for (std::size_t i = 0; i < scene_emb.ids.size(); ++i) scene_ix.emplace(scene_emb.ids[i], i);

  std::unordered_map<std::string_view, std::size_t> text_ix;
  text_ix.reserve(text_emb.count);
  for (std::size_t i = 0; i < text_emb.ids.size(); ++i) text_ix.emplace(text_emb.ids[i], i);

  // Last record wins for duplicate loss ids.
  std::unordered_map<std::string_view, double> loss_by_id;
  loss_by_id.reserve(losses.size());
  for (const auto& r : losses) loss_by_id[r.sample_id] = r.loss;

  JoinResult result;
  result.samples.reserve(captions.size());
  for (const auto& c : captions) {
    const auto scene_it = scene_ix.find(c.scene_id);
    if (scene_it == scene_ix.end()) {
      ++result.report.missing_scene_embedding;
      continue;
    }
    const auto text_it = text_ix.find(c.sample_id);
    if (text_it == text_ix.end()) {
      ++result.report.missing_text_embedding;
      continue;
    }
    const auto loss_it = loss_by_id.find(c.sample_id);
    if (loss_it == loss_by_id.end()) {
      ++result.report.missing_loss;
      continue;
    }
    result.samples.push_back({c.sample_id, c.scene_id, scene_it->second,
                              text_it->second, loss_it->second});
  }
  result.report.joined = result.samples.size();
  return result;
}

}  // namespace dcscene
