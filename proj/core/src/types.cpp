// SPDX-License-Identifier: Apache-2.0
#include "dcscene/types.hpp"

#include "dcscene/errors.hpp"

namespace dcscene {

bool is_valid_sample_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > kMaxSampleIdBytes) return false;
  for (unsigned char c : id) {
    if (c < 0x20 || c == 0x7f) return false;
  }
  return true;
}

void validate_sample_id(std::string_view id, std::string_view context) {
  if (is_valid_sample_id(id)) return;
  std::string msg;
  if (!context.empty()) {
    msg.append(context).append(": ");
  }
  if (id.empty()) {
    msg += "empty sample id";
  } else if (id.size() > kMaxSampleIdBytes) {
    msg += "sample id longer than 256 bytes";
  } else {
    msg += "control character in sample id";
  }
  throw IntegrityError(msg);
}

}  // namespace dcscene
