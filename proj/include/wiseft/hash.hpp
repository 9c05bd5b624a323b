// SPDX-License-Identifier: Apache-2.0
//
// FNV-1a fingerprints. Fingerprints identify configs and checkpoints in
// reports and metadata; they are not cryptographic.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wiseft {

class Fnv1a {
 public:
  void update(const void* data, size_t n) {
    const auto* p = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }

  void update(std::string_view s) { update(s.data(), s.size()); }

  uint64_t value() const { return state_; }

  std::string hex() const {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<size_t>(i)] = digits[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string fnv1a_hex(std::string_view s) {
  Fnv1a h;
  h.update(s);
  return h.hex();
}

}  // namespace wiseft
