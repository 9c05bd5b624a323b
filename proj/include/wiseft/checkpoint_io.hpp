// SPDX-License-Identifier: Apache-2.0
//
// WLPC checkpoint format.
//
//   bytes 0..3    magic "WLPC"
//   bytes 4..7    version, u32 little-endian (currently 1)
//   bytes 8..15   header length H, u64 little-endian
//   bytes 16..16+H UTF-8 JSON: {"metadata": {...}, "entries": [
//                    {"name": str, "shape": [ints], "role": "backbone"|"head",
//                     "offset": int}, ...]} in canonical name order, offsets
//                    contiguous and ascending into the payload
//   remainder     float32 little-endian payload
//
// Serialization is a pure function of the checkpoint value: saving the same
// value twice yields identical bytes.

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wiseft/checkpoint.hpp"
#include "wiseft/hash.hpp"

namespace wiseft {

struct CheckpointIoError : std::runtime_error {
  enum class Code {
    io,
    bad_magic,
    unsupported_version,
    truncated,
    size_mismatch,
    duplicate_name,
    bad_header,
  };
  Code code;
  CheckpointIoError(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

namespace detail {

inline void put_u32le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline uint32_t get_u32le(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

inline uint64_t get_u64le(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace detail

inline constexpr char kWlpcMagic[4] = {'W', 'L', 'P', 'C'};
inline constexpr uint32_t kWlpcVersion = 1;

// Canonical WLPC byte stream for a checkpoint. Rejects invariant violations
// before producing anything.
inline std::string serialize_checkpoint(const Checkpoint& ckpt) {
  ckpt.validate();

  nlohmann::ordered_json header;
  header["metadata"] = nlohmann::json(ckpt.metadata);  // std::map: sorted keys
  auto& entries = header["entries"] = nlohmann::ordered_json::array();
  uint64_t offset = 0;
  for (const auto& [name, entry] : ckpt.entries) {
    nlohmann::ordered_json e;
    e["name"] = name;
    e["shape"] = entry.tensor.shape;
    e["role"] = role_name(entry.role);
    e["offset"] = offset;
    entries.push_back(std::move(e));
    offset += entry.tensor.data.size() * 4;
  }
  const std::string header_json = header.dump();

  std::string out;
  out.reserve(16 + header_json.size() + offset);
  out.append(kWlpcMagic, 4);
  detail::put_u32le(out, kWlpcVersion);
  detail::put_u64le(out, header_json.size());
  out += header_json;
  for (const auto& [name, entry] : ckpt.entries) {
    for (float f : entry.tensor.data) {
      uint32_t bits = std::bit_cast<uint32_t>(f);
      detail::put_u32le(out, bits);
    }
  }
  return out;
}

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointIoError(CheckpointIoError::Code::io, "cannot open for writing: " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw CheckpointIoError(CheckpointIoError::Code::io, "write failed: " + path.string());
}

// Fingerprint of the canonical serialization (includes metadata).
inline std::string checkpoint_fingerprint(const Checkpoint& ckpt) {
  Fnv1a h;
  h.update(serialize_checkpoint(ckpt));
  return h.hex();
}

inline Checkpoint parse_checkpoint(const uint8_t* data, size_t size,
                                   const std::string& origin = "<memory>") {
  using Code = CheckpointIoError::Code;
  if (size < 16) throw CheckpointIoError(Code::truncated, origin + ": shorter than fixed header");
  if (std::memcmp(data, kWlpcMagic, 4) != 0)
    throw CheckpointIoError(Code::bad_magic, origin + ": bad magic");
  const uint32_t version = detail::get_u32le(data + 4);
  if (version != kWlpcVersion)
    throw CheckpointIoError(Code::unsupported_version,
                            origin + ": unsupported version " + std::to_string(version));
  const uint64_t header_len = detail::get_u64le(data + 8);
  if (16 + header_len > size)
    throw CheckpointIoError(Code::truncated, origin + ": header extends past end of file");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(data + 16, data + 16 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointIoError(Code::bad_header, origin + ": header is not valid JSON: " + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.metadata = header.at("metadata").get<std::map<std::string, std::string>>();
    const uint8_t* payload = data + 16 + header_len;
    const uint64_t payload_size = size - 16 - header_len;
    uint64_t expected_offset = 0;
    for (const auto& e : header.at("entries")) {
      const auto name = e.at("name").get<std::string>();
      if (ckpt.entries.count(name))
        throw CheckpointIoError(Code::duplicate_name, origin + ": duplicate entry '" + name + "'");
      Tensor t;
      t.shape = e.at("shape").get<std::vector<size_t>>();
      const auto role = role_from_name(e.at("role").get<std::string>());
      const uint64_t offset = e.at("offset").get<uint64_t>();
      if (offset != expected_offset)
        throw CheckpointIoError(Code::bad_header,
                                origin + ": non-contiguous offset for '" + name + "'");
      const uint64_t bytes = uint64_t{t.size()} * 4;
      if (offset + bytes > payload_size)
        throw CheckpointIoError(Code::truncated,
                                origin + ": payload shorter than '" + name + "' requires");
      t.data.resize(t.size());
      for (size_t i = 0; i < t.data.size(); ++i) {
        uint32_t bits = detail::get_u32le(payload + offset + 4 * i);
        t.data[i] = std::bit_cast<float>(bits);
      }
      ckpt.set(name, std::move(t), role);
      expected_offset = offset + bytes;
    }
    if (expected_offset != payload_size)
      throw CheckpointIoError(Code::size_mismatch,
                              origin + ": payload size " + std::to_string(payload_size) +
                                  " != entries total " + std::to_string(expected_offset));
  } catch (const CheckpointIoError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointIoError(Code::bad_header, origin + ": malformed header: " + e.what());
  } catch (const std::runtime_error& e) {
    throw CheckpointIoError(Code::bad_header, origin + ": " + e.what());
  }
  try {
    ckpt.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointIoError(Code::bad_header, origin + ": " + e.what());
  }
  return ckpt;
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw CheckpointIoError(CheckpointIoError::Code::io, "cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_checkpoint(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size(),
                          path.string());
}

}  // namespace wiseft
