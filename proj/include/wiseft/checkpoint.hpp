// SPDX-License-Identifier: Apache-2.0
//
// Named-tensor checkpoints. A Checkpoint is an ordered (lexicographic, the
// canonical order for hashing and reduction) map from parameter name to a
// float32 tensor with a backbone/head role tag, plus string metadata.

#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiseft/hash.hpp"

namespace wiseft {

enum class Role { backbone, head };

inline const char* role_name(Role r) { return r == Role::backbone ? "backbone" : "head"; }

inline Role role_from_name(const std::string& s) {
  if (s == "backbone") return Role::backbone;
  if (s == "head") return Role::head;
  throw std::runtime_error("unknown role: " + s);
}

struct Tensor {
  std::vector<size_t> shape;
  std::vector<float> data;  // row-major

  size_t size() const {
    size_t n = 1;
    for (size_t d : shape) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<size_t> shape) {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(t.size(), 0.0f);
    return t;
  }

  void validate(const std::string& name) const {
    if (shape.empty()) throw std::invalid_argument("tensor '" + name + "': empty shape");
    for (size_t d : shape)
      if (d < 1) throw std::invalid_argument("tensor '" + name + "': zero dimension");
    if (data.size() != size())
      throw std::invalid_argument("tensor '" + name + "': data length " +
                                  std::to_string(data.size()) + " != shape product " +
                                  std::to_string(size()));
  }
};

inline bool bits_equal(float a, float b) {
  return std::bit_cast<uint32_t>(a) == std::bit_cast<uint32_t>(b);
}

inline bool bits_equal(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape || a.data.size() != b.data.size()) return false;
  for (size_t i = 0; i < a.data.size(); ++i)
    if (!bits_equal(a.data[i], b.data[i])) return false;
  return true;
}

struct Checkpoint {
  struct Entry {
    Tensor tensor;
    Role role = Role::backbone;
  };

  std::map<std::string, Entry> entries;           // lexicographic by key
  std::map<std::string, std::string> metadata;    // must carry the required keys

  bool has(const std::string& name) const { return entries.count(name) != 0; }

  const Tensor& tensor(const std::string& name) const {
    auto it = entries.find(name);
    if (it == entries.end()) throw std::out_of_range("no entry named '" + name + "'");
    return it->second.tensor;
  }

  Tensor& tensor(const std::string& name) {
    auto it = entries.find(name);
    if (it == entries.end()) throw std::out_of_range("no entry named '" + name + "'");
    return it->second.tensor;
  }

  const std::string& meta(const std::string& key) const {
    auto it = metadata.find(key);
    if (it == metadata.end()) throw std::out_of_range("no metadata key '" + key + "'");
    return it->second;
  }

  void set(const std::string& name, Tensor t, Role role) {
    entries[name] = Entry{std::move(t), role};
  }

  // Enforces the structural invariants. Throws std::invalid_argument.
  void validate() const {
    for (const auto& [name, entry] : entries) {
      if (name.empty()) throw std::invalid_argument("empty parameter name");
      entry.tensor.validate(name);
    }
    for (const char* key : {"arch_fingerprint", "provenance", "seed"})
      if (metadata.count(key) == 0)
        throw std::invalid_argument(std::string("missing metadata key '") + key + "'");
    const std::string& prov = metadata.at("provenance");
    if (prov != "pt" && prov != "ft" && prov != "wise" && prov != "rft" && prov != "scratch")
      throw std::invalid_argument("invalid provenance '" + prov + "'");
    if (prov == "wise" && metadata.count("alpha") == 0)
      throw std::invalid_argument("provenance=wise requires metadata key 'alpha'");
    if (prov == "pt")
      for (const auto& [name, entry] : entries)
        if (entry.role != Role::backbone)
          throw std::invalid_argument("provenance=pt checkpoint has head entry '" + name + "'");
  }

  bool all_finite() const {
    for (const auto& [name, entry] : entries)
      for (float v : entry.tensor.data)
        if (!std::isfinite(v)) return false;
    return true;
  }
};

inline bool bits_equal(const Checkpoint& a, const Checkpoint& b) {
  if (a.metadata != b.metadata) return false;
  if (a.entries.size() != b.entries.size()) return false;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  for (; ia != a.entries.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.role != ib->second.role) return false;
    if (!bits_equal(ia->second.tensor, ib->second.tensor)) return false;
  }
  return true;
}

// Hash over the entries (names, shapes, roles, raw float bits) in canonical
// order. Metadata is excluded so checkpoints that differ only in provenance
// compare equal, which is what sweep-row bookkeeping needs.
inline std::string entries_fingerprint(const Checkpoint& ckpt, bool backbone_only = false) {
  Fnv1a h;
  for (const auto& [name, entry] : ckpt.entries) {
    if (backbone_only && entry.role != Role::backbone) continue;
    h.update(name);
    h.update("\x1f");
    h.update(role_name(entry.role));
    for (size_t d : entry.tensor.shape) {
      uint64_t v = d;
      h.update(&v, sizeof v);
    }
    for (float f : entry.tensor.data) {
      uint32_t bits = std::bit_cast<uint32_t>(f);
      h.update(&bits, sizeof bits);
    }
  }
  return h.hex();
}

inline std::string backbone_fingerprint(const Checkpoint& ckpt) {
  return entries_fingerprint(ckpt, true);
}

enum class CompatScope { backbone, all };

// Compares the name sets within scope plus per-name shape and role.
// Returns one line per mismatch; empty means compatible.
inline std::vector<std::string> validate_compatibility(const Checkpoint& a, const Checkpoint& b,
                                                       CompatScope scope) {
  const bool backbone_only = scope == CompatScope::backbone;
  auto in_scope = [&](const Checkpoint::Entry& e) {
    return !backbone_only || e.role == Role::backbone;
  };
  std::vector<std::string> diags;
  for (const auto& [name, ea] : a.entries) {
    if (!in_scope(ea)) continue;
    auto it = b.entries.find(name);
    if (it == b.entries.end() || !in_scope(it->second)) {
      diags.push_back("'" + name + "' present only in first checkpoint");
      continue;
    }
    if (ea.role != it->second.role)
      diags.push_back("'" + name + "' role mismatch: " + role_name(ea.role) + " vs " +
                      role_name(it->second.role));
    if (ea.tensor.shape != it->second.tensor.shape) {
      auto fmt = [](const std::vector<size_t>& s) {
        std::string out = "[";
        for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
        return out + "]";
      };
      diags.push_back("'" + name + "' shape mismatch: " + fmt(ea.tensor.shape) + " vs " +
                      fmt(it->second.tensor.shape));
    }
  }
  for (const auto& [name, eb] : b.entries) {
    if (!in_scope(eb)) continue;
    auto it = a.entries.find(name);
    if (it == a.entries.end() || !in_scope(it->second))
      diags.push_back("'" + name + "' present only in second checkpoint");
  }
  return diags;
}

}  // namespace wiseft
