// SPDX-License-Identifier: Apache-2.0
//
// Synthetic labeled point clouds: eight geometric primitives sampled
// uniformly on their surfaces, plus the three distribution-shift settings
// (object-only jitter+rotation, background clutter, and the hardest
// jitter+rotation+clutter+scale+translation combination).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wiseft/hash.hpp"
#include "wiseft/rng.hpp"

namespace wiseft {

enum class ShiftKind { clean, obj_only, obj_bg, hardest };

inline const char* shift_kind_name(ShiftKind k) {
  switch (k) {
    case ShiftKind::clean: return "clean";
    case ShiftKind::obj_only: return "obj_only";
    case ShiftKind::obj_bg: return "obj_bg";
    case ShiftKind::hardest: return "hardest";
  }
  return "?";
}

inline ShiftKind shift_kind_from_name(const std::string& s) {
  if (s == "clean") return ShiftKind::clean;
  if (s == "obj_only") return ShiftKind::obj_only;
  if (s == "obj_bg") return ShiftKind::obj_bg;
  if (s == "hardest") return ShiftKind::hardest;
  throw std::invalid_argument("unknown shift kind: " + s);
}

struct ShiftConfig {
  ShiftKind kind = ShiftKind::clean;
  double jitter_sigma = 0.02;
  double bg_fraction = 0.25;       // obj_bg and hardest
  double max_translation = 0.5;    // hardest, fraction of per-axis extent
  double scale_lo = 2.0 / 3.0;     // hardest
  double scale_hi = 1.5;           // hardest
  bool rotate = true;              // non-clean kinds

  void validate() const {
    if (jitter_sigma < 0) throw std::invalid_argument("jitter_sigma must be >= 0");
    if (bg_fraction < 0 || bg_fraction >= 1)
      throw std::invalid_argument("bg_fraction must be in [0,1)");
    if (max_translation < 0 || max_translation > 1)
      throw std::invalid_argument("max_translation must be in [0,1]");
    if (scale_lo <= 0 || scale_lo > scale_hi)
      throw std::invalid_argument("scale_range must satisfy 0 < lo <= hi");
  }
};

inline void to_json(nlohmann::json& j, const ShiftConfig& c) {
  j = {{"kind", shift_kind_name(c.kind)},   {"jitter_sigma", c.jitter_sigma},
       {"bg_fraction", c.bg_fraction},      {"max_translation", c.max_translation},
       {"scale_range", {c.scale_lo, c.scale_hi}}, {"rotate", c.rotate}};
}

inline void from_json(const nlohmann::json& j, ShiftConfig& c) {
  c.kind = shift_kind_from_name(j.at("kind").get<std::string>());
  c.jitter_sigma = j.value("jitter_sigma", 0.02);
  c.bg_fraction = j.value("bg_fraction", 0.25);
  c.max_translation = j.value("max_translation", 0.5);
  if (j.contains("scale_range")) {
    c.scale_lo = j.at("scale_range").at(0).get<double>();
    c.scale_hi = j.at("scale_range").at(1).get<double>();
  }
  c.rotate = j.value("rotate", true);
}

struct PointCloud {
  std::vector<float> xyz;  // 3*N, point-major: x0,y0,z0,x1,...
  uint16_t label = 0;

  size_t n_points() const { return xyz.size() / 3; }
};

constexpr size_t kNumShapeClasses = 8;

inline const std::array<std::string, kNumShapeClasses>& shape_class_names() {
  static const std::array<std::string, kNumShapeClasses> names = {
      "sphere", "cube", "cylinder", "cone", "torus", "pyramid", "ellipsoid", "planes"};
  return names;
}

namespace detail {

inline std::array<double, 3> sample_sphere_dir(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

inline std::array<double, 3> sample_surface_point(size_t class_id, Rng& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (class_id) {
    case 0:  // unit sphere
      return sample_sphere_dir(rng);
    case 1: {  // cube [-1,1]^3, faces equal area
      const size_t face = rng.uniform_int(6);
      const double u = rng.uniform(-1.0, 1.0);
      const double v = rng.uniform(-1.0, 1.0);
      switch (face) {
        case 0: return {1.0, u, v};
        case 1: return {-1.0, u, v};
        case 2: return {u, 1.0, v};
        case 3: return {u, -1.0, v};
        case 4: return {u, v, 1.0};
        default: return {u, v, -1.0};
      }
    }
    case 2: {  // cylinder r=0.5, z in [-1,1], with caps
      const double r = 0.5;
      const double side_area = two_pi * r * 2.0;
      const double cap_area = std::numbers::pi * r * r;
      const double u = rng.uniform() * (side_area + 2 * cap_area);
      if (u < side_area) {
        const double phi = rng.uniform(0.0, two_pi);
        const double z = rng.uniform(-1.0, 1.0);
        return {r * std::cos(phi), r * std::sin(phi), z};
      }
      const double z = u < side_area + cap_area ? 1.0 : -1.0;
      const double rho = r * std::sqrt(rng.uniform());
      const double phi = rng.uniform(0.0, two_pi);
      return {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    case 3: {  // cone: apex (0,0,1), base radius 0.7 at z=-1
      const double rb = 0.7, h = 2.0;
      const double slant = std::sqrt(h * h + rb * rb);
      const double lat_area = std::numbers::pi * rb * slant;
      const double base_area = std::numbers::pi * rb * rb;
      const double u = rng.uniform() * (lat_area + base_area);
      if (u < lat_area) {
        const double t = std::sqrt(rng.uniform());  // area grows with distance from apex
        const double phi = rng.uniform(0.0, two_pi);
        return {t * rb * std::cos(phi), t * rb * std::sin(phi), 1.0 - t * h};
      }
      const double rho = rb * std::sqrt(rng.uniform());
      const double phi = rng.uniform(0.0, two_pi);
      return {rho * std::cos(phi), rho * std::sin(phi), -1.0};
    }
    case 4: {  // torus R=0.7, r=0.25; tube angle by rejection
      const double R = 0.7, r = 0.25;
      const double phi = rng.uniform(0.0, two_pi);
      double theta;
      do {
        theta = rng.uniform(0.0, two_pi);
      } while (rng.uniform() >= (R + r * std::cos(theta)) / (R + r));
      const double rad = R + r * std::cos(theta);
      return {rad * std::cos(phi), rad * std::sin(phi), r * std::sin(theta)};
    }
    case 5: {  // pyramid: square base side 1.4 at z=-0.6, apex (0,0,0.9)
      const double hs = 0.7, z0 = -0.6;
      const std::array<double, 3> apex = {0.0, 0.0, 0.9};
      const double base_area = 4.0 * hs * hs;
      const double height = std::sqrt(hs * hs + (apex[2] - z0) * (apex[2] - z0));
      const double face_area = 0.5 * (2.0 * hs) * height;
      const double u = rng.uniform() * (base_area + 4.0 * face_area);
      if (u < base_area)
        return {rng.uniform(-hs, hs), rng.uniform(-hs, hs), z0};
      static constexpr double cx[4] = {1, 1, -1, -1};
      static constexpr double cy[4] = {-1, 1, 1, -1};
      const size_t f = rng.uniform_int(4);
      const std::array<double, 3> a = {hs * cx[f], hs * cy[f], z0};
      const std::array<double, 3> b = {hs * cx[(f + 1) % 4], hs * cy[(f + 1) % 4], z0};
      const double r1 = std::sqrt(rng.uniform());
      const double r2 = rng.uniform();
      std::array<double, 3> p;
      for (int i = 0; i < 3; ++i)
        p[i] = (1 - r1) * a[i] + r1 * (1 - r2) * b[i] + r1 * r2 * apex[i];
      return p;
    }
    case 6: {  // ellipsoid (1.0, 0.6, 0.35) by area rejection
      const double a = 1.0, b = 0.6, c = 0.35;
      while (true) {
        const auto d = sample_sphere_dir(rng);
        const double mu = std::sqrt(b * c * d[0] * (b * c * d[0]) + a * c * d[1] * (a * c * d[1]) +
                                    a * b * d[2] * (a * b * d[2]));
        if (rng.uniform() < mu / (a * b)) return {a * d[0], b * d[1], c * d[2]};
      }
    }
    case 7: {  // two parallel square plates at z = +-0.5
      const double z = rng.uniform_int(2) == 0 ? 0.5 : -0.5;
      return {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), z};
    }
    default:
      throw std::invalid_argument("unknown class id " + std::to_string(class_id));
  }
}

}  // namespace detail

// Samples n_points uniformly on the class surface, then centers the cloud and
// scales it to unit max norm. Deterministic given the rng state.
inline PointCloud generate_shape(size_t class_id, size_t n_points, Rng& rng) {
  if (class_id >= kNumShapeClasses)
    throw std::invalid_argument("unknown class id " + std::to_string(class_id));
  if (n_points == 0) throw std::invalid_argument("n_points must be >= 1");

  std::vector<double> pts(3 * n_points);
  for (size_t i = 0; i < n_points; ++i) {
    const auto p = detail::sample_surface_point(class_id, rng);
    pts[3 * i] = p[0];
    pts[3 * i + 1] = p[1];
    pts[3 * i + 2] = p[2];
  }

  double cx = 0, cy = 0, cz = 0;
  for (size_t i = 0; i < n_points; ++i) {
    cx += pts[3 * i];
    cy += pts[3 * i + 1];
    cz += pts[3 * i + 2];
  }
  cx /= double(n_points);
  cy /= double(n_points);
  cz /= double(n_points);
  double max_norm = 0;
  for (size_t i = 0; i < n_points; ++i) {
    pts[3 * i] -= cx;
    pts[3 * i + 1] -= cy;
    pts[3 * i + 2] -= cz;
    const double n2 = pts[3 * i] * pts[3 * i] + pts[3 * i + 1] * pts[3 * i + 1] +
                      pts[3 * i + 2] * pts[3 * i + 2];
    max_norm = std::max(max_norm, n2);
  }
  max_norm = std::sqrt(max_norm);
  if (max_norm > 1e-12)
    for (double& v : pts) v /= max_norm;

  PointCloud pc;
  pc.label = static_cast<uint16_t>(class_id);
  pc.xyz.resize(3 * n_points);
  for (size_t i = 0; i < pc.xyz.size(); ++i) pc.xyz[i] = static_cast<float>(pts[i]);
  return pc;
}

// Applies the configured shift. Draw order: per-point jitter (x,y,z per
// point), one rotation, background index selection then per-index uniforms in
// ascending index order, scale factor, per-axis translation. The output keeps
// the input label and is deliberately not re-normalized.
inline PointCloud apply_shift(const PointCloud& pc, const ShiftConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.kind == ShiftKind::clean) return pc;

  const size_t n = pc.n_points();
  std::vector<double> pts(pc.xyz.begin(), pc.xyz.end());

  for (double& v : pts) v += rng.normal() * cfg.jitter_sigma;

  if (cfg.rotate) {
    const auto R = rng.rotation();
    for (size_t i = 0; i < n; ++i) {
      const double x = pts[3 * i], y = pts[3 * i + 1], z = pts[3 * i + 2];
      pts[3 * i] = R[0] * x + R[1] * y + R[2] * z;
      pts[3 * i + 1] = R[3] * x + R[4] * y + R[5] * z;
      pts[3 * i + 2] = R[6] * x + R[7] * y + R[8] * z;
    }
  }

  if (cfg.kind == ShiftKind::obj_bg || cfg.kind == ShiftKind::hardest) {
    const size_t k = static_cast<size_t>(cfg.bg_fraction * double(n));
    if (k > 0) {
      double lo[3] = {pts[0], pts[1], pts[2]};
      double hi[3] = {pts[0], pts[1], pts[2]};
      for (size_t i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], pts[3 * i + a]);
          hi[a] = std::max(hi[a], pts[3 * i + a]);
        }
      std::vector<size_t> idx(n);
      for (size_t i = 0; i < n; ++i) idx[i] = i;
      for (size_t i = 0; i < k; ++i)
        std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
      idx.resize(k);
      std::sort(idx.begin(), idx.end());
      for (size_t i : idx)
        for (int a = 0; a < 3; ++a) pts[3 * i + a] = rng.uniform(lo[a], hi[a]);
    }
  }

  if (cfg.kind == ShiftKind::hardest) {
    const double s = rng.uniform(cfg.scale_lo, cfg.scale_hi);
    for (double& v : pts) v *= s;
    for (int a = 0; a < 3; ++a) {
      double lo = pts[a], hi = pts[a];
      for (size_t i = 0; i < n; ++i) {
        lo = std::min(lo, pts[3 * i + a]);
        hi = std::max(hi, pts[3 * i + a]);
      }
      const double extent = hi - lo;
      const double t = rng.uniform(-cfg.max_translation * extent, cfg.max_translation * extent);
      for (size_t i = 0; i < n; ++i) pts[3 * i + a] += t;
    }
  }

  PointCloud out;
  out.label = pc.label;
  out.xyz.resize(3 * n);
  for (size_t i = 0; i < out.xyz.size(); ++i) out.xyz[i] = static_cast<float>(pts[i]);
  return out;
}

struct DatasetSpec {
  std::vector<size_t> classes = {0, 1, 2, 3, 4, 5, 6, 7};
  size_t per_class_train = 50;
  size_t per_class_test = 20;
  size_t n_points = 256;
  ShiftConfig shift;
  uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const DatasetSpec& s) {
  j = {{"classes", s.classes},
       {"per_class_train", s.per_class_train},
       {"per_class_test", s.per_class_test},
       {"n_points", s.n_points},
       {"shift", s.shift},
       {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, DatasetSpec& s) {
  s.classes = j.value("classes", std::vector<size_t>{0, 1, 2, 3, 4, 5, 6, 7});
  s.per_class_train = j.value("per_class_train", size_t{50});
  s.per_class_test = j.value("per_class_test", size_t{20});
  s.n_points = j.value("n_points", size_t{256});
  if (j.contains("shift")) s.shift = j.at("shift").get<ShiftConfig>();
  s.seed = j.value("seed", uint64_t{0});
}

inline std::string dataset_fingerprint(const DatasetSpec& spec) {
  return fnv1a_hex(nlohmann::json(spec).dump());
}

// Builds both splits. Every cloud draws from its own substream derived from
// (seed, split, index), so generation is independent of evaluation order.
// Labels are positions in spec.classes, not raw class ids.
inline Dataset build_dataset(const DatasetSpec& spec) {
  if (spec.classes.empty()) throw std::invalid_argument("classes must be non-empty");
  if (spec.per_class_train < 1 || spec.per_class_test < 1)
    throw std::invalid_argument("per-class counts must be >= 1");
  spec.shift.validate();

  Dataset ds;
  ds.shift = spec.shift;
  ds.n_points = spec.n_points;
  ds.fingerprint = dataset_fingerprint(spec);
  for (size_t cid : spec.classes) {
    if (cid >= kNumShapeClasses)
      throw std::invalid_argument("unknown class id " + std::to_string(cid));
    ds.class_names.push_back(shape_class_names()[cid]);
  }

  auto make_split = [&](const char* split, size_t per_class) {
    std::vector<PointCloud> out;
    out.reserve(per_class * spec.classes.size());
    for (size_t c = 0; c < spec.classes.size(); ++c)
      for (size_t i = 0; i < per_class; ++i) {
        const uint64_t index = c * per_class + i;
        Rng rng(substream_seed(spec.seed, split, index));
        PointCloud pc = generate_shape(spec.classes[c], spec.n_points, rng);
        pc = apply_shift(pc, spec.shift, rng);
        pc.label = static_cast<uint16_t>(c);
        out.push_back(std::move(pc));
      }
    return out;
  };
  ds.train = make_split("train", spec.per_class_train);
  ds.test = make_split("test", spec.per_class_test);
  return ds;
}

}  // namespace wiseft
