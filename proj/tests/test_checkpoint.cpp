// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "wiseft/checkpoint.hpp"
#include "wiseft/checkpoint_io.hpp"
#include "wiseft/rng.hpp"

using namespace wiseft;

namespace {

Checkpoint minimal_checkpoint() {
  Checkpoint c;
  c.metadata = {{"arch_fingerprint", "feed"}, {"provenance", "scratch"}, {"seed", "0"}};
  return c;
}

// Random checkpoints with adversarial float payloads: arbitrary bit patterns
// cover NaN, infinities, subnormals and negative zero.
Checkpoint random_checkpoint(Rng& rng) {
  Checkpoint c = minimal_checkpoint();
  const char* provs[] = {"pt", "ft", "wise", "rft", "scratch"};
  const std::string prov = provs[rng.uniform_int(5)];
  c.metadata["provenance"] = prov;
  if (prov == "wise") c.metadata["alpha"] = "0.5";
  const size_t n_entries = rng.uniform_int(5);
  for (size_t e = 0; e < n_entries; ++e) {
    std::string name;
    const size_t len = 1 + rng.uniform_int(12);
    for (size_t i = 0; i < len; ++i) name.push_back("abcxyz.019_"[rng.uniform_int(11)]);
    name += std::to_string(e);  // keep names unique
    Tensor t;
    const size_t ndim = 1 + rng.uniform_int(3);
    for (size_t d = 0; d < ndim; ++d) t.shape.push_back(1 + rng.uniform_int(4));
    t.data.resize(t.size());
    for (auto& f : t.data) f = std::bit_cast<float>(static_cast<uint32_t>(rng.next_u64()));
    const Role role = prov == "pt"            ? Role::backbone
                      : rng.uniform_int(2) == 0 ? Role::backbone
                                                : Role::head;
    c.set(name, std::move(t), role);
  }
  return c;
}

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() / ("wiseft_test_" + stem + ".wlpc");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("tensor invariants") {
  Tensor t;
  t.shape = {2, 3};
  t.data.resize(6);
  REQUIRE_NOTHROW(t.validate("w"));
  t.data.resize(5);
  REQUIRE_THROWS_AS(t.validate("w"), std::invalid_argument);
  t.shape = {};
  t.data.clear();
  REQUIRE_THROWS_AS(t.validate("w"), std::invalid_argument);
  t.shape = {2, 0};
  REQUIRE_THROWS_AS(t.validate("w"), std::invalid_argument);
}

TEST_CASE("empty checkpoint serializes to magic, version and empty entry list") {
  const std::string bytes = serialize_checkpoint(minimal_checkpoint());
  REQUIRE(bytes.size() >= 16);
  REQUIRE(std::memcmp(bytes.data(), "WLPC", 4) == 0);
  REQUIRE(detail::get_u32le(reinterpret_cast<const uint8_t*>(bytes.data()) + 4) == 1);
  const uint64_t hlen = detail::get_u64le(reinterpret_cast<const uint8_t*>(bytes.data()) + 8);
  REQUIRE(bytes.size() == 16 + hlen);  // no payload
  const auto header = nlohmann::json::parse(bytes.substr(16));
  REQUIRE(header.at("entries").empty());
}

TEST_CASE("payload is four bytes per float") {
  Checkpoint c = minimal_checkpoint();
  Tensor t;
  t.shape = {2, 3};
  t.data = {1, 2, 3, 4, 5, 6};
  c.set("w", std::move(t), Role::backbone);
  const std::string bytes = serialize_checkpoint(c);
  const uint64_t hlen = detail::get_u64le(reinterpret_cast<const uint8_t*>(bytes.data()) + 8);
  REQUIRE(bytes.size() - 16 - hlen == 24);
}

TEST_CASE("save rejects invariant violations before writing") {
  Checkpoint c = minimal_checkpoint();
  c.metadata.erase("seed");
  const auto path = temp_file("reject");
  std::filesystem::remove(path);
  REQUIRE_THROWS_AS(save_checkpoint(c, path), std::invalid_argument);
  REQUIRE_FALSE(std::filesystem::exists(path));

  Checkpoint pt = minimal_checkpoint();
  pt.metadata["provenance"] = "pt";
  pt.set("h", Tensor::zeros({1}), Role::head);
  REQUIRE_THROWS_AS(serialize_checkpoint(pt), std::invalid_argument);
}

TEST_CASE("round trip is bitwise and canonical over random checkpoints") {
  Rng rng(substream_seed(7, "roundtrip"));
  const auto path = temp_file("roundtrip");
  for (int i = 0; i < 100; ++i) {
    const Checkpoint c = random_checkpoint(rng);
    save_checkpoint(c, path);
    const std::string first = slurp(path);
    const Checkpoint loaded = load_checkpoint(path);
    REQUIRE(bits_equal(c, loaded));
    save_checkpoint(loaded, path);
    REQUIRE(first == slurp(path));
    // pure function of the value
    REQUIRE(serialize_checkpoint(c) == first);
  }
  std::filesystem::remove(path);
}

TEST_CASE("negative zero and quiet NaN survive the round trip bitwise") {
  Checkpoint c = minimal_checkpoint();
  Tensor t;
  t.shape = {4};
  t.data = {-0.0f, std::bit_cast<float>(0x7fc00001u), std::bit_cast<float>(0x00000001u),
            std::numeric_limits<float>::infinity()};
  c.set("w", std::move(t), Role::backbone);
  const auto path = temp_file("specials");
  save_checkpoint(c, path);
  const Checkpoint loaded = load_checkpoint(path);
  REQUIRE(bits_equal(c, loaded));
  std::filesystem::remove(path);
}

TEST_CASE("loader distinguishes the failure modes") {
  Checkpoint c = minimal_checkpoint();
  Tensor t;
  t.shape = {3};
  t.data = {1, 2, 3};
  c.set("w", std::move(t), Role::backbone);
  const std::string good = serialize_checkpoint(c);
  const auto path = temp_file("errors");

  auto expect_code = [&](const std::string& bytes, CheckpointIoError::Code code) {
    spit(path, bytes);
    try {
      load_checkpoint(path);
      FAIL("expected an error");
    } catch (const CheckpointIoError& e) {
      REQUIRE(e.code == code);
    }
  };

  std::string bad = good;
  bad[0] = 'X';
  expect_code(bad, CheckpointIoError::Code::bad_magic);

  bad = good;
  bad[4] = 9;
  expect_code(bad, CheckpointIoError::Code::unsupported_version);

  expect_code(good.substr(0, good.size() - 4), CheckpointIoError::Code::truncated);
  expect_code(good.substr(0, 10), CheckpointIoError::Code::truncated);
  expect_code(good + std::string(4, '\0'), CheckpointIoError::Code::size_mismatch);

  // duplicate names require a hand-built header
  nlohmann::ordered_json header;
  header["metadata"] = c.metadata;
  header["entries"] = nlohmann::ordered_json::array(
      {{{"name", "w"}, {"shape", {1}}, {"role", "backbone"}, {"offset", 0}},
       {{"name", "w"}, {"shape", {1}}, {"role", "backbone"}, {"offset", 4}}});
  const std::string hj = header.dump();
  std::string dup;
  dup.append("WLPC", 4);
  detail::put_u32le(dup, 1);
  detail::put_u64le(dup, hj.size());
  dup += hj;
  dup += std::string(8, '\0');
  expect_code(dup, CheckpointIoError::Code::duplicate_name);
}

TEST_CASE("compatibility diagnostics") {
  Checkpoint a = minimal_checkpoint();
  a.set("enc.0.weight", Tensor::zeros({4, 3}), Role::backbone);
  a.set("enc.0.bias", Tensor::zeros({4}), Role::backbone);

  SECTION("a checkpoint is compatible with itself") {
    REQUIRE(validate_compatibility(a, a, CompatScope::all).empty());
  }

  SECTION("one differing shape yields exactly one diagnostic") {
    Checkpoint b = a;
    b.tensor("enc.0.bias").shape = {5};
    b.tensor("enc.0.bias").data.resize(5);
    auto diags = validate_compatibility(a, b, CompatScope::all);
    REQUIRE(diags.size() == 1);
    REQUIRE(diags[0].find("shape mismatch") != std::string::npos);
  }

  SECTION("backbone scope ignores head-only entries") {
    Checkpoint b = a;
    b.metadata["provenance"] = "ft";
    b.set("head.0.weight", Tensor::zeros({2, 4}), Role::head);
    REQUIRE(validate_compatibility(a, b, CompatScope::backbone).empty());
    REQUIRE_FALSE(validate_compatibility(a, b, CompatScope::all).empty());
  }

  SECTION("diagnostics count is symmetric") {
    Rng rng(substream_seed(11, "compat"));
    for (int i = 0; i < 50; ++i) {
      const Checkpoint x = random_checkpoint(rng);
      const Checkpoint y = random_checkpoint(rng);
      for (auto scope : {CompatScope::backbone, CompatScope::all})
        REQUIRE(validate_compatibility(x, y, scope).size() ==
                validate_compatibility(y, x, scope).size());
    }
  }
}

TEST_CASE("fingerprints separate checkpoints and ignore metadata") {
  Checkpoint a = minimal_checkpoint();
  a.set("w", Tensor::zeros({2}), Role::backbone);
  Checkpoint b = a;
  b.metadata["provenance"] = "rft";
  REQUIRE(entries_fingerprint(a) == entries_fingerprint(b));
  REQUIRE(checkpoint_fingerprint(a) != checkpoint_fingerprint(b));
  b.tensor("w").data[0] = 1.0f;
  REQUIRE(entries_fingerprint(a) != entries_fingerprint(b));

  Checkpoint with_head = a;
  with_head.set("h", Tensor::zeros({2}), Role::head);
  REQUIRE(backbone_fingerprint(with_head) == backbone_fingerprint(a));
}
