// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>
#include <vector>

#include "splitshot/rng.hpp"
#include "test_support.hpp"

using namespace splitshot;

TEST_CASE("philox4x32-10 matches the Random123 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and address-separated") {
  RandomStream a(7, 11, 0), b(7, 11, 0), c(7, 11, 1), d(8, 11, 0);
  std::vector<std::uint32_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  CHECK(RandomStream::for_item(3, "img_1").next_u64() == RandomStream::for_item(3, "img_1").next_u64());
  CHECK(RandomStream::for_item(3, "img_1").next_u64() != RandomStream::for_item(3, "img_2").next_u64());
}

TEST_CASE("uniform_int is uniform over a closed range") {
  RandomStream rng(123);
  constexpr int kDraws = 100000;
  std::vector<int> hist(11, 0);
  for (int i = 0; i < kDraws; ++i) {
    const auto v = rng.uniform_int(-5, 5);
    REQUIRE(v >= -5);
    REQUIRE(v <= 5);
    ++hist[v + 5];
  }
  const double p = 1.0 / 11.0;
  for (int h : hist) CHECK(std::abs(h / double(kDraws) - p) <= testing::three_sigma(p, kDraws));
  CHECK(rng.uniform_int(4, 4) == 4);
}

TEST_CASE("uniform01 and bernoulli edges") {
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
