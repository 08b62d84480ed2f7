#include <cmath>

#include "cpm/rng.hpp"
#include "doctest.h"

using namespace cpm;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms stay inside the open unit interval") {
  CHECK(uniform_open(0, 0) > 0.0);
  CHECK(uniform_open(0xffffffff, 0xffffffff) < 1.0);
}

TEST_CASE("engine substreams are reproducible and distinct") {
  PhiloxEngine a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    CHECK(va == b());
    (void)c();
    (void)d();
  }
  PhiloxEngine e(42, 7), f(42, 8);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += e() == f();
  CHECK(same < 3);
}

TEST_CASE("normal draws have the right first two moments") {
  PhiloxEngine g(1, 0);
  const int n = 200000;
  double s = 0, s2 = 0, below = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s += z, s2 += z * z;
    below += z < -1.0;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
  CHECK(std::abs(below / n - 0.158655) < 0.004);
}
