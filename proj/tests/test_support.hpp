#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "layertext/core.hpp"
#include "layertext/error.hpp"

// Expects `stmt` to throw layertext::Error with the given code.
#define EXPECT_CODE(stmt, expected)                 \
  do {                                              \
    try {                                           \
      stmt;                                         \
      ADD_FAILURE() << "no error from " #stmt;      \
    } catch (const ::layertext::Error& e) {                   \
      EXPECT_EQ(e.code(), expected) << e.what();    \
    }                                               \
  } while (0)

namespace layertext::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(LAYERTEXT_TEST_DATA) / name;
}

inline std::filesystem::path provider_path(const std::string& name) {
  return std::filesystem::path(LAYERTEXT_TEST_PROVIDERS) / name;
}

inline RasterImage random_image(int w, int h, std::mt19937_64& rng) {
  RasterImage img(w, h);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
  return img;
}

inline BinaryMask random_mask(int w, int h, std::mt19937_64& rng, double p = 0.5) {
  BinaryMask m(w, h);
  std::bernoulli_distribution d(p);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, d(rng));
  }
  return m;
}

}  // namespace layertext::testing
