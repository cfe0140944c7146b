#pragma once

#include "lulu/field.hpp"

#include <random>

namespace lulu {

inline ScalarField uniform_random_field(std::shared_ptr<const Lattice> lat, std::mt19937_64& rng,
                                        Value lo, Value hi) {
  std::uniform_int_distribution<Value> dist(lo, hi);
  std::vector<Value> v(static_cast<std::size_t>(lat->cell_count()));
  for (Value& x : v) x = dist(rng);
  return ScalarField(std::move(lat), std::move(v));
}

/// 8-bit noise smoothed by two 5x5 box-blur passes; produces the plateaus a
/// denoised photograph would have.
inline ScalarField smoothed_random_field(int rows, int cols, std::uint64_t seed,
                                         Connectivity conn = Connectivity::facet,
                                         Boundary bound = Boundary::zero_padded) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<Value> v(static_cast<std::size_t>(rows) * cols);
  for (Value& x : v) x = dist(rng);
  std::vector<Value> tmp(v.size());
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        long long sum = 0;
        int count = 0;
        for (int dr = -2; dr <= 2; ++dr)
          for (int dc = -2; dc <= 2; ++dc) {
            const int nr = r + dr;
            const int nc = c + dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            sum += v[static_cast<std::size_t>(nr) * cols + nc];
            ++count;
          }
        tmp[static_cast<std::size_t>(r) * cols + c] = sum / count;
      }
    v.swap(tmp);
  }
  auto lat = std::make_shared<Lattice>(std::vector<int>{rows, cols}, conn, bound);
  return ScalarField(std::move(lat), std::move(v));
}

}  // namespace lulu
