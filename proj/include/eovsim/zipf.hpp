#pragma once

#include <cstddef>
#include <vector>

#include "eovsim/util.hpp"

namespace eovsim {

// Zipfian rank sampler: P(rank r) proportional to 1/r^skew, r in [1, n].
// skew 0 degenerates to uniform. Key-index mapping puts rank 1 on the
// highest index, so positive skew concentrates traffic at the top of the
// key space.
class ZipfSampler {
 public:
  ZipfSampler(size_t n, double skew);

  size_t n() const { return n_; }

  // Rank in [1, n].
  size_t sample_rank(Rng& rng) const;

  // Key index in [0, n): rank 1 -> n-1, rank n -> 0.
  size_t sample_index(Rng& rng) const { return n_ - sample_rank(rng); }

  static size_t index_for_rank(size_t rank, size_t n) { return n - rank; }

 private:
  size_t n_;
  double skew_;
  std::vector<double> cdf_;  // empty when skew_ == 0
};

}  // namespace eovsim
