#include "eovsim/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eovsim {

ZipfSampler::ZipfSampler(size_t n, double skew) : n_(n), skew_(skew) {
  if (n == 0) throw std::invalid_argument("zipf: empty key space");
  if (skew < 0) throw std::invalid_argument("zipf: negative skew");
  if (skew == 0.0) return;  // uniform fast path
  cdf_.resize(n);
  double acc = 0.0;
  for (size_t r = 1; r <= n; ++r) {
    acc += 1.0 / std::pow(static_cast<double>(r), skew);
    cdf_[r - 1] = acc;
  }
  for (double& v : cdf_) v /= acc;
  cdf_.back() = 1.0;
}

size_t ZipfSampler::sample_rank(Rng& rng) const {
  if (skew_ == 0.0) return rng.index(n_) + 1;
  double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<size_t>(it - cdf_.begin()) + 1;
}

}  // namespace eovsim
