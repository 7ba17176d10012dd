#include "mvgt/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mvgt/errors.hpp"

namespace mvgt {

std::vector<FoldSplit> stratified_kfold(const std::vector<double>& key, std::size_t k, std::size_t bins,
                                        std::uint64_t seed) {
  const std::size_t n = key.size();
  if (k < 2) throw ConfigError("stratified_kfold: need at least 2 folds");
  if (n < k) {
    throw ConfigError("stratified_kfold: " + std::to_string(n) + " samples cannot fill " + std::to_string(k) +
                      " folds");
  }
  if (bins == 0) throw ConfigError("stratified_kfold: bins must be positive");
  bins = std::min(bins, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> binned(bins);
  for (std::size_t r = 0; r < n; ++r) binned[r * bins / n].push_back(order[r]);

  std::vector<FoldSplit> folds(k);
  std::size_t dealt = 0;
  for (auto& bin : binned) {
    std::shuffle(bin.begin(), bin.end(), rng);
    for (std::size_t idx : bin) folds[dealt++ % k].test.push_back(idx);
  }

  std::vector<char> in_test(n);
  for (auto& f : folds) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (std::size_t idx : f.test) in_test[idx] = 1;
    std::vector<std::size_t> rest;
    rest.reserve(n - f.test.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!in_test[i]) rest.push_back(i);
    std::shuffle(rest.begin(), rest.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::lround(static_cast<double>(rest.size()) / 10.0));
    f.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
    f.train.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
    std::sort(f.train.begin(), f.train.end());
    std::sort(f.val.begin(), f.val.end());
    std::sort(f.test.begin(), f.test.end());
  }
  return folds;
}

FoldSplit random_split(std::size_t n, std::uint64_t seed, double train_frac, double val_frac) {
  if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0) {
    throw ConfigError("random_split: bad fractions");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::lround(static_cast<double>(n) * train_frac));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::lround(static_cast<double>(n) * val_frac)));
  FoldSplit s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
  for (auto* v : {&s.train, &s.val, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

}  // namespace mvgt
