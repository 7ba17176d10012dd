#pragma once

#include <cstdint>
#include <vector>

namespace mvgt {

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Test folds stratified on `key` (usually the first target): samples are
/// ranked, cut into `bins` quantile bins, shuffled within each bin and dealt
/// round-robin to the folds, so fold sizes differ by at most one. The rest of
/// each fold is shuffled and split 9:1 into train / validation.
/// Throws ConfigError when key.size() < k or k < 2.
std::vector<FoldSplit> stratified_kfold(const std::vector<double>& key, std::size_t k, std::size_t bins,
                                        std::uint64_t seed);

/// Shuffled train / validation / test split with sizes round(n * train_frac),
/// round(n * val_frac) and the remainder.
FoldSplit random_split(std::size_t n, std::uint64_t seed, double train_frac = 0.6, double val_frac = 0.2);

}  // namespace mvgt
