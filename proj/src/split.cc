#include "labner/split.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "labner/error.h"

namespace labner {

std::vector<int> SplitSizes(int n, const std::vector<double> &ratios) {
  if (ratios.empty()) throw DataError("no split ratios given");
  double total = 0.0;
  for (double ratio : ratios) {
    if (!(ratio > 0.0)) throw DataError("split ratios must be positive");
    total += ratio;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DataError("split ratios sum to " + std::to_string(total) +
                    ", expected 1");
  }
  if (static_cast<int>(ratios.size()) > n) {
    throw DataError("cannot make " + std::to_string(ratios.size()) +
                    " splits from " + std::to_string(n) + " documents");
  }
  std::vector<int> sizes;
  int assigned = 0;
  for (double ratio : ratios) {
    // The epsilon keeps products like 0.29 * 100 from flooring to 28.
    int size = static_cast<int>(std::floor(ratio * n + 1e-9));
    sizes.push_back(size);
    assigned += size;
  }
  for (size_t i = 0; assigned < n; i = (i + 1) % sizes.size()) {
    ++sizes[i];
    ++assigned;
  }
  return sizes;
}

std::vector<Corpus> SplitDataset(const Corpus &corpus,
                                 const std::vector<double> &ratios,
                                 uint64_t seed) {
  const int n = static_cast<int>(corpus.documents.size());
  std::vector<int> sizes = SplitSizes(n, ratios);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  Shuffle(order, rng);

  std::vector<Corpus> splits;
  int offset = 0;
  for (int size : sizes) {
    std::vector<int> members(order.begin() + offset,
                             order.begin() + offset + size);
    std::sort(members.begin(), members.end());
    Corpus split;
    split.label_set = corpus.label_set;
    for (int index : members) split.documents.push_back(corpus.documents[index]);
    splits.push_back(std::move(split));
    offset += size;
  }
  return splits;
}

}  // namespace labner
