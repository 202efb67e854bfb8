#ifndef LABNER_SPLIT_H_
#define LABNER_SPLIT_H_

#include <cstdint>
#include <vector>

#include "labner/corpus.h"

namespace labner {

// SplitMix64 (Steele, Lea and Flood). Every random decision in the toolkit
// draws from this generator so results are reproducible across languages:
//
//   state += 0x9e3779b97f4a7c15
//   z = state
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t Next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Next() % bound. The modulo bias is below 2^-40 for realistic bounds.
  uint64_t Below(uint64_t bound) { return Next() % bound; }

  // Uniform in [0, 1) from the top 53 bits.
  double Uniform() { return (Next() >> 11) * 0x1.0p-53; }

  double Uniform(double low, double high) {
    return low + (high - low) * Uniform();
  }

 private:
  uint64_t state_;
};

// Fisher-Yates: for i = n-1 down to 1, swap(items[i], items[rng.Below(i+1)]).
template <typename T>
void Shuffle(std::vector<T> &items, SplitMix64 &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = rng.Below(i);
    std::swap(items[i - 1], items[j]);
  }
}

// Partition sizes for n documents: floor(ratio * n) each, then the remainder
// handed out one per split starting from the first. Throws DataError if the
// ratios are not positive or do not sum to 1 within 1e-9, or if there are
// more splits than documents.
std::vector<int> SplitSizes(int n, const std::vector<double> &ratios);

// Shuffles documents with SplitMix64(seed) and cuts the shuffled order into
// consecutive partitions of SplitSizes. Documents keep their original
// relative order inside each split. Every split shares the input label set.
std::vector<Corpus> SplitDataset(const Corpus &corpus,
                                 const std::vector<double> &ratios,
                                 uint64_t seed);

}  // namespace labner

#endif  // LABNER_SPLIT_H_
