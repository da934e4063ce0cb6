#include "cbn/eval.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace cbn {
namespace {

std::uint64_t choose2(std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }

// Noise points become fresh singleton labels past the largest real label.
std::vector<std::int64_t> singleton_noise(const Partition& p) {
  std::int64_t next = 0;
  for (int l : p.labels) next = std::max<std::int64_t>(next, l + 1);
  std::vector<std::int64_t> out(p.labels.size());
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    out[i] = p.labels[i] == Partition::kNoise ? next++ : p.labels[i];
  }
  return out;
}

}  // namespace

PairCounts pair_counts(const Partition& reference, const Partition& candidate) {
  if (reference.size() != candidate.size()) {
    throw std::invalid_argument(fmt::format("partition sizes differ ({} vs {})", reference.size(),
                                            candidate.size()));
  }
  const auto ref = singleton_noise(reference);
  const auto cand = singleton_noise(candidate);

  std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> joint;
  std::map<std::int64_t, std::uint64_t> ref_sizes;
  std::map<std::int64_t, std::uint64_t> cand_sizes;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ++joint[{ref[i], cand[i]}];
    ++ref_sizes[ref[i]];
    ++cand_sizes[cand[i]];
  }

  PairCounts counts;
  for (const auto& [key, c] : joint) counts.tp += choose2(c);
  std::uint64_t together_ref = 0;
  std::uint64_t together_cand = 0;
  for (const auto& [key, c] : ref_sizes) together_ref += choose2(c);
  for (const auto& [key, c] : cand_sizes) together_cand += choose2(c);
  counts.fp = together_cand - counts.tp;
  counts.fn = together_ref - counts.tp;
  counts.tn = choose2(ref.size()) - counts.tp - counts.fp - counts.fn;
  return counts;
}

double rand_index(const PairCounts& counts) {
  if (counts.total() == 0) throw std::invalid_argument("Rand index needs at least two points");
  return static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
}

double jaccard_index(const PairCounts& counts) {
  const std::uint64_t denom = counts.tp + counts.fp + counts.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(counts.tp) / static_cast<double>(denom);
}

}  // namespace cbn
