#include "cbn/partition.hpp"

#include <stdexcept>
#include <unordered_map>

namespace cbn {

std::size_t Partition::cluster_count() const {
  std::size_t count = 0;
  for (std::size_t s : cluster_sizes()) count += s > 0 ? 1 : 0;
  return count;
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes;
  for (int label : labels) {
    if (label == kNoise) continue;
    if (label < 0) throw std::invalid_argument("negative cluster label other than noise");
    const auto idx = static_cast<std::size_t>(label);
    if (idx >= sizes.size()) sizes.resize(idx + 1, 0);
    ++sizes[idx];
  }
  return sizes;
}

Partition Partition::canonical(const std::vector<int>& raw_labels) {
  Partition p;
  p.labels.reserve(raw_labels.size());
  std::unordered_map<int, int> remap;
  for (int raw : raw_labels) {
    if (raw == kNoise) {
      p.labels.push_back(kNoise);
      continue;
    }
    auto [it, inserted] = remap.try_emplace(raw, static_cast<int>(remap.size()));
    p.labels.push_back(it->second);
  }
  return p;
}

bool is_refinement_of(const Partition& fine, const Partition& coarse) {
  if (fine.size() != coarse.size()) throw std::invalid_argument("partitions differ in size");
  // Noise points are singletons, which refine anything.
  std::unordered_map<int, int> owner;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (fine.labels[i] == Partition::kNoise) continue;
    auto [it, inserted] = owner.try_emplace(fine.labels[i], coarse.labels[i]);
    if (!inserted && it->second != coarse.labels[i]) return false;
    if (coarse.labels[i] == Partition::kNoise && !inserted) return false;
  }
  return true;
}

}  // namespace cbn
