#pragma once

#include <string_view>
#include <vector>

#include "sketchvos/image.hpp"
#include "sketchvos/model/layers.hpp"

namespace sketchvos::model {

/// Frame index recorded for the concat design's reference entry.
inline constexpr int kReferenceEntry = -1;
inline constexpr int kDefaultEveryK = 5;

/// Memory similarity: negative squared Euclidean distance, or plain dot product.
enum class Affinity { l2, dot };

std::string_view to_string(Affinity a);
Affinity parse_affinity(std::string_view name);

/// Frame 0 always; later frames when frame_index % every_k == 0.
bool should_insert(int frame_index, int every_k);

/// Space-time key/value store. Entries keep insertion order and are never evicted.
template <typename T>
class MemoryBank {
 public:
  struct Entry {
    int frame_index;
    int positions;
  };

  /// Stores key (C_k x n) and value (C_v x n) unconditionally. Throws
  /// StateError for a repeated frame index, ShapeError for mismatched sizes.
  void insert_entry(const Var<T>& key, const Var<T>& value, int frame_index);

  /// Applies should_insert; returns whether the entry was stored.
  bool insert(const Var<T>& key, const Var<T>& value, int frame_index, int every_k = kDefaultEveryK);

  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  int positions() const;
  int key_dim() const;
  int value_dim() const;

  /// Concatenated C_k x R keys and C_v x R values.
  Var<T> keys() const;
  Var<T> values() const;

 private:
  std::vector<Entry> entries_;
  std::vector<Var<T>> keys_;
  std::vector<Var<T>> values_;
};

/// Column-stochastic R x P weights: softmax over memory positions r of
/// -||k_r - q_p||^2 (or k_r . q_p). Throws StateError for an empty bank.
template <typename T>
Var<T> affinity(const Var<T>& query_key, const MemoryBank<T>& bank, Affinity kind = Affinity::l2);

/// C_v x P readout, values * weights.
template <typename T>
Var<T> read(const Var<T>& weights, const MemoryBank<T>& bank);

/// Per-pixel labels from per-object probability maps (H*W each): background
/// when every probability is below 0.5, else the id with the highest one
/// (lowest id on ties).
LabelMap combine_objects(const std::vector<int>& object_ids, const std::vector<std::vector<float>>& probs,
                         int height, int width);

}  // namespace sketchvos::model
