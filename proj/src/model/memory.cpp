#include "sketchvos/model/memory.hpp"

namespace sketchvos::model {

using namespace numerics;

namespace {

// Concatenates C x n_i matrices along columns.
template <typename T>
Var<T> concat_columns(const std::vector<Var<T>>& parts) {
  if (parts.size() == 1) return parts.front();
  std::vector<Var<T>> rows;
  rows.reserve(parts.size());
  for (const auto& p : parts) rows.push_back(reshape(transpose(p), {p.dim(1), p.dim(0), 1}));
  const Var<T> stacked = concat_channels(rows);
  return transpose(reshape(stacked, {stacked.dim(0), stacked.dim(1)}));
}

}  // namespace

std::string_view to_string(Affinity a) { return a == Affinity::l2 ? "l2" : "dot"; }

Affinity parse_affinity(std::string_view name) {
  if (name == "l2") return Affinity::l2;
  if (name == "dot") return Affinity::dot;
  throw ConfigError("unknown affinity '" + std::string(name) + "' (expected l2 or dot)");
}

bool should_insert(int frame_index, int every_k) {
  if (every_k < 1) throw ConfigError("every_k must be >= 1");
  return frame_index == 0 || (frame_index > 0 && frame_index % every_k == 0);
}

template <typename T>
void MemoryBank<T>::insert_entry(const Var<T>& key, const Var<T>& value, int frame_index) {
  for (const auto& e : entries_) {
    if (e.frame_index == frame_index) {
      throw StateError("memory already holds frame " + std::to_string(frame_index));
    }
  }
  if (key.value().rank() != 2 || value.value().rank() != 2 || key.dim(1) != value.dim(1)) {
    throw ShapeError("memory insert: key " + shape_str(key.shape()) + " and value " + shape_str(value.shape()) +
                     " must be C x n with equal n");
  }
  if (!entries_.empty() && (key.dim(0) != key_dim() || value.dim(0) != value_dim())) {
    throw ShapeError("memory insert: channel counts differ from stored entries");
  }
  entries_.push_back({frame_index, key.dim(1)});
  keys_.push_back(key);
  values_.push_back(value);
}

template <typename T>
bool MemoryBank<T>::insert(const Var<T>& key, const Var<T>& value, int frame_index, int every_k) {
  if (!should_insert(frame_index, every_k)) return false;
  insert_entry(key, value, frame_index);
  return true;
}

template <typename T>
int MemoryBank<T>::positions() const {
  int n = 0;
  for (const auto& e : entries_) n += e.positions;
  return n;
}

template <typename T>
int MemoryBank<T>::key_dim() const {
  return keys_.empty() ? 0 : keys_.front().dim(0);
}

template <typename T>
int MemoryBank<T>::value_dim() const {
  return values_.empty() ? 0 : values_.front().dim(0);
}

template <typename T>
Var<T> MemoryBank<T>::keys() const {
  if (empty()) throw StateError("memory bank is empty");
  return concat_columns(keys_);
}

template <typename T>
Var<T> MemoryBank<T>::values() const {
  if (empty()) throw StateError("memory bank is empty");
  return concat_columns(values_);
}

template <typename T>
Var<T> affinity(const Var<T>& query_key, const MemoryBank<T>& bank, Affinity kind) {
  if (bank.empty()) throw StateError("affinity: memory bank is empty");
  if (query_key.value().rank() != 2 || query_key.dim(0) != bank.key_dim()) {
    throw ShapeError("affinity: query " + shape_str(query_key.shape()) + " does not match key dim " +
                     std::to_string(bank.key_dim()));
  }
  if (kind == Affinity::dot) return softmax(matmul(transpose(bank.keys()), query_key), 0);
  return softmax(neg_sq_distance(bank.keys(), query_key), 0);
}

template <typename T>
Var<T> read(const Var<T>& weights, const MemoryBank<T>& bank) {
  if (weights.value().rank() != 2 || weights.dim(0) != bank.positions()) {
    throw ShapeError("read: weights " + shape_str(weights.shape()) + " do not match " +
                     std::to_string(bank.positions()) + " memory positions");
  }
  return matmul(bank.values(), weights);
}

LabelMap combine_objects(const std::vector<int>& object_ids, const std::vector<std::vector<float>>& probs,
                         int height, int width) {
  if (object_ids.size() != probs.size()) throw ShapeError("combine_objects: one probability map per object");
  const std::size_t n = static_cast<std::size_t>(height) * width;
  for (const auto& p : probs) {
    if (p.size() != n) throw ShapeError("combine_objects: probability map size mismatch");
  }
  LabelMap out(height, width);
  for (std::size_t i = 0; i < n; ++i) {
    float best = 0.5f;
    int label = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k][i] >= best && (label == 0 || probs[k][i] > best)) {
        best = probs[k][i];
        label = object_ids[k];
      }
    }
    out.data()[i] = static_cast<std::uint8_t>(label);
  }
  return out;
}

#define SKETCHVOS_INSTANTIATE_MEMORY(T)                                   \
  template class MemoryBank<T>;                                           \
  template Var<T> affinity<T>(const Var<T>&, const MemoryBank<T>&, Affinity);       \
  template Var<T> read<T>(const Var<T>&, const MemoryBank<T>&);

SKETCHVOS_INSTANTIATE_MEMORY(float)
SKETCHVOS_INSTANTIATE_MEMORY(double)

}  // namespace sketchvos::model
