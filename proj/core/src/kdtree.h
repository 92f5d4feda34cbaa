#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace gsc {

// Static 3D KD-tree over float points for exact k-nearest-neighbour queries.
class KdTree {
 public:
  explicit KdTree(std::span<const float> points) : points_(points) {
    const std::size_t n = points.size() / 3;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    if (n == 0) return;
    nodes_.reserve(4 * n / kLeafSize + 1);
    build(0, n, 0);
  }

  // Squared distances to the k nearest points other than `self`, ascending.
  // `out` doubles as the search heap, so each thread passes its own.
  void knn(uint32_t self, int k, std::vector<double> &out) const {
    out.clear();
    if (nodes_.empty()) return;
    const float *q = &points_[std::size_t(self) * 3];
    search(0, q, self, static_cast<std::size_t>(k), out);
    std::sort_heap(out.begin(), out.end());
  }

 private:
  static constexpr std::size_t kLeafSize = 12;

  struct Node {
    uint32_t begin, end;
    int32_t left = -1, right = -1;
    int axis = -1;
    float split = 0.0f;
  };

  double coord(uint32_t idx, int axis) const { return points_[std::size_t(idx) * 3 + axis]; }

  int32_t build(std::size_t begin, std::size_t end, int depth) {
    const int32_t id = static_cast<int32_t>(nodes_.size());
    nodes_.push_back({static_cast<uint32_t>(begin), static_cast<uint32_t>(end)});
    if (end - begin <= kLeafSize) return id;
    float lo[3], hi[3];
    for (int a = 0; a < 3; ++a) lo[a] = hi[a] = static_cast<float>(coord(order_[begin], a));
    for (std::size_t i = begin; i < end; ++i) {
      for (int a = 0; a < 3; ++a) {
        float v = static_cast<float>(coord(order_[i], a));
        lo[a] = std::min(lo[a], v);
        hi[a] = std::max(hi[a], v);
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    }
    if (hi[axis] == lo[axis]) return id;  // all coincident: keep as a leaf
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](uint32_t a, uint32_t b) {
                       double ca = coord(a, axis), cb = coord(b, axis);
                       return ca < cb || (ca == cb && a < b);
                     });
    nodes_[id].axis = axis;
    nodes_[id].split = static_cast<float>(coord(order_[mid], axis));
    int32_t l = build(begin, mid, depth + 1);
    int32_t r = build(mid, end, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  static void offer(double d2, std::size_t k, std::vector<double> &heap) {
    if (heap.size() < k) {
      heap.push_back(d2);
      std::push_heap(heap.begin(), heap.end());
    } else if (d2 < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = d2;
      std::push_heap(heap.begin(), heap.end());
    }
  }

  void search(int32_t id, const float *q, uint32_t self, std::size_t k, std::vector<double> &heap) const {
    const Node &node = nodes_[id];
    if (node.axis < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        uint32_t p = order_[i];
        if (p == self) continue;
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          double diff = double(q[a]) - coord(p, a);
          d2 += diff * diff;
        }
        offer(d2, k, heap);
      }
      return;
    }
    const double diff = double(q[node.axis]) - node.split;
    const int32_t nearSide = diff < 0 ? node.left : node.right;
    const int32_t farSide = diff < 0 ? node.right : node.left;
    search(nearSide, q, self, k, heap);
    if (heap.size() < k || diff * diff <= heap.front()) search(farSide, q, self, k, heap);
  }

  std::span<const float> points_;
  std::vector<uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace gsc
