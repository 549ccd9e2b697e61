#include "comal/mser.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace comal {
namespace {

struct BuildNode {
  int level = 0;
  int area = 0;
  int parent = -1;
  int merged_into = -1;
  Rect bbox;
  std::vector<int> children;
};

Rect bbox_union(const Rect& a, const Rect& b) {
  const int x0 = std::min(a.x0, b.x0), y0 = std::min(a.y0, b.y0);
  const int x1 = std::max(a.x_end(), b.x_end()), y1 = std::max(a.y_end(), b.y_end());
  return {x0, y0, x1 - x0, y1 - y0};
}

int uf_find(std::vector<int>& parent, int p) {
  int r = p;
  while (parent[r] != r) r = parent[r];
  while (parent[p] != r) {
    const int next = parent[p];
    parent[p] = r;
    p = next;
  }
  return r;
}

int resolve_alias(std::vector<BuildNode>& nodes, int n) {
  int r = n;
  while (nodes[r].merged_into >= 0) r = nodes[r].merged_into;
  while (nodes[n].merged_into >= 0 && nodes[n].merged_into != r) {
    const int next = nodes[n].merged_into;
    nodes[n].merged_into = r;
    n = next;
  }
  return r;
}

void check_delta(int delta) {
  if (delta < 1) throw Error(Errc::BadDelta, "stability delta must be >= 1");
}

// Largest area among subtree members of n alive at threshold t (0 if none).
int largest_alive_below(const ComponentTree& tree, int n, int t) {
  const auto& node = tree.node(n);
  if (t >= node.level) return node.area;
  int best = 0;
  for (int c : tree.children(n)) best = std::max(best, largest_alive_below(tree, c, t));
  return best;
}

template <typename LowerArea>
double min_variation(const ComponentTree& tree, int n, int delta, LowerArea lower_area) {
  const auto& node = tree.node(n);
  const int alive_end = node.parent < 0 ? 255 : tree.node(node.parent).level - 1;
  // Beyond level+delta the lower area is pinned at the node's own area while
  // the upper area can only grow, so the minimum lies in this range.
  const int last = std::min(alive_end, node.level + delta);
  int up = n;
  double best = std::numeric_limits<double>::infinity();
  for (int l = node.level; l <= last; ++l) {
    const int t_hi = std::min(l + delta, 255);
    while (tree.node(up).parent >= 0 && tree.node(tree.node(up).parent).level <= t_hi) up = tree.node(up).parent;
    const int t_lo = std::max(l - delta, 0);
    const int lo = t_lo >= node.level ? node.area : lower_area(t_lo);
    best = std::min(best, double(tree.node(up).area - lo) / node.area);
  }
  return best;
}

}  // namespace

std::span<const int> ComponentTree::children(int n) const {
  return std::span<const int>(children_).subspan(child_begin_[n], child_begin_[n + 1] - child_begin_[n]);
}

bool ComponentTree::contains(int n, int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  const int tin = nodes_[pixel_leaf_[static_cast<std::size_t>(y) * width_ + x]].tin;
  return tin >= nodes_[n].tin && tin < nodes_[n].tout;
}

std::vector<PixelCoord> ComponentTree::pixels(int n) const {
  std::vector<PixelCoord> out;
  const int b = tin_begin_[nodes_[n].tin], e = tin_begin_[nodes_[n].tout];
  out.reserve(e - b);
  for (int i = b; i < e; ++i) out.push_back({pixel_order_[i] % width_, pixel_order_[i] / width_});
  std::sort(out.begin(), out.end(), [](PixelCoord a, PixelCoord b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  return out;
}

ComponentTree build_component_tree(const GrayImage& img, Polarity polarity) {
  const int w = static_cast<int>(img.cols());
  const int h = static_cast<int>(img.rows());
  const int npix = w * h;

  std::vector<int> value(npix);
  for (int i = 0; i < npix; ++i) {
    const int v = img.data()[i];
    value[i] = polarity == Polarity::Dark ? v : 255 - v;
  }

  // Counting sort by value, stable in raster order.
  std::array<int, 257> start{};
  for (int v : value) ++start[v + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<int> order(npix);
  for (int i = 0; i < npix; ++i) order[start[value[i]]++] = i;

  std::vector<int> uf(npix, -1);
  std::vector<int> node_of(npix, -1);
  std::vector<int> leaf(npix, -1);
  std::vector<BuildNode> nodes;
  nodes.reserve(npix / 2 + 1);

  for (int p : order) {
    const int v = value[p];
    const int px = p % w, py = p / w;
    const int fresh = static_cast<int>(nodes.size());
    nodes.push_back(BuildNode{v, 1, -1, -1, Rect{px, py, 1, 1}, {}});
    leaf[p] = fresh;
    uf[p] = p;
    node_of[p] = fresh;

    const int nbrs[4] = {py > 0 ? p - w : -1, px > 0 ? p - 1 : -1, px + 1 < w ? p + 1 : -1, py + 1 < h ? p + w : -1};
    for (int q : nbrs) {
      if (q < 0 || uf[q] < 0) continue;
      const int rp = uf_find(uf, p), rq = uf_find(uf, q);
      if (rp == rq) continue;
      int np = node_of[rp];
      const int nq = node_of[rq];
      if (nodes[nq].level == v) {
        // Same level: the two partial components are one node.
        int keep = np, gone = nq;
        if (nodes[keep].children.size() < nodes[gone].children.size()) std::swap(keep, gone);
        BuildNode& k = nodes[keep];
        BuildNode& g = nodes[gone];
        k.area += g.area;
        k.bbox = bbox_union(k.bbox, g.bbox);
        for (int c : g.children) nodes[c].parent = keep;
        k.children.insert(k.children.end(), g.children.begin(), g.children.end());
        g.children.clear();
        g.children.shrink_to_fit();
        g.merged_into = keep;
        np = keep;
      } else {
        nodes[nq].parent = np;
        nodes[np].children.push_back(nq);
        nodes[np].area += nodes[nq].area;
        nodes[np].bbox = bbox_union(nodes[np].bbox, nodes[nq].bbox);
      }
      // Union by attaching the smaller-index root; node ownership follows np.
      const int r = std::min(rp, rq);
      uf[rp] = r;
      uf[rq] = r;
      node_of[r] = np;
    }
  }

  // Compact surviving nodes; creation order already puts children first.
  std::vector<int> remap(nodes.size(), -1);
  int count = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].merged_into < 0) remap[i] = count++;

  ComponentTree tree;
  tree.width_ = w;
  tree.height_ = h;
  tree.polarity_ = polarity;
  tree.nodes_.resize(count);
  tree.child_begin_.assign(count + 1, 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (remap[i] < 0) continue;
    auto& out = tree.nodes_[remap[i]];
    out.level = nodes[i].level;
    out.area = nodes[i].area;
    out.parent = nodes[i].parent < 0 ? -1 : remap[nodes[i].parent];
    out.bbox = nodes[i].bbox;
    tree.child_begin_[remap[i] + 1] = static_cast<int>(nodes[i].children.size());
    if (out.parent < 0) tree.root_ = remap[i];
  }
  std::partial_sum(tree.child_begin_.begin(), tree.child_begin_.end(), tree.child_begin_.begin());
  tree.children_.resize(tree.child_begin_[count]);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (remap[i] < 0) continue;
    auto* dst = tree.children_.data() + tree.child_begin_[remap[i]];
    for (std::size_t c = 0; c < nodes[i].children.size(); ++c) dst[c] = remap[nodes[i].children[c]];
    std::sort(dst, dst + nodes[i].children.size());
  }

  tree.pixel_leaf_.resize(npix);
  for (int p = 0; p < npix; ++p) tree.pixel_leaf_[p] = remap[resolve_alias(nodes, leaf[p])];

  // Preorder numbering, children in ascending id order.
  std::vector<std::pair<int, int>> stack{{tree.root_, 0}};
  int clock = 0;
  tree.nodes_[tree.root_].tin = clock++;
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    const auto kids = tree.children(n);
    if (next < static_cast<int>(kids.size())) {
      const int c = kids[next++];
      tree.nodes_[c].tin = clock++;
      stack.push_back({c, 0});
    } else {
      tree.nodes_[n].tout = clock;
      stack.pop_back();
    }
  }

  tree.tin_begin_.assign(count + 1, 0);
  for (int p = 0; p < npix; ++p) ++tree.tin_begin_[tree.nodes_[tree.pixel_leaf_[p]].tin + 1];
  std::partial_sum(tree.tin_begin_.begin(), tree.tin_begin_.end(), tree.tin_begin_.begin());
  tree.pixel_order_.resize(npix);
  std::vector<int> fill(tree.tin_begin_.begin(), tree.tin_begin_.end() - 1);
  for (int p = 0; p < npix; ++p) tree.pixel_order_[fill[tree.nodes_[tree.pixel_leaf_[p]].tin]++] = p;

  return tree;
}

double stability_score(const ComponentTree& tree, int node, int delta) {
  check_delta(delta);
  return min_variation(tree, node, delta, [&](int t) { return largest_alive_below(tree, node, t); });
}

std::vector<double> stability_scores(const ComponentTree& tree, int delta) {
  check_delta(delta);
  const int n = tree.size();
  // low[node * delta + j]: largest subtree member alive at level - 1 - j.
  std::vector<int> low(static_cast<std::size_t>(n) * delta, 0);
  for (int i = 0; i < n; ++i) {  // ids are ordered children-first
    const int level = tree.node(i).level;
    int* row = low.data() + static_cast<std::size_t>(i) * delta;
    for (int c : tree.children(i)) {
      const auto& child = tree.node(c);
      const int* crow = low.data() + static_cast<std::size_t>(c) * delta;
      for (int j = 0; j < delta; ++j) {
        const int t = level - 1 - j;
        if (t < 0) break;
        const int a = t >= child.level ? child.area : crow[child.level - 1 - t];
        row[j] = std::max(row[j], a);
      }
    }
  }
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) {
    const int level = tree.node(i).level;
    const int* row = low.data() + static_cast<std::size_t>(i) * delta;
    q[i] = min_variation(tree, i, delta, [&](int t) { return row[level - 1 - t]; });
  }
  return q;
}

std::vector<PixelCoord> ExtremalRegion::pixels() const {
  auto px = tree->pixels(node);
  for (auto& p : px) p = p + origin;
  return px;
}

ExtremalRegion make_region(std::shared_ptr<const ComponentTree> tree, int node, double stability,
                           PixelCoord origin) {
  ExtremalRegion r;
  const auto& nd = tree->node(node);
  r.node = node;
  r.level = tree->intensity(node);
  r.area = nd.area;
  r.stability = stability;
  r.polarity = tree->polarity();
  r.origin = origin;
  r.bbox = {nd.bbox.x0 + origin.x, nd.bbox.y0 + origin.y, nd.bbox.w, nd.bbox.h};
  r.tree = std::move(tree);
  return r;
}

std::vector<ExtremalRegion> extract_msers(std::shared_ptr<const ComponentTree> tree, const MserParams& params,
                                          PixelCoord origin) {
  if (params.min_area < 1 || (params.max_area > 0 && params.max_area < params.min_area)) {
    throw Error(Errc::BadParams, "MSER area bounds are inverted or non-positive");
  }
  const auto q = stability_scores(*tree, params.delta);
  std::vector<ExtremalRegion> out;
  for (int n = 0; n < tree->size(); ++n) {
    if (n == tree->root()) continue;
    const auto& node = tree->node(n);
    if (node.area < params.min_area) continue;
    if (params.max_area > 0 && node.area > params.max_area) continue;
    if (q[n] > params.max_variation) continue;
    if (q[n] > q[node.parent]) continue;
    bool minimum = true;
    for (int c : tree->children(n)) minimum = minimum && q[n] <= q[c];
    if (!minimum) continue;
    out.push_back(make_region(tree, n, q[n], origin));
  }
  return out;
}

std::vector<ExtremalRegion> detect_msers(const GrayImage& img, const MserParams& params, PixelCoord origin) {
  auto out = extract_msers(std::make_shared<const ComponentTree>(build_component_tree(img, Polarity::Dark)), params,
                           origin);
  auto bright = extract_msers(std::make_shared<const ComponentTree>(build_component_tree(img, Polarity::Bright)),
                              params, origin);
  out.insert(out.end(), std::make_move_iterator(bright.begin()), std::make_move_iterator(bright.end()));
  return out;
}

Contour trace_boundary(const ExtremalRegion& region) {
  const ComponentTree& tree = *region.tree;
  const int n = region.node;
  const Rect& bb = tree.node(n).bbox;

  PixelCoord start{-1, -1};
  for (int x = bb.x0; x < bb.x_end(); ++x) {
    if (tree.contains(n, x, bb.y0)) {
      start = {x, bb.y0};
      break;
    }
  }

  Contour contour;
  contour.points.push_back(start + region.origin);
  if (tree.node(n).area == 1) return contour;

  // Clockwise on screen starting from west.
  static constexpr std::array<PixelCoord, 8> kDirs{
      {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};
  auto dir_index = [](PixelCoord d) {
    for (int i = 0; i < 8; ++i)
      if (kDirs[i] == d) return i;
    return 0;
  };

  std::vector<PixelCoord> local{start};
  PixelCoord cur = start;
  PixelCoord back = {start.x - 1, start.y};
  const std::size_t cap = 4 * static_cast<std::size_t>(tree.node(n).area) + 8;
  while (local.size() <= cap) {
    const int b = dir_index(back - cur);
    PixelCoord next = cur, prev = back;
    bool found = false;
    for (int k = 1; k <= 8; ++k) {
      const PixelCoord cand = cur + kDirs[(b + k) % 8];
      if (tree.contains(n, cand.x, cand.y)) {
        next = cand;
        found = true;
        break;
      }
      prev = cand;
    }
    if (!found) break;
    if (cur == start && local.size() > 1 && next == local[1]) break;
    local.push_back(next);
    back = prev;
    cur = next;
  }
  // The walk ends by re-entering the start pixel; drop the duplicate.
  if (local.size() > 1 && local.back() == start) local.pop_back();
  contour.points.clear();
  for (auto p : local) contour.points.push_back(p + region.origin);
  return contour;
}

}  // namespace comal
