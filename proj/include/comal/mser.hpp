#pragma once

// Component tree of threshold sets and Maximally Stable Extremal Regions.
//
// For dark polarity the tree holds the 4-connected components of {p : I(p) <= t}
// for every t; bright polarity runs the same construction on 255 - I. A node is
// alive on [level, parent.level), the root on [level, 255].

#include <memory>
#include <span>
#include <vector>

#include "comal/image.hpp"

namespace comal {

enum class Polarity { Dark, Bright };

class ComponentTree {
 public:
  struct Node {
    int level = 0;  // threshold in tree space (255 - I for bright polarity)
    int area = 0;
    int parent = -1;
    int tin = 0;   // preorder index; subtree = [tin, tout)
    int tout = 0;
    Rect bbox;     // local to the tree's image
  };

  int width() const { return width_; }
  int height() const { return height_; }
  Polarity polarity() const { return polarity_; }
  int root() const { return root_; }
  int size() const { return static_cast<int>(nodes_.size()); }

  const Node& node(int n) const { return nodes_[n]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const int> children(int n) const;

  /// Smallest node containing the pixel (the node that pixel joined at its own level).
  int leaf_of(int x, int y) const { return pixel_leaf_[static_cast<std::size_t>(y) * width_ + x]; }
  /// O(1) membership test; false outside the image.
  bool contains(int n, int x, int y) const;
  /// Member pixels of a node (all of its subtree), local coordinates.
  std::vector<PixelCoord> pixels(int n) const;
  /// Node level mapped back to image intensity.
  int intensity(int n) const { return polarity_ == Polarity::Dark ? nodes_[n].level : 255 - nodes_[n].level; }

 private:
  friend ComponentTree build_component_tree(const GrayImage& img, Polarity polarity);

  int width_ = 0;
  int height_ = 0;
  Polarity polarity_ = Polarity::Dark;
  int root_ = 0;
  std::vector<Node> nodes_;
  std::vector<int> child_begin_;  // CSR offsets, size nodes+1
  std::vector<int> children_;
  std::vector<int> pixel_leaf_;
  std::vector<int> pixel_order_;  // pixel indices ordered by preorder of their leaf
  std::vector<int> tin_begin_;    // tin -> first position in pixel_order_, size nodes+1
};

/// Union-find construction over pixels sorted by intensity.
ComponentTree build_component_tree(const GrayImage& img, Polarity polarity);

/// Relative area variation q = (A(l+delta) - A(l-delta)) / area, minimised
/// over the node's alive levels l. A(l+delta) is the ancestor alive at l+delta,
/// A(l-delta) the largest descendant alive at l-delta; thresholds clamp to
/// [0,255]. Lower is more stable. Throws Errc::BadDelta when delta < 1.
double stability_score(const ComponentTree& tree, int node, int delta);

/// stability_score for every node at once (dynamic programming over the tree).
std::vector<double> stability_scores(const ComponentTree& tree, int delta);

struct MserParams {
  int delta = 10;
  double max_variation = 0.25;
  int min_area = 20;
  int max_area = 0;  // <= 0: no upper bound beyond excluding the root
};

/// An extremal region referenced by (tree, node). `origin` places the tree's
/// image inside a larger frame so the region answers frame coordinates.
struct ExtremalRegion {
  std::shared_ptr<const ComponentTree> tree;
  int node = -1;
  int level = 0;  // image intensity
  int area = 0;
  double stability = 0.0;
  Polarity polarity = Polarity::Dark;
  PixelCoord origin;
  Rect bbox;  // frame coordinates

  bool contains(PixelCoord p) const { return tree->contains(node, p.x - origin.x, p.y - origin.y); }
  std::vector<PixelCoord> pixels() const;
};

/// Wraps one tree node as a region.
ExtremalRegion make_region(std::shared_ptr<const ComponentTree> tree, int node, double stability = 0.0,
                           PixelCoord origin = {});

/// Nodes that are local minima of q along the tree (q <= parent and q <= every
/// child), pass q <= max_variation and the area bounds. The root (whole image)
/// is never returned. Output ordered by node id.
std::vector<ExtremalRegion> extract_msers(std::shared_ptr<const ComponentTree> tree, const MserParams& params,
                                          PixelCoord origin = {});

/// Both polarities of img, pooled (dark first).
std::vector<ExtremalRegion> detect_msers(const GrayImage& img, const MserParams& params, PixelCoord origin = {});

struct Contour {
  std::vector<PixelCoord> points;
  bool closed = true;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Moore-neighbour trace of the region's outer boundary, clockwise on screen
/// (y down), starting at the first region pixel in raster order. Frame coordinates.
Contour trace_boundary(const ExtremalRegion& region);

}  // namespace comal
