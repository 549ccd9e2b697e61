#include "comal/image.hpp"

#include <vector>

namespace comal {
namespace detail {

void sq_distance_1d(const double* f, int n, double* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = double(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace detail

Image<double> squared_distance_transform(const BinaryMask& mask) {
  if (!mask.any()) throw Error(Errc::EmptyMask, "distance transform of an empty mask");
  const int h = static_cast<int>(mask.rows());
  const int w = static_cast<int>(mask.cols());
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  Image<double> out(h, w);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = mask(y, x) ? 0.0 : detail::kFar;
    detail::sq_distance_1d(f.data(), h, d.data(), v.data(), z.data());
    for (int y = 0; y < h; ++y) out(y, x) = d[y];
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = out(y, x);
    detail::sq_distance_1d(f.data(), w, d.data(), v.data(), z.data());
    for (int x = 0; x < w; ++x) out(y, x) = d[x];
  }
  return out;
}

}  // namespace comal
