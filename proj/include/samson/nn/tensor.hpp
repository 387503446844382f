#ifndef SAMSON_NN_TENSOR_HPP
#define SAMSON_NN_TENSOR_HPP

#include <cstddef>
#include <vector>

#include "samson/errors.hpp"

namespace samson::nn {

// Dense NCHW tensor. Scalar type is float in production and double in
// gradient-check mode.
template <typename T>
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t sample_stride() const { return static_cast<std::size_t>(c) * h * w; }

  T& at(int in, int ic, int ih, int iw) {
    return data[((static_cast<std::size_t>(in) * c + ic) * h + ih) * w + iw];
  }
  T at(int in, int ic, int ih, int iw) const {
    return data[((static_cast<std::size_t>(in) * c + ic) * h + ih) * w + iw];
  }

  T* sample(int in) { return data.data() + static_cast<std::size_t>(in) * sample_stride(); }
  const T* sample(int in) const {
    return data.data() + static_cast<std::size_t>(in) * sample_stride();
  }

  bool same_shape(const Tensor4& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
};

} // namespace samson::nn

#endif
