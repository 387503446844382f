#ifndef SAMSON_NN_KERNELS_HPP
#define SAMSON_NN_KERNELS_HPP

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "samson/nn/tensor.hpp"

namespace samson::nn {

// Output spatial size for a convolution.
inline int conv_out_dim(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

// All kernels keep a fixed per-element summation order, so results are
// bitwise identical for any thread count: parallelism only ever splits
// independent output elements (samples), never a reduction.

// C(M,N) += A(M,K) * B(K,N), rows contiguous.
template <typename T>
void gemm_accumulate(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    T* crow = c + static_cast<std::size_t>(i) * n;
    const T* arow = a + static_cast<std::size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
      const T av = arow[kk];
      const T* brow = b + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// col(K, L): K = c*kh*kw patch features, L = ho*wo output positions.
template <typename T>
void im2col(const T* x, int c, int h, int w, int kernel, int stride, int pad, T* col) {
  const int ho = conv_out_dim(h, kernel, stride, pad);
  const int wo = conv_out_dim(w, kernel, stride, pad);
  const std::size_t l_total = static_cast<std::size_t>(ho) * wo;
  std::size_t kk = 0;
  for (int ci = 0; ci < c; ++ci) {
    const T* plane = x + static_cast<std::size_t>(ci) * h * w;
    for (int u = 0; u < kernel; ++u) {
      for (int v = 0; v < kernel; ++v, ++kk) {
        T* row = col + kk * l_total;
        std::size_t l = 0;
        for (int i = 0; i < ho; ++i) {
          const int hi = i * stride + u - pad;
          if (hi < 0 || hi >= h) {
            for (int j = 0; j < wo; ++j) row[l++] = T(0);
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(hi) * w;
          for (int j = 0; j < wo; ++j) {
            const int wi = j * stride + v - pad;
            row[l++] = (wi < 0 || wi >= w) ? T(0) : src[wi];
          }
        }
      }
    }
  }
}

// colT(L, K): transposed patch matrix, one contiguous feature row per output
// position. Used for weight gradients.
template <typename T>
void im2col_transposed(const T* x, int c, int h, int w, int kernel, int stride, int pad, T* colt) {
  const int ho = conv_out_dim(h, kernel, stride, pad);
  const int wo = conv_out_dim(w, kernel, stride, pad);
  const int k_total = c * kernel * kernel;
  std::size_t l = 0;
  for (int i = 0; i < ho; ++i) {
    for (int j = 0; j < wo; ++j, ++l) {
      T* row = colt + l * static_cast<std::size_t>(k_total);
      std::size_t kk = 0;
      for (int ci = 0; ci < c; ++ci) {
        const T* plane = x + static_cast<std::size_t>(ci) * h * w;
        for (int u = 0; u < kernel; ++u) {
          const int hi = i * stride + u - pad;
          for (int v = 0; v < kernel; ++v, ++kk) {
            const int wi = j * stride + v - pad;
            row[kk] = (hi < 0 || hi >= h || wi < 0 || wi >= w)
                          ? T(0)
                          : plane[static_cast<std::size_t>(hi) * w + wi];
          }
        }
      }
    }
  }
}

// Scatter-accumulate of dcol(K, L) back onto the input gradient.
template <typename T>
void col2im_accumulate(const T* dcol, int c, int h, int w, int kernel, int stride, int pad, T* dx) {
  const int ho = conv_out_dim(h, kernel, stride, pad);
  const int wo = conv_out_dim(w, kernel, stride, pad);
  const std::size_t l_total = static_cast<std::size_t>(ho) * wo;
  std::size_t kk = 0;
  for (int ci = 0; ci < c; ++ci) {
    T* plane = dx + static_cast<std::size_t>(ci) * h * w;
    for (int u = 0; u < kernel; ++u) {
      for (int v = 0; v < kernel; ++v, ++kk) {
        const T* row = dcol + kk * l_total;
        std::size_t l = 0;
        for (int i = 0; i < ho; ++i) {
          const int hi = i * stride + u - pad;
          if (hi < 0 || hi >= h) {
            l += static_cast<std::size_t>(wo);
            continue;
          }
          T* dst = plane + static_cast<std::size_t>(hi) * w;
          for (int j = 0; j < wo; ++j, ++l) {
            const int wi = j * stride + v - pad;
            if (wi >= 0 && wi < w) dst[wi] += row[l];
          }
        }
      }
    }
  }
}

// y[n,o,i,j] = sum_{c,u,v} x[n,c,i*s+u-p,j*s+v-p] * w[o,c,u,v]
template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const Tensor4<T>& weight, int stride, int pad) {
  if (x.c != weight.c) throw ShapeMismatch("conv2d: input channels do not match weights");
  if (weight.h != weight.w) throw ShapeMismatch("conv2d: kernel must be square");
  const int kernel = weight.h;
  const int ho = conv_out_dim(x.h, kernel, stride, pad);
  const int wo = conv_out_dim(x.w, kernel, stride, pad);
  if (ho < 1 || wo < 1) throw ShapeMismatch("conv2d: output would be empty");

  Tensor4<T> y(x.n, weight.n, ho, wo, T(0));
  const int k_total = x.c * kernel * kernel;
  const std::size_t l_total = static_cast<std::size_t>(ho) * wo;

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<T> col(static_cast<std::size_t>(k_total) * l_total);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int n = 0; n < x.n; ++n) {
      im2col(x.sample(n), x.c, x.h, x.w, kernel, stride, pad, col.data());
      gemm_accumulate(weight.data.data(), col.data(), y.sample(n), weight.n, k_total,
                      static_cast<int>(l_total));
    }
  }
  return y;
}

// Returns (dx, dw). The per-sample weight-gradient contributions are reduced
// in ascending sample order.
template <typename T>
void conv2d_backward(const Tensor4<T>& x, const Tensor4<T>& weight, const Tensor4<T>& dy,
                     int stride, int pad, Tensor4<T>* dx, std::vector<T>* dw_accum) {
  const int kernel = weight.h;
  const int k_total = x.c * kernel * kernel;
  const std::size_t l_total = static_cast<std::size_t>(dy.h) * dy.w;
  const std::size_t dw_size = weight.size();

  if (dx) *dx = Tensor4<T>(x.n, x.c, x.h, x.w, T(0));
  std::vector<T> dw_samples;
  if (dw_accum) dw_samples.assign(static_cast<std::size_t>(x.n) * dw_size, T(0));

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<T> dcol(static_cast<std::size_t>(k_total) * l_total);
    std::vector<T> colt;
    if (dw_accum) colt.resize(l_total * static_cast<std::size_t>(k_total));
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int n = 0; n < x.n; ++n) {
      const T* dy_n = dy.sample(n);
      if (dx) {
        // dcol = W^T * dy_n
        std::fill(dcol.begin(), dcol.end(), T(0));
        for (int o = 0; o < weight.n; ++o) {
          const T* wrow = weight.data.data() + static_cast<std::size_t>(o) * k_total;
          const T* dyrow = dy_n + static_cast<std::size_t>(o) * l_total;
          for (int kk = 0; kk < k_total; ++kk) {
            const T wv = wrow[kk];
            T* drow = dcol.data() + static_cast<std::size_t>(kk) * l_total;
            for (std::size_t j = 0; j < l_total; ++j) drow[j] += wv * dyrow[j];
          }
        }
        col2im_accumulate(dcol.data(), x.c, x.h, x.w, kernel, stride, pad, dx->sample(n));
      }
      if (dw_accum) {
        im2col_transposed(x.sample(n), x.c, x.h, x.w, kernel, stride, pad, colt.data());
        T* dw_n = dw_samples.data() + static_cast<std::size_t>(n) * dw_size;
        for (int o = 0; o < weight.n; ++o) {
          T* dwrow = dw_n + static_cast<std::size_t>(o) * k_total;
          const T* dyrow = dy_n + static_cast<std::size_t>(o) * l_total;
          for (std::size_t l = 0; l < l_total; ++l) {
            const T g = dyrow[l];
            const T* crow = colt.data() + l * static_cast<std::size_t>(k_total);
            for (int kk = 0; kk < k_total; ++kk) dwrow[kk] += g * crow[kk];
          }
        }
      }
    }
  }

  if (dw_accum) {
    for (int n = 0; n < x.n; ++n) {
      const T* dw_n = dw_samples.data() + static_cast<std::size_t>(n) * dw_size;
      for (std::size_t i = 0; i < dw_size; ++i) (*dw_accum)[i] += dw_n[i];
    }
  }
}

} // namespace samson::nn

#endif
