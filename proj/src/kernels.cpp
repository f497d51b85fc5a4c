#include "tsdsae/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

namespace tsdsae::kern {

namespace {

std::atomic<bool> g_parallel{true};

// Below this many fused multiply-adds the fork/join overhead dominates.
constexpr std::size_t kGemmParallelThreshold = 32 * 1024;
constexpr std::size_t kMapParallelThreshold = 64 * 1024;

inline double apply_unary(Unary op, double x, double c) {
  switch (op) {
    case Unary::Tanh:
      return std::tanh(x);
    case Unary::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                      : std::exp(x) / (1.0 + std::exp(x));
    case Unary::Exp:
      return std::exp(x);
    case Unary::Log:
      return std::log(x);
    case Unary::Negate:
      return -x;
    case Unary::Square:
      return x * x;
    case Unary::Scale:
      return c * x;
    case Unary::Shift:
      return x + c;
  }
  return 0.0;
}

inline double unary_grad(Unary op, double x, double y, double c) {
  switch (op) {
    case Unary::Tanh:
      return 1.0 - y * y;
    case Unary::Sigmoid:
      return y * (1.0 - y);
    case Unary::Exp:
      return y;
    case Unary::Log:
      return 1.0 / x;
    case Unary::Negate:
      return -1.0;
    case Unary::Square:
      return 2.0 * x;
    case Unary::Scale:
      return c;
    case Unary::Shift:
      return 1.0;
  }
  return 0.0;
}

// One output row of C for each of the four transpose layouts. The inner
// accumulation order is fixed, independent of how rows are distributed.
inline void gemm_row_nn(int i, int n, int k, const double* a, const double* b,
                        double* c, bool accumulate) {
  double* ci = c + static_cast<std::size_t>(i) * n;
  if (!accumulate) std::memset(ci, 0, sizeof(double) * static_cast<std::size_t>(n));
  const double* ai = a + static_cast<std::size_t>(i) * k;
  for (int l = 0; l < k; ++l) {
    const double av = ai[l];
    const double* bl = b + static_cast<std::size_t>(l) * n;
    for (int j = 0; j < n; ++j) ci[j] += av * bl[j];
  }
}

inline void gemm_row_nt(int i, int n, int k, const double* a, const double* b,
                        double* c, bool accumulate) {
  double* ci = c + static_cast<std::size_t>(i) * n;
  const double* ai = a + static_cast<std::size_t>(i) * k;
  for (int j = 0; j < n; ++j) {
    const double* bj = b + static_cast<std::size_t>(j) * k;
    double acc = 0.0;
    for (int l = 0; l < k; ++l) acc += ai[l] * bj[l];
    ci[j] = accumulate ? ci[j] + acc : acc;
  }
}

inline void gemm_row_tn(int i, int m, int n, int k, const double* a,
                        const double* b, double* c, bool accumulate) {
  // a is [k x m], result row i uses column i of a.
  double* ci = c + static_cast<std::size_t>(i) * n;
  if (!accumulate) std::memset(ci, 0, sizeof(double) * static_cast<std::size_t>(n));
  for (int l = 0; l < k; ++l) {
    const double av = a[static_cast<std::size_t>(l) * m + i];
    const double* bl = b + static_cast<std::size_t>(l) * n;
    for (int j = 0; j < n; ++j) ci[j] += av * bl[j];
  }
}

inline void gemm_row_tt(int i, int m, int n, int k, const double* a,
                        const double* b, double* c, bool accumulate) {
  double* ci = c + static_cast<std::size_t>(i) * n;
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int l = 0; l < k; ++l) {
      acc += a[static_cast<std::size_t>(l) * m + i] *
             b[static_cast<std::size_t>(j) * k + l];
    }
    ci[j] = accumulate ? ci[j] + acc : acc;
  }
}

inline void gemm_row(bool trans_a, bool trans_b, int i, int m, int n, int k,
                     const double* a, const double* b, double* c,
                     bool accumulate) {
  if (!trans_a && !trans_b) {
    gemm_row_nn(i, n, k, a, b, c, accumulate);
  } else if (!trans_a && trans_b) {
    gemm_row_nt(i, n, k, a, b, c, accumulate);
  } else if (trans_a && !trans_b) {
    gemm_row_tn(i, m, n, k, a, b, c, accumulate);
  } else {
    gemm_row_tt(i, m, n, k, a, b, c, accumulate);
  }
}

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel(bool enabled) {
  g_parallel.store(enabled, std::memory_order_relaxed);
}

void gemm_serial(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, const double* b, double* c,
                 bool accumulate) {
  for (int i = 0; i < m; ++i) {
    gemm_row(trans_a, trans_b, i, m, n, k, a, b, c, accumulate);
  }
}

void gemm_parallel(bool trans_a, bool trans_b, int m, int n, int k,
                   const double* a, const double* b, double* c,
                   bool accumulate) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    gemm_row(trans_a, trans_b, i, m, n, k, a, b, c, accumulate);
  }
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, const double* a,
          const double* b, double* c, bool accumulate) {
  const std::size_t work = static_cast<std::size_t>(m) *
                           static_cast<std::size_t>(n) *
                           static_cast<std::size_t>(k);
  if (parallel_enabled() && work >= kGemmParallelThreshold && m > 1) {
    gemm_parallel(trans_a, trans_b, m, n, k, a, b, c, accumulate);
  } else {
    gemm_serial(trans_a, trans_b, m, n, k, a, b, c, accumulate);
  }
}

void unary_forward_serial(Unary op, std::size_t n, const double* x, double* y,
                          double c) {
  for (std::size_t i = 0; i < n; ++i) y[i] = apply_unary(op, x[i], c);
}

void unary_forward_parallel(Unary op, std::size_t n, const double* x,
                            double* y, double c) {
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    y[i] = apply_unary(op, x[i], c);
  }
}

void unary_forward(Unary op, std::size_t n, const double* x, double* y,
                   double c) {
  if (parallel_enabled() && n >= kMapParallelThreshold) {
    unary_forward_parallel(op, n, x, y, c);
  } else {
    unary_forward_serial(op, n, x, y, c);
  }
}

void unary_backward(Unary op, std::size_t n, const double* x, const double* y,
                    const double* gy, double* gx, double c) {
  for (std::size_t i = 0; i < n; ++i) {
    gx[i] += unary_grad(op, x[i], y[i], c) * gy[i];
  }
}

void binary_forward_serial(Binary op, std::size_t n, const double* a,
                           const double* b, double* y) {
  switch (op) {
    case Binary::Add:
      for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
      break;
    case Binary::Sub:
      for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
      break;
    case Binary::Mul:
      for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
      break;
  }
}

void binary_forward_parallel(Binary op, std::size_t n, const double* a,
                             const double* b, double* y) {
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
  switch (op) {
    case Binary::Add:
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) y[i] = a[i] + b[i];
      break;
    case Binary::Sub:
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) y[i] = a[i] - b[i];
      break;
    case Binary::Mul:
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < sn; ++i) y[i] = a[i] * b[i];
      break;
  }
}

void binary_forward(Binary op, std::size_t n, const double* a, const double* b,
                    double* y) {
  if (parallel_enabled() && n >= kMapParallelThreshold) {
    binary_forward_parallel(op, n, a, b, y);
  } else {
    binary_forward_serial(op, n, a, b, y);
  }
}

void binary_backward_a(Binary op, std::size_t n, const double* b,
                       const double* gy, double* ga) {
  switch (op) {
    case Binary::Add:
    case Binary::Sub:
      for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i];
      break;
    case Binary::Mul:
      for (std::size_t i = 0; i < n; ++i) ga[i] += b[i] * gy[i];
      break;
  }
}

void binary_backward_b(Binary op, std::size_t n, const double* a,
                       const double* gy, double* gb) {
  switch (op) {
    case Binary::Add:
      for (std::size_t i = 0; i < n; ++i) gb[i] += gy[i];
      break;
    case Binary::Sub:
      for (std::size_t i = 0; i < n; ++i) gb[i] -= gy[i];
      break;
    case Binary::Mul:
      for (std::size_t i = 0; i < n; ++i) gb[i] += a[i] * gy[i];
      break;
  }
}

void reduce_axis_serial(std::size_t outer, std::size_t red, std::size_t inner,
                        const double* x, double* y, bool mean) {
  const double scale = mean ? 1.0 / static_cast<double>(red) : 1.0;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* xo = x + o * red * inner;
    double* yo = y + o * inner;
    for (std::size_t i = 0; i < inner; ++i) {
      double acc = 0.0;
      for (std::size_t r = 0; r < red; ++r) acc += xo[r * inner + i];
      yo[i] = acc * scale;
    }
  }
}

void reduce_axis_parallel(std::size_t outer, std::size_t red,
                          std::size_t inner, const double* x, double* y,
                          bool mean) {
  const double scale = mean ? 1.0 / static_cast<double>(red) : 1.0;
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(outer * inner);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < total; ++t) {
    const std::size_t o = static_cast<std::size_t>(t) / inner;
    const std::size_t i = static_cast<std::size_t>(t) % inner;
    const double* xo = x + o * red * inner;
    double acc = 0.0;
    for (std::size_t r = 0; r < red; ++r) acc += xo[r * inner + i];
    y[o * inner + i] = acc * scale;
  }
}

void reduce_axis(std::size_t outer, std::size_t red, std::size_t inner,
                 const double* x, double* y, bool mean) {
  if (parallel_enabled() && outer * red * inner >= kMapParallelThreshold &&
      outer * inner > 1) {
    reduce_axis_parallel(outer, red, inner, x, y, mean);
  } else {
    reduce_axis_serial(outer, red, inner, x, y, mean);
  }
}

void reduce_axis_backward(std::size_t outer, std::size_t red,
                          std::size_t inner, const double* gy, double* gx,
                          bool mean) {
  const double scale = mean ? 1.0 / static_cast<double>(red) : 1.0;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* go = gy + o * inner;
    double* xo = gx + o * red * inner;
    for (std::size_t r = 0; r < red; ++r) {
      for (std::size_t i = 0; i < inner; ++i) {
        xo[r * inner + i] += go[i] * scale;
      }
    }
  }
}

void axpy(std::size_t n, double c, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

}  // namespace tsdsae::kern
