#pragma once

#include <cstddef>

namespace tsdsae::kern {

// Dense numeric inner loops. Every kernel comes in a _serial and a _parallel
// flavour; the unsuffixed entry point dispatches on the runtime switch below
// plus a work-size threshold. Parallel variants split only across independent
// output elements and keep each element's accumulation order identical to the
// serial code, so results are bit-identical for any thread count.

bool parallel_enabled();
void set_parallel(bool enabled);

enum class Unary { Tanh, Sigmoid, Exp, Log, Negate, Square, Scale, Shift };
enum class Binary { Add, Sub, Mul };

// C[m x n] = (or +=) op_a(A) * op_b(B), row-major.
// trans_a: A is stored [k x m] and used as its transpose. Same for trans_b.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, const double* a,
          const double* b, double* c, bool accumulate);
void gemm_serial(bool trans_a, bool trans_b, int m, int n, int k,
                 const double* a, const double* b, double* c, bool accumulate);
void gemm_parallel(bool trans_a, bool trans_b, int m, int n, int k,
                   const double* a, const double* b, double* c,
                   bool accumulate);

// y[i] = f(x[i]); Scale uses y = c*x, Shift uses y = x + c.
void unary_forward(Unary op, std::size_t n, const double* x, double* y,
                   double c);
void unary_forward_serial(Unary op, std::size_t n, const double* x, double* y,
                          double c);
void unary_forward_parallel(Unary op, std::size_t n, const double* x,
                            double* y, double c);

// gx[i] += df(x[i])/dx * gy[i]; y is the forward output (used where cheaper).
void unary_backward(Unary op, std::size_t n, const double* x, const double* y,
                    const double* gy, double* gx, double c);

// Same-shape elementwise binary.
void binary_forward(Binary op, std::size_t n, const double* a, const double* b,
                    double* y);
void binary_forward_serial(Binary op, std::size_t n, const double* a,
                           const double* b, double* y);
void binary_forward_parallel(Binary op, std::size_t n, const double* a,
                             const double* b, double* y);

// ga[i] += gy[i] (Add/Sub) or gy[i]*b[i] (Mul); sub_b negates for Sub's b.
void binary_backward_a(Binary op, std::size_t n, const double* b,
                       const double* gy, double* ga);
void binary_backward_b(Binary op, std::size_t n, const double* a,
                       const double* gy, double* gb);

// Reduction over the middle extent of an [outer x red x inner] view.
// y[o, i] = sum_r x[o, r, i], scaled by 1/red when mean is set.
void reduce_axis(std::size_t outer, std::size_t red, std::size_t inner,
                 const double* x, double* y, bool mean);
void reduce_axis_serial(std::size_t outer, std::size_t red, std::size_t inner,
                        const double* x, double* y, bool mean);
void reduce_axis_parallel(std::size_t outer, std::size_t red,
                          std::size_t inner, const double* x, double* y,
                          bool mean);

// gx[o, r, i] += gy[o, i] * (mean ? 1/red : 1)
void reduce_axis_backward(std::size_t outer, std::size_t red,
                          std::size_t inner, const double* gy, double* gx,
                          bool mean);

// y[i] += c * x[i]
void axpy(std::size_t n, double c, const double* x, double* y);

}  // namespace tsdsae::kern
