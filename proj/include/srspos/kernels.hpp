#pragma once

#include <cstddef>

namespace srspos::kernels {

// Row-major dense kernels. Each *_serial function is the reference
// implementation; the unsuffixed variant runs the identical per-element
// arithmetic with OpenMP spread over independent output elements, so the
// results are bit-identical for any thread count.

// y[r,o] = b[o] + sum_i x[r,i] * w[o,i]        x: n x in_w, w: out_w x in_w
void dense_forward(const double* x, std::size_t n, std::size_t in_w, const double* w,
                   const double* b, std::size_t out_w, double* y);
void dense_forward_serial(const double* x, std::size_t n, std::size_t in_w, const double* w,
                          const double* b, std::size_t out_w, double* y);

// dx[r,i] = sum_o dy[r,o] * w[o,i]
void dense_backward_input(const double* dy, const double* w, std::size_t n, std::size_t in_w,
                          std::size_t out_w, double* dx);
void dense_backward_input_serial(const double* dy, const double* w, std::size_t n,
                                 std::size_t in_w, std::size_t out_w, double* dx);

// dw[o,i] = sum_r dy[r,o] * x[r,i];  db[o] = sum_r dy[r,o]
void dense_backward_params(const double* dy, const double* x, std::size_t n, std::size_t in_w,
                           std::size_t out_w, double* dw, double* db);
void dense_backward_params_serial(const double* dy, const double* x, std::size_t n,
                                  std::size_t in_w, std::size_t out_w, double* dw, double* db);

// d[q,r] = squared Euclidean distance between query row q and reference row r
void sq_dist_rows(const double* queries, std::size_t nq, const double* refs, std::size_t nr,
                  std::size_t w, double* d);
void sq_dist_rows_serial(const double* queries, std::size_t nq, const double* refs,
                         std::size_t nr, std::size_t w, double* d);

// Sum with a fixed pairwise reduction tree; order-independent of thread count
// because it is serial, and numerically stable enough for long error series.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace srspos::kernels
