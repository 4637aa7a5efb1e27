#include "srspos/kernels.hpp"

#include <cstdint>

namespace srspos::kernels {

void dense_forward_serial(const double* x, std::size_t n, std::size_t in_w, const double* w,
                          const double* b, std::size_t out_w, double* y) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* xr = x + r * in_w;
        double* yr = y + r * out_w;
        for (std::size_t o = 0; o < out_w; ++o) {
            const double* wo = w + o * in_w;
            double acc = b[o];
            for (std::size_t i = 0; i < in_w; ++i) {
                acc += xr[i] * wo[i];
            }
            yr[o] = acc;
        }
    }
}

void dense_forward(const double* x, std::size_t n, std::size_t in_w, const double* w,
                   const double* b, std::size_t out_w, double* y) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
        const double* xr = x + static_cast<std::size_t>(r) * in_w;
        double* yr = y + static_cast<std::size_t>(r) * out_w;
        for (std::size_t o = 0; o < out_w; ++o) {
            const double* wo = w + o * in_w;
            double acc = b[o];
            for (std::size_t i = 0; i < in_w; ++i) {
                acc += xr[i] * wo[i];
            }
            yr[o] = acc;
        }
    }
}

void dense_backward_input_serial(const double* dy, const double* w, std::size_t n,
                                 std::size_t in_w, std::size_t out_w, double* dx) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* dyr = dy + r * out_w;
        double* dxr = dx + r * in_w;
        for (std::size_t i = 0; i < in_w; ++i) {
            dxr[i] = 0.0;
        }
        for (std::size_t o = 0; o < out_w; ++o) {
            const double c = dyr[o];
            const double* wo = w + o * in_w;
            for (std::size_t i = 0; i < in_w; ++i) {
                dxr[i] += c * wo[i];
            }
        }
    }
}

void dense_backward_input(const double* dy, const double* w, std::size_t n, std::size_t in_w,
                          std::size_t out_w, double* dx) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
        const double* dyr = dy + static_cast<std::size_t>(r) * out_w;
        double* dxr = dx + static_cast<std::size_t>(r) * in_w;
        for (std::size_t i = 0; i < in_w; ++i) {
            dxr[i] = 0.0;
        }
        for (std::size_t o = 0; o < out_w; ++o) {
            const double c = dyr[o];
            const double* wo = w + o * in_w;
            for (std::size_t i = 0; i < in_w; ++i) {
                dxr[i] += c * wo[i];
            }
        }
    }
}

void dense_backward_params_serial(const double* dy, const double* x, std::size_t n,
                                  std::size_t in_w, std::size_t out_w, double* dw, double* db) {
    for (std::size_t o = 0; o < out_w; ++o) {
        double* dwo = dw + o * in_w;
        for (std::size_t i = 0; i < in_w; ++i) {
            dwo[i] = 0.0;
        }
        double acc_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double c = dy[r * out_w + o];
            acc_b += c;
            const double* xr = x + r * in_w;
            for (std::size_t i = 0; i < in_w; ++i) {
                dwo[i] += c * xr[i];
            }
        }
        db[o] = acc_b;
    }
}

void dense_backward_params(const double* dy, const double* x, std::size_t n, std::size_t in_w,
                           std::size_t out_w, double* dw, double* db) {
#pragma omp parallel for schedule(static)
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(out_w); ++o) {
        double* dwo = dw + static_cast<std::size_t>(o) * in_w;
        for (std::size_t i = 0; i < in_w; ++i) {
            dwo[i] = 0.0;
        }
        double acc_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double c = dy[r * out_w + static_cast<std::size_t>(o)];
            acc_b += c;
            const double* xr = x + r * in_w;
            for (std::size_t i = 0; i < in_w; ++i) {
                dwo[i] += c * xr[i];
            }
        }
        db[o] = acc_b;
    }
}

void sq_dist_rows_serial(const double* queries, std::size_t nq, const double* refs,
                         std::size_t nr, std::size_t w, double* d) {
    for (std::size_t q = 0; q < nq; ++q) {
        const double* qr = queries + q * w;
        double* dq = d + q * nr;
        for (std::size_t r = 0; r < nr; ++r) {
            const double* rr = refs + r * w;
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i) {
                const double t = qr[i] - rr[i];
                acc += t * t;
            }
            dq[r] = acc;
        }
    }
}

void sq_dist_rows(const double* queries, std::size_t nq, const double* refs, std::size_t nr,
                  std::size_t w, double* d) {
#pragma omp parallel for schedule(static)
    for (std::int64_t q = 0; q < static_cast<std::int64_t>(nq); ++q) {
        const double* qr = queries + static_cast<std::size_t>(q) * w;
        double* dq = d + static_cast<std::size_t>(q) * nr;
        for (std::size_t r = 0; r < nr; ++r) {
            const double* rr = refs + r * w;
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i) {
                const double t = qr[i] - rr[i];
                acc += t * t;
            }
            dq[r] = acc;
        }
    }
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) {
        return 0.0;
    }
    if (n <= 8) {
        double acc = v[0];
        for (std::size_t i = 1; i < n; ++i) {
            acc += v[i];
        }
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace srspos::kernels
