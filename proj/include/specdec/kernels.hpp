#pragma once

#include <cstddef>

// Data-parallel inner loops over probability vectors. Every kernel has a
// scalar reference implementation and an AVX2 variant; the active backend is
// selected at runtime (auto-detect, overridable via set_backend or the
// SPECDEC_KERNELS env var). Scalar and SIMD variants are equivalence-tested
// against each other; results may differ by floating-point reassociation only.
namespace specdec::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();

// Force a backend (tests, debugging). Requesting avx2 on a machine without it
// falls back to scalar.
void set_backend(Backend backend);

// sum(x)
double sum(const double* x, std::size_t n);

// dot(a, b)
double dot(const double* a, const double* b, std::size_t n);

// sum over |a - b|
double abs_diff_sum(const double* a, const double* b, std::size_t n);

// dst = (1 - w_q) * p + w_q * q
void mix(double* dst, const double* p, const double* q, double w_q, std::size_t n);

// dst = max(0, p - q); returns sum(dst)
double clamped_diff(double* dst, const double* p, const double* q, std::size_t n);

// sum over max(0, p - q) without materializing the vector
double clamped_diff_sum(const double* p, const double* q, std::size_t n);

// dst = c * x
void scale(double* dst, const double* x, double c, std::size_t n);

namespace detail {

double sum_scalar(const double* x, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
double abs_diff_sum_scalar(const double* a, const double* b, std::size_t n);
void mix_scalar(double* dst, const double* p, const double* q, double w_q, std::size_t n);
double clamped_diff_scalar(double* dst, const double* p, const double* q, std::size_t n);
double clamped_diff_sum_scalar(const double* p, const double* q, std::size_t n);
void scale_scalar(double* dst, const double* x, double c, std::size_t n);

#if defined(SPECDEC_HAVE_AVX2)
double sum_avx2(const double* x, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
double abs_diff_sum_avx2(const double* a, const double* b, std::size_t n);
void mix_avx2(double* dst, const double* p, const double* q, double w_q, std::size_t n);
double clamped_diff_avx2(double* dst, const double* p, const double* q, std::size_t n);
double clamped_diff_sum_avx2(const double* p, const double* q, std::size_t n);
void scale_avx2(double* dst, const double* x, double c, std::size_t n);
#endif

}  // namespace detail

}  // namespace specdec::kernels
