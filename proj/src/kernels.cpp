#include "specdec/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace specdec::kernels {

namespace detail {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double abs_diff_sum_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

void mix_scalar(double* dst, const double* p, const double* q, double w_q, std::size_t n) {
  const double w_p = 1.0 - w_q;
  for (std::size_t i = 0; i < n; ++i) dst[i] = w_p * p[i] + w_q * q[i];
}

double clamped_diff_scalar(double* dst, const double* p, const double* q, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p[i] - q[i];
    dst[i] = d > 0.0 ? d : 0.0;
    acc += dst[i];
  }
  return acc;
}

double clamped_diff_sum_scalar(const double* p, const double* q, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p[i] - q[i];
    if (d > 0.0) acc += d;
  }
  return acc;
}

void scale_scalar(double* dst, const double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = c * x[i];
}

}  // namespace detail

namespace {

struct KernelTable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*abs_diff_sum)(const double*, const double*, std::size_t);
  void (*mix)(double*, const double*, const double*, double, std::size_t);
  double (*clamped_diff)(double*, const double*, const double*, std::size_t);
  double (*clamped_diff_sum)(const double*, const double*, std::size_t);
  void (*scale)(double*, const double*, double, std::size_t);
};

constexpr KernelTable kScalarTable{
    detail::sum_scalar,          detail::dot_scalar,
    detail::abs_diff_sum_scalar, detail::mix_scalar,
    detail::clamped_diff_scalar, detail::clamped_diff_sum_scalar,
    detail::scale_scalar,
};

#if defined(SPECDEC_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    detail::sum_avx2,          detail::dot_avx2,
    detail::abs_diff_sum_avx2, detail::mix_avx2,
    detail::clamped_diff_avx2, detail::clamped_diff_sum_avx2,
    detail::scale_avx2,
};
#endif

bool avx2_supported() {
#if defined(SPECDEC_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend detect_backend() {
  if (const char* env = std::getenv("SPECDEC_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    if (std::strcmp(env, "auto") != 0) return Backend::scalar;
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = detect_backend();

const KernelTable& table() {
#if defined(SPECDEC_HAVE_AVX2)
  if (g_backend == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

}  // namespace

Backend active_backend() { return g_backend; }

const char* backend_name() { return g_backend == Backend::avx2 ? "avx2" : "scalar"; }

void set_backend(Backend backend) {
  if (backend == Backend::avx2 && !avx2_supported()) backend = Backend::scalar;
  g_backend = backend;
}

double sum(const double* x, std::size_t n) { return table().sum(x, n); }

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
  return table().abs_diff_sum(a, b, n);
}

void mix(double* dst, const double* p, const double* q, double w_q, std::size_t n) {
  table().mix(dst, p, q, w_q, n);
}

double clamped_diff(double* dst, const double* p, const double* q, std::size_t n) {
  return table().clamped_diff(dst, p, q, n);
}

double clamped_diff_sum(const double* p, const double* q, std::size_t n) {
  return table().clamped_diff_sum(p, q, n);
}

void scale(double* dst, const double* x, double c, std::size_t n) { table().scale(dst, x, c, n); }

}  // namespace specdec::kernels
