#include "cqdw/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

namespace cqdw {

namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwBuffer {
  T* data;
  explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

int padded_length(int n) {
  int p = 1;
  while (p < 2 * n - 1) p <<= 1;
  return p;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::delta: return "delta";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "exponential") return KernelFamily::exponential;
  if (name == "delta") return KernelFamily::delta;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

void Kernel::validate() const {
  if (!is_delta() && !(range > 0.0)) {
    throw InvalidArgument("kernel range must be positive for " + to_string(family));
  }
}

double kernel_eval(const Kernel& k, double x) {
  switch (k.family) {
    case KernelFamily::gaussian: {
      const double u = x / k.range;
      return std::exp(-u * u) / (k.range * std::sqrt(std::numbers::pi));
    }
    case KernelFamily::exponential:
      return std::exp(-std::abs(x) / k.range) / (2.0 * k.range);
    case KernelFamily::delta:
      break;
  }
  throw InvalidArgument("kernel_eval: the delta kernel has no pointwise value");
}

double lattice_mass(const Kernel& k, double spacing) {
  k.validate();
  switch (k.family) {
    case KernelFamily::delta:
      return 1.0;
    case KernelFamily::exponential: {
      const double a = spacing / (2.0 * k.range);
      return a / std::tanh(a);
    }
    case KernelFamily::gaussian: {
      double sum = spacing * kernel_eval(k, 0.0);
      for (long m = 1;; ++m) {
        const double term = spacing * kernel_eval(k, spacing * static_cast<double>(m));
        sum += 2.0 * term;
        if (term < 1e-18 * sum) break;
      }
      return sum;
    }
  }
  return 1.0;
}

double lattice_weight(const Kernel& k, double spacing, long offset) {
  if (k.is_delta()) return offset == 0 ? 1.0 : 0.0;
  return spacing * kernel_eval(k, spacing * static_cast<double>(offset)) /
         lattice_mass(k, spacing);
}

struct Convolver::Plan {
  int padded = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> kernel_spectrum;

  ~Plan() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

Convolver::Convolver(const Grid& grid, const Kernel& kernel)
    : kernel_(kernel), n_(grid.n_points), spacing_(grid.spacing) {
  kernel_.validate();
  if (kernel_.is_delta()) return;

  auto plan = std::make_shared<Plan>();
  plan->padded = padded_length(n_);
  const int p = plan->padded;
  const int bins = p / 2 + 1;

  FftwBuffer<double> real_buf(p);
  FftwBuffer<fftw_complex> spec_buf(bins);
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan->forward = fftw_plan_dft_r2c_1d(p, real_buf.data, spec_buf.data, FFTW_ESTIMATE);
    plan->backward = fftw_plan_dft_c2r_1d(p, spec_buf.data, real_buf.data, FFTW_ESTIMATE);
  }

  const double mass = lattice_mass(kernel_, spacing_);
  for (int j = 0; j < p; ++j) real_buf.data[j] = 0.0;
  for (int m = 0; m < n_; ++m) {
    const double w = spacing_ * kernel_eval(kernel_, spacing_ * m) / mass;
    real_buf.data[m] = w;
    if (m > 0) real_buf.data[p - m] = w;
  }
  fftw_execute_dft_r2c(plan->forward, real_buf.data, spec_buf.data);
  plan->kernel_spectrum.resize(bins);
  for (int j = 0; j < bins; ++j) {
    plan->kernel_spectrum[j] = {spec_buf.data[j][0], spec_buf.data[j][1]};
  }
  plan_ = std::move(plan);
}

RealVector Convolver::apply(const RealVector& f) const {
  if (f.size() != n_) throw InvalidArgument("Convolver::apply: grid mismatch");
  if (kernel_.is_delta()) return f;

  const int p = plan_->padded;
  const int bins = p / 2 + 1;
  FftwBuffer<double> real_buf(p);
  FftwBuffer<fftw_complex> spec_buf(bins);
  for (int j = 0; j < p; ++j) real_buf.data[j] = 0.0;
  for (int i = 0; i < n_; ++i) real_buf.data[i] = f[i];
  real_buf.data[0] *= 0.5;
  real_buf.data[n_ - 1] *= 0.5;

  fftw_execute_dft_r2c(plan_->forward, real_buf.data, spec_buf.data);
  for (int j = 0; j < bins; ++j) {
    const std::complex<double> v{spec_buf.data[j][0], spec_buf.data[j][1]};
    const std::complex<double> prod = v * plan_->kernel_spectrum[j];
    spec_buf.data[j][0] = prod.real();
    spec_buf.data[j][1] = prod.imag();
  }
  fftw_execute_dft_c2r(plan_->backward, spec_buf.data, real_buf.data);

  RealVector out(n_);
  const double scale = 1.0 / static_cast<double>(p);
  for (int i = 0; i < n_; ++i) out[i] = real_buf.data[i] * scale;
  return out;
}

Eigen::MatrixXd Convolver::dense() const {
  if (kernel_.is_delta()) return Eigen::MatrixXd::Identity(n_, n_);
  std::vector<double> w(n_);
  const double mass = lattice_mass(kernel_, spacing_);
  for (int m = 0; m < n_; ++m) w[m] = spacing_ * kernel_eval(kernel_, spacing_ * m) / mass;
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = w[std::abs(i - j)];
  return out;
}

RealVector convolve(const Kernel& k, const Grid& grid, const RealVector& f) {
  return Convolver(grid, k).apply(f);
}

}  // namespace cqdw
