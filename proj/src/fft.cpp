#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace nlspin::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw std::runtime_error("FFTW failed to create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> real_fft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("real_fft: need at least two samples");
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_r2c_1d(n, in.data(), out_ptr, FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();
  return out;
}

std::vector<double> inverse_real_fft(std::span<const std::complex<double>> half, std::size_t n) {
  if (half.size() != n / 2 + 1) throw std::invalid_argument("inverse_real_fft: wrong spectrum size");
  std::vector<std::complex<double>> in(half.begin(), half.end());  // c2r overwrites its input
  std::vector<double> out(n);
  auto* in_ptr = reinterpret_cast<fftw_complex*>(in.data());
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_c2r_1d(static_cast<int>(n), in_ptr, out.data(), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();
  return out;
}

}  // namespace nlspin::detail
