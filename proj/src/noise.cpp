#include "nlspin/noise.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "csv.hpp"
#include "fft.hpp"

namespace nlspin {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// One independent engine per (seed, component) pair. std::seed_seq and
// mt19937_64 are fully specified by the standard, and boost's normal
// distribution is a portable implementation.
std::mt19937_64 component_engine(std::uint64_t seed, int component) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(component),
                    0x6e6f6973u};
  return std::mt19937_64(seq);
}

// Pauli matrices embedded for spin 1, spin 2 and the single-spin case.
struct PauliTable {
  std::array<CMatrix, 3> one;
  std::array<CMatrix, 3> spin1;
  std::array<CMatrix, 3> spin2;
};

const PauliTable& pauli_table() {
  static const PauliTable table = [] {
    PauliTable t;
    const std::array<HermitianOperator, 3> s{sigma_x(), sigma_y(), sigma_z()};
    for (int i = 0; i < 3; ++i) {
      t.one[i] = s[i].matrix();
      t.spin1[i] = embed(s[i], Spin::kOne).matrix();
      t.spin2[i] = embed(s[i], Spin::kTwo).matrix();
    }
    return t;
  }();
  return table;
}

double sample_mean(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

std::size_t grid_lag(const NoiseRealization& r, double lag) {
  if (!(lag >= 0.0) || lag > 0.25 * r.t_total()) {
    throw std::invalid_argument("autocovariance: lag must lie in [0, t_total / 4]");
  }
  return static_cast<std::size_t>(std::llround(lag / r.grid_spacing()));
}

}  // namespace

void NoiseParams::validate() const {
  if (!(omega_s_sq > 0.0)) throw std::invalid_argument("NoiseParams: omega_s_sq must be > 0");
  if (!(tau_s > 0.0)) throw std::invalid_argument("NoiseParams: tau_s must be > 0");
  if (!(t_total > 0.0)) throw std::invalid_argument("NoiseParams: t_total must be > 0");
  if (n_grid < 256 || !is_power_of_two(n_grid)) {
    throw std::invalid_argument("NoiseParams: n_grid must be a power of two >= 256");
  }
  if (n_components != 3 && n_components != 6) {
    throw std::invalid_argument("NoiseParams: n_components must be 3 or 6");
  }
  if (grid_spacing() > tau_s / 20.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("NoiseParams: grid spacing " + std::to_string(grid_spacing()) +
                                " exceeds tau_s / 20");
  }
  if (t_total < 100.0 * tau_s * (1.0 - 1e-12)) {
    throw std::invalid_argument("NoiseParams: t_total must be at least 100 tau_s");
  }
}

std::size_t default_grid_size(double tau_s, double t_total) {
  std::size_t n = 256;
  while (t_total / static_cast<double>(n) > tau_s / 20.0) n *= 2;
  return n;
}

NoiseRealization::NoiseRealization(double t_total, std::vector<std::vector<double>> components)
    : t_total_(t_total), components_(std::move(components)) {
  if (!(t_total_ > 0.0)) throw std::invalid_argument("NoiseRealization: t_total must be > 0");
  if (components_.empty()) throw std::invalid_argument("NoiseRealization: no components");
  n_grid_ = components_.front().size();
  if (n_grid_ < 2) throw std::invalid_argument("NoiseRealization: need at least two grid points");
  for (const auto& c : components_) {
    if (c.size() != n_grid_) throw std::invalid_argument("NoiseRealization: ragged components");
  }
  spacing_ = t_total_ / static_cast<double>(n_grid_);
}

std::span<const double> NoiseRealization::samples(int component) const {
  if (component < 0 || component >= n_components()) {
    throw std::out_of_range("NoiseRealization: component index out of range");
  }
  return components_[static_cast<std::size_t>(component)];
}

double NoiseRealization::value(int component, double t) const {
  const auto x = samples(component);
  if (!(t >= 0.0) || t > t_total_ * (1.0 + 1e-12)) {
    throw std::out_of_range("NoiseRealization: t = " + std::to_string(t) +
                            " outside the synthesis window");
  }
  const double pos = t / spacing_;
  auto i = static_cast<std::size_t>(pos);
  if (i >= n_grid_) i = n_grid_ - 1;
  const double f = pos - static_cast<double>(i);
  // The grid is periodic: sample n_grid coincides with sample 0.
  const double next = x[(i + 1) % n_grid_];
  return x[i] + f * (next - x[i]);
}

NoiseRealization synthesize(const NoiseParams& params) {
  params.validate();
  const std::size_t n = params.n_grid;
  const double window = params.t_total;
  const double tau = params.tau_s;
  const double dw = 2.0 * std::numbers::pi / window;

  std::vector<std::vector<double>> components;
  components.reserve(static_cast<std::size_t>(params.n_components));
  for (int c = 0; c < params.n_components; ++c) {
    auto engine = component_engine(params.seed, c);
    boost::random::normal_distribution<double> normal;
    std::vector<std::complex<double>> half(n / 2 + 1);
    // The zero-frequency bin stays empty: each realization has zero time average.
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const double w = dw * static_cast<double>(k);
      const double spectrum = 2.0 * params.omega_s_sq * tau / (1.0 + w * w * tau * tau);
      const double variance = spectrum / window;  // E|c_k|^2
      if (k < n / 2) {
        const double sd = std::sqrt(0.5 * variance);
        const double re = normal(engine);
        const double im = normal(engine);
        half[k] = {sd * re, sd * im};
      } else {
        half[k] = {std::sqrt(variance) * normal(engine), 0.0};
      }
    }
    components.push_back(detail::inverse_real_fft(half, n));
  }
  return NoiseRealization(window, std::move(components));
}

double autocovariance(const NoiseRealization& r, int component, double lag) {
  return cross_covariance(r, component, component, lag);
}

double cross_covariance(const NoiseRealization& r, int first, int second, double lag) {
  const std::size_t m = grid_lag(r, lag);
  const auto x = r.samples(first);
  const auto y = r.samples(second);
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  const std::size_t n = x.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + m < n; ++i) sum += (x[i] - mx) * (y[i + m] - my);
  return sum / static_cast<double>(n - m);
}

HermitianOperator noisy_hamiltonian(const HermitianOperator& base, const NoiseRealization& r,
                                    double t, const NoiseCoupling& coupling) {
  const auto& table = pauli_table();
  CMatrix h = base.matrix();
  auto add_spin = [&](const std::array<CMatrix, 3>& paulis, int offset) {
    if (offset + 3 > r.n_components()) {
      throw std::invalid_argument("noisy_hamiltonian: realization has too few components");
    }
    for (int axis = 0; axis < 3; ++axis) h += r.value(offset + axis, t) * paulis[axis];
  };
  if (base.dim() == 2) {
    if (coupling.spin1) add_spin(table.one, 0);
  } else {
    if (coupling.spin1) add_spin(table.spin1, 0);
    if (coupling.spin2) add_spin(table.spin2, 3);
  }
  return HermitianOperator(h);
}

void write_noise_csv(const NoiseRealization& r, std::ostream& out) {
  out << "t";
  for (int c = 0; c < r.n_components(); ++c) out << ",w" << c;
  out << '\n';
  for (std::size_t i = 0; i < r.n_grid(); ++i) {
    out << detail::format_double(static_cast<double>(i) * r.grid_spacing());
    for (int c = 0; c < r.n_components(); ++c) out << ',' << detail::format_double(r.samples(c)[i]);
    out << '\n';
  }
}

}  // namespace nlspin
