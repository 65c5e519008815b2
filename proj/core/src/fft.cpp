#include "twhe/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace twhe {

namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(const Grid& g, std::vector<cd>& data, int sign) {
  const int rank = g.real_dim();
  std::vector<int> dims(rank, g.resolution());
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(rank, dims.data(), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void fft_forward(const Grid& g, std::vector<cd>& data) { transform(g, data, FFTW_FORWARD); }

void fft_backward(const Grid& g, std::vector<cd>& data) {
  transform(g, data, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(g.size());
  for (cd& v : data) v *= s;
}

int signed_frequency(const Grid& g, std::size_t idx, int axis) {
  const int k = g.coord(idx, axis);
  return k > g.resolution() / 2 ? k - g.resolution() : k;
}

double ddbar_symbol(const Grid& g, const CMat& base, std::size_t idx) {
  const int n = g.complex_dim();
  const CMat binv = base.inverse();
  CVec dz(n), dzb(n);
  for (int a = 0; a < n; ++a) {
    const int ax = 2 * a, ay = 2 * a + 1;
    const double sx =
        g.stencil().symbol(kTwoPi * g.coord(idx, ax) / g.resolution()) / g.spacing(ax);
    const double sy =
        g.stencil().symbol(kTwoPi * g.coord(idx, ay) / g.resolution()) / g.spacing(ay);
    dz(a) = 0.5 * (kI * sx + sy);
    dzb(a) = 0.5 * (kI * sx - sy);
  }
  cd acc = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) acc += binv(b, a) * dzb(b) * dz(a);
  return (-2.0 * acc).real();
}

}  // namespace twhe
