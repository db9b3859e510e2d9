#pragma once

#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

// Windowed-Fourier magnitudes: rows are time frames, columns one-sided
// frequency bins. bin_centers are in cycles per sample.
struct Spectrogram {
  Eigen::MatrixXd magnitudes;
  std::vector<double> bin_centers;
  std::vector<int> frame_starts;
};

inline Spectrogram wft_spectrogram(const ArrayXd& signal, int window_width, int hop) {
  const int n = static_cast<int>(signal.size());
  if (window_width < 2 || window_width > n)
    throw config_error("window width must lie in [2, signal length]");
  if (hop < 1) throw config_error("hop must be >= 1");

  // Periodic Hann window.
  ArrayXd window(window_width);
  for (int i = 0; i < window_width; ++i)
    window[i] = 0.5 * (1.0 - std::cos(2.0 * pi * i / window_width));

  const int bins = window_width / 2 + 1;
  std::vector<int> starts;
  for (int s = 0; s + window_width <= n; s += hop) starts.push_back(s);

  Spectrogram sg;
  sg.frame_starts = starts;
  sg.bin_centers.resize(bins);
  for (int j = 0; j < bins; ++j) sg.bin_centers[j] = double(j) / window_width;
  sg.magnitudes.resize(static_cast<int>(starts.size()), bins);

  Fft fft;
  ArrayXcd frame(window_width);
  for (std::size_t f = 0; f < starts.size(); ++f) {
    for (int i = 0; i < window_width; ++i) frame[i] = signal[starts[f] + i] * window[i];
    const ArrayXcd spec = fft.forward(frame);
    for (int j = 0; j < bins; ++j) sg.magnitudes(static_cast<int>(f), j) = std::abs(spec[j]);
  }
  return sg;
}

} // namespace solwave
