#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fwsel/common.hpp"

namespace fwsel {

/// 8-bit video of one region of interest, laid out [frame][row][col][channel]
/// with channels in R, G, B order.
struct FrameSequence {
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 3;
  unsigned fps = 25;
  std::vector<std::uint8_t> pixels;

  std::size_t frame_size() const { return height * width * channels; }
  std::span<const std::uint8_t> frame(std::size_t t) const { return {pixels.data() + t * frame_size(), frame_size()}; }
  // Throws DataError unless shape, channel count and the 2-second minimum hold.
  void validate() const;
};

enum class Roi { Fore, Nose };
std::string to_string(Roi roi);

struct IppgSignal {
  Matrix samples;  // channels x frames, channel means in [0, 255]
  unsigned fps = 25;
  Roi roi = Roi::Fore;
};

struct BandSpec {
  double low = 0.0;
  double high = 0.0;
};

inline constexpr BandSpec kHeartBand{0.75, 3.33};
inline constexpr BandSpec kBreathBand{0.15, 0.40};
inline constexpr int kFilterOrder = 3;

// Mean of every channel over the H x W frame.
std::vector<double> mean_pixel(std::span<const std::uint8_t> frame, std::size_t height, std::size_t width,
                               std::size_t channels);

IppgSignal build_signal(const FrameSequence& frames, Roi roi);

/// Biquad with numerator b and denominator a (a[0] == 1).
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 3> a{};
};

// Digital Butterworth band-pass of the given prototype order (2*order poles),
// designed with a prewarped bilinear transform and normalized to unit gain at
// the geometric centre frequency. Throws std::invalid_argument when the band
// does not fit strictly inside (0, fps/2).
std::vector<Biquad> design_bandpass(BandSpec band, double fps, int order = kFilterOrder);

// Single causal pass through the cascade.
std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x);

// Zero-phase band-pass: mean removed, odd-reflection padded, filtered forward
// and backward.
std::vector<double> bandpass(std::span<const double> x, BandSpec band, double fps, int order = kFilterOrder);

struct Spectrum {
  std::size_t fft_size = 0;         // zero-padded length, a power of two
  std::vector<double> frequency;    // one-sided bin centres, Hz
  std::vector<double> magnitude;    // |X_k| of the Hann-windowed series
  std::vector<double> band_frequency;
  std::vector<double> band_magnitude;
  double peak_hz = 0.0;             // largest in-band bin; lowest frequency on ties

  // Sum of |X_k|^2 over the full two-sided spectrum divided by fft_size.
  double energy() const;
};

std::size_t next_pow2(std::size_t n);

// Number of bins k with low <= k * fps / fft_size <= high.
std::size_t band_bin_count(BandSpec band, double fps, std::size_t fft_size);

std::vector<double> hann_window(std::size_t n);

Spectrum spectrum(std::span<const double> x, double fps, BandSpec band);

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
};

// Layout, outermost first: ROI (fore, nose), channel (R, G, B), band (hr, rr),
// then [mean, std, min, max, median] of the band-passed series, the spectral
// peak in Hz, and the in-band magnitudes of that series' spectrum.
FeatureVector extract_features(const FrameSequence& fore, const FrameSequence& nose);

// Closed-form length of extract_features for two ROIs of `frames` frames each.
std::size_t feature_count(std::size_t frames, unsigned fps, std::size_t channels = 3);

// Raw format: "IPPG", u32 frames, u16 height, u16 width, u8 channels, u8 fps,
// 2 reserved bytes (all little-endian), then the pixels.
std::vector<std::uint8_t> encode_frames(const FrameSequence& seq);
FrameSequence decode_frames(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
FrameSequence read_frames(const std::filesystem::path& path);
void write_frames(const FrameSequence& seq, const std::filesystem::path& path);

struct PulseVideoSpec {
  double seconds = 30.0;
  unsigned fps = 25;
  std::size_t height = 8;
  std::size_t width = 8;
  double heart_hz = 1.2;
  double breath_hz = 0.3;
  double heart_amplitude = 2.0;
  double breath_amplitude = 2.0;
  double snr_db = 10.0;
  std::array<double, 3> base{150.0, 110.0, 90.0};
  std::array<double, 3> channel_gain{0.4, 1.0, 0.25};  // pulse strength per channel
  std::uint64_t seed = 0;
};

// Each frame holds base + gain_c * (pulse(t) + noise(t)) plus per-pixel dither,
// quantized to 8 bits. The noise variance is set from snr_db against the
// combined power of the two tones.
FrameSequence synth_pulse_video(const PulseVideoSpec& spec);

}  // namespace fwsel
