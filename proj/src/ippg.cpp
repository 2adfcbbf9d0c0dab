#include "fwsel/ippg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>

#include "fwsel/rng.hpp"

namespace fwsel {

namespace {

using cplx = std::complex<double>;
constexpr const char* kChannelNames[] = {"R", "G", "B"};

// The FFTW planner is not reentrant; executing a plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_le(std::span<const std::uint8_t> b, std::size_t at, int bytes) {
  std::uint32_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint32_t>(b[at + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

}  // namespace

std::string to_string(Roi roi) { return roi == Roi::Fore ? "fore" : "nose"; }

void FrameSequence::validate() const {
  if (channels != 3) throw DataError("frames: expected 3 channels (R, G, B), got " + std::to_string(channels));
  if (height == 0 || width == 0) throw DataError("frames: empty region of interest");
  if (fps == 0) throw DataError("frames: fps must be positive");
  if (pixels.size() != frames * frame_size()) throw DataError("frames: pixel buffer does not match the header shape");
  if (frames < 2 * static_cast<std::size_t>(fps))
    throw DataError("frames: need at least 2 seconds of video (" + std::to_string(2 * fps) + " frames), got " +
                    std::to_string(frames));
}

std::vector<double> mean_pixel(std::span<const std::uint8_t> frame, std::size_t height, std::size_t width,
                               std::size_t channels) {
  if (height == 0 || width == 0 || channels == 0) throw std::invalid_argument("mean_pixel: empty frame");
  if (frame.size() != height * width * channels) throw std::invalid_argument("mean_pixel: buffer size mismatch");
  // Integer sums are exact, so the mean is the correctly rounded quotient.
  std::vector<std::uint64_t> sums(channels, 0);
  for (std::size_t p = 0; p < height * width; ++p)
    for (std::size_t c = 0; c < channels; ++c) sums[c] += frame[p * channels + c];
  std::vector<double> out(channels);
  for (std::size_t c = 0; c < channels; ++c)
    out[c] = static_cast<double>(sums[c]) / static_cast<double>(height * width);
  return out;
}

IppgSignal build_signal(const FrameSequence& frames, Roi roi) {
  frames.validate();
  IppgSignal sig;
  sig.fps = frames.fps;
  sig.roi = roi;
  sig.samples = Matrix(frames.channels, frames.frames);
  for (std::size_t t = 0; t < frames.frames; ++t) {
    const auto mp = mean_pixel(frames.frame(t), frames.height, frames.width, frames.channels);
    for (std::size_t c = 0; c < frames.channels; ++c) sig.samples(c, t) = mp[c];
  }
  return sig;
}

std::vector<Biquad> design_bandpass(BandSpec band, double fps, int order) {
  if (!(band.low > 0.0 && band.low < band.high && band.high < fps / 2.0))
    throw std::invalid_argument("band [" + std::to_string(band.low) + ", " + std::to_string(band.high) +
                                "] Hz is infeasible at " + std::to_string(fps) + " fps");
  if (order < 1) throw std::invalid_argument("design_bandpass: order must be >= 1");
  const double fs2 = 2.0 * fps;
  const double w1 = fs2 * std::tan(std::numbers::pi * band.low / fps);
  const double w2 = fs2 * std::tan(std::numbers::pi * band.high / fps);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  std::vector<cplx> zpoles;
  for (int k = 1; k <= order; ++k) {
    const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * k + order - 1) / (2.0 * order));
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0 * w0);
    for (const cplx s : {half + root, half - root}) zpoles.push_back((fs2 + s) / (fs2 - s));
  }

  // Conjugate pairs become one biquad each; leftover real poles pair up.
  std::vector<Biquad> sections;
  std::vector<double> reals;
  const double tiny = 1e-12;
  for (const auto& z : zpoles) {
    if (z.imag() > tiny) sections.push_back({{1.0, 0.0, -1.0}, {1.0, -2.0 * z.real(), std::norm(z)}});
    else if (std::abs(z.imag()) <= tiny) reals.push_back(z.real());
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
    sections.push_back({{1.0, 0.0, -1.0}, {1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]}});
  if (sections.size() != static_cast<std::size_t>(order)) throw InvariantError("design_bandpass: pole pairing failed");

  const double centre = 2.0 * std::atan(w0 / fs2);
  const cplx zi = std::polar(1.0, -centre);
  cplx h = 1.0;
  for (const auto& s : sections)
    h *= (s.b[0] + s.b[1] * zi + s.b[2] * zi * zi) / (s.a[0] + s.a[1] * zi + s.a[2] * zi * zi);
  const double g = 1.0 / std::abs(h);
  for (auto& v : sections.front().b) v *= g;
  return sections;
}

std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sections) {
    double z1 = 0, z2 = 0;  // transposed direct form II state
    for (auto& v : y) {
      const double in = v;
      const double out = s.b[0] * in + z1;
      z1 = s.b[1] * in - s.a[1] * out + z2;
      z2 = s.b[2] * in - s.a[2] * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> bandpass(std::span<const double> x, BandSpec band, double fps, int order) {
  const auto sections = design_bandpass(band, fps, order);
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(3 * order))
    throw std::invalid_argument("bandpass: series needs at least " + std::to_string(3 * order) + " samples");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);

  const std::size_t pad = n - 1;
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  const double first = x.front() - mean, last = x.back() - mean;
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * first - (x[i] - mean));
  for (double v : x) ext.push_back(v - mean);
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * last - (x[n - 1 - i] - mean));

  auto fwd = sosfilt(sections, ext);
  std::reverse(fwd.begin(), fwd.end());
  auto back = sosfilt(sections, fwd);
  std::reverse(back.begin(), back.end());
  return {back.begin() + static_cast<long>(pad), back.begin() + static_cast<long>(pad + n)};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::size_t band_bin_count(BandSpec band, double fps, std::size_t fft_size) {
  const double per_hz = static_cast<double>(fft_size) / fps;
  const auto lo = static_cast<long>(std::ceil(band.low * per_hz));
  const auto hi = static_cast<long>(std::floor(band.high * per_hz));
  return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
  return w;
}

double Spectrum::energy() const {
  double e = 0;
  for (std::size_t k = 0; k < magnitude.size(); ++k) {
    const double m2 = magnitude[k] * magnitude[k];
    const bool unpaired = k == 0 || 2 * k == fft_size;
    e += unpaired ? m2 : 2.0 * m2;
  }
  return e / static_cast<double>(fft_size);
}

Spectrum spectrum(std::span<const double> x, double fps, BandSpec band) {
  if (x.size() < 64) throw std::invalid_argument("spectrum: need at least 64 samples");
  Spectrum sp;
  sp.fft_size = next_pow2(x.size());
  const std::size_t m = sp.fft_size;
  const auto window = hann_window(x.size());

  double* in = fftw_alloc_real(m);
  fftw_complex* out = fftw_alloc_complex(m / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < m; ++i) in[i] = i < x.size() ? x[i] * window[i] : 0.0;
  fftw_execute(plan);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    sp.frequency.push_back(static_cast<double>(k) * fps / static_cast<double>(m));
    sp.magnitude.push_back(std::hypot(out[k][0], out[k][1]));
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);

  const double per_hz = static_cast<double>(m) / fps;
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(band.low * per_hz)));
  const auto hi = static_cast<std::size_t>(std::floor(band.high * per_hz));
  double best = -1.0;
  for (std::size_t k = lo; k <= hi && k < sp.magnitude.size(); ++k) {
    sp.band_frequency.push_back(sp.frequency[k]);
    sp.band_magnitude.push_back(sp.magnitude[k]);
    if (sp.magnitude[k] > best) {
      best = sp.magnitude[k];
      sp.peak_hz = sp.frequency[k];
    }
  }
  return sp;
}

namespace {

void append_band_features(FeatureVector& fv, const std::string& prefix, std::span<const double> series,
                          BandSpec band, unsigned fps) {
  const auto td = bandpass(series, band, fps);
  const double n = static_cast<double>(td.size());
  const double mean = std::accumulate(td.begin(), td.end(), 0.0) / n;
  double var = 0;
  for (double v : td) var += (v - mean) * (v - mean);
  const auto [mn, mx] = std::minmax_element(td.begin(), td.end());
  const std::pair<const char*, double> stats[] = {
      {"mean", mean}, {"std", std::sqrt(var / n)}, {"min", *mn}, {"max", *mx}, {"median", median(td)}};
  for (const auto& [name, value] : stats) {
    fv.names.push_back(prefix + "_" + name);
    fv.values.push_back(value);
  }
  const auto sp = spectrum(td, fps, band);
  fv.names.push_back(prefix + "_peak_hz");
  fv.values.push_back(sp.peak_hz);
  for (std::size_t k = 0; k < sp.band_magnitude.size(); ++k) {
    fv.names.push_back(prefix + "_bin" + std::to_string(k));
    fv.values.push_back(sp.band_magnitude[k]);
  }
}

}  // namespace

FeatureVector extract_features(const FrameSequence& fore, const FrameSequence& nose) {
  if (fore.fps != nose.fps)
    throw DataError("extract_features: fore and nose fps differ (" + std::to_string(fore.fps) + " vs " +
                    std::to_string(nose.fps) + ")");
  FeatureVector fv;
  for (const auto& [roi, seq] : {std::pair{Roi::Fore, &fore}, std::pair{Roi::Nose, &nose}}) {
    const auto sig = build_signal(*seq, roi);
    for (std::size_t c = 0; c < sig.samples.rows(); ++c) {
      const std::string base = to_string(roi) + "_" + kChannelNames[c];
      append_band_features(fv, base + "_hr", sig.samples.row(c), kHeartBand, sig.fps);
      append_band_features(fv, base + "_rr", sig.samples.row(c), kBreathBand, sig.fps);
    }
  }
  return fv;
}

std::size_t feature_count(std::size_t frames, unsigned fps, std::size_t channels) {
  const std::size_t m = next_pow2(frames);
  const std::size_t per_channel =
      (6 + band_bin_count(kHeartBand, fps, m)) + (6 + band_bin_count(kBreathBand, fps, m));
  return 2 * channels * per_channel;
}

std::vector<std::uint8_t> encode_frames(const FrameSequence& seq) {
  if (seq.frames > 0xffffffffULL || seq.height > 0xffff || seq.width > 0xffff || seq.channels > 0xff || seq.fps > 0xff)
    throw std::invalid_argument("encode_frames: shape does not fit the header fields");
  std::vector<std::uint8_t> out{'I', 'P', 'P', 'G'};
  put_u32(out, static_cast<std::uint32_t>(seq.frames));
  put_u16(out, static_cast<std::uint16_t>(seq.height));
  put_u16(out, static_cast<std::uint16_t>(seq.width));
  out.push_back(static_cast<std::uint8_t>(seq.channels));
  out.push_back(static_cast<std::uint8_t>(seq.fps));
  out.push_back(0);
  out.push_back(0);
  out.insert(out.end(), seq.pixels.begin(), seq.pixels.end());
  return out;
}

FrameSequence decode_frames(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 16) throw DataError(origin + ": truncated header (" + std::to_string(bytes.size()) + " bytes)");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "IPPG")) throw DataError(origin + ": bad magic, expected IPPG");
  FrameSequence seq;
  seq.frames = get_le(bytes, 4, 4);
  seq.height = get_le(bytes, 8, 2);
  seq.width = get_le(bytes, 10, 2);
  seq.channels = bytes[12];
  seq.fps = bytes[13];
  const std::size_t expected = seq.frames * seq.frame_size();
  if (bytes.size() - 16 != expected)
    throw DataError(origin + ": expected " + std::to_string(expected) + " pixel bytes, found " +
                    std::to_string(bytes.size() - 16));
  seq.pixels.assign(bytes.begin() + 16, bytes.end());
  seq.validate();
  return seq;
}

FrameSequence read_frames(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_frames(bytes, path.string());
}

void write_frames(const FrameSequence& seq, const std::filesystem::path& path) {
  const auto bytes = encode_frames(seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

FrameSequence synth_pulse_video(const PulseVideoSpec& spec) {
  FrameSequence seq;
  seq.fps = spec.fps;
  seq.height = spec.height;
  seq.width = spec.width;
  seq.frames = static_cast<std::size_t>(std::llround(spec.seconds * spec.fps));
  seq.pixels.resize(seq.frames * seq.frame_size());

  auto rng = make_stream(spec.seed, Stream::Video);
  const double signal_power = 0.5 * (spec.heart_amplitude * spec.heart_amplitude +
                                     spec.breath_amplitude * spec.breath_amplitude);
  const double noise_sigma = std::sqrt(signal_power / std::pow(10.0, spec.snr_db / 10.0));
  std::normal_distribution<double> noise(0.0, noise_sigma);
  std::uniform_real_distribution<double> dither(-0.5, 0.5);
  const double phase_hr = 2.0 * std::numbers::pi * uniform01(rng);
  const double phase_rr = 2.0 * std::numbers::pi * uniform01(rng);

  std::size_t at = 0;
  for (std::size_t t = 0; t < seq.frames; ++t) {
    const double sec = static_cast<double>(t) / spec.fps;
    const double pulse = spec.heart_amplitude * std::sin(2.0 * std::numbers::pi * spec.heart_hz * sec + phase_hr) +
                         spec.breath_amplitude * std::sin(2.0 * std::numbers::pi * spec.breath_hz * sec + phase_rr) +
                         noise(rng);
    for (std::size_t p = 0; p < spec.height * spec.width; ++p)
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = spec.base[c] + spec.channel_gain[c] * pulse + dither(rng);
        seq.pixels[at++] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
  }
  return seq;
}

}  // namespace fwsel
