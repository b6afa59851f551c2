#include "gpsemc/oracle.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "gpsemc/rng.hpp"

namespace gpsemc {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

static_assert(std::endian::native == std::endian::little,
              "waveform dump assumes a little-endian host");

struct Plan {
  double fs = 0.0;
  double t_d = 0.0;
  long window = 0;       // samples per integration window
  long period = 0;       // samples per 1 ms code epoch (0 if not integral)
  Eigen::ArrayXd replica;  // one window of the (possibly shifted) replica
  Eigen::ArrayXd signal;   // one window of the aligned transmitted code
};

// Sample-and-hold chip waveform value at sample index i.
inline double chip_at(const CaCode& code, long i, double fs) {
  const long chip = static_cast<long>(std::floor(static_cast<double>(i) *
                                                 code.chip_rate_hz / fs)) %
                    kCodeLength;
  return code.chips[static_cast<Eigen::Index>(chip < 0 ? chip + kCodeLength : chip)];
}

Plan make_plan(const CaCode& code, const ReceiverParams& rx, const SimConfig& cfg) {
  Plan p;
  p.fs = cfg.sample_rate_hz;
  p.t_d = cfg.t_d_s > 0.0 ? cfg.t_d_s : rx.t_d_s;
  if (!(p.fs >= 2.046e6))
    throw std::invalid_argument("simulate: sample rate must be >= 2.046 MHz");
  if (!(p.t_d > 0.0) || cfg.n_integrations < 1)
    throw std::invalid_argument("simulate: need positive integration time and window count");
  p.window = std::lround(p.t_d * p.fs);
  if (p.window < 2)
    throw std::invalid_argument("simulate: integration window shorter than 2 samples");

  const double period_samples = p.fs * kCodePeriodS;
  const bool periodic = std::abs(period_samples - std::round(period_samples)) < 1e-9 &&
                        p.window % std::lround(period_samples) == 0;
  p.period = periodic ? std::lround(period_samples) : 0;

  p.signal.resize(p.window);
  p.replica.resize(p.window);
  for (long i = 0; i < p.window; ++i) {
    p.signal[i] = chip_at(code, i, p.fs);
    p.replica[i] = chip_at(code, i + cfg.code_phase_samples, p.fs);
  }
  return p;
}

std::string describe(const ReceiverParams& rx, const SimConfig& cfg, const Plan& p,
                     const char* path) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "path=%s fs=%.0f window=%ld n=%d noise_psd=%.6g W/Hz "
                "in_band_noise=%.6g W estimator=deviation-from-clean-peak",
                path, p.fs, p.window, cfg.n_integrations, rx.n0_w * rx.t_s_s,
                rx.n0_w);
  return buf;
}

SimResult finish(const Plan& p, const SimConfig& cfg, double peak_amp,
                 const std::vector<std::complex<double>>& y,
                 const std::string& metadata) {
  SimResult res;
  res.signal_peak_power_w = peak_amp * peak_amp;
  double acc = 0.0;
  for (const auto& v : y) acc += std::norm(v - peak_amp);
  res.noise_power_w = acc / static_cast<double>(y.size());
  const double t_d_eff = p.window / p.fs;
  res.empirical_cn0_db_hz =
      linear_to_db(res.signal_peak_power_w / res.noise_power_w / t_d_eff);
  res.metadata = metadata;
  return res;
}

// Exact regrouping of the per-sample correlation: with the replica periodic
// over the window, a tone's correlator output in window m is the window-0
// projection rotated by e^{j 2 pi f m T_d}, and the white-noise projection is
// an i.i.d. complex Gaussian of variance sigma^2/window per window.
SimResult simulate_factored(const CaCode& code, const NoiseSpectrum& noise,
                            const ReceiverParams& rx, const SimConfig& cfg,
                            const Plan& p) {
  const std::size_t n_tones = noise.tones.size();
  std::vector<std::complex<double>> proj(n_tones), rot(n_tones), phasor(n_tones);
  for (std::size_t t = 0; t < n_tones; ++t) {
    const double f = noise.tones[t].offset_hz;
    const std::complex<double> step = std::polar(1.0, kTwoPi * f / p.fs);
    std::complex<double> z = std::polar(1.0, noise.tones[t].phase_rad);
    std::complex<double> acc(0.0, 0.0);
    for (long i = 0; i < p.window; ++i) {
      acc += z * p.replica[i];
      z *= step;
      if ((i & 0xfff) == 0xfff) z /= std::abs(z);
    }
    proj[t] = std::sqrt(2.0 * noise.tones[t].power_w) * acc /
              static_cast<double>(p.window);
    rot[t] = std::polar(1.0, kTwoPi * f * (p.window / p.fs));
    phasor[t] = 1.0;
  }

  const double peak_amp =
      std::sqrt(rx.p_s_w) * (p.signal * p.replica).sum() / static_cast<double>(p.window);

  const double sigma_sq = rx.n0_w * rx.t_s_s * p.fs;  // per-sample noise variance
  const double out_std = std::sqrt(sigma_sq / (2.0 * p.window));
  auto eng = make_engine(derive_seed(cfg.seed, 0x6f7261636cULL));
  std::normal_distribution<double> g(0.0, 1.0);

  std::vector<std::complex<double>> y(static_cast<std::size_t>(cfg.n_integrations));
  for (auto& ym : y) {
    std::complex<double> tone_sum(0.0, 0.0);
    for (std::size_t t = 0; t < n_tones; ++t) {
      tone_sum += proj[t] * phasor[t];
      phasor[t] *= rot[t];
    }
    ym = peak_amp + tone_sum + std::complex<double>(out_std * g(eng), out_std * g(eng));
  }
  return finish(p, cfg, peak_amp, y, describe(rx, cfg, p, "factored"));
}

SimResult simulate_per_sample(const CaCode& code, const NoiseSpectrum& noise,
                              const ReceiverParams& rx, const SimConfig& cfg,
                              const Plan& p) {
  const std::size_t n_tones = noise.tones.size();
  std::vector<std::complex<double>> z(n_tones), step(n_tones);
  std::vector<double> amp(n_tones);
  for (std::size_t t = 0; t < n_tones; ++t) {
    z[t] = std::polar(1.0, noise.tones[t].phase_rad);
    step[t] = std::polar(1.0, kTwoPi * noise.tones[t].offset_hz / p.fs);
    amp[t] = std::sqrt(2.0 * noise.tones[t].power_w);
  }

  const double sig_amp = std::sqrt(rx.p_s_w);
  const double samp_std = std::sqrt(rx.n0_w * rx.t_s_s * p.fs / 2.0);
  auto eng = make_engine(derive_seed(cfg.seed, 0x73616d70ULL));
  std::normal_distribution<double> g(0.0, 1.0);

  std::FILE* dump = nullptr;
  if (!cfg.waveform_dump_path.empty()) {
    dump = std::fopen(cfg.waveform_dump_path.c_str(), "wb");
    if (!dump)
      throw std::runtime_error("simulate: cannot open waveform dump file " +
                               cfg.waveform_dump_path);
    const char magic[8] = {'G', 'E', 'M', 'C', 'W', 'A', 'V', '1'};
    const std::uint32_t version = 1;
    const double fs = p.fs;
    const std::uint64_t total =
        static_cast<std::uint64_t>(p.window) * static_cast<std::uint64_t>(cfg.n_integrations);
    std::fwrite(magic, 1, 8, dump);
    std::fwrite(&version, sizeof version, 1, dump);
    std::fwrite(&fs, sizeof fs, 1, dump);
    std::fwrite(&total, sizeof total, 1, dump);
  }

  std::vector<std::complex<double>> y(static_cast<std::size_t>(cfg.n_integrations));
  std::vector<double> clean_amp(y.size());
  std::vector<float> io;
  if (dump) io.resize(static_cast<std::size_t>(p.window) * 2);

  long base = 0;
  for (int m = 0; m < cfg.n_integrations; ++m, base += p.window) {
    std::complex<double> acc(0.0, 0.0);
    double clean = 0.0;
    for (long i = 0; i < p.window; ++i) {
      // Code is periodic; reuse the precomputed window when it tiles exactly.
      const double s = p.period ? p.signal[i] : chip_at(code, base + i, p.fs);
      const double r = p.period ? p.replica[i]
                                : chip_at(code, base + i + cfg.code_phase_samples, p.fs);
      std::complex<double> v(sig_amp * s, 0.0);
      for (std::size_t t = 0; t < n_tones; ++t) {
        v += amp[t] * z[t];
        z[t] *= step[t];
      }
      v += std::complex<double>(samp_std * g(eng), samp_std * g(eng));
      acc += v * r;
      clean += s * r;
      if (dump) {
        io[static_cast<std::size_t>(2 * i)] = static_cast<float>(v.real());
        io[static_cast<std::size_t>(2 * i + 1)] = static_cast<float>(v.imag());
      }
    }
    // Keep the recurrence phasors on the unit circle across windows.
    for (auto& zz : z) zz /= std::abs(zz);
    y[static_cast<std::size_t>(m)] = acc / static_cast<double>(p.window);
    clean_amp[static_cast<std::size_t>(m)] = sig_amp * clean / static_cast<double>(p.window);
    if (dump) std::fwrite(io.data(), sizeof(float), io.size(), dump);
  }
  if (dump) std::fclose(dump);

  // When the code does not tile the window exactly the clean peak varies per
  // window; recenter each output on its own clean correlation so the
  // deviation estimate stays a pure noise measure.
  double peak_amp = 0.0;
  for (double a : clean_amp) peak_amp += a;
  peak_amp /= static_cast<double>(clean_amp.size());
  for (std::size_t m = 0; m < y.size(); ++m) y[m] += peak_amp - clean_amp[m];
  return finish(p, cfg, peak_amp, y, describe(rx, cfg, p, "per_sample"));
}

}  // namespace

SimResult simulate(const CaCode& code, const NoiseSpectrum& noise,
                   const ReceiverParams& rx, const SimConfig& cfg) {
  rx.validate();
  Plan p = make_plan(code, rx, cfg);
  for (const auto& t : noise.tones)
    if (std::abs(t.offset_hz) >= p.fs / 2.0)
      throw std::invalid_argument("simulate: tone at " + std::to_string(t.offset_hz) +
                                  " Hz exceeds the Nyquist band");
  if (cfg.path == SimConfig::Path::per_sample || !cfg.waveform_dump_path.empty())
    return simulate_per_sample(code, noise, rx, cfg, p);
  if (p.period == 0)
    return simulate_per_sample(code, noise, rx, cfg, p);  // replica not window-periodic
  return simulate_factored(code, noise, rx, cfg, p);
}

std::vector<std::pair<double, SimResult>> sweep_power(
    const CaCode& code, const NoiseSpectrum& noise, const ReceiverParams& rx,
    const SimConfig& cfg, const std::vector<double>& power_offsets_db) {
  std::vector<std::pair<double, SimResult>> out;
  out.reserve(power_offsets_db.size());
  for (double off : power_offsets_db)
    out.emplace_back(off, simulate(code, scale_power(noise, off), rx, cfg));
  return out;
}

}  // namespace gpsemc
