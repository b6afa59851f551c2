// gpsemc: GPS L1 C/A interference, C/N0 prediction, and EMC limit tooling.
//
// Subcommands: analyze, limit, check, simulate, sweep. Exit codes are a
// stable contract: 0 success / compliance pass, 1 compliance fail, 2 usage,
// parse, or configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gpsemc/cacode.hpp"
#include "gpsemc/cn0.hpp"
#include "gpsemc/emclimits.hpp"
#include "gpsemc/errors.hpp"
#include "gpsemc/ingest.hpp"
#include "gpsemc/noise.hpp"
#include "gpsemc/oracle.hpp"
#include "gpsemc/units.hpp"

namespace {

using namespace gpsemc;

constexpr const char* kVersion = "gpsemc 1.0.0";

enum class Fmt { table, csv, object };

Fmt parse_fmt(const std::string& s) {
  if (s == "table") return Fmt::table;
  if (s == "csv") return Fmt::csv;
  return Fmt::object;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// Splits "<number><suffix>"; the suffix may be separated by spaces.
std::pair<double, std::string> split_unit(const std::string& raw, const char* what) {
  const std::string s = strip(raw);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ConfigError(std::string("bad ") + what + " value '" + raw + "'");
  return {v, lower(strip(s.substr(static_cast<std::size_t>(end - s.c_str()))))};
}

// Powers must carry a unit; bare numbers are rejected on purpose.
double parse_power_dbm(const std::string& raw) {
  auto [v, unit] = split_unit(raw, "power");
  if (unit == "dbm") return v;
  if (unit == "w") return watts_to_dbm(v);
  if (unit == "mw") return watts_to_dbm(v * 1e-3);
  if (unit == "uw") return watts_to_dbm(v * 1e-6);
  if (unit == "nw") return watts_to_dbm(v * 1e-9);
  throw ConfigError("power '" + raw + "' needs a unit suffix (dBm, W, mW, uW, nW)");
}

double parse_psd_dbm_hz(const std::string& raw) {
  auto [v, unit] = split_unit(raw, "density");
  if (unit == "dbm/hz") return v;
  if (unit == "w/hz") return watts_to_dbm(v);
  throw ConfigError("density '" + raw + "' needs a dBm/Hz or W/Hz suffix");
}

double parse_freq_hz(const std::string& raw) {
  auto [v, unit] = split_unit(raw, "frequency");
  if (unit.empty() || unit == "hz") return v;
  if (unit == "khz" || unit == "k") return v * 1e3;
  if (unit == "mhz" || unit == "m") return v * 1e6;
  if (unit == "ghz" || unit == "g") return v * 1e9;
  throw ConfigError("frequency '" + raw + "' has an unknown suffix (use Hz, kHz, MHz, GHz)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(strip(cur));
  return out;
}

std::vector<double> parse_freq_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s))
    if (!item.empty()) out.push_back(parse_freq_hz(item));
  if (out.empty()) throw ConfigError("empty frequency list");
  return out;
}

std::string num(double v, const char* spec = "%.6g") {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char b[48];
  std::snprintf(b, sizeof b, spec, v);
  return b;
}

// ---------------------------------------------------------------------------
// Receiver flags + config file

struct RxFlags {
  double t_d = 5e-3, t_s = 5e-3, n0_dbm_hz = -119.0, gain = 55.0, threshold = 35.0,
         doppler = 0.0;
  std::string signal = "-75dBm";
  std::string config_path;
  CLI::Option *o_td = nullptr, *o_ts = nullptr, *o_n0 = nullptr, *o_sig = nullptr,
              *o_gain = nullptr, *o_thr = nullptr, *o_dop = nullptr;

  void attach(CLI::App* sub) {
    o_td = sub->add_option("--td", t_d, "coherent integration time, seconds")
               ->capture_default_str();
    o_ts = sub->add_option("--ts", t_s, "predetection interval, seconds")
               ->capture_default_str();
    o_n0 = sub->add_option("--noise-density", n0_dbm_hz,
                           "thermal noise density at the correlator, dBm/Hz")
               ->capture_default_str();
    o_sig = sub->add_option("--signal", signal,
                            "GPS signal power at the correlator (unit suffix required)")
                ->capture_default_str();
    o_gain = sub->add_option("--gain", gain, "front-end gain antenna->correlator, dB")
                 ->capture_default_str();
    o_thr = sub->add_option("--threshold", threshold, "C/N0 acceptability threshold, dB/Hz")
                ->capture_default_str();
    o_dop = sub->add_option("--doppler", doppler, "residual Doppler on the signal, Hz")
                ->capture_default_str();
    sub->add_option("--config", config_path,
                    "key = value file pre-setting these receiver parameters");
  }

  void apply_config() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = strip(line);
      if (t.empty()) continue;
      auto sep = t.find('=');
      if (sep == std::string::npos) sep = t.find(':');
      if (sep == std::string::npos)
        throw ParseError(config_path, line_no, "expected 'key = value'");
      const std::string key = strip(t.substr(0, sep));
      const std::string val = strip(t.substr(sep + 1));
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(val, &used);
        if (strip(val.substr(used)).size()) throw std::invalid_argument("junk");
      } catch (const std::exception&) {
        throw ParseError(config_path, line_no, "bad numeric value '" + val + "'");
      }
      const auto set = [&](CLI::Option* o, double* slot) {
        if (!o || o->count() == 0) *slot = v;
      };
      if (key == "integration_time_s")
        set(o_td, &t_d);
      else if (key == "sample_period_s")
        set(o_ts, &t_s);
      else if (key == "noise_density_dbm_hz")
        set(o_n0, &n0_dbm_hz);
      else if (key == "signal_power_dbm") {
        if (!o_sig || o_sig->count() == 0) signal = val + "dBm";
      } else if (key == "front_end_gain_db")
        set(o_gain, &gain);
      else if (key == "cn0_threshold_db_hz")
        set(o_thr, &threshold);
      else if (key == "doppler_hz")
        set(o_dop, &doppler);
      else
        throw ParseError(config_path, line_no, "unknown key '" + key + "'");
    }
  }

  ReceiverParams build() {
    apply_config();
    ReceiverParams rx;
    rx.t_d_s = t_d;
    rx.t_s_s = t_s;
    rx.n0_w = noise_power_from_density_dbm_hz(n0_dbm_hz, t_s);
    rx.p_s_w = dbm_to_watts(parse_power_dbm(signal));
    rx.doppler_hz = doppler;
    rx.front_end_gain_db = gain;
    rx.cn0_floor_db_hz = threshold;
    rx.validate();
    return rx;
  }
};

// ---------------------------------------------------------------------------
// Interference source flags

struct ShapeOverrides {
  std::optional<double> center_hz;
  std::optional<double> bandwidth_hz;
  std::optional<double> psd_dbm_hz;
  double extra_db = 0.0;
};

struct ShapeFlags {
  std::string capture_path;
  bool cwi = false;
  std::string meso_bw, rect_bw;
  std::string power, psd;
  std::string center = "0";
  std::string spacing = "190";
  int tones = 0;
  double phase = 0.0;
  std::string phase_policy = "random";
  double atten = 0.0;
  std::vector<double> corrections;

  void attach(CLI::App* sub, bool required = true) {
    auto* g = sub->add_option_group("source", "interference source (exactly one)");
    g->add_option("--capture", capture_path, "spectrum capture CSV file");
    g->add_flag("--cwi", cwi, "single continuous-wave tone");
    g->add_option("--mesoband", meso_bw, "mesoband noise of this bandwidth");
    g->add_option("--rect", rect_bw, "rectangular flat-density noise of this bandwidth");
    if (required) g->require_option(1);
    sub->add_option("--power", power, "total interference power (unit suffix required)");
    sub->add_option("--psd", psd, "flat density, dBm/Hz suffix required");
    sub->add_option("--center,--offset", center, "center offset from the carrier")
        ->capture_default_str();
    sub->add_option("--tones", tones, "sub-tone count for --mesoband (0 = auto)");
    sub->add_option("--spacing", spacing, "tone spacing for --rect")->capture_default_str();
    sub->add_option("--phase", phase, "CWI phase, radians");
    sub->add_option("--phase-policy", phase_policy, "zero | random sub-tone phases")
        ->check(CLI::IsMember({"zero", "random"}))
        ->capture_default_str();
    sub->add_option("--atten", atten, "level correction applied to the source, dB");
    sub->add_option("--correction", corrections, "extra dB corrections (repeatable)");
  }

  double corrections_db() const {
    double c = atten;
    for (double x : corrections) c += x;
    return c;
  }

  NoiseSpectrum build(std::uint64_t seed, std::vector<std::string>* warnings,
                      const ShapeOverrides& ov = {}) const {
    const PhasePolicy pol =
        phase_policy == "zero" ? PhasePolicy::zero : PhasePolicy::random;
    const double corr = corrections_db() + ov.extra_db;

    if (!capture_path.empty()) {
      if (ov.center_hz || ov.bandwidth_hz || ov.psd_dbm_hz)
        throw ConfigError("center/bandwidth/psd sweeps need a synthetic source");
      IngestOptions opt;
      opt.extra_corrections_db = {corr};
      opt.phases = pol;
      opt.seed = seed;
      return to_noise_spectrum(parse_capture_file(capture_path), opt, warnings);
    }

    const double center_hz = ov.center_hz ? *ov.center_hz : parse_freq_hz(center);
    if (cwi) {
      if (power.empty()) throw ConfigError("--cwi needs --power");
      return make_cwi(dbm_to_watts(parse_power_dbm(power) + corr), center_hz, phase);
    }
    if (!meso_bw.empty()) {
      const double bw = ov.bandwidth_hz ? *ov.bandwidth_hz : parse_freq_hz(meso_bw);
      double total_dbm;
      if (ov.psd_dbm_hz)
        total_dbm = *ov.psd_dbm_hz + linear_to_db(bw);
      else if (!psd.empty())
        total_dbm = parse_psd_dbm_hz(psd) + linear_to_db(bw);
      else if (!power.empty())
        total_dbm = parse_power_dbm(power);
      else
        throw ConfigError("--mesoband needs --power or --psd");
      const int n = tones > 0 ? tones : std::max(2, static_cast<int>(std::ceil(bw / 450.0)) + 1);
      return make_mesoband(center_hz, bw, dbm_to_watts(total_dbm + corr), n, pol, seed,
                           warnings);
    }
    if (!rect_bw.empty()) {
      const double bw = ov.bandwidth_hz ? *ov.bandwidth_hz : parse_freq_hz(rect_bw);
      double psd_dbm_hz;
      if (ov.psd_dbm_hz)
        psd_dbm_hz = *ov.psd_dbm_hz;
      else if (!psd.empty())
        psd_dbm_hz = parse_psd_dbm_hz(psd);
      else if (!power.empty())
        psd_dbm_hz = parse_power_dbm(power) - linear_to_db(bw);
      else
        throw ConfigError("--rect needs --psd or --power");
      return make_rectangular(center_hz, bw, dbm_to_watts(psd_dbm_hz + corr),
                              parse_freq_hz(spacing), pol, seed);
    }
    throw ConfigError("no interference source given");
  }
};

// ---------------------------------------------------------------------------
// Output helpers

void provenance(std::ostream& os, const std::string& cmd, std::uint64_t seed,
                const ReceiverParams& rx) {
  os << "# " << kVersion << "\n# command: " << cmd << "\n# seed: " << seed << "\n";
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "# rx: td=%gs ts=%gs signal=%.2fdBm noise=%.2fdBm/Hz gain=%.1fdB "
                "doppler=%gHz threshold=%.1fdB/Hz\n",
                rx.t_d_s, rx.t_s_s, watts_to_dbm(rx.p_s_w),
                watts_to_dbm(rx.n0_w * rx.t_s_s), rx.front_end_gain_db, rx.doppler_hz,
                rx.cn0_floor_db_hz);
  os << buf;
}

using Kv = std::vector<std::pair<std::string, std::string>>;

void emit_kv(std::ostream& os, Fmt f, const Kv& kv) {
  if (f == Fmt::csv) {
    for (std::size_t i = 0; i < kv.size(); ++i)
      os << kv[i].first << (i + 1 < kv.size() ? "," : "\n");
    for (std::size_t i = 0; i < kv.size(); ++i)
      os << kv[i].second << (i + 1 < kv.size() ? "," : "\n");
    return;
  }
  std::size_t w = 0;
  for (const auto& [k, v] : kv) w = std::max(w, k.size());
  for (const auto& [k, v] : kv) {
    if (f == Fmt::object)
      os << k << ": " << v << "\n";
    else
      os << k << std::string(w - k.size() + 2, ' ') << v << "\n";
  }
}

void emit_rows(std::ostream& os, Fmt f, const std::vector<std::string>& cols,
               const std::vector<std::vector<std::string>>& rows) {
  if (f == Fmt::table) {
    std::vector<std::size_t> w(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) w[c] = cols[c].size();
    for (const auto& r : rows)
      for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
    const auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t c = 0; c < r.size(); ++c)
        os << r[c] << (c + 1 < r.size() ? std::string(w[c] - r[c].size() + 2, ' ') : "");
      os << "\n";
    };
    line(cols);
    for (const auto& r : rows) line(r);
    return;
  }
  for (std::size_t c = 0; c < cols.size(); ++c)
    os << cols[c] << (c + 1 < cols.size() ? "," : "\n");
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c)
      os << r[c] << (c + 1 < r.size() ? "," : "\n");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------
// Subcommand state

struct AnalyzeArgs {
  RxFlags rx;
  ShapeFlags shape;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::string model = "envelope";
  int prn = 1;
  int realizations = 0;
  std::string emit_spectrum;
};

struct LimitArgs {
  RxFlags rx;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::string baseline_bw = "20kHz";
  std::string baseline_center = "0";
  int tones = 0;
  std::string bandwidths = "20kHz,40kHz,80kHz";
  std::string offsets =
      "-1MHz,-850kHz,-700kHz,-550kHz,-400kHz,-250kHz,-100kHz,-50kHz,0,"
      "50kHz,100kHz,250kHz,400kHz,550kHz,700kHz,850kHz,1MHz";
  bool broadband = false;
  double loss_of_lock = 25.0;
  std::string out;
};

struct CheckArgs {
  RxFlags rx;
  ShapeFlags shape;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::string curve_file;
};

struct SimulateArgs {
  RxFlags rx;
  ShapeFlags shape;
  std::uint64_t seed = 1;
  std::string format = "table";
  int prn = 1;
  double fs = 10e6;
  int windows = 500;
  std::string sim_path = "factored";
  std::string dump;
  long code_phase = 0;
};

struct SweepArgs {
  RxFlags rx;
  ShapeFlags shape;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string axis = "power";
  std::string from, to;
  int steps = 11;
  bool with_oracle = false;
  int prn = 1;
  double fs = 10e6;
  int windows = 200;
};

int run_analyze(AnalyzeArgs& a) {
  std::vector<std::string> warnings;
  const ReceiverParams rx = a.rx.build();
  const NoiseSpectrum noise = a.shape.build(a.seed, &warnings);
  const SincEnvelope env = make_sinc_envelope();

  double p_int = 0.0;
  if (a.model == "exact") {
    const CodeSpectrum spec = code_spectrum(generate_ca_code(a.prn));
    p_int = multitone_interference_power(noise, spec, rx, a.realizations, a.seed);
  } else {
    p_int = multitone_interference_power(noise, env, rx, a.realizations, a.seed);
  }
  const Cn0Result res = cn0_from_interference_power(p_int, rx);
  const Cn0Result clean = cn0_from_interference_power(0.0, rx);
  const Classification cls = classify_spectrum(noise);

  const Fmt f = parse_fmt(a.format);
  provenance(std::cout, "analyze", a.seed, rx);
  Kv kv{{"cn0_db_hz", num(res.cn0_db_hz, "%.3f")},
        {"snr_db", num(res.snr_db, "%.3f")},
        {"degradation_db", num(clean.cn0_db_hz - res.cn0_db_hz, "%.3f")},
        {"clean_cn0_db_hz", num(clean.cn0_db_hz, "%.3f")},
        {"interference_power_dbm",
         num(total_power(noise) > 0 ? watts_to_dbm(total_power(noise)) : -INFINITY, "%.3f")},
        {"coupled_power_dbm", num(p_int > 0 ? watts_to_dbm(p_int) : -INFINITY, "%.3f")},
        {"thermal_power_dbm", num(watts_to_dbm(res.thermal_power_w), "%.3f")},
        {"noise_class", to_string(cls.cls)},
        {"band_center_hz", num(cls.center_offset_hz)},
        {"band_span_hz", num(cls.span_hz)},
        {"tone_count", std::to_string(noise.tones.size())},
        {"model", a.model}};
  emit_kv(std::cout, f, kv);

  // Strongest coupled contributors, envelope-weighted.
  std::vector<std::pair<double, const Tone*>> ranked;
  for (const auto& t : noise.tones)
    ranked.emplace_back(cwi_correlator_power_sinc(t, env, rx) * kLineSpacingHz, &t);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<std::vector<std::string>> rows;
  const std::size_t n_top = std::min<std::size_t>(ranked.size(), 10);
  for (std::size_t i = 0; i < n_top; ++i) {
    const auto& [cp, t] = ranked[i];
    rows.push_back({num(t->offset_hz), num(watts_to_dbm(t->power_w), "%.2f"),
                    num(cp > 0 ? watts_to_dbm(cp) : -INFINITY, "%.2f"),
                    num(p_int > 0 ? 100.0 * cp / p_int : 0.0, "%.1f")});
  }
  std::cout << "# top contributors\n";
  emit_rows(std::cout, f, {"offset_hz", "tone_dbm", "coupled_dbm", "share_pct"}, rows);

  if (!a.emit_spectrum.empty()) {
    SpectrumCapture cap;
    cap.unit = SpectrumCapture::Unit::dbm;
    cap.rbw_hz = 1.0;
    cap.metadata = "emitted by gpsemc analyze";
    for (const auto& t : noise.tones)
      cap.points.push_back({kL1CarrierHz + t.offset_hz, watts_to_dbm(t.power_w)});
    std::ofstream out(a.emit_spectrum);
    if (!out) throw ConfigError("cannot write " + a.emit_spectrum);
    write_capture(out, cap);
  }
  print_warnings(warnings);
  return 0;
}

int run_limit(LimitArgs& a) {
  std::vector<std::string> warnings;
  const ReceiverParams rx = a.rx.build();
  const SincEnvelope env = make_sinc_envelope();
  const double bw = parse_freq_hz(a.baseline_bw);
  const double center = parse_freq_hz(a.baseline_center);
  const int n = a.tones > 0 ? a.tones : std::max(2, static_cast<int>(std::ceil(bw / 450.0)) + 1);
  const NoiseSpectrum shape =
      make_mesoband(center, bw, 1e-3, n, PhasePolicy::random, a.seed, &warnings);
  const double baseline =
      find_baseline_limit_dbm(shape, rx, rx.cn0_floor_db_hz, env);

  std::vector<LimitCurve> curves =
      build_limit_curve(baseline, center, bw, parse_freq_list(a.bandwidths),
                        parse_freq_list(a.offsets), env, rx, rx.cn0_floor_db_hz, &warnings);
  if (a.broadband)
    curves.push_back(broadband_limit_curve(rx, a.loss_of_lock, env));

  const Fmt f = parse_fmt(a.format);
  provenance(std::cout, "limit", a.seed, rx);
  emit_kv(std::cout, f,
          {{"baseline_limit_dbm", num(baseline, "%.3f")},
           {"baseline_bandwidth_hz", num(bw)},
           {"baseline_center_hz", num(center)},
           {"threshold_db_hz", num(rx.cn0_floor_db_hz, "%.2f")},
           {"plane", "antenna (gain " + num(rx.front_end_gain_db, "%.1f") + " dB removed)"}});
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : curves)
    for (const auto& p : c.points)
      rows.push_back({num(p.first), num(c.bandwidth_hz), num(p.second, "%.3f"),
                      num(c.threshold_db_hz, "%.2f")});
  std::cout << "# limit points (bandwidth 0 = broadband density dBm/Hz)\n";
  emit_rows(std::cout, f, {"offset_hz", "bandwidth_hz", "max_power_dbm", "threshold_db_hz"},
            rows);

  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw ConfigError("cannot write " + a.out);
    write_limit_curves(out, curves);
  }
  print_warnings(warnings);
  return 0;
}

int run_check(CheckArgs& a) {
  std::vector<std::string> warnings;
  const ReceiverParams rx = a.rx.build();
  const NoiseSpectrum noise = a.shape.build(a.seed, &warnings);
  const SincEnvelope env = make_sinc_envelope();

  Verdict v;
  std::string mode;
  if (!a.curve_file.empty()) {
    v = check_compliance_curve(noise, rx, read_limit_curves_file(a.curve_file), env);
    mode = "curve";
  } else {
    v = check_compliance_direct(noise, rx, rx.cn0_floor_db_hz, env);
    mode = "direct";
  }

  const Fmt f = parse_fmt(a.format);
  provenance(std::cout, "check", a.seed, rx);
  emit_kv(std::cout, f,
          {{"verdict", v.pass ? "pass" : "fail"},
           {"margin_db", num(v.margin_db, "%.3f")},
           {"predicted_cn0_db_hz", num(v.predicted_cn0_db_hz, "%.3f")},
           {"worst_offender", v.worst_offender.empty() ? "none" : v.worst_offender},
           {"mode", mode}});
  warnings.insert(warnings.end(), v.warnings.begin(), v.warnings.end());
  print_warnings(warnings);
  return v.pass ? 0 : 1;
}

int run_simulate(SimulateArgs& a) {
  std::vector<std::string> warnings;
  const ReceiverParams rx = a.rx.build();
  const NoiseSpectrum noise = a.shape.build(a.seed, &warnings);
  const CaCode code = generate_ca_code(a.prn);

  SimConfig cfg;
  cfg.sample_rate_hz = a.fs;
  cfg.n_integrations = a.windows;
  cfg.seed = a.seed;
  cfg.code_phase_samples = a.code_phase;
  cfg.path = a.sim_path == "per-sample" ? SimConfig::Path::per_sample
                                        : SimConfig::Path::factored;
  cfg.waveform_dump_path = a.dump;

  const SimResult r = simulate(code, noise, rx, cfg);
  // The waveform couples through this PRN's actual lines, so the comparison
  // column must too; the envelope model can sit several dB off on-line.
  const Cn0Result model = cn0(noise, code_spectrum(code), rx, 0);

  const Fmt f = parse_fmt(a.format);
  provenance(std::cout, "simulate", a.seed, rx);
  emit_kv(std::cout, f,
          {{"empirical_cn0_db_hz", num(r.empirical_cn0_db_hz, "%.3f")},
           {"model_cn0_db_hz", num(model.cn0_db_hz, "%.3f")},
           {"delta_db", num(r.empirical_cn0_db_hz - model.cn0_db_hz, "%.3f")},
           {"peak_power_dbm", num(watts_to_dbm(r.signal_peak_power_w), "%.3f")},
           {"noise_power_dbm", num(watts_to_dbm(r.noise_power_w), "%.3f")},
           {"windows", std::to_string(a.windows)},
           {"prn", std::to_string(a.prn)},
           {"details", r.metadata}});
  print_warnings(warnings);
  return 0;
}

int run_sweep(SweepArgs& a) {
  std::vector<std::string> warnings;
  const ReceiverParams rx = a.rx.build();
  const SincEnvelope env = make_sinc_envelope();
  if (a.from.empty() || a.to.empty()) throw ConfigError("sweep needs --from and --to");
  if (a.steps < 1) throw ConfigError("sweep needs --steps >= 1");

  double lo, hi;
  if (a.axis == "power")
    lo = parse_power_dbm(a.from), hi = parse_power_dbm(a.to);
  else if (a.axis == "psd")
    lo = parse_psd_dbm_hz(a.from), hi = parse_psd_dbm_hz(a.to);
  else if (a.axis == "atten")
    lo = std::stod(a.from), hi = std::stod(a.to);
  else
    lo = parse_freq_hz(a.from), hi = parse_freq_hz(a.to);

  const CaCode code = a.with_oracle ? generate_ca_code(a.prn) : CaCode{};
  SimConfig cfg;
  cfg.sample_rate_hz = a.fs;
  cfg.n_integrations = a.windows;
  cfg.seed = a.seed;

  const Fmt f = parse_fmt(a.format);
  provenance(std::cout, "sweep", a.seed, rx);
  std::vector<std::string> cols{a.axis, "cn0_db_hz"};
  if (a.with_oracle) cols.push_back("oracle_cn0_db_hz");
  std::vector<std::vector<std::string>> rows;

  for (int i = 0; i < a.steps; ++i) {
    const double x = a.steps == 1 ? lo : lo + (hi - lo) * i / (a.steps - 1);
    ShapeOverrides ov;
    NoiseSpectrum noise;
    if (a.axis == "power") {
      noise = a.shape.build(a.seed, i == 0 ? &warnings : nullptr);
      noise = scale_power(noise, x - watts_to_dbm(total_power(noise)));
    } else if (a.axis == "atten") {
      ov.extra_db = x;
      noise = a.shape.build(a.seed, i == 0 ? &warnings : nullptr, ov);
    } else if (a.axis == "psd") {
      ov.psd_dbm_hz = x;
      noise = a.shape.build(a.seed, i == 0 ? &warnings : nullptr, ov);
    } else if (a.axis == "offset" || a.axis == "center") {
      ov.center_hz = x;
      noise = a.shape.build(a.seed, i == 0 ? &warnings : nullptr, ov);
    } else if (a.axis == "bandwidth") {
      ov.bandwidth_hz = x;
      noise = a.shape.build(a.seed, i == 0 ? &warnings : nullptr, ov);
    } else {
      throw ConfigError("unknown sweep axis '" + a.axis +
                        "' (power, psd, atten, offset, bandwidth)");
    }
    std::vector<std::string> row{num(x), num(cn0(noise, env, rx, 0).cn0_db_hz, "%.3f")};
    if (a.with_oracle)
      row.push_back(num(simulate(code, noise, rx, cfg).empirical_cn0_db_hz, "%.3f"));
    rows.push_back(std::move(row));
  }
  emit_rows(std::cout, f, cols, rows);
  print_warnings(warnings);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GPS L1 C/A interference, C/N0 prediction, and EMC limit tool"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AnalyzeArgs an;
  LimitArgs li;
  CheckArgs ch;
  SimulateArgs si;
  SweepArgs sw;

  auto* analyze = app.add_subcommand("analyze", "predict C/N0 for an interference source");
  an.rx.attach(analyze);
  an.shape.attach(analyze);
  analyze->add_option("--seed", an.seed, "root seed")->capture_default_str();
  analyze->add_option("--format", an.format, "table | csv | object")
      ->check(CLI::IsMember({"table", "csv", "object"}))
      ->capture_default_str();
  analyze->add_option("--model", an.model, "envelope | exact spectral-line coupling")
      ->check(CLI::IsMember({"envelope", "exact"}))
      ->capture_default_str();
  analyze->add_option("--prn", an.prn, "PRN for --model exact")->check(CLI::Range(1, 32));
  analyze->add_option("--realizations", an.realizations,
                      "phase realizations (0 = expectation)")
      ->capture_default_str();
  analyze->add_option("--emit-spectrum", an.emit_spectrum,
                      "write the ingested tone set as a capture CSV");

  auto* limit = app.add_subcommand("limit", "construct EMC limit curves");
  li.rx.attach(limit);
  limit->add_option("--seed", li.seed, "root seed")->capture_default_str();
  limit->add_option("--format", li.format, "table | csv | object")
      ->check(CLI::IsMember({"table", "csv", "object"}))
      ->capture_default_str();
  limit->add_option("--baseline-bw", li.baseline_bw, "anchor bandwidth")
      ->capture_default_str();
  limit->add_option("--baseline-center", li.baseline_center, "anchor center offset")
      ->capture_default_str();
  limit->add_option("--tones", li.tones, "anchor sub-tone count (0 = auto)");
  limit->add_option("--bandwidths", li.bandwidths, "comma list of curve bandwidths")
      ->capture_default_str();
  limit->add_option("--offsets", li.offsets, "comma list of curve center offsets");
  limit->add_flag("--broadband", li.broadband, "append the flat broadband density limit");
  limit->add_option("--loss-of-lock", li.loss_of_lock,
                    "C/N0 anchor for the broadband limit, dB/Hz")
      ->capture_default_str();
  limit->add_option("--out", li.out, "write the curve table to this file");

  auto* check = app.add_subcommand("check", "compliance verdict for a source");
  ch.rx.attach(check);
  ch.shape.attach(check);
  check->add_option("--seed", ch.seed, "root seed")->capture_default_str();
  check->add_option("--format", ch.format, "table | csv | object")
      ->check(CLI::IsMember({"table", "csv", "object"}))
      ->capture_default_str();
  check->add_option("--curve", ch.curve_file, "limit curve file (else direct model check)");

  auto* simulate_cmd = app.add_subcommand("simulate", "run the waveform-level simulation");
  si.rx.attach(simulate_cmd);
  si.shape.attach(simulate_cmd);
  simulate_cmd->add_option("--seed", si.seed, "root seed")->capture_default_str();
  simulate_cmd->add_option("--format", si.format, "table | csv | object")
      ->check(CLI::IsMember({"table", "csv", "object"}))
      ->capture_default_str();
  simulate_cmd->add_option("--prn", si.prn, "satellite PRN")->check(CLI::Range(1, 32));
  simulate_cmd->add_option("--fs", si.fs, "sample rate, Hz")->capture_default_str();
  simulate_cmd->add_option("--windows", si.windows, "integration windows")
      ->capture_default_str();
  simulate_cmd->add_option("--sim-path", si.sim_path, "factored | per-sample")
      ->check(CLI::IsMember({"factored", "per-sample"}))
      ->capture_default_str();
  simulate_cmd->add_option("--dump", si.dump, "stream the waveform to this file");
  simulate_cmd->add_option("--code-phase", si.code_phase, "replica misalignment, samples");

  auto* sweep = app.add_subcommand("sweep", "tabulate C/N0 along one axis");
  sw.rx.attach(sweep);
  sw.shape.attach(sweep);
  sweep->add_option("--seed", sw.seed, "root seed")->capture_default_str();
  sweep->add_option("--format", sw.format, "table | csv | object")
      ->check(CLI::IsMember({"table", "csv", "object"}))
      ->capture_default_str();
  sweep->add_option("--axis", sw.axis, "power | psd | atten | offset | bandwidth")
      ->capture_default_str();
  sweep->add_option("--from", sw.from, "axis start (units of the axis)");
  sweep->add_option("--to", sw.to, "axis end");
  sweep->add_option("--steps", sw.steps, "number of points")->capture_default_str();
  sweep->add_flag("--with-oracle", sw.with_oracle, "add a simulated C/N0 column");
  sweep->add_option("--prn", sw.prn, "PRN for --with-oracle")->check(CLI::Range(1, 32));
  sweep->add_option("--fs", sw.fs, "oracle sample rate, Hz")->capture_default_str();
  sweep->add_option("--windows", sw.windows, "oracle integration windows")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(an);
    if (limit->parsed()) return run_limit(li);
    if (check->parsed()) return run_check(ch);
    if (simulate_cmd->parsed()) return run_simulate(si);
    if (sweep->parsed()) return run_sweep(sw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
