#include "gpsemc/emclimits.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "gpsemc/errors.hpp"
#include "gpsemc/mathutil.hpp"
#include "gpsemc/units.hpp"

namespace gpsemc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void warn(std::vector<std::string>* sink, const std::string& msg) {
  if (sink) sink->push_back(msg);
}

std::string format_tone(const Tone& t) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "tone at %+.6g Hz (%.2f dBm)", t.offset_hz,
                watts_to_dbm(t.power_w));
  return buf;
}

// Interference power the receiver can absorb before predicted C/N0 drops to
// threshold; negative when the interference-free C/N0 is already below it.
double allowed_interference_w(const ReceiverParams& rx, double threshold_db_hz) {
  const double l_dopp = [&] {
    const double s = sinc(3.14159265358979323846 * rx.doppler_hz * rx.t_d_s);
    return s * s;
  }();
  const double snr_thr = db_to_linear(threshold_db_hz - linear_to_db(1.0 / rx.t_s_s));
  return rx.p_s_w * l_dopp / snr_thr - rx.n0_w;
}

double env_sq_integral(const SincEnvelope& env, double band_half_hz) {
  return adaptive_simpson(
      [&](double f) {
        const double e = env.value(f);
        return e * e;
      },
      -band_half_hz, band_half_hz, 1e-12, 10e3);
}

const LimitCurve* pick_mesoband_curve(const std::vector<LimitCurve>& curves,
                                      double span_hz) {
  const LimitCurve* best = nullptr;
  double best_dist = kInf;
  for (const auto& c : curves) {
    if (c.noise_class != NoiseClass::mesoband || c.points.empty() || c.bandwidth_hz <= 0)
      continue;
    const double dist = std::abs(std::log(std::max(span_hz, 1.0) / c.bandwidth_hz));
    if (dist < best_dist) {
      best_dist = dist;
      best = &c;
    }
  }
  return best;
}

const LimitCurve* pick_broadband_curve(const std::vector<LimitCurve>& curves) {
  for (const auto& c : curves)
    if (c.noise_class == NoiseClass::broadband && !c.points.empty()) return &c;
  return nullptr;
}

}  // namespace

const char* to_string(NoiseClass cls) {
  switch (cls) {
    case NoiseClass::narrowband: return "narrowband";
    case NoiseClass::mesoband: return "mesoband";
    case NoiseClass::broadband: return "broadband";
  }
  return "?";
}

Classification classify_spectrum(const NoiseSpectrum& s, const ClassifyOptions& opt) {
  Classification c;
  if (s.tones.empty()) return c;
  const double lo = s.tones.front().offset_hz;
  const double hi = s.tones.back().offset_hz;
  c.span_hz = hi - lo;
  c.center_offset_hz = 0.5 * (lo + hi);
  c.cls = c.span_hz < opt.narrow_max_hz
              ? NoiseClass::narrowband
              : (c.span_hz <= opt.meso_max_hz ? NoiseClass::mesoband
                                              : NoiseClass::broadband);
  double largest_gap = 0.0;
  for (std::size_t i = 1; i < s.tones.size(); ++i)
    largest_gap = std::max(largest_gap, s.tones[i].offset_hz - s.tones[i - 1].offset_hz);
  c.disjoint = largest_gap > std::max(opt.meso_max_hz, 0.5 * c.span_hz);
  return c;
}

double LimitCurve::level_at(double offset_hz, const SincEnvelope& env,
                            std::vector<std::string>* warnings) const {
  if (points.empty()) throw ConfigError("limit curve has no points");
  if (noise_class == NoiseClass::broadband) return points.front().second;
  auto it = std::lower_bound(points.begin(), points.end(), offset_hz,
                             [](const auto& p, double x) { return p.first < x; });
  if (it != points.end() && it->first == offset_hz) return it->second;
  if (it == points.begin() || it == points.end()) {
    // Outside the stored grid: continue the curve along the envelope law that
    // built it, anchored at the nearest stored point.
    const auto& edge = it == points.begin() ? points.front() : points.back();
    warn(warnings, "offset outside curve grid; envelope-extended from stored edge");
    return scale_limit_dbm(edge.second, edge.first, bandwidth_hz, offset_hz,
                           bandwidth_hz, env, warnings);
  }
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (offset_hz - a.first) / (b.first - a.first);
  return a.second + t * (b.second - a.second);
}

double find_baseline_limit_dbm(const NoiseSpectrum& shape, const ReceiverParams& rx,
                               double threshold_db_hz, const SincEnvelope& env) {
  rx.validate();
  if (shape.tones.empty() || total_power(shape) <= 0.0)
    throw ConfigError("baseline shape carries no power");
  const double clean = cn0_from_interference_power(0.0, rx).cn0_db_hz;
  if (clean < threshold_db_hz - 1e-9)
    throw ConfigError("interference-free C/N0 " + std::to_string(clean) +
                      " dB/Hz is below the threshold " +
                      std::to_string(threshold_db_hz) + " dB/Hz");
  if (clean - threshold_db_hz < 1e-9) return -kInf;  // any interference fails

  // Normalize the shape to 0 dBm total so the bisection variable is the total
  // power in dBm directly.
  const NoiseSpectrum unit = scale_power(shape, -watts_to_dbm(total_power(shape)));
  const auto cn0_at = [&](double total_dbm) {
    return cn0(scale_power(unit, total_dbm), env, rx, 0).cn0_db_hz;
  };

  double lo = -250.0, hi = 100.0;
  while (cn0_at(hi) >= threshold_db_hz) hi += 50.0;     // unbracketed only in theory
  while (cn0_at(lo) < threshold_db_hz) lo -= 50.0;
  while (hi - lo > 0.005) {  // |dC/N0 / dP| <= 1, so this pins C/N0 within 0.05 dB
    const double mid = 0.5 * (lo + hi);
    (cn0_at(mid) >= threshold_db_hz ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) - rx.front_end_gain_db;
}

double scale_limit_dbm(double baseline_dbm, double from_center_hz, double from_bw_hz,
                       double to_center_hz, double to_bw_hz, const SincEnvelope& env,
                       std::vector<std::string>* warnings) {
  if (!(from_bw_hz > 0.0) || !(to_bw_hz > 0.0))
    throw std::invalid_argument("scale_limit: bandwidths must be positive");
  for (double bw : {from_bw_hz, to_bw_hz})
    if (bw < 1e3 || bw > 200e3)
      warn(warnings, "bandwidth " + std::to_string(bw) +
                         " Hz outside the mesoband range [1 kHz, 200 kHz]");
  const double e_from = std::abs(env.value(from_center_hz));
  const double e_to = std::abs(env.value(to_center_hz));
  if (e_to == 0.0) {
    warn(warnings, "envelope null at target center " + std::to_string(to_center_hz) +
                       " Hz; limit unbounded");
    return kInf;
  }
  if (e_from == 0.0) {
    warn(warnings, "envelope null at source center " + std::to_string(from_center_hz) +
                       " Hz; scaled limit degenerate");
    return -kInf;
  }
  return baseline_dbm + 20.0 * std::log10(e_from / e_to) -
         10.0 * std::log10(to_bw_hz / from_bw_hz);
}

std::vector<LimitCurve> build_limit_curve(double baseline_dbm, double baseline_center_hz,
                                          double baseline_bw_hz,
                                          const std::vector<double>& bandwidths_hz,
                                          const std::vector<double>& offsets_hz,
                                          const SincEnvelope& env, const ReceiverParams& rx,
                                          double threshold_db_hz,
                                          std::vector<std::string>* warnings) {
  if (bandwidths_hz.empty() || offsets_hz.empty())
    throw std::invalid_argument("build_limit_curve: empty bandwidth or offset grid");
  std::vector<double> offsets = offsets_hz;
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

  char desc[160];
  std::snprintf(desc, sizeof desc,
                "anchor %.2f dBm total in %.6g Hz at %+.6g Hz offset, C/N0 >= %.2f "
                "dB/Hz, antenna plane (%.1f dB front-end gain removed)",
                baseline_dbm, baseline_bw_hz, baseline_center_hz, threshold_db_hz,
                rx.front_end_gain_db);

  std::vector<LimitCurve> curves;
  curves.reserve(bandwidths_hz.size());
  for (double bw : bandwidths_hz) {
    LimitCurve c;
    c.noise_class = NoiseClass::mesoband;
    c.bandwidth_hz = bw;
    c.baseline = desc;
    c.gain_reference_db = rx.front_end_gain_db;
    c.threshold_db_hz = threshold_db_hz;
    for (double off : offsets)
      c.points.emplace_back(off, scale_limit_dbm(baseline_dbm, baseline_center_hz,
                                                 baseline_bw_hz, off, bw, env, warnings));
    curves.push_back(std::move(c));
  }
  return curves;
}

double broadband_anchor_dbm_hz(const ReceiverParams& rx, double lol_threshold_db_hz,
                               const SincEnvelope& env, double band_half_hz) {
  rx.validate();
  const double clean = cn0_from_interference_power(0.0, rx).cn0_db_hz;
  if (clean < lol_threshold_db_hz - 1e-9)
    throw ConfigError("interference-free C/N0 is below the loss-of-lock level");
  if (clean - lol_threshold_db_hz < 1e-9) return -kInf;
  const double allowed = allowed_interference_w(rx, lol_threshold_db_hz);
  // Coupled power per unit flat density: every 1 Hz slab behaves like a tone
  // of that power with a line offset uniform over the spacing.
  const double k = 2.0 * kLineSpacingHz * mean_sinc_sq_uniform(rx.t_d_s) *
                   env_sq_integral(env, band_half_hz);
  return watts_to_dbm(allowed / k) - rx.front_end_gain_db;
}

LimitCurve broadband_limit_curve(const ReceiverParams& rx, double lol_threshold_db_hz,
                                 const SincEnvelope& env, double band_half_hz) {
  LimitCurve c;
  c.noise_class = NoiseClass::broadband;
  c.bandwidth_hz = 0.0;
  c.gain_reference_db = rx.front_end_gain_db;
  c.threshold_db_hz = lol_threshold_db_hz;
  const double p0 = broadband_anchor_dbm_hz(rx, lol_threshold_db_hz, env, band_half_hz);
  c.points.emplace_back(0.0, p0);
  char desc[160];
  std::snprintf(desc, sizeof desc,
                "flat density %.2f dBm/Hz across +/-%.6g Hz, loss-of-lock C/N0 %.2f "
                "dB/Hz, antenna plane (%.1f dB front-end gain removed)",
                p0, band_half_hz, lol_threshold_db_hz, rx.front_end_gain_db);
  c.baseline = desc;
  return c;
}

Verdict check_compliance_direct(const NoiseSpectrum& measured, const ReceiverParams& rx,
                                double threshold_db_hz, const SincEnvelope& env) {
  rx.validate();
  Verdict v;
  const double p_int = multitone_interference_power(measured, env, rx, 0);
  const Cn0Result res = cn0_from_interference_power(p_int, rx);
  v.predicted_cn0_db_hz = res.cn0_db_hz;
  const double allowed = allowed_interference_w(rx, threshold_db_hz);

  if (!measured.tones.empty()) {
    const Tone* worst = &measured.tones.front();
    double worst_p = -1.0;
    for (const auto& t : measured.tones) {
      const double p = cwi_correlator_power_sinc(t, env, rx);
      if (p > worst_p) {
        worst_p = p;
        worst = &t;
      }
    }
    v.worst_offender = format_tone(*worst);
  }

  if (allowed < 0.0) {
    v.pass = false;
    v.margin_db = -kInf;
    v.warnings.push_back("interference-independent C/N0 floor is below the threshold");
    return v;
  }
  if (p_int <= 0.0) {
    v.pass = true;
    v.margin_db = kInf;
    v.worst_offender = "none";
    return v;
  }
  v.margin_db = linear_to_db(allowed / p_int);
  v.pass = v.margin_db >= 0.0;
  return v;
}

Verdict check_compliance_curve(const NoiseSpectrum& measured, const ReceiverParams& rx,
                               const std::vector<LimitCurve>& curves,
                               const SincEnvelope& env, const ClassifyOptions& opt) {
  rx.validate();
  if (curves.empty()) throw ConfigError("check_compliance: empty curve set");
  double fallback_threshold = curves.front().threshold_db_hz;
  for (const auto& c : curves)
    if (c.noise_class == NoiseClass::mesoband) {
      fallback_threshold = c.threshold_db_hz;
      break;
    }
  const double clean = cn0_from_interference_power(0.0, rx).cn0_db_hz;

  Verdict v;
  if (measured.tones.empty() || total_power(measured) <= 0.0) {
    v.pass = true;
    v.margin_db = kInf;
    v.worst_offender = "none";
    v.predicted_cn0_db_hz = clean;
    return v;
  }

  const Classification cls = classify_spectrum(measured, opt);
  const auto fall_back = [&](const std::string& why) {
    Verdict d = check_compliance_direct(measured, rx, fallback_threshold, env);
    d.warnings.insert(d.warnings.begin(), why + "; falling back to the direct check");
    return d;
  };
  if (cls.disjoint) return fall_back("spectrum splits into disjoint bands");
  if (cls.cls == NoiseClass::narrowband)
    return fall_back("narrowband spectrum has no applicable curve");

  if (cls.cls == NoiseClass::mesoband) {
    const LimitCurve* curve = pick_mesoband_curve(curves, cls.span_hz);
    if (!curve) return fall_back("no mesoband curve in the set");
    const double at_center = curve->level_at(cls.center_offset_hz, env, &v.warnings);
    const double limit_dbm =
        scale_limit_dbm(at_center, cls.center_offset_hz, curve->bandwidth_hz,
                        cls.center_offset_hz, std::max(cls.span_hz, 1e3), env, &v.warnings);
    const double measured_dbm =
        watts_to_dbm(total_power(measured)) - rx.front_end_gain_db;
    v.margin_db = limit_dbm - measured_dbm;
    v.pass = v.margin_db >= 0.0;
    v.predicted_cn0_db_hz = std::min(clean, curve->threshold_db_hz + v.margin_db);
    const auto worst = std::max_element(
        measured.tones.begin(), measured.tones.end(),
        [](const Tone& a, const Tone& b) { return a.power_w < b.power_w; });
    v.worst_offender = format_tone(*worst);
    return v;
  }

  const LimitCurve* bb = pick_broadband_curve(curves);
  if (!bb) return fall_back("no broadband curve in the set");
  const double p0_corr_w_hz =
      dbm_to_watts(bb->points.front().second + rx.front_end_gain_db);
  // Envelope-weighted density comparison on the measured grid; each tone
  // represents its local spacing so a flat capture at exactly the limit
  // density scores margin 0.
  const auto& tn = measured.tones;
  double ref = 0.0, meas = 0.0, worst_w = -1.0;
  const Tone* worst = &tn.front();
  for (std::size_t i = 0; i < tn.size(); ++i) {
    const double width =
        tn.size() == 1
            ? 1.0
            : (i == 0 ? tn[1].offset_hz - tn[0].offset_hz
                      : (i + 1 == tn.size()
                             ? tn[i].offset_hz - tn[i - 1].offset_hz
                             : 0.5 * (tn[i + 1].offset_hz - tn[i - 1].offset_hz)));
    const double e = env.value(tn[i].offset_hz);
    ref += p0_corr_w_hz * width * e * e;
    const double w = tn[i].power_w * e * e;
    meas += w;
    if (w > worst_w) {
      worst_w = w;
      worst = &tn[i];
    }
  }
  v.worst_offender = format_tone(*worst);
  v.margin_db = meas > 0.0 ? linear_to_db(ref / meas) : kInf;
  v.pass = v.margin_db >= 0.0;
  v.predicted_cn0_db_hz = std::min(clean, bb->threshold_db_hz + v.margin_db);
  return v;
}

void write_limit_curves(std::ostream& os, const std::vector<LimitCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("write_limit_curves: nothing to write");
  os << "# gpsemc limit curve v1\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", curves.front().gain_reference_db);
  os << "# gain_reference_db: " << buf << "\n";
  os << "# baseline: " << curves.front().baseline << "\n";
  os << "# columns: offset_hz,bandwidth_hz,max_power_dbm,threshold_db_hz\n";
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      char row[128];
      std::snprintf(row, sizeof row, "%.10g,%.10g,%.10g,%.10g\n", p.first,
                    c.bandwidth_hz, p.second, c.threshold_db_hz);
      os << row;
    }
}

std::vector<LimitCurve> read_limit_curves(std::istream& is, const std::string& source) {
  std::string line;
  int line_no = 0;
  double gain = 0.0;
  bool have_gain = false;
  std::string baseline;
  // Keyed by (bandwidth, threshold) in first-seen order.
  std::vector<LimitCurve> curves;
  std::map<std::pair<double, double>, std::size_t> index;

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty()) continue;
    if (trimmed[0] == '#') {
      const auto grab = [&](const char* key) -> const char* {
        const std::string pref = std::string("# ") + key + ":";
        return trimmed.rfind(pref, 0) == 0 ? trimmed.c_str() + pref.size() : nullptr;
      };
      if (const char* val = grab("gain_reference_db")) {
        try {
          gain = std::stod(val);
        } catch (const std::exception&) {
          throw ParseError(source, line_no, "bad gain_reference_db value");
        }
        have_gain = true;
      } else if (const char* val = grab("baseline")) {
        baseline = val;
        baseline.erase(0, baseline.find_first_not_of(" \t"));
      }
      continue;
    }
    double f[4];
    std::size_t pos = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t next = trimmed.find(',', pos);
      if ((k < 3) != (next != std::string::npos))
        throw ParseError(source, line_no, "expected 4 comma-separated fields");
      const std::string field = trimmed.substr(pos, next - pos);
      try {
        std::size_t used = 0;
        f[k] = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size()) throw std::invalid_argument("trailing junk");
      } catch (const std::exception&) {
        throw ParseError(source, line_no, "bad numeric field '" + field + "'");
      }
      pos = next + 1;
    }
    if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || f[1] < 0.0 ||
        !std::isfinite(f[3]))
      throw ParseError(source, line_no, "offset, bandwidth, and threshold must be finite");
    const auto key = std::make_pair(f[1], f[3]);
    auto it = index.find(key);
    if (it == index.end()) {
      LimitCurve c;
      c.noise_class = f[1] == 0.0 ? NoiseClass::broadband : NoiseClass::mesoband;
      c.bandwidth_hz = f[1];
      c.threshold_db_hz = f[3];
      it = index.emplace(key, curves.size()).first;
      curves.push_back(std::move(c));
    }
    auto& pts = curves[it->second].points;
    for (const auto& p : pts)
      if (p.first == f[0])
        throw ParseError(source, line_no, "duplicate offset in one curve");
    pts.emplace_back(f[0], f[2]);
  }
  if (curves.empty()) throw ParseError(source, std::max(line_no, 1), "no curve rows");
  if (!have_gain)
    throw ParseError(source, std::max(line_no, 1), "missing gain_reference_db header");
  for (auto& c : curves) {
    std::sort(c.points.begin(), c.points.end());
    c.gain_reference_db = gain;
    c.baseline = baseline;
  }
  return curves;
}

std::vector<LimitCurve> read_limit_curves_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open limit curve file " + path);
  return read_limit_curves(in, path);
}

}  // namespace gpsemc
