#include "gpsemc/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gpsemc/errors.hpp"
#include "gpsemc/rng.hpp"

namespace gpsemc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& source, int line_no,
                    const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
      ++used;
    if (used != field.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ParseError(source, line_no, std::string("bad ") + what + " '" + trim(field) + "'");
  }
}

}  // namespace

SpectrumCapture parse_capture(std::istream& is, const std::string& source) {
  SpectrumCapture cap;
  bool have_unit = false, have_rbw = false;
  std::string line;
  int line_no = 0;
  std::string metadata;

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty()) continue;

    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      const auto colon = body.find(':');
      const std::string key = colon == std::string::npos ? "" : trim(body.substr(0, colon));
      const std::string val = colon == std::string::npos ? "" : trim(body.substr(colon + 1));
      if (key == "unit") {
        if (val == "dBm")
          cap.unit = SpectrumCapture::Unit::dbm;
        else if (val == "dBm/Hz")
          cap.unit = SpectrumCapture::Unit::dbm_per_hz;
        else
          throw ParseError(source, line_no, "unknown unit '" + val + "' (want dBm or dBm/Hz)");
        have_unit = true;
      } else if (key == "rbw_hz") {
        cap.rbw_hz = parse_double(val, source, line_no, "rbw_hz");
        if (!(cap.rbw_hz > 0.0)) throw ParseError(source, line_no, "rbw_hz must be positive");
        have_rbw = true;
      } else if (key == "correction_db") {
        const double c = parse_double(val, source, line_no, "correction_db");
        if (!std::isfinite(c)) throw ParseError(source, line_no, "correction_db must be finite");
        cap.corrections_db.push_back(c);
      } else {
        if (!metadata.empty()) metadata += "; ";
        metadata += body;
      }
      continue;
    }

    if (!have_unit) throw ParseError(source, line_no, "data row before '# unit:' header");
    if (!have_rbw) throw ParseError(source, line_no, "data row before '# rbw_hz:' header");
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw ParseError(source, line_no, "expected 'frequency_hz,level'");
    SpectrumCapture::Point p;
    p.frequency_hz = parse_double(t.substr(0, comma), source, line_no, "frequency");
    p.level = parse_double(t.substr(comma + 1), source, line_no, "level");
    if (!std::isfinite(p.frequency_hz) || p.frequency_hz <= 0.0)
      throw ParseError(source, line_no, "frequency must be finite and positive");
    if (!std::isfinite(p.level)) throw ParseError(source, line_no, "non-finite level");
    if (!cap.points.empty()) {
      if (p.frequency_hz == cap.points.back().frequency_hz)
        throw ParseError(source, line_no, "duplicate frequency");
      if (p.frequency_hz < cap.points.back().frequency_hz)
        throw ParseError(source, line_no, "frequencies must be strictly increasing");
    }
    cap.points.push_back(p);
  }

  if (!have_unit) throw ParseError(source, std::max(line_no, 1), "missing '# unit:' header");
  if (!have_rbw) throw ParseError(source, std::max(line_no, 1), "missing '# rbw_hz:' header");
  if (cap.points.empty()) throw ParseError(source, std::max(line_no, 1), "no data rows");
  cap.metadata = metadata;
  return cap;
}

SpectrumCapture parse_capture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open capture file " + path);
  return parse_capture(in, path);
}

void write_capture(std::ostream& os, const SpectrumCapture& cap) {
  os << "# unit: " << (cap.unit == SpectrumCapture::Unit::dbm ? "dBm" : "dBm/Hz") << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", cap.rbw_hz);
  os << "# rbw_hz: " << buf << "\n";
  for (double c : cap.corrections_db) {
    std::snprintf(buf, sizeof buf, "%.10g", c);
    os << "# correction_db: " << buf << "\n";
  }
  if (!cap.metadata.empty()) os << "# " << cap.metadata << "\n";
  for (const auto& p : cap.points) {
    char row[80];
    std::snprintf(row, sizeof row, "%.10f,%.10g\n", p.frequency_hz, p.level);
    os << row;
  }
}

NoiseSpectrum to_noise_spectrum(const SpectrumCapture& cap, const IngestOptions& opt,
                                std::vector<std::string>* warnings) {
  const double corr = std::accumulate(cap.corrections_db.begin(), cap.corrections_db.end(),
                                      0.0) +
                      std::accumulate(opt.extra_corrections_db.begin(),
                                      opt.extra_corrections_db.end(), 0.0);

  struct Raw {
    double offset;
    double power_w;
  };
  std::vector<Raw> raw;
  const std::size_t n = cap.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double off = cap.points[i].frequency_hz - opt.carrier_hz;
    if (std::abs(off) > opt.band_half_hz) continue;
    double p_dbm = cap.points[i].level + corr;
    if (cap.unit == SpectrumCapture::Unit::dbm_per_hz) {
      // Width this sample stands for: half the gap to each retained-or-not
      // neighbour, one rbw when it has none.
      double width;
      if (n == 1)
        width = cap.rbw_hz;
      else if (i == 0)
        width = cap.points[1].frequency_hz - cap.points[0].frequency_hz;
      else if (i + 1 == n)
        width = cap.points[i].frequency_hz - cap.points[i - 1].frequency_hz;
      else
        width = 0.5 * (cap.points[i + 1].frequency_hz - cap.points[i - 1].frequency_hz);
      p_dbm += 10.0 * std::log10(width);
    }
    raw.push_back({off, dbm_to_watts(p_dbm)});
  }
  if (raw.empty())
    throw ConfigError("capture does not overlap the analysis band around the carrier");

  std::vector<Tone> tones;
  if (cap.unit == SpectrumCapture::Unit::dbm) {
    tones.reserve(raw.size());
    for (const auto& r : raw) tones.push_back({r.offset, r.power_w, 0.0});
  } else {
    // Pool density samples into rbw-wide bins anchored at the first retained
    // sample; one tone per bin at the power centroid.
    const double base = raw.front().offset;
    std::size_t i = 0;
    while (i < raw.size()) {
      const auto bin = static_cast<long>(std::floor((raw[i].offset - base) / cap.rbw_hz));
      double p = 0.0, centroid = 0.0;
      std::size_t j = i;
      for (; j < raw.size() &&
             static_cast<long>(std::floor((raw[j].offset - base) / cap.rbw_hz)) == bin;
           ++j) {
        p += raw[j].power_w;
        centroid += raw[j].power_w * raw[j].offset;
      }
      const double offset = p > 0.0 ? centroid / p : 0.5 * (raw[i].offset + raw[j - 1].offset);
      tones.push_back({offset, p, 0.0});
      i = j;
    }
  }

  // Noise floor: keep everything within floor_db of the strongest tone.
  double max_p = 0.0;
  for (const auto& t : tones) max_p = std::max(max_p, t.power_w);
  const double cut = max_p * db_to_linear(-opt.floor_db);
  std::vector<Tone> kept;
  kept.reserve(tones.size());
  for (const auto& t : tones)
    if (t.power_w >= cut) kept.push_back(t);
  if (kept.size() != tones.size() && warnings)
    warnings->push_back(std::to_string(tones.size() - kept.size()) +
                        " points dropped below the " + std::to_string(opt.floor_db) +
                        " dB floor");
  if (kept.empty())
    throw ConfigError("all capture points fell below the power floor");

  if (opt.phases == PhasePolicy::random) {
    auto eng = make_engine(derive_seed(opt.seed, 0x696e67ULL));
    std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
    for (auto& t : kept) t.phase_rad = u(eng);
  }
  return make_noise_spectrum(std::move(kept), "capture");
}

}  // namespace gpsemc
