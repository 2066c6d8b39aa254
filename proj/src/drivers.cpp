#include "cdice/drivers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cdice/errors.hpp"

#ifndef CDICE_SOURCE_DATA_DIR
#define CDICE_SOURCE_DATA_DIR "data"
#endif

namespace cdice::drivers {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view text, const std::string& where) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError(where + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

double interp(const std::vector<int>& x, const std::vector<double>& y, double at,
              const std::string& name) {
  if (x.empty()) throw ValidationError(name + ": empty series");
  if (at < x.front() || at > x.back()) {
    throw ValidationError(name + ": year " + format_number(at) + " outside " +
                          std::to_string(x.front()) + "-" + std::to_string(x.back()));
  }
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.end()) return y.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double x0 = x[i - 1];
  const double x1 = x[i];
  const double w = (at - x0) / (x1 - x0);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

}  // namespace

std::string_view unit_name(Unit u) {
  switch (u) {
    case Unit::GtCPerYear: return "GtC/yr";
    case Unit::Ppm: return "ppm";
    case Unit::Kelvin: return "K";
    case Unit::Fraction: return "fraction";
  }
  return "?";
}

Unit parse_unit(std::string_view text) {
  for (Unit u : {Unit::GtCPerYear, Unit::Ppm, Unit::Kelvin, Unit::Fraction}) {
    if (unit_name(u) == text) return u;
  }
  throw ValidationError("unknown unit '" + std::string(text) + "'");
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return {buf, ptr};
}

double BenchmarkSeries::at(double year) const { return interp(years, values, year, name); }

double BenchmarkSeries::lower_at(double year) const {
  if (!envelope) throw ValidationError(name + ": series has no envelope");
  return interp(years, envelope->lower, year, name);
}

double BenchmarkSeries::upper_at(double year) const {
  if (!envelope) throw ValidationError(name + ": series has no envelope");
  return interp(years, envelope->upper, year, name);
}

BenchmarkSeries BenchmarkSeries::annual() const {
  validate();
  BenchmarkSeries out;
  out.name = name;
  out.unit = unit;
  out.notes = notes;
  if (envelope) out.envelope.emplace();
  for (int y = first_year(); y <= last_year(); ++y) {
    out.years.push_back(y);
    out.values.push_back(at(y));
    if (envelope) {
      out.envelope->lower.push_back(lower_at(y));
      out.envelope->upper.push_back(upper_at(y));
    }
  }
  return out;
}

void BenchmarkSeries::validate() const {
  if (years.empty()) throw ValidationError(name + ": empty series");
  if (values.size() != years.size()) throw ValidationError(name + ": ragged series");
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] <= years[i - 1]) throw ValidationError(name + ": years not strictly increasing");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError(name + ": non-finite value");
  }
  if (envelope) {
    if (envelope->lower.size() != years.size() || envelope->upper.size() != years.size()) {
      throw ValidationError(name + ": ragged envelope");
    }
    for (std::size_t i = 0; i < years.size(); ++i) {
      if (envelope->lower[i] > envelope->upper[i]) {
        throw ValidationError(name + ": envelope lower bound above upper bound at " +
                              std::to_string(years[i]));
      }
    }
  }
}

BenchmarkSeries parse_series(std::istream& in, Unit expected, std::string name) {
  BenchmarkSeries s;
  s.name = std::move(name);
  std::optional<Unit> unit;
  bool header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = s.name + ":" + std::to_string(lineno);
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = trim(t.substr(1));
      if (body.rfind("unit:", 0) == 0) {
        unit = parse_unit(trim(body.substr(5)));
      } else {
        s.notes.emplace_back(line);
      }
      continue;
    }
    const auto cols = split(t, ',');
    if (!header) {
      if (cols.size() == 2 && cols[0] == "year" && cols[1] == "value") {
        header = true;
      } else if (cols.size() == 4 && cols[0] == "year" && cols[1] == "value" &&
                 cols[2] == "lower" && cols[3] == "upper") {
        header = true;
        s.envelope.emplace();
      } else {
        throw ValidationError(where + ": expected header 'year,value[,lower,upper]'");
      }
      continue;
    }
    const std::size_t want = s.envelope ? 4 : 2;
    if (cols.size() != want) throw ValidationError(where + ": malformed row");
    s.years.push_back(parse_number<int>(cols[0], where));
    s.values.push_back(parse_number<double>(cols[1], where));
    if (s.envelope) {
      s.envelope->lower.push_back(parse_number<double>(cols[2], where));
      s.envelope->upper.push_back(parse_number<double>(cols[3], where));
    }
  }
  if (!header) throw ValidationError(s.name + ": missing header");
  if (!unit) throw ValidationError(s.name + ": missing '# unit:' line");
  if (*unit != expected) {
    throw ValidationError(s.name + ": unit " + std::string(unit_name(*unit)) + ", expected " +
                          std::string(unit_name(expected)));
  }
  s.unit = *unit;
  s.validate();
  return s;
}

BenchmarkSeries load_series(const std::filesystem::path& path, Unit expected) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_series(in, expected, path.string());
}

void write_series(std::ostream& out, const BenchmarkSeries& s) {
  s.validate();
  for (const auto& n : s.notes) out << n << '\n';
  out << "# unit: " << unit_name(s.unit) << '\n';
  out << (s.envelope ? "year,value,lower,upper\n" : "year,value\n");
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.years[i] << ',' << format_number(s.values[i]);
    if (s.envelope) {
      out << ',' << format_number(s.envelope->lower[i]) << ','
          << format_number(s.envelope->upper[i]);
    }
    out << '\n';
  }
}

double concentration_to_mass(double ppm) { return ppm * climate::kMassPerPpm; }

double mass_to_concentration(double mass) { return mass / climate::kMassPerPpm; }

std::vector<double> co2_forcing_series(const std::vector<double>& ppm, double base_ppm, double f2x) {
  if (!(base_ppm > 0.0)) throw ValidationError("forcing: base concentration must be positive");
  std::vector<double> out;
  out.reserve(ppm.size());
  for (double c : ppm) {
    if (!(c > 0.0)) throw ValidationError("forcing: concentration must be positive");
    out.push_back(f2x * std::log2(c / base_ppm));
  }
  return out;
}

climate::TempParams geoffroy_params(std::string_view model) {
  if (model == "MMM") return {0.137, 0.73, 0.00689, 3.45, 3.25};
  if (model == "HadGEM2-ES") return {0.154, 0.55, 0.00671, 2.95, 4.55};
  if (model == "GISS-E2-R") return {0.213, 1.16, 0.00921, 3.65, 2.15};
  throw ValidationError("unknown CMIP5 model '" + std::string(model) + "'");
}

climate::TempParams load_geoffroy_params(const std::filesystem::path& data_dir,
                                         std::string_view model) {
  const auto path = data_dir / "geoffroy" / "params.csv";
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = split(t, ',');
    if (!header) {
      if (cols.size() != 6 || cols[0] != "model") {
        throw ValidationError(path.string() + ": expected header model,c1,c3,c4,ecs,f2x");
      }
      header = true;
      continue;
    }
    if (cols.size() != 6) throw ValidationError(path.string() + ": malformed row");
    if (cols[0] != model) continue;
    climate::TempParams p;
    p.c1 = parse_number<double>(cols[1], path.string());
    p.c3 = parse_number<double>(cols[2], path.string());
    p.c4 = parse_number<double>(cols[3], path.string());
    p.t2xco2 = parse_number<double>(cols[4], path.string());
    p.f2xco2 = parse_number<double>(cols[5], path.string());
    p.validate();
    return p;
  }
  throw ValidationError("unknown CMIP5 model '" + std::string(model) + "'");
}

std::string_view rcp_name(Rcp id) {
  switch (id) {
    case Rcp::RCP26: return "RCP26";
    case Rcp::RCP45: return "RCP45";
    case Rcp::RCP60: return "RCP60";
    case Rcp::RCP85: return "RCP85";
    case Rcp::Historical: return "historical";
  }
  return "?";
}

Rcp parse_rcp(std::string_view text) {
  for (Rcp r : {Rcp::RCP26, Rcp::RCP45, Rcp::RCP60, Rcp::RCP85, Rcp::Historical}) {
    if (rcp_name(r) == text) return r;
  }
  throw ValidationError("unknown scenario '" + std::string(text) + "'");
}

const std::vector<Rcp>& future_rcps() {
  static const std::vector<Rcp> all = {Rcp::RCP26, Rcp::RCP45, Rcp::RCP60, Rcp::RCP85};
  return all;
}

void ScenarioInputs::validate() const {
  emissions.validate();
  concentrations.validate();
  if (emissions.years != concentrations.years) {
    throw ValidationError("scenario: emissions and concentrations are not aligned");
  }
  for (std::size_t i = 1; i < emissions.years.size(); ++i) {
    if (emissions.years[i] != emissions.years[i - 1] + 1) {
      throw ValidationError("scenario: gap in the annual record");
    }
  }
  if (emissions.first_year() > 1850) throw ValidationError("scenario: record starts after 1850");
  const int end = id == Rcp::Historical ? 2005 : 2100;
  if (emissions.last_year() < end) {
    throw ValidationError("scenario: record ends before " + std::to_string(end));
  }
  if (co2_forcing.size() != concentrations.size()) {
    throw ValidationError("scenario: forcing not aligned with concentrations");
  }
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("CDICE_DATA_DIR"); env && *env) return env;
  return CDICE_SOURCE_DATA_DIR;
}

namespace {

std::string lower_name(Rcp id) {
  std::string s(rcp_name(id));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Historical record up to its last year, then the extension.
BenchmarkSeries splice(const BenchmarkSeries& hist, const BenchmarkSeries& ext) {
  BenchmarkSeries out;
  out.name = ext.name;
  out.unit = hist.unit;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    out.years.push_back(hist.years[i]);
    out.values.push_back(hist.values[i]);
  }
  for (std::size_t i = 0; i < ext.size(); ++i) {
    if (ext.years[i] <= hist.last_year()) continue;
    out.years.push_back(ext.years[i]);
    out.values.push_back(ext.values[i]);
  }
  out.validate();
  return out;
}

}  // namespace

ScenarioInputs load_scenario(const std::filesystem::path& data_dir, Rcp id) {
  const auto rcp_dir = data_dir / "rcp";
  auto e = load_series(rcp_dir / "historical_emissions.csv", Unit::GtCPerYear);
  auto c = load_series(rcp_dir / "historical_concentrations.csv", Unit::Ppm);
  if (id != Rcp::Historical) {
    const auto stem = lower_name(id);
    e = splice(e, load_series(rcp_dir / (stem + "_emissions.csv"), Unit::GtCPerYear));
    c = splice(c, load_series(rcp_dir / (stem + "_concentrations.csv"), Unit::Ppm));
  }
  ScenarioInputs s;
  s.id = id;
  s.emissions = e.annual();
  s.concentrations = c.annual();
  s.co2_forcing = co2_forcing_series(s.concentrations.values, kPreindustrialPpm, kCmipF2x);
  s.validate();
  return s;
}

BenchmarkSeries load_cmip5_temperature(const std::filesystem::path& data_dir, Rcp id) {
  if (id == Rcp::Historical) throw ValidationError("CMIP5 temperature is stored per RCP");
  auto s = load_series(data_dir / "cmip5" / (lower_name(id) + "_temperature.csv"), Unit::Kelvin);
  if (!s.envelope) throw ValidationError(s.name + ": temperature fixture needs lower/upper bounds");
  return s;
}

BenchmarkSeries load_joos_envelope(const std::filesystem::path& data_dir) {
  auto s = load_series(data_dir / "joos" / "pulse_fraction.csv", Unit::Fraction);
  if (!s.envelope) throw ValidationError(s.name + ": pulse fixture needs lower/upper bounds");
  return s;
}

}  // namespace cdice::drivers
