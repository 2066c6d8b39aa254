#include "cdice/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "cdice/drivers.hpp"
#include "cdice/errors.hpp"

namespace cdice {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ValidationError("config: bad number for '" + key + "': " + text);
  return v;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return true;
  }
  return false;
}

}  // namespace

void RunConfig::validate() const {
  if (preset.empty()) throw ValidationError("config: empty preset");
  if (dt < 0) throw ValidationError("config: dt must be >= 0");
  if (horizon < 0) throw ValidationError("config: horizon must be >= 0");
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("config: rho must lie in [0, 1)");
  if (!one_of(damage, {"nordhaus", "howard-sterner"})) throw ValidationError("config: unknown damage '" + damage + "'");
  if (!one_of(fex, {"default", "none", "proportional", "linear"})) throw ValidationError("config: unknown fex '" + fex + "'");
  if (!one_of(format, {"csv", "svg", "both"})) throw ValidationError("config: unknown format '" + format + "'");
  if (!one_of(execution, {"serial", "parallel"})) throw ValidationError("config: unknown execution '" + execution + "'");
  if (out_dir.empty()) throw ValidationError("config: empty out_dir");
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config: line " + std::to_string(lineno) + " has no '='");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ValidationError("config: line " + std::to_string(lineno) + " has an empty key");
    out[std::move(key)] = std::move(value);
  }
  return out;
}

void apply_values(RunConfig& cfg, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "preset") cfg.preset = value;
    else if (key == "dt") cfg.dt = parse_number<int>(key, value);
    else if (key == "horizon") cfg.horizon = parse_number<int>(key, value);
    else if (key == "rho") cfg.rho = parse_number<double>(key, value);
    else if (key == "damage") cfg.damage = value;
    else if (key == "fex") cfg.fex = value;
    else if (key == "data_dir") cfg.data_dir = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "format") cfg.format = value;
    else if (key == "execution") cfg.execution = value;
    else throw ValidationError("config: unknown key '" + key + "'");
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  RunConfig cfg;
  apply_values(cfg, parse_key_values(in));
  cfg.validate();
  return cfg;
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  out << "# cdice run configuration\n";
  out << "preset = " << cfg.preset << '\n';
  out << "dt = " << cfg.dt << '\n';
  out << "horizon = " << cfg.horizon << '\n';
  out << "rho = " << drivers::format_number(cfg.rho) << '\n';
  out << "damage = " << cfg.damage << '\n';
  out << "fex = " << cfg.fex << '\n';
  out << "data_dir = " << cfg.data_dir << '\n';
  out << "out_dir = " << cfg.out_dir << '\n';
  out << "format = " << cfg.format << '\n';
  out << "execution = " << cfg.execution << '\n';
}

}  // namespace cdice
