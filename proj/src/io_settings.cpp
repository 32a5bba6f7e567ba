#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dfs/io.hpp"

namespace dfs::io {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("settings: bad number for " + key + ": '" + v + "'");
}

}  // namespace

SettingsFile read_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("settings: cannot open " + path);
  SettingsFile s;
  bool have_f = false, have_n = false, have_p = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("settings: expected key = value at " + path + ":" +
                               std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "focal_length") {
      s.focal_length_m = parse_number(val, key);
      have_f = true;
    } else if (key == "f_number") {
      s.f_number = parse_number(val, key);
      have_n = true;
    } else if (key == "pixel_pitch_m") {
      s.pixel_pitch_m = parse_number(val, key);
      have_p = true;
    } else if (key == "focus_distances") {
      s.focus_distances_m.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ','))
        s.focus_distances_m.push_back(parse_number(trim(item), key));
    } else {
      throw std::runtime_error("settings: unknown key '" + key + "' in " + path);
    }
  }
  if (!have_f || !have_n || !have_p)
    throw std::runtime_error("settings: " + path +
                             " must define focal_length, f_number, pixel_pitch_m");
  if (s.focus_distances_m.empty())
    throw std::runtime_error("settings: " + path + " must define focus_distances");
  if (!(s.focal_length_m > 0) || !(s.f_number > 0) || !(s.pixel_pitch_m > 0))
    throw std::runtime_error("settings: values must be positive in " + path);
  for (double d : s.focus_distances_m)
    if (!(d > s.focal_length_m))
      throw std::runtime_error("settings: focus distances must exceed the focal length in " + path);
  return s;
}

void write_settings(const std::string& path, const SettingsFile& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("settings: cannot write " + path);
  out.precision(17);
  out << "focal_length = " << s.focal_length_m << "\n"
      << "f_number = " << s.f_number << "\n"
      << "pixel_pitch_m = " << s.pixel_pitch_m << "\n"
      << "focus_distances = ";
  for (size_t i = 0; i < s.focus_distances_m.size(); ++i)
    out << (i ? ", " : "") << s.focus_distances_m[i];
  out << "\n";
  if (!out) throw std::runtime_error("settings: write failed for " + path);
}

}  // namespace dfs::io
