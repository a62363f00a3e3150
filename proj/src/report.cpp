#include <charconv>
#include <sstream>

#include <json.hpp>

#include "surfup/error.hpp"
#include "surfup/metrics.hpp"

namespace surfup {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr std::string_view kUniformityPrefix = "uniformity.";

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("bad number '" + std::string(s) + "' in metrics report", line,
                     ParseError::Unit::line);
  return v;
}

void assign(MetricsReport& r, std::string_view key, double v, std::size_t line) {
  if (key == "cd_l2")
    r.cd_l2 = v;
  else if (key == "cd_l1")
    r.cd_l1 = v;
  else if (key == "emd")
    r.emd = v;
  else if (key == "p2f_mean")
    r.p2f_mean = v;
  else if (key == "p2f_max")
    r.p2f_max = v;
  else if (key.starts_with(kUniformityPrefix))
    r.uniformity[parse_double(key.substr(kUniformityPrefix.size()), line)] = v;
  else
    throw ParseError("unknown metrics key '" + std::string(key) + "'", line,
                     ParseError::Unit::line);
}

template <class Emit>
void for_each_field(const MetricsReport& r, Emit&& emit) {
  emit("cd_l2", r.cd_l2);
  emit("cd_l1", r.cd_l1);
  if (r.emd)
    emit("emd", *r.emd);
  if (r.p2f_mean)
    emit("p2f_mean", *r.p2f_mean);
  if (r.p2f_max)
    emit("p2f_max", *r.p2f_max);
  for (const auto& [fraction, score] : r.uniformity)
    emit(std::string(kUniformityPrefix) + format_double(fraction), score);
}

} // namespace

std::string to_text(const MetricsReport& r) {
  std::string out;
  for_each_field(r, [&](const std::string& key, double v) {
    out += key + "=" + format_double(v) + "\n";
  });
  return out;
}

MetricsReport report_from_text(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line[0] == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value", no, ParseError::Unit::line);
    assign(r, std::string_view(line).substr(0, eq),
           parse_double(std::string_view(line).substr(eq + 1), no), no);
  }
  return r;
}

std::string to_json(const MetricsReport& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for_each_field(r, [&](const std::string& key, double v) { j[key] = v; });
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("metrics JSON: ") + e.what(), e.byte, ParseError::Unit::byte);
  }
  MetricsReport r;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number())
      throw ParseError("metrics JSON value for '" + key + "' is not a number", 0,
                       ParseError::Unit::byte);
    assign(r, key, value.get<double>(), 0);
  }
  return r;
}

} // namespace surfup
