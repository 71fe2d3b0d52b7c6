#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nanoshuttle/errors.hpp"
#include "nanoshuttle/transport.hpp"

namespace nanoshuttle {

namespace {

constexpr std::string_view kHeader = "voltage_V,current_pA,annotation";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line, std::string_view what) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw InputError(fmt::format("line {}: invalid {} '{}'", line, what, field));
  }
  return value;
}

}  // namespace

void write_trace_csv(std::ostream& os, const IVTrace& trace) {
  os << kHeader << '\n';
  std::size_t next = 0;
  for (const auto& p : trace.points) {
    std::string labels;
    // Annotations are recorded in sample order against exact sample voltages.
    while (next < trace.annotations.size() && trace.annotations[next].voltage_V == p.voltage_V) {
      if (!labels.empty()) labels += ';';
      labels += to_string(trace.annotations[next].label);
      ++next;
    }
    fmt::print(os, "{:.10g},{:.10g},{}\n", p.voltage_V, p.current_pA, labels);
  }
}

IVTrace read_trace_csv(std::istream& is) {
  IVTrace trace;
  std::string raw;
  std::size_t line = 0;

  if (!std::getline(is, raw)) throw InputError("line 1: missing header");
  ++line;
  if (trim(raw) != kHeader) {
    throw InputError(fmt::format("line 1: expected header '{}'", kHeader));
  }

  while (std::getline(is, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;

    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos) {
      throw InputError(fmt::format("line {}: expected 3 comma-separated fields", line));
    }
    TracePoint p;
    p.voltage_V = parse_number(text.substr(0, c1), line, "voltage");
    p.current_pA = parse_number(text.substr(c1 + 1, c2 - c1 - 1), line, "current");
    p.drive_energy_meV = 1000.0 * std::abs(p.voltage_V);

    if (trace.points.size() >= 2) {
      const double d0 = trace.points[1].voltage_V - trace.points[0].voltage_V;
      const double d = p.voltage_V - trace.points.back().voltage_V;
      if (d == 0.0 || (d > 0.0) != (d0 > 0.0)) {
        throw InputError(fmt::format("line {}: voltages are not strictly monotone", line));
      }
    } else if (trace.points.size() == 1 && p.voltage_V == trace.points.back().voltage_V) {
      throw InputError(fmt::format("line {}: repeated voltage", line));
    }

    std::string_view labels = trim(text.substr(c2 + 1));
    while (!labels.empty()) {
      const auto sep = labels.find(';');
      const std::string_view tok = trim(labels.substr(0, sep));
      const auto label = parse_annotation_label(tok);
      if (!label) throw InputError(fmt::format("line {}: unknown annotation '{}'", line, tok));
      trace.annotations.push_back({p.voltage_V, *label});
      labels = sep == std::string_view::npos ? std::string_view{} : labels.substr(sep + 1);
    }
    trace.points.push_back(p);
  }

  auto& sw = trace.sweep;
  if (!trace.points.empty()) {
    sw.v_start = trace.points.front().voltage_V;
    sw.v_end = trace.points.back().voltage_V;
    sw.direction = sw.v_end >= sw.v_start ? SweepDirection::Up : SweepDirection::Down;
    if (trace.points.size() >= 2) {
      sw.step = std::abs(trace.points[1].voltage_V - trace.points[0].voltage_V);
    }
  }
  return trace;
}

}  // namespace nanoshuttle
