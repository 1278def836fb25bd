#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/harness/evaluate.hpp"
#include "solartrack/metrics.hpp"

namespace solartrack::harness {

inline constexpr std::string_view kSweepHeader = "iteration,iou,fscore_iou,af1,ota,iogt,fscore_iogt,atb";
inline constexpr std::string_view kTableHeader = "Model, IoU, F-score (IoU), AF1-Score, OTA, IoGT, F-score (IoGT), ATB";
inline constexpr std::string_view kDiagnosticsHeader =
    "sequence,frame,gt_x1,gt_y1,gt_x2,gt_y2,pred_x1,pred_y1,pred_x2,pred_y2,iou";

struct MetricColumn {
  const char* key;
  const char* title;
  double metrics::MetricReport::*field;
};

/// The seven report columns in table order.
inline constexpr std::array<MetricColumn, 7> kColumns{{
    {"iou", "IoU", &metrics::MetricReport::iou_mean},
    {"fscore_iou", "F-score (IoU)", &metrics::MetricReport::fscore_iou},
    {"af1", "AF1-Score", &metrics::MetricReport::af1},
    {"ota", "OTA", &metrics::MetricReport::ota},
    {"iogt", "IoGT", &metrics::MetricReport::iogt_mean},
    {"fscore_iogt", "F-score (IoGT)", &metrics::MetricReport::fscore_iogt},
    {"atb", "ATB", &metrics::MetricReport::atb_mean},
}};

namespace detail {
inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}
}  // namespace detail

/// `name, v1, ..., v7` with four decimals.
[[nodiscard]] inline std::string format_table_row(const std::string& model, const metrics::MetricReport& r) {
  std::string out = model;
  for (const auto& c : kColumns) out += ", " + detail::fixed(r.*c.field, 4);
  return out;
}

/// Header line plus one row per model, in the given order.
[[nodiscard]] inline std::string report_table(std::span<const std::pair<std::string, metrics::MetricReport>> rows) {
  if (rows.empty()) throw ValidationError("report_table: no rows");
  std::string out(kTableHeader);
  out += "\n";
  for (const auto& [name, r] : rows) out += format_table_row(name, r) + "\n";
  return out;
}

[[nodiscard]] inline std::string sweep_csv(std::span<const SweepRow> rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].iteration <= rows[i - 1].iteration) throw ValidationError("sweep_csv: iterations must increase");
  }
  std::string out(kSweepHeader);
  out += "\n";
  for (const auto& row : rows) {
    out += std::to_string(row.iteration);
    for (const auto& c : kColumns) out += "," + detail::fixed(row.report.*c.field, 6);
    out += "\n";
  }
  return out;
}

[[nodiscard]] inline std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  const auto ls = dataset::detail::lines(text);
  if (ls.empty() || dataset::detail::trim(ls[0]) != kSweepHeader) throw ParseError("sweep csv: bad header", 1);
  std::vector<SweepRow> out;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (dataset::detail::trim(ls[i]).empty()) continue;
    const auto f = dataset::detail::split(ls[i], ',');
    if (f.size() != 1 + kColumns.size()) throw ParseError("sweep csv: expected 8 fields", i + 1);
    SweepRow row;
    row.iteration = static_cast<long>(dataset::detail::parse_int(f[0], i + 1, "iteration"));
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      row.report.*kColumns[c].field = dataset::detail::parse_double(f[c + 1], i + 1, kColumns[c].key);
    }
    out.push_back(row);
  }
  return out;
}

/// Diagnostics keep full precision so the pooled report can be recomputed exactly.
[[nodiscard]] inline std::string diagnostics_csv(std::span<const DiagnosticRow> rows) {
  std::string out(kDiagnosticsHeader);
  out += "\n";
  using dataset::format_number;
  for (const auto& r : rows) {
    out += r.sequence + "," + std::to_string(r.frame) + "," + format_number(r.gt.x1()) + "," + format_number(r.gt.y1()) +
           "," + format_number(r.gt.x2()) + "," + format_number(r.gt.y2()) + "," + format_number(r.pred.x1()) + "," +
           format_number(r.pred.y1()) + "," + format_number(r.pred.x2()) + "," + format_number(r.pred.y2()) + "," +
           format_number(r.iou) + "\n";
  }
  return out;
}

[[nodiscard]] inline std::vector<DiagnosticRow> parse_diagnostics_csv(std::string_view text) {
  const auto ls = dataset::detail::lines(text);
  if (ls.empty() || dataset::detail::trim(ls[0]) != kDiagnosticsHeader) throw ParseError("diagnostics: bad header", 1);
  std::vector<DiagnosticRow> out;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (dataset::detail::trim(ls[i]).empty()) continue;
    const auto f = dataset::detail::split(ls[i], ',');
    if (f.size() != 11) throw ParseError("diagnostics: expected 11 fields", i + 1);
    auto d = [&](std::size_t k) { return dataset::detail::parse_double(f[k], i + 1, "diagnostics value"); };
    DiagnosticRow r;
    r.sequence = std::string(f[0]);
    r.frame = static_cast<int>(dataset::detail::parse_int(f[1], i + 1, "frame"));
    r.gt = BBox(d(2), d(3), d(4), d(5));
    r.pred = BBox(d(6), d(7), d(8), d(9));
    r.iou = d(10);
    out.push_back(r);
  }
  return out;
}

/// Single-report key=value form used to hand results to `report`.
[[nodiscard]] inline std::string format_report_kv(const std::string& model, const metrics::MetricReport& r) {
  std::string out = "model=" + model + "\n";
  for (const auto& c : kColumns) out += std::string(c.key) + "=" + dataset::format_number(r.*c.field) + "\n";
  out += "frames=" + std::to_string(r.frames_evaluated) + "\n";
  return out;
}

[[nodiscard]] inline std::pair<std::string, metrics::MetricReport> parse_report_kv(std::string_view text) {
  const auto kv = dataset::parse_key_values(text);
  auto get = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw ParseError("report: missing key '" + k + "'");
    return it->second;
  };
  metrics::MetricReport r;
  for (const auto& c : kColumns) r.*c.field = dataset::detail::parse_double(get(c.key), 0, c.key);
  r.frames_evaluated = static_cast<long>(dataset::detail::parse_int(get("frames"), 0, "frames"));
  return {get("model"), r};
}

/// Line chart of one metric over iterations.
[[nodiscard]] inline std::string svg_chart(std::span<const SweepRow> rows, const MetricColumn& column) {
  constexpr double W = 640, H = 360, L = 64, R = 16, T = 32, B = 48;
  double lo = 0.0, hi = 1.0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.report.*column.field);
    hi = std::max(hi, row.report.*column.field);
  }
  const long first = rows.empty() ? 0 : rows.front().iteration;
  const long last = rows.empty() ? 1 : std::max(rows.back().iteration, first + 1);
  auto px = [&](long it) { return L + (W - L - R) * static_cast<double>(it - first) / static_cast<double>(last - first); };
  auto py = [&](double v) { return H - B - (H - T - B) * (v - lo) / (hi - lo); };
  auto num = [](double v) { return detail::fixed(v, 2); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" viewBox=\"0 0 640 360\">\n";
  s += "<rect width=\"640\" height=\"360\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       std::string(column.title) + " per iteration</text>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" + num(W - R) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(H - B) + "\" stroke=\"black\"/>\n";
  for (double v : {lo, hi}) {
    s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(py(v) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fixed(v, 2) + "</text>\n";
  }
  for (long it : {first, last}) {
    s += "<text x=\"" + num(px(it)) + "\" y=\"" + num(H - B + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(it) + "</text>\n";
  }
  s += "<text x=\"320\" y=\"350\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration</text>\n";
  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) s += " ";
    s += num(px(rows[i].iteration)) + "," + num(py(rows[i].report.*column.field));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace solartrack::harness
