#pragma once

// Deterministic writers. Every double is printed as %.16e (17 significant
// digits); non-finite values become empty CSV cells and JSON nulls.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "partialwave_cli/config.hpp"

namespace pwcli {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v == 0.0 ? 0.0 : v);  // folds -0 into 0
  return buf;
}

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;                  // file stem
  std::vector<std::string> comments;  // "# " lines above the header
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::size_t> plot;     // columns drawn against column 0 in the SVG
};

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

namespace detail {

inline void emit(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += inner + Json(it.key()).dump() + ": ";
        emit(it.value(), indent + 1, out);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += inner;
        emit(j[i], indent + 1, out);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const auto s = format_double(j.get<double>());
      out += s.empty() ? "null" : s;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string to_json_text(const Json& j) {
  std::string out;
  detail::emit(j, 0, out);
  return out + "\n";
}

namespace detail {

inline std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-300 ? 0.0 : v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace detail

/// Polyline plot of the table's `plot` columns against column 0, linear axes.
inline std::string to_svg(const Table& t) {
  const double width = 720.0;
  const double height = 440.0;
  const double left = 90.0;
  const double right = 20.0;
  const double top = 30.0;
  const double bottom = 60.0;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  const auto value = [](const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (const auto& row : t.rows) {
    const double x = value(row[0]);
    if (!std::isfinite(x)) continue;
    for (std::size_t c : t.plot) {
      const double y = value(row[c]);
      if (!std::isfinite(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\" font-family=\"sans-serif\">"
    << detail::xml_escape(t.name) << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    const double px = sx(fx);
    const double py = sy(fy);
    s << "<line x1=\"" << detail::svg_number(px) << "\" y1=\"" << top + ph << "\" x2=\"" << detail::svg_number(px)
      << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << detail::svg_number(px) << "\" y=\"" << top + ph + 18
      << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\">" << detail::tick_label(fx)
      << "</text>\n";
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::svg_number(py) << "\" x2=\"" << left << "\" y2=\""
      << detail::svg_number(py) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << detail::svg_number(py + 3)
      << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">" << detail::tick_label(fy)
      << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
    << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">"
    << detail::xml_escape(t.columns.empty() ? "" : t.columns[0]) << "</text>\n";
  for (std::size_t k = 0; k < t.plot.size(); ++k) {
    const std::size_t c = t.plot[k];
    const char* color = colors[k % 6];
    std::string pts;
    for (const auto& row : t.rows) {
      const double x = value(row[0]);
      const double y = value(row[c]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      pts += detail::svg_number(sx(x)) + "," + detail::svg_number(sy(y)) + " ";
    }
    if (!pts.empty()) pts.pop_back();
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    s << "<text x=\"" << left + pw - 5 << "\" y=\"" << top + 15 + 14 * k
      << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\" fill=\"" << color << "\">"
      << detail::xml_escape(t.columns[c]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

/// Files produced by one command, written only after every computation succeeded.
struct Outputs {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, Json>> documents;  // file stem, content
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

inline bool has_format(const std::vector<std::string>& formats, const std::string& f) {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

/// Writes tables as CSV/SVG and documents as JSON per `formats`; returns the file names.
inline std::vector<std::string> write_outputs(const Outputs& o, const std::filesystem::path& dir,
                                              const std::vector<std::string>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::string> files;
  for (const auto& t : o.tables) {
    if (has_format(formats, "csv")) {
      write_file(dir / (t.name + ".csv"), to_csv(t));
      files.push_back(t.name + ".csv");
    }
    if (has_format(formats, "svg") && !t.plot.empty()) {
      write_file(dir / (t.name + ".svg"), to_svg(t));
      files.push_back(t.name + ".svg");
    }
  }
  if (has_format(formats, "json")) {
    for (const auto& [stem, doc] : o.documents) {
      write_file(dir / (stem + ".json"), to_json_text(doc));
      files.push_back(stem + ".json");
    }
  }
  return files;
}

}  // namespace pwcli
