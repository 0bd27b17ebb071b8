#include "bciwall/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bciwall/errors.hpp"

namespace bciwall {

namespace {

constexpr double kDbMin = -15.0;
constexpr double kDbMax = 15.0;
constexpr double kPanelWidth = 420.0;
constexpr double kPanelLeft = 150.0;   // room for task labels
constexpr double kRowHeight = 26.0;
constexpr double kPanelTop = 46.0;
constexpr double kPanelGap = 40.0;

struct Marker {
  double db = 0.0;
  bool clipped_low = false;
  bool clipped_high = false;
};

Marker clamp_db(double db) {
  Marker m;
  if (std::isnan(db)) db = kDbMin;  // undefined values pinned to the left edge
  m.clipped_low = db < kDbMin;
  m.clipped_high = db > kDbMax;
  m.db = std::clamp(db, kDbMin, kDbMax);
  return m;
}

double x_of(double db) {
  return kPanelLeft + (db - kDbMin) / (kDbMax - kDbMin) * kPanelWidth;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void render_chart(const std::vector<TaskSummary>& summaries,
                  const std::filesystem::path& path) {
  if (summaries.empty()) throw ConfigError("render_chart: nothing to draw");

  std::map<Scenario, std::vector<const TaskSummary*>> panels;
  std::set<std::string> task_names;
  for (const auto& s : summaries) {
    panels[s.scenario].push_back(&s);
    task_names.insert(s.task);
  }
  const double panel_height = kPanelTop + static_cast<double>(task_names.size()) * kRowHeight;
  const double total_width = kPanelLeft + kPanelWidth + 40.0;
  const double total_height =
      static_cast<double>(panels.size()) * (panel_height + kPanelGap) + 40.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_width
      << "\" height=\"" << total_height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  double y_offset = 20.0;
  for (const auto& [scenario, rows] : panels) {
    svg << "<g transform=\"translate(0," << y_offset << ")\">\n";
    svg << "<text x=\"" << kPanelLeft << "\" y=\"14\" font-weight=\"bold\">scenario "
        << to_string(scenario) << "</text>\n";

    // dB axis with gridlines every 5 dB
    const double axis_y = kPanelTop - 12.0;
    for (double db = kDbMin; db <= kDbMax + 1e-9; db += 5.0) {
      const double x = x_of(db);
      svg << "<line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x << "\" y2=\""
          << kPanelTop + static_cast<double>(rows.size()) * kRowHeight
          << "\" stroke=\"#dddddd\"/>\n";
      svg << "<text x=\"" << x << "\" y=\"" << axis_y - 4.0
          << "\" text-anchor=\"middle\" fill=\"#555555\">" << db << "</text>\n";
    }

    double y = kPanelTop + kRowHeight / 2.0;
    for (const TaskSummary* row : rows) {
      svg << "<text x=\"" << kPanelLeft - 10.0 << "\" y=\"" << y + 4.0
          << "\" text-anchor=\"end\">" << escape(row->task) << "</text>\n";

      const Marker wall = clamp_db(row->mean_wall_db);
      const Marker snr = clamp_db(row->mean_snr_db);

      // connecting line makes the margin visible
      svg << "<line x1=\"" << x_of(wall.db) << "\" y1=\"" << y << "\" x2=\"" << x_of(snr.db)
          << "\" y2=\"" << y << "\" stroke=\"#bbbbbb\"/>\n";

      // wall: open diamond
      svg << "<rect x=\"-5\" y=\"-5\" width=\"10\" height=\"10\" fill=\"white\" "
             "stroke=\"#d62728\" stroke-width=\"1.5\" transform=\"translate("
          << x_of(wall.db) << "," << y << ") rotate(45)\"/>\n";
      // snr: filled circle
      svg << "<circle cx=\"" << x_of(snr.db) << "\" cy=\"" << y
          << "\" r=\"5\" fill=\"#1f77b4\"/>\n";

      for (const Marker& m : {wall, snr}) {
        if (m.clipped_low) {
          svg << "<text x=\"" << x_of(kDbMin) - 14.0 << "\" y=\"" << y + 4.0
              << "\" fill=\"#d62728\">&#8592;</text>\n";
        }
        if (m.clipped_high) {
          svg << "<text x=\"" << x_of(kDbMax) + 4.0 << "\" y=\"" << y + 4.0
              << "\" fill=\"#d62728\">&#8594;</text>\n";
        }
      }
      y += kRowHeight;
    }
    svg << "</g>\n";
    y_offset += panel_height + kPanelGap;
  }

  svg << "<text x=\"" << kPanelLeft << "\" y=\"" << total_height - 10.0
      << "\" fill=\"#555555\">filled circle: mean SNR (dB), open diamond: mean SNR-wall "
         "(dB)</text>\n";
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << svg.str();
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace bciwall
