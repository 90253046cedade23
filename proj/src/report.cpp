#include "pathways/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pathways::report {

using nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::string opt_year(const std::optional<int>& y) { return y ? std::to_string(*y) : "null"; }

const char* status_name(opt::PathwayOutcome::Status s) {
  switch (s) {
    case opt::PathwayOutcome::Status::feasible:
      return "feasible";
    case opt::PathwayOutcome::Status::infeasible:
      return "infeasible";
    default:
      return "error";
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string outcome_jsonl(const opt::PathwayOutcome& o) {
  std::ostringstream out;
  out << "{\"scenario_id\":" << o.scenario_id << ",\"mode\":\"" << opt::to_string(o.mode)
      << "\",\"policy\":\"" << o.policy << "\",\"status\":\"" << status_name(o.status) << "\"";
  out << ",\"fail_year\":" << opt_year(o.fail_year);
  if (o.status == opt::PathwayOutcome::Status::feasible) {
    out << ",\"total_cost\":" << num(o.total_cost);
    out << ",\"cost_normalized\":" << num(o.cost_normalized);
    out << ",\"emissions_per_year\":{";
    bool first = true;
    for (const auto& [y, e] : o.emissions_per_year) {
      out << (first ? "" : ",") << "\"" << y << "\":" << num(e);
      first = false;
    }
    out << "},\"capacities\":{";
    first = true;
    for (const auto& [tech, per_year] : o.capacities) {
      out << (first ? "" : ",") << "\"" << tech << "\":{";
      bool f2 = true;
      for (const auto& [y, v] : per_year) {
        out << (f2 ? "" : ",") << "\"" << y << "\":" << num(v);
        f2 = false;
      }
      out << "}";
      first = false;
    }
    out << "},\"resource_use\":{";
    first = true;
    for (const auto& [res, per_year] : o.resource_use) {
      out << (first ? "" : ",") << "\"" << res << "\":{";
      bool f2 = true;
      for (const auto& [y, v] : per_year) {
        out << (f2 ? "" : ",") << "\"" << y << "\":" << num(v);
        f2 = false;
      }
      out << "}";
      first = false;
    }
    out << "}";
  }
  if (!o.message.empty()) out << ",\"message\":\"" << escape(o.message) << "\"";
  out << "}";
  return out.str();
}

opt::PathwayOutcome parse_outcome_jsonl(const std::string& line) {
  const ordered_json j = ordered_json::parse(line);
  opt::PathwayOutcome o;
  o.scenario_id = j.at("scenario_id").get<std::int64_t>();
  o.mode = j.at("mode").get<std::string>() == "myopic" ? opt::Mode::myopic : opt::Mode::perfect;
  o.policy = j.at("policy").get<std::string>();
  const std::string st = j.at("status").get<std::string>();
  o.status = st == "feasible"     ? opt::PathwayOutcome::Status::feasible
             : st == "infeasible" ? opt::PathwayOutcome::Status::infeasible
                                  : opt::PathwayOutcome::Status::error;
  if (!j.at("fail_year").is_null()) o.fail_year = j.at("fail_year").get<int>();
  if (o.status == opt::PathwayOutcome::Status::feasible) {
    o.total_cost = j.at("total_cost").get<double>();
    o.cost_normalized = j.at("cost_normalized").get<double>();
    for (const auto& [k, v] : j.at("emissions_per_year").items()) {
      o.emissions_per_year[std::stoi(k)] = v.get<double>();
    }
    for (const auto& [tech, per_year] : j.at("capacities").items()) {
      for (const auto& [k, v] : per_year.items()) o.capacities[tech][std::stoi(k)] = v.get<double>();
    }
    for (const auto& [res, per_year] : j.at("resource_use").items()) {
      for (const auto& [k, v] : per_year.items()) {
        o.resource_use[res][std::stoi(k)] = v.get<double>();
      }
    }
  }
  if (j.contains("message")) o.message = j.at("message").get<std::string>();
  return o;
}

std::vector<opt::PathwayOutcome> read_outcomes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open outcomes file: " + path);
  std::vector<opt::PathwayOutcome> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_outcome_jsonl(line));
  }
  return out;
}

std::string curve_csv(const analysis::CostCurve& curve,
                      const std::vector<opt::PathwayOutcome>& outcomes,
                      const analysis::Cutoff& cutoff) {
  std::ostringstream out;
  out << "coverage_pct,cost_pct,scenario_id,excessive\n";
  for (const auto& p : curve.points) {
    const bool excessive = cutoff.coverage && p.coverage > *cutoff.coverage + 1e-12;
    out << num(p.coverage) << "," << num(p.cost) << ","
        << outcomes[p.outcome_index].scenario_id << "," << (excessive ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string heatmap_csv(const analysis::FailureHeatmap& hm) {
  std::ostringstream out;
  out << "level_a\\level_b";
  for (double lb : hm.levels_b) out << "," << num(lb);
  out << "\n";
  for (std::size_t i = 0; i < hm.levels_a.size(); ++i) {
    out << num(hm.levels_a[i]);
    for (std::size_t j = 0; j < hm.levels_b.size(); ++j) {
      out << ",";
      if (hm.cells[i][j]) out << num(*hm.cells[i][j]);
    }
    out << "\n";
  }
  return out.str();
}

std::string correlation_csv(const analysis::CorrelationMatrix& cm) {
  std::ostringstream out;
  out << "name";
  for (const auto& n : cm.names) out << "," << n;
  out << "\n";
  for (std::size_t i = 0; i < cm.names.size(); ++i) {
    out << cm.names[i];
    for (std::size_t j = 0; j < cm.names.size(); ++j) {
      out << ",";
      if (cm.values[i][j]) out << num(*cm.values[i][j]);
    }
    out << "\n";
  }
  return out.str();
}

std::string convergence_csv(const analysis::ConvergenceReport& report) {
  std::ostringstream out;
  out << "checkpoint,success_proportion,auc,stable_from_here\n";
  for (const auto& r : report.rows) {
    out << r.checkpoint << "," << num(r.success_proportion) << "," << num(r.auc) << ","
        << (r.stable_from_here ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string labels_csv(const std::vector<opt::PathwayOutcome>& outcomes,
                       const std::vector<analysis::Label>& labels) {
  std::ostringstream out;
  out << "scenario_id,mode,policy,status,cost_normalized,label\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    out << o.scenario_id << "," << opt::to_string(o.mode) << "," << o.policy << ","
        << status_name(o.status) << ",";
    if (o.feasible()) out << num(o.cost_normalized);
    out << "," << (labels[i] == analysis::Label::success ? "success" : "failure") << "\n";
  }
  return out.str();
}

std::string tree_scores_csv(const std::vector<std::array<double, 5>>& rows) {
  std::ostringstream out;
  out << "leaves,unique_features,interpretability,coverage,cv_coverage\n";
  for (const auto& r : rows) {
    out << int(r[0]) << "," << int(r[1]) << "," << num(r[2]) << "," << num(r[3]) << "," << num(r[4])
        << "\n";
  }
  return out.str();
}

namespace {

constexpr int kW = 640, kH = 420;
constexpr int kMargin = 56;

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Axes {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kMargin + (x - x0) / (x1 - x0 + 1e-30) * (kW - 2 * kMargin);
  }
  double py(double y) const {
    return kH - kMargin - (y - y0) / (y1 - y0 + 1e-30) * (kH - 2 * kMargin);
  }
};

void svg_header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
}

void svg_axes(std::ostringstream& out, const Axes& a, const std::string& xlabel,
              const std::string& ylabel) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kH - kMargin << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = a.x0 + (a.x1 - a.x0) * i / 4.0;
    const double yv = a.y0 + (a.y1 - a.y0) * i / 4.0;
    out << "<text x=\"" << fmt2(a.px(xv)) << "\" y=\"" << kH - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << fmt2(xv)
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << fmt2(a.py(yv) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt2(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << xlabel
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 "
         "14 "
      << kH / 2 << ")\">" << ylabel << "</text>\n";
}

void svg_polyline(std::ostringstream& out, const Axes& a, const std::vector<double>& xs,
                  const std::vector<double>& ys, const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << fmt2(a.px(xs[i])) << "," << fmt2(a.py(ys[i])) << " ";
  }
  out << "\"/>\n";
}

std::string shade(double v) {  // 0 -> white, 1 -> dark blue
  const int r = int(std::lround(255 - 205 * v));
  const int g = int(std::lround(255 - 175 * v));
  const int b = 255 - int(std::lround(55 * v));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string diverging(double r) {  // -1 -> blue, 0 -> white, +1 -> red
  const double t = std::clamp(r, -1.0, 1.0);
  int red = 255, green = 255, blue = 255;
  if (t >= 0) {
    green = int(std::lround(255 - 195 * t));
    blue = int(std::lround(255 - 195 * t));
  } else {
    red = int(std::lround(255 + 195 * t));
    green = int(std::lround(255 + 155 * t));
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", red, green, blue);
  return buf;
}

}  // namespace

std::string curve_svg(const analysis::CostCurve& curve, const analysis::Cutoff& cutoff,
                      const std::string& title) {
  std::ostringstream out;
  svg_header(out, title);
  double ymax = 100.0;
  for (const auto& p : curve.points) ymax = std::max(ymax, p.cost);
  const Axes a{0.0, 100.0, 90.0, ymax * 1.05};
  svg_axes(out, a, "scenario coverage [%]", "normalized transition cost [%]");
  std::vector<double> xs_ok, ys_ok, xs_ex, ys_ex;
  for (const auto& p : curve.points) {
    const bool excessive = cutoff.coverage && p.coverage > *cutoff.coverage + 1e-12;
    if (excessive) {
      xs_ex.push_back(p.coverage);
      ys_ex.push_back(p.cost);
    } else {
      xs_ok.push_back(p.coverage);
      ys_ok.push_back(p.cost);
    }
  }
  // The grey continuation carries the excessive tail, as in the cumulative
  // cost figures.
  if (!xs_ex.empty() && !xs_ok.empty()) {
    xs_ex.insert(xs_ex.begin(), xs_ok.back());
    ys_ex.insert(ys_ex.begin(), ys_ok.back());
  }
  svg_polyline(out, a, xs_ok, ys_ok, "#1f6fb4");
  if (!xs_ex.empty()) svg_polyline(out, a, xs_ex, ys_ex, "#999999");
  if (cutoff.coverage) {
    out << "<line x1=\"" << fmt2(a.px(*cutoff.coverage)) << "\" y1=\"" << kMargin << "\" x2=\""
        << fmt2(a.px(*cutoff.coverage)) << "\" y2=\"" << kH - kMargin
        << "\" stroke=\"#cc3333\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string heatmap_svg(const analysis::FailureHeatmap& hm, const std::string& title) {
  std::ostringstream out;
  svg_header(out, title);
  const std::size_t na = hm.levels_a.size(), nb = hm.levels_b.size();
  const double cw = double(kW - 2 * kMargin) / double(nb);
  const double ch = double(kH - 2 * kMargin) / double(na);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double x = kMargin + double(j) * cw;
      const double y = kMargin + double(na - 1 - i) * ch;
      const std::string fill = hm.cells[i][j] ? shade(*hm.cells[i][j]) : "#eeeeee";
      out << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(y) << "\" width=\"" << fmt2(cw)
          << "\" height=\"" << fmt2(ch) << "\" fill=\"" << fill
          << "\" stroke=\"#dddddd\"/>\n";
      out << "<text x=\"" << fmt2(x + cw / 2) << "\" y=\"" << fmt2(y + ch / 2 + 3)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
          << (hm.cells[i][j] ? fmt2(*hm.cells[i][j]) : std::string("-")) << "</text>\n";
    }
  }
  for (std::size_t j = 0; j < nb; ++j) {
    out << "<text x=\"" << fmt2(kMargin + (double(j) + 0.5) * cw) << "\" y=\"" << kH - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt2(hm.levels_b[j]) << "</text>\n";
  }
  for (std::size_t i = 0; i < na; ++i) {
    out << "<text x=\"" << kMargin - 6 << "\" y=\""
        << fmt2(kMargin + (double(na - 1 - i) + 0.5) * ch + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt2(hm.levels_a[i]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string correlation_svg(const analysis::CorrelationMatrix& cm, const std::string& title) {
  std::ostringstream out;
  svg_header(out, title);
  const std::size_t n = std::max<std::size_t>(cm.names.size(), 1);
  const double cw = double(kW - 2 * kMargin) / double(n);
  const double ch = double(kH - 2 * kMargin) / double(n);
  for (std::size_t i = 0; i < cm.names.size(); ++i) {
    for (std::size_t j = 0; j < cm.names.size(); ++j) {
      const double x = kMargin + double(j) * cw;
      const double y = kMargin + double(i) * ch;
      const std::string fill = cm.values[i][j] ? diverging(*cm.values[i][j]) : "#f2f2f2";
      out << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(y) << "\" width=\"" << fmt2(cw)
          << "\" height=\"" << fmt2(ch) << "\" fill=\"" << fill << "\" stroke=\"#dddddd\"/>\n";
      if (cm.values[i][j]) {
        out << "<text x=\"" << fmt2(x + cw / 2) << "\" y=\"" << fmt2(y + ch / 2 + 3)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
            << fmt2(*cm.values[i][j]) << "</text>\n";
      }
    }
  }
  for (std::size_t i = 0; i < cm.names.size(); ++i) {
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << fmt2(kMargin + (double(i) + 0.5) * ch + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" << cm.names[i]
        << "</text>\n";
    out << "<text x=\"" << fmt2(kMargin + (double(i) + 0.5) * cw) << "\" y=\"" << kH - kMargin + 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\" transform=\"rotate(45 "
        << fmt2(kMargin + (double(i) + 0.5) * cw) << " " << kH - kMargin + 14 << ")\">"
        << cm.names[i] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string convergence_svg(const analysis::ConvergenceReport& report, const std::string& title) {
  std::ostringstream out;
  svg_header(out, title);
  if (report.rows.empty()) {
    out << "</svg>\n";
    return out.str();
  }
  double xmax = 1, ymax = 1;
  for (const auto& r : report.rows) {
    xmax = std::max(xmax, double(r.checkpoint));
    ymax = std::max({ymax, r.auc, r.success_proportion});
  }
  const Axes a{0.0, xmax, 0.0, ymax * 1.1};
  svg_axes(out, a, "scenarios evaluated", "metric value");
  std::vector<double> xs, props, aucs;
  for (const auto& r : report.rows) {
    xs.push_back(double(r.checkpoint));
    props.push_back(r.success_proportion);
    aucs.push_back(r.auc);
  }
  svg_polyline(out, a, xs, props, "#1f6fb4");
  svg_polyline(out, a, xs, aucs, "#b46f1f");
  out << "<text x=\"" << kW - kMargin << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#1f6fb4\">"
         "success proportion</text>\n";
  out << "<text x=\"" << kW - kMargin << "\" y=\"" << kMargin + 14
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#b46f1f\">"
         "AUC</text>\n";
  out << "</svg>\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string lp_json(const opt::BuiltLp& built) {
  ordered_json j;
  ordered_json vars = ordered_json::array();
  for (const auto& v : built.lp.variables()) {
    ordered_json vj;
    vj["name"] = v.name;
    vj["lb"] = std::isfinite(v.lb) ? ordered_json(v.lb) : ordered_json();
    vj["ub"] = std::isfinite(v.ub) ? ordered_json(v.ub) : ordered_json();
    vj["obj"] = v.obj;
    vj["kind"] = v.kind;
    vars.push_back(vj);
  }
  j["variables"] = vars;
  ordered_json rows = ordered_json::array();
  for (const auto& r : built.lp.rows()) {
    ordered_json rj;
    rj["name"] = r.name;
    rj["sense"] = r.sense == lp::Sense::le ? "le" : r.sense == lp::Sense::eq ? "eq" : "ge";
    rj["rhs"] = r.rhs;
    ordered_json entries = ordered_json::array();
    for (const auto& e : r.entries) entries.push_back({e.col, e.value});
    rj["entries"] = entries;
    rj["kind"] = r.kind;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j.dump() + "\n";
}

}  // namespace pathways::report
