#include "cpfit/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "cpfit/error.hpp"

namespace cpfit {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double x) {
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  return fmt::format("{:.17g}", x);
}

std::string_view source_token(PeakSource s) {
  switch (s) {
    case PeakSource::LocalMax:
      return "local-max";
    case PeakSource::Mirror:
      return "mirror";
    case PeakSource::Endpoint:
      return "endpoint";
  }
  return "unknown";
}

std::string params_text(const DistributionSpec& spec) {
  std::string out;
  for (const auto& [name, value] : spec.named_params()) {
    if (!out.empty()) {
      out += ';';
    }
    out += name;
    out += '=';
    out += num(value);
  }
  return out;
}

Json params_json(const DistributionSpec& spec) {
  Json j = Json::object();
  for (const auto& [name, value] : spec.named_params()) {
    j[name] = value;
  }
  return j;
}

Json spec_json(const DistributionSpec& spec) {
  return Json{{"family", family_token(spec.family())}, {"params", params_json(spec)}};
}

Json candidate_json(const PeakCandidate& c) {
  return Json{{"grid_index", c.grid_index},
              {"nu", c.nu},
              {"alias_m", c.alias_m},
              {"generalizer_mean", c.generalizer_mean},
              {"source", source_token(c.source)}};
}

// JSON has no infinity; unbounded statistics are written as null.
Json finite_or_null(double x) {
  return std::isfinite(x) ? Json(x) : Json(nullptr);
}

std::string fit_label(const FitResult& f) {
  return fmt::format("{}_{}", method_token(f.method), family_token(f.spec.family()));
}

}  // namespace

OutputFormat parse_output_format(std::string_view token) {
  if (token == "csv") {
    return OutputFormat::Csv;
  }
  if (token == "json") {
    return OutputFormat::Json;
  }
  throw DomainError(fmt::format("unknown output format '{}'", token));
}

BinTable bin_table(const std::vector<FitResult>& fits, std::int64_t n_c) {
  BinTable table;
  std::size_t bins = 0;
  for (const auto& f : fits) {
    if (f.observed.size() > bins) {
      bins = f.observed.size();
      table.observed = f.observed;
    }
  }
  for (const auto& f : fits) {
    table.fitted.push_back(f.fitted_counts.size() == bins ? f.fitted_counts
                                                          : fitted_counts(f.spec, n_c, bins));
  }
  return table;
}

std::string render(const ReportBundle& bundle, OutputFormat format) {
  return format == OutputFormat::Csv ? render_csv(bundle) : render_json(bundle);
}

std::string render_csv(const ReportBundle& b) {
  std::string out = fmt::format("# command: {}\n", b.command);
  if (b.dataset_name) {
    out += fmt::format("# dataset: {}\n", *b.dataset_name);
  }
  auto section = [&out](std::string_view name, std::string_view header) {
    out += fmt::format("\n# {}\n{}\n", name, header);
  };

  if (b.model) {
    section("model", "family,params");
    out += fmt::format("{},{}\n", family_token(b.model->family()), params_text(*b.model));
  }
  if (b.stats) {
    section("stats", "n_c,mean,variance,denominator");
    out += fmt::format("{},{},{},{}\n", b.stats->n_c, num(b.stats->mean), num(b.stats->variance),
                       denominator_token(b.stats->denominator));
  }
  if (b.pmf) {
    section("pmf", "n,P_n,h_n");
    for (std::size_t n = 0; n < b.pmf->size(); ++n) {
      out += fmt::format("{},{},{}\n", n, num(b.pmf->masses()[n]), num(b.pmf->scaled()[n]));
    }
  }
  if (b.spectrum) {
    section("spectrum", "j,nu,psi");
    for (std::size_t j = 0; j < b.spectrum->n_dft(); ++j) {
      out += fmt::format("{},{},{}\n", j, num(b.spectrum->nu(j)), num((*b.spectrum)[j]));
    }
  }
  if (!b.candidates.empty()) {
    section("candidates", "grid_index,nu,alias_m,generalizer_mean,source");
    for (const auto& c : b.candidates) {
      out += fmt::format("{},{},{},{},{}\n", c.grid_index, num(c.nu), c.alias_m,
                         num(c.generalizer_mean), source_token(c.source));
    }
  }
  if (!b.fits.empty()) {
    section("fits",
            "method,family,params,denominator,delta,chi_square,nu,alias_m,generalizer_mean");
    for (const auto& f : b.fits) {
      out += fmt::format("{},{},{},{},{},{}", method_token(f.method), family_token(f.spec.family()),
                         params_text(f.spec), denominator_token(f.denominator), num(f.delta),
                         num(f.chi_square));
      if (f.peak) {
        out += fmt::format(",{},{},{}\n", num(f.peak->nu), f.peak->alias_m,
                           num(f.peak->generalizer_mean));
      } else {
        out += ",,,\n";
      }
    }
    const std::int64_t n_c = b.stats ? b.stats->n_c : 0;
    const BinTable table = bin_table(b.fits, n_c);
    std::string header = "n,observed";
    for (const auto& f : b.fits) {
      header += ',' + fit_label(f);
    }
    section("bins", header);
    for (std::size_t n = 0; n < table.observed.size(); ++n) {
      out += fmt::format("{},{}", n, table.observed[n]);
      for (const auto& column : table.fitted) {
        out += ',' + num(column[n]);
      }
      out += '\n';
    }
  }
  if (!b.ps_scan.empty()) {
    section("ps_scan", "grid_index,nu,alias_m,source,generalizer_mean,family,params,delta");
    for (const auto& e : b.ps_scan) {
      out += fmt::format("{},{},{},{},{},{},{},{}\n", e.candidate.grid_index, num(e.candidate.nu),
                         e.candidate.alias_m, source_token(e.candidate.source),
                         num(e.candidate.generalizer_mean), family_token(e.spec.family()),
                         params_text(e.spec), num(e.delta));
    }
  }
  if (!b.k_scan.empty()) {
    section("k_scan", "method,family,params,delta,chi_square");
    for (const auto& f : b.k_scan) {
      out += fmt::format("{},{},{},{},{}\n", method_token(f.method), family_token(f.spec.family()),
                         params_text(f.spec), num(f.delta), num(f.chi_square));
    }
  }
  if (b.gof) {
    section("gof", "delta,chi_square");
    out += fmt::format("{},{}\n", num(b.gof->delta), num(b.gof->chi_square));
    section("gof_bins", "n,observed,fitted,delta_term");
    for (const auto& bin : b.gof->per_bin) {
      out += fmt::format("{},{},{},{}\n", bin.n, bin.observed, num(bin.fitted),
                         num(bin.delta_term));
    }
  }
  return out;
}

std::string render_json(const ReportBundle& b) {
  Json root;
  root["command"] = b.command;
  if (b.dataset_name) {
    root["dataset"] = *b.dataset_name;
  }
  if (b.model) {
    root["model"] = spec_json(*b.model);
  }
  if (b.stats) {
    root["stats"] = Json{{"n_c", b.stats->n_c},
                         {"mean", b.stats->mean},
                         {"variance", b.stats->variance},
                         {"denominator", denominator_token(b.stats->denominator)}};
  }
  if (b.pmf) {
    Json rows = Json::array();
    for (std::size_t n = 0; n < b.pmf->size(); ++n) {
      rows.push_back(Json{{"n", n},
                          {"P", b.pmf->masses()[n]},
                          {"h", finite_or_null(b.pmf->scaled()[n])}});
    }
    root["pmf"] = std::move(rows);
  }
  if (b.spectrum) {
    Json rows = Json::array();
    for (std::size_t j = 0; j < b.spectrum->n_dft(); ++j) {
      rows.push_back(Json{{"j", j}, {"nu", b.spectrum->nu(j)}, {"psi", (*b.spectrum)[j]}});
    }
    root["spectrum"] = Json{{"n_dft", b.spectrum->n_dft()}, {"a0", b.spectrum->a0()},
                            {"values", std::move(rows)}};
  }
  if (!b.candidates.empty()) {
    Json rows = Json::array();
    for (const auto& c : b.candidates) {
      rows.push_back(candidate_json(c));
    }
    root["candidates"] = std::move(rows);
  }
  if (!b.fits.empty()) {
    Json fits = Json::array();
    const std::int64_t n_c = b.stats ? b.stats->n_c : 0;
    const BinTable table = bin_table(b.fits, n_c);
    for (std::size_t i = 0; i < b.fits.size(); ++i) {
      const auto& f = b.fits[i];
      Json j = spec_json(f.spec);
      j["method"] = method_token(f.method);
      j["denominator"] = denominator_token(f.denominator);
      j["delta"] = f.delta;
      j["chi_square"] = finite_or_null(f.chi_square);
      j["peak"] = f.peak ? candidate_json(*f.peak) : Json(nullptr);
      j["fitted_counts"] = table.fitted[i];
      fits.push_back(std::move(j));
    }
    root["observed"] = table.observed;
    root["fits"] = std::move(fits);
  }
  if (!b.ps_scan.empty()) {
    Json rows = Json::array();
    for (const auto& e : b.ps_scan) {
      Json j = candidate_json(e.candidate);
      j["model"] = spec_json(e.spec);
      j["delta"] = e.delta;
      rows.push_back(std::move(j));
    }
    root["ps_scan"] = std::move(rows);
  }
  if (!b.k_scan.empty()) {
    Json rows = Json::array();
    for (const auto& f : b.k_scan) {
      Json j = spec_json(f.spec);
      j["method"] = method_token(f.method);
      j["delta"] = f.delta;
      j["chi_square"] = finite_or_null(f.chi_square);
      rows.push_back(std::move(j));
    }
    root["k_scan"] = std::move(rows);
  }
  if (b.gof) {
    Json bins = Json::array();
    for (const auto& bin : b.gof->per_bin) {
      bins.push_back(Json{{"n", bin.n},
                          {"observed", bin.observed},
                          {"fitted", bin.fitted},
                          {"delta_term", bin.delta_term}});
    }
    root["gof"] = Json{{"delta", b.gof->delta},
                       {"chi_square", finite_or_null(b.gof->chi_square)},
                       {"bins", std::move(bins)}};
  }
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool points = false;
  std::string color;
  std::string dash;
};

constexpr double kWidth = 720;
constexpr double kHeight = 450;
constexpr double kLeft = 80;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 55;

std::string svg_plot(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                     const std::vector<Series>& series, const std::vector<double>& markers) {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymax = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        continue;
      }
      if (first) {
        xmin = xmax = s.x[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax <= xmin) {
    xmax = xmin + 1.0;
  }
  if (ymax <= 0.0) {
    ymax = 1.0;
  }
  ymax *= 1.05;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - y / ymax * ph; };

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<!-- cpfit plot -->\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kWidth / 2, title);
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = xmin + (xmax - xmin) * i / kTicks;
    const double yv = ymax * i / kTicks;
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.4g}</text>\n", px(xv),
        kTop + ph + 18, xv);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n",
                       kLeft - 6, py(yv) + 4, yv);
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2, kHeight - 12, xlabel);
  out += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}"
      "</text>\n",
      kTop + ph / 2, ylabel);

  for (double m : markers) {
    if (m < xmin || m > xmax) {
      continue;
    }
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#999999\" "
        "stroke-dasharray=\"2,3\"/>\n",
        px(m), kTop, kTop + ph);
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    if (s.points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (std::isfinite(s.y[i])) {
          out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                             px(s.x[i]), py(s.y[i]), s.color);
        }
      }
    } else {
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"", s.color);
      if (!s.dash.empty()) {
        out += fmt::format(" stroke-dasharray=\"{}\"", s.dash);
      }
      out += " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (std::isfinite(s.y[i])) {
          out += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
        }
      }
      out += "\"/>\n";
    }
    const double ly = kTop + 16 + 16 * static_cast<double>(k);
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" fill=\"{}\">{}</text>\n",
        kLeft + pw - 8, ly, s.color, s.label);
  }
  out += "</svg>\n";
  return out;
}

const std::vector<std::string> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
const std::vector<std::string> kDashes{"6,4", "8,3,2,3", "2,2", "", "10,4"};

}  // namespace

std::string render_svg(const ReportBundle& b) {
  if (b.spectrum) {
    Series s{"power spectrum", {}, {}, false, kColors[0], ""};
    for (std::size_t j = 0; j < b.spectrum->n_dft(); ++j) {
      s.x.push_back(b.spectrum->nu(j));
      s.y.push_back((*b.spectrum)[j]);
    }
    std::vector<double> markers;
    for (const auto& c : b.candidates) {
      if (c.alias_m == 0 && c.source != PeakSource::Endpoint) {
        markers.push_back(c.nu);
      }
    }
    return svg_plot("Power spectrum", "nu", "Psi(nu)", {s}, markers);
  }
  if (!b.fits.empty()) {
    const std::int64_t n_c = b.stats ? b.stats->n_c : 0;
    const BinTable table = bin_table(b.fits, n_c);
    std::vector<Series> series;
    Series data{"data", {}, {}, true, "black", ""};
    for (std::size_t n = 0; n < table.observed.size(); ++n) {
      data.x.push_back(static_cast<double>(n));
      data.y.push_back(static_cast<double>(table.observed[n]));
    }
    series.push_back(std::move(data));
    for (std::size_t i = 0; i < b.fits.size(); ++i) {
      series.push_back(Series{fit_label(b.fits[i]), series.front().x, table.fitted[i], false,
                              kColors[i % kColors.size()], kDashes[i % kDashes.size()]});
    }
    return svg_plot("Observed and fitted counts", "n", "c_n", series, {});
  }
  if (b.gof) {
    Series data{"data", {}, {}, true, "black", ""};
    Series model{b.model ? b.model->describe() : "model", {}, {}, false, kColors[0], kDashes[0]};
    for (const auto& bin : b.gof->per_bin) {
      data.x.push_back(static_cast<double>(bin.n));
      data.y.push_back(static_cast<double>(bin.observed));
      model.x.push_back(static_cast<double>(bin.n));
      model.y.push_back(bin.fitted);
    }
    return svg_plot("Observed and fitted counts", "n", "c_n", {data, model}, {});
  }
  if (b.pmf) {
    const auto h = b.pmf->scaled();
    const bool finite = std::all_of(h.begin(), h.end(), [](double v) { return std::isfinite(v); });
    Series s{finite ? "h_n" : "P_n", {}, {}, false, kColors[0], ""};
    for (std::size_t n = 0; n < b.pmf->size(); ++n) {
      s.x.push_back(static_cast<double>(n));
      s.y.push_back(finite ? h[n] : b.pmf->masses()[n]);
    }
    return svg_plot(finite ? "Scaled pmf" : "Pmf", "n", s.label, {s}, {});
  }
  throw DomainError("nothing to plot for this command");
}

}  // namespace cpfit
