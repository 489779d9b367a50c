#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpfit/distribution.hpp"
#include "cpfit/estimators.hpp"
#include "cpfit/gof.hpp"
#include "cpfit/histogram.hpp"
#include "cpfit/spectrum.hpp"

namespace cpfit {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view token);

/// Everything a CLI subcommand reports. Sections that are empty are omitted
/// from the output.
struct ReportBundle {
  std::string command;
  std::optional<std::string> dataset_name;
  std::optional<DistributionSpec> model;
  std::optional<SampleStats> stats;
  std::optional<PmfVector> pmf;
  std::optional<PowerSpectrum> spectrum;
  std::vector<PeakCandidate> candidates;
  std::vector<FitResult> fits;
  std::vector<PsScanEntry> ps_scan;
  std::vector<FitResult> k_scan;
  std::optional<GofReport> gof;
};

/// Machine formats: every real is printed with 17 significant digits (CSV)
/// or shortest round-trip form (JSON); no timestamps.
std::string render(const ReportBundle& bundle, OutputFormat format);
std::string render_csv(const ReportBundle& bundle);
std::string render_json(const ReportBundle& bundle);

/// Static SVG figure: the spectrum curve with candidate markers, the
/// observed counts with fitted curves, or the pmf, whichever the bundle
/// carries (in that order of preference).
std::string render_svg(const ReportBundle& bundle);

/// Per-bin table shared by the CSV/JSON writers and the plot: the union of
/// the fits' bin ranges, with fitted counts extended by fitted_counts().
struct BinTable {
  std::vector<std::int64_t> observed;
  std::vector<std::vector<double>> fitted;  ///< one column per fit
};

BinTable bin_table(const std::vector<FitResult>& fits, std::int64_t n_c);

}  // namespace cpfit
