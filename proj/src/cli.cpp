#include "cpfit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cpfit/distribution.hpp"
#include "cpfit/error.hpp"
#include "cpfit/estimators.hpp"
#include "cpfit/gof.hpp"
#include "cpfit/histogram.hpp"
#include "cpfit/report.hpp"
#include "cpfit/simulate.hpp"
#include "cpfit/spectrum.hpp"

namespace cpfit::cli {

namespace {

struct Options {
  std::string family;
  std::vector<std::string> params;
  std::optional<int> k;
  std::vector<std::string> methods{"mm"};
  std::string scan_k;
  std::size_t ndft = kDefaultDftLength;
  unsigned alias_max = kDefaultAliasMax;
  std::string denominator = "n-1";
  std::uint64_t seed = 1;
  std::size_t n_samples = 0;
  std::optional<std::size_t> bins;
  std::string format = "csv";
  std::string plot;
  std::string out;
  std::string data;
  bool round_k = false;
};

double parse_real(const std::string& text, std::string_view what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return value;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> values;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DomainError(fmt::format("--param expects key=value, got '{}'", item));
    }
    const std::string key = item.substr(0, eq);
    if (!values.emplace(key, parse_real(item.substr(eq + 1), key)).second) {
      throw DomainError(fmt::format("parameter '{}' given twice", key));
    }
  }
  return values;
}

DistributionSpec spec_from_options(const Options& o) {
  if (o.family.empty()) {
    throw DomainError("--family is required");
  }
  const Family family = parse_family(o.family);
  auto values = parse_params(o.params);
  auto take = [&](std::initializer_list<const char*> names) {
    for (const char* name : names) {
      if (auto it = values.find(name); it != values.end()) {
        const double v = it->second;
        values.erase(it);
        return v;
      }
    }
    throw DomainError(fmt::format("family '{}' needs parameter '{}'", o.family, *names.begin()));
  };
  auto index = [&](int fallback, bool required) {
    if (!o.k && required) {
      throw DomainError(fmt::format("family '{}' needs --k", o.family));
    }
    return o.k.value_or(fallback);
  };

  std::optional<DistributionSpec> spec;
  switch (family) {
    case Family::Poisson:
      spec.emplace(params::Poisson{take({"lambda"})});
      break;
    case Family::NeymanTypeA: {
      const double lambda = take({"lambda"});
      spec.emplace(params::NeymanTypeA{lambda, take({"phi"})});
      break;
    }
    case Family::PoissonBinomial: {
      const double lambda = take({"lambda"});
      spec.emplace(params::PoissonBinomial{lambda, index(0, true), take({"p"})});
      break;
    }
    case Family::PoissonPascal: {
      const double lambda = take({"lambda", "Lambda"});
      spec.emplace(params::PoissonPascal{lambda, index(1, false), take({"P"})});
      break;
    }
    case Family::GeometricPoisson: {
      const double lambda = take({"lambda"});
      spec.emplace(params::GeometricPoisson{lambda, take({"p"})});
      break;
    }
    case Family::NegativeBinomial: {
      const double k = values.count("k") ? take({"k"}) : static_cast<double>(index(0, true));
      spec.emplace(params::NegativeBinomial{k, take({"p"})});
      break;
    }
  }
  if (!values.empty()) {
    throw DomainError(fmt::format("family '{}' has no parameter '{}'", o.family,
                                  values.begin()->first));
  }
  return *spec;
}

CountHistogram dataset_from_options(const Options& o) {
  if (o.data.empty()) {
    throw DomainError("--data is required");
  }
  return load_dataset(o.data);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw DataError(fmt::format("cannot open '{}' for writing", path));
  }
  file << text;
  if (!file) {
    throw DataError(fmt::format("failed writing '{}'", path));
  }
}

void emit(const Options& o, const ReportBundle& bundle, std::ostream& out) {
  const std::string text = render(bundle, parse_output_format(o.format));
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
  if (!o.plot.empty()) {
    write_file(o.plot, render_svg(bundle));
  }
}

std::pair<int, int> parse_k_range(const std::string& text) {
  const auto colon = text.find(':');
  int lo = 0;
  int hi = 0;
  const char* end = text.data() + text.size();
  const bool ok = colon != std::string::npos &&
                  std::from_chars(text.data(), text.data() + colon, lo).ptr == text.data() + colon &&
                  std::from_chars(text.data() + colon + 1, end, hi).ptr == end;
  if (!ok) {
    throw DomainError(fmt::format("--scan-k expects <min>:<max>, got '{}'", text));
  }
  return {lo, hi};
}

void cmd_pmf(const Options& o, std::ostream& out) {
  ReportBundle b;
  b.command = "pmf";
  b.model = spec_from_options(o);
  b.pmf = o.bins ? family_pmf(*b.model, *o.bins) : family_pmf(*b.model);
  emit(o, b, out);
}

void cmd_spectrum(const Options& o, std::ostream& out) {
  ReportBundle b;
  b.command = "spectrum";
  if (!o.data.empty()) {
    const CountHistogram hist = dataset_from_options(o);
    b.dataset_name = hist.name();
    b.stats = sample_stats(hist, parse_denominator(o.denominator));
    b.spectrum = power_spectrum(hist, o.ndft);
  } else {
    b.model = spec_from_options(o);
    b.spectrum = power_spectrum(family_pmf(*b.model, o.ndft), o.ndft);
  }
  b.candidates = candidate_means(find_peaks(*b.spectrum), o.alias_max);
  emit(o, b, out);
}

void cmd_fit(const Options& o, std::ostream& out) {
  if (o.family.empty()) {
    throw DomainError("--family is required");
  }
  const CountHistogram hist = dataset_from_options(o);
  FitRequest request;
  request.family = parse_family(o.family);
  request.k = o.k.value_or(request.family == Family::PoissonBinomial ? 0 : 1);
  request.round_k = o.round_k;
  request.config = PsConfig{o.ndft, o.alias_max, parse_denominator(o.denominator)};

  ReportBundle b;
  b.command = "fit";
  b.dataset_name = hist.name();
  b.stats = sample_stats(hist, request.config.denominator);

  std::vector<Method> methods;
  for (const auto& token : o.methods) {
    const Method m = parse_method(token);
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
      methods.push_back(m);
    }
  }

  if (!o.scan_k.empty()) {
    const auto [lo, hi] = parse_k_range(o.scan_k);
    for (Method m : methods) {
      request.method = m;
      KScan scan = scan_k(hist, request, lo, hi);
      b.fits.push_back(scan.fits[scan.best]);
      b.k_scan.insert(b.k_scan.end(), scan.fits.begin(), scan.fits.end());
    }
  } else {
    if (request.family == Family::PoissonBinomial && !o.k) {
      throw DomainError("family 'pbinom' needs --k or --scan-k");
    }
    for (Method m : methods) {
      request.method = m;
      if (m == Method::PS) {
        PsEstimate ps = ps_estimate(hist, {request.family, request.k}, request.config);
        b.fits.push_back(std::move(ps.fit));
        b.ps_scan = std::move(ps.scan);
      } else {
        b.fits.push_back(fit(hist, request));
      }
    }
  }
  emit(o, b, out);
}

void cmd_gof(const Options& o, std::ostream& out) {
  const CountHistogram hist = dataset_from_options(o);
  ReportBundle b;
  b.command = "gof";
  b.dataset_name = hist.name();
  b.model = spec_from_options(o);
  b.stats = sample_stats(hist, parse_denominator(o.denominator));
  b.gof = assess_fit(*b.model, hist, b.stats->variance);
  emit(o, b, out);
}

void cmd_simulate(const Options& o, std::ostream& out) {
  if (o.n_samples < 1) {
    throw DomainError("--n must be positive");
  }
  const std::string text = serialize_dataset(simulate(spec_from_options(o), o.n_samples, o.seed));
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--family", o.family, "poisson, neyman, pbinom, pascal, geom or negbinom");
  cmd->add_option("--param", o.params, "model parameter key=value (repeatable)")
      ->delimiter(',');
  cmd->add_option("--k", o.k, "integer generalizer index");
}

void add_output_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "write the report to this file");
  cmd->add_option("--plot", o.plot, "write an SVG figure to this file");
}

void add_spectrum_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--ndft", o.ndft, "DFT length")->check(CLI::PositiveNumber);
  cmd->add_option("--alias-max", o.alias_max, "largest alias branch m");
}

void add_denominator_option(CLI::App* cmd, Options& o) {
  cmd->add_option("--denominator", o.denominator, "sample variance denominator")
      ->check(CLI::IsMember({"n", "n-1"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Compound Poisson fitting by moments and power spectrum", "cpfit"};
  app.require_subcommand(1);

  CLI::App* pmf = app.add_subcommand("pmf", "pmf P_n and scaled pmf h_n of a model");
  add_model_options(pmf, o);
  pmf->add_option("--bins", o.bins, "number of bins (default: automatic truncation)");
  add_output_options(pmf, o);

  CLI::App* spectrum = app.add_subcommand("spectrum", "power spectrum and peak candidates");
  add_model_options(spectrum, o);
  spectrum->add_option("--data", o.data, "dataset file (instead of a model)");
  add_spectrum_options(spectrum, o);
  add_denominator_option(spectrum, o);
  add_output_options(spectrum, o);

  CLI::App* fit_cmd = app.add_subcommand("fit", "estimate model parameters from a dataset");
  fit_cmd->add_option("--family", o.family, "model family")->required();
  fit_cmd->add_option("--k", o.k, "integer generalizer index");
  fit_cmd->add_option("--data", o.data, "dataset file")->required();
  fit_cmd->add_option("--method", o.methods, "mm, p0h1, ps or nb (repeatable)")->delimiter(',');
  fit_cmd->add_option("--scan-k", o.scan_k, "integer index scan <min>:<max>");
  fit_cmd->add_flag("--round-k", o.round_k, "round the negative binomial index");
  add_spectrum_options(fit_cmd, o);
  add_denominator_option(fit_cmd, o);
  add_output_options(fit_cmd, o);

  CLI::App* gof = app.add_subcommand("gof", "goodness of fit of a model to a dataset");
  add_model_options(gof, o);
  gof->add_option("--data", o.data, "dataset file")->required();
  add_denominator_option(gof, o);
  add_output_options(gof, o);

  CLI::App* sim = app.add_subcommand("simulate", "draw a dataset from a model");
  add_model_options(sim, o);
  sim->add_option("--n", o.n_samples, "number of samples")->required();
  sim->add_option("--seed", o.seed, "random seed");
  sim->add_option("--out", o.out, "write the dataset to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cpfit: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*pmf) {
      cmd_pmf(o, out);
    } else if (*spectrum) {
      cmd_spectrum(o, out);
    } else if (*fit_cmd) {
      cmd_fit(o, out);
    } else if (*gof) {
      cmd_gof(o, out);
    } else if (*sim) {
      cmd_simulate(o, out);
    }
  } catch (const DataError& e) {
    err << "cpfit: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const EstimationError& e) {
    err << "cpfit: estimation error: " << e.what() << '\n';
    return kExitEstimation;
  } catch (const DomainError& e) {
    err << "cpfit: usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace cpfit::cli
