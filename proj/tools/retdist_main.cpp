// retdist: ensemble-averaged portfolio return distributions.
//
// Subcommands:
//   pdf       tabulate the analytic portfolio-return density on a grid
//   simulate  draw synthetic returns from the fluctuating-correlation model
//   fit       build portfolios from return data and fit the fluctuation
//             parameter N (weighted Cramer-von Mises and/or MLE)
//   sweep     repeat the fit along an axis (weight width a, size K, or dt)
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or input error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "retdist/dist.hpp"
#include "retdist/ensemble.hpp"
#include "retdist/io.hpp"
#include "retdist/study.hpp"
#include "retdist/version.hpp"

namespace {

using nlohmann::json;
using namespace retdist;

std::string default_out_dir() {
  const char* env = std::getenv("RETDIST_OUT");
  return env && *env ? env : ".";
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

std::vector<std::string> provenance(const std::string& command, std::uint64_t seed,
                                    const json& config) {
  return {std::string(kToolName) + " " + kVersion, "command: " + command,
          "seed: " + std::to_string(seed), "config: " + config.dump()};
}

void parse_range(const std::string& range, double* lo, double* hi) {
  const auto colon = range.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("range must be 'lo:hi', got '" + range + "'");
  }
  *lo = std::stod(range.substr(0, colon));
  *hi = std::stod(range.substr(colon + 1));
  if (!(*lo < *hi)) throw std::invalid_argument("range must have lo < hi");
}

// ---------------------------------------------------------------------------
// pdf
// ---------------------------------------------------------------------------

struct PdfOpts {
  std::vector<double> n_values;
  double alpha = 1.0;
  std::string range = "-5:5";
  int points = 401;
  bool with_normal = false;
  double student_nu = 0.0;  // 0 = no overlay
  std::string out = "-";
};

int run_pdf(const PdfOpts& opt) {
  if (opt.n_values.empty()) throw std::invalid_argument("pdf: need at least one --n value");
  if (opt.points < 2) throw std::invalid_argument("pdf: need at least two grid points");
  for (double n : opt.n_values) {
    if (!(n > 0.0)) throw std::invalid_argument("pdf: n values must be positive");
  }
  double lo = 0.0;
  double hi = 0.0;
  parse_range(opt.range, &lo, &hi);

  std::vector<PortfolioKBesselDist> dists;
  for (double n : opt.n_values) dists.emplace_back(opt.alpha, n);
  const double sd = std::sqrt(opt.alpha);

  std::ostringstream body;
  const json config = {{"n", opt.n_values},   {"alpha", opt.alpha},
                       {"range", opt.range},  {"points", opt.points},
                       {"normal", opt.with_normal}, {"student_nu", opt.student_nu}};
  for (const auto& line : provenance("pdf", 0, config)) body << "# " << line << "\n";
  body << "r";
  for (double n : opt.n_values) body << ",pdf_n" << format_double(n);
  if (opt.with_normal) body << ",normal";
  if (opt.student_nu > 0.0) body << ",student_t";
  body << "\n";
  for (int i = 0; i < opt.points; ++i) {
    const double r = lo + (hi - lo) * i / (opt.points - 1);
    body << format_double(r);
    for (const auto& dist : dists) body << "," << format_double(dist.pdf(r));
    if (opt.with_normal) body << "," << format_double(normal_pdf(0.0, sd, r));
    if (opt.student_nu > 0.0) {
      body << "," << format_double(student_t_pdf(opt.student_nu, 0.0, sd, r));
    }
    body << "\n";
  }

  if (opt.out == "-") {
    std::cout << body.str();
  } else {
    std::ofstream file(opt.out);
    if (!file) throw DataError("cannot write '" + opt.out + "'");
    file << body.str();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  int k = 3;
  double n = 0.0;
  long samples = 100000;
  double rho = 0.3;
  double vol = 1.0;
  std::string path = "mixture";  // or "wishart"
  std::uint64_t seed = 1;
  std::string out_dir = default_out_dir();
};

int run_simulate(const SimulateOpts& opt) {
  if (opt.samples < 2) throw std::invalid_argument("simulate: need at least two samples");
  if (opt.path != "mixture" && opt.path != "wishart") {
    throw std::invalid_argument("simulate: --path must be mixture or wishart");
  }
  EnsembleSpec spec{CovarianceModel::constant_corr(opt.k, opt.rho, opt.vol), opt.n};
  spec.validate();
  const bool wishart = opt.path == "wishart";
  if (wishart) spec.integer_n();  // reject non-integer N on the matrix path

  const json config = {{"k", opt.k},     {"n", opt.n},   {"samples", opt.samples},
                       {"rho", opt.rho}, {"vol", opt.vol}, {"path", opt.path}};

  RngStream rng(opt.seed, 0);
  Matrix draws(opt.k, opt.samples);
  for (long s = 0; s < opt.samples; ++s) {
    draws.col(s) = wishart ? sample_ensemble_return(spec, rng)
                           : sample_mixture_return(spec, rng);
  }

  const std::string samples_path = out_path(opt.out_dir, "samples.csv");
  {
    std::ofstream file(samples_path);
    if (!file) throw DataError("cannot write '" + samples_path + "'");
    for (const auto& line : provenance("simulate", opt.seed, config)) file << "# " << line << "\n";
    for (int i = 0; i < opt.k; ++i) file << (i ? "," : "") << "A" << (i + 1);
    file << "\n";
    for (long s = 0; s < opt.samples; ++s) {
      for (int i = 0; i < opt.k; ++i) {
        file << (i ? "," : "") << format_double(draws(i, s));
      }
      file << "\n";
    }
  }

  // summary: per-component variance against Sigma, kurtosis against 6/N
  json variances = json::array();
  double kurtosis_mean = 0.0;
  for (int i = 0; i < opt.k; ++i) {
    const double mean = draws.row(i).mean();
    double m2 = 0.0;
    double m4 = 0.0;
    for (long s = 0; s < opt.samples; ++s) {
      const double d = draws(i, s) - mean;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    m2 /= opt.samples;
    m4 /= opt.samples;
    variances.push_back({{"component", i},
                         {"sample_variance", m2},
                         {"model_variance", spec.cov_model.cov(i, i)}});
    kurtosis_mean += m4 / (m2 * m2) - 3.0;
  }
  kurtosis_mean /= opt.k;

  json summary = {{"tool", kToolName},
                  {"version", kVersion},
                  {"seed", opt.seed},
                  {"config", config},
                  {"sample_count", opt.samples},
                  {"component_variances", variances},
                  {"excess_kurtosis_mean", kurtosis_mean},
                  {"excess_kurtosis_model", 6.0 / opt.n}};

  if (wishart) {
    // rank statistics of the sampled correlation matrices
    RngStream rank_rng(opt.seed, 1);
    const int reps = 100;
    const int expected_zero = std::max(0, opt.k - spec.integer_n());
    bool all_match = true;
    for (int rep = 0; rep < reps; ++rep) {
      const Matrix x = sample_correlation_matrix(spec, rank_rng);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(x);
      const double lam_max = eig.eigenvalues().maxCoeff();
      int zeros = 0;
      for (int i = 0; i < opt.k; ++i) {
        if (eig.eigenvalues()(i) < 1e-10 * lam_max) ++zeros;
      }
      all_match = all_match && (zeros == expected_zero);
    }
    summary["rank_check"] = {{"draws", reps},
                             {"zero_modes_expected", expected_zero},
                             {"all_match", all_match}};
  }
  write_json(summary, out_path(opt.out_dir, "summary.json"));
  std::cout << "simulate: wrote " << opt.samples << " draws (K=" << opt.k << ", N=" << opt.n
            << ", path=" << opt.path << ") to " << opt.out_dir << "\n"
            << "  excess kurtosis " << kurtosis_mean << " vs 6/N = " << 6.0 / opt.n << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit / sweep shared data plumbing
// ---------------------------------------------------------------------------

struct DataOpts {
  std::string prices_path;
  std::string returns_path;
  double synthetic_n = 0.0;  // > 0 enables the synthetic source
  int assets = 25;
  int t = 4000;
  double rho = 0.3;
  double vol = 0.02;
  int dt = 1;
};

// Returns at interval dt from whichever source is configured.
ReturnMatrix load_data(const DataOpts& opt, std::uint64_t seed) {
  const int sources = (!opt.prices_path.empty() ? 1 : 0) + (!opt.returns_path.empty() ? 1 : 0) +
                      (opt.synthetic_n > 0.0 ? 1 : 0);
  if (sources != 1) {
    throw std::invalid_argument(
        "exactly one data source is required: --input, --returns-input, or --synthetic-n");
  }
  if (opt.dt < 1) throw std::invalid_argument("--dt must be a positive number of trading days");
  if (!opt.prices_path.empty()) {
    const PriceMatrix prices = load_prices(opt.prices_path);
    for (const auto& name : prices.dropped) {
      std::cerr << "warning: dropped " << name << " (missing values)\n";
    }
    return compute_returns(prices, opt.dt);
  }
  if (!opt.returns_path.empty()) {
    const ReturnMatrix daily = load_returns(opt.returns_path, 1);
    return opt.dt == 1 ? daily : aggregate_returns(daily, opt.dt);
  }
  EnsembleSpec spec{CovarianceModel::constant_corr(opt.assets, opt.rho, opt.vol),
                    opt.synthetic_n};
  RngStream rng(seed, 0);
  const ReturnMatrix daily = generate_synthetic(spec, opt.t, rng);
  return opt.dt == 1 ? daily : aggregate_returns(daily, opt.dt);
}

json data_config_json(const DataOpts& opt) {
  json j = {{"dt", opt.dt}};
  if (!opt.prices_path.empty()) j["input"] = opt.prices_path;
  if (!opt.returns_path.empty()) j["returns_input"] = opt.returns_path;
  if (opt.synthetic_n > 0.0) {
    j["synthetic"] = {{"n", opt.synthetic_n}, {"assets", opt.assets}, {"t", opt.t},
                      {"rho", opt.rho},       {"vol", opt.vol}};
  }
  return j;
}

json study_config_json(const StudyConfig& config) {
  return {{"portfolios", config.portfolios},
          {"k", config.k},
          {"weights", to_string(config.scheme)},
          {"a", config.uniform_a},
          {"weight_c", config.fit.weight_c},
          {"n_low", config.fit.n_low},
          {"n_high", config.fit.n_high},
          {"tolerance", config.fit.tolerance},
          {"max_fit_samples", config.max_fit_samples}};
}

json fit_block(const FitResult& r) {
  return {{"n_hat", r.n_hat},
          {"objective", r.objective},
          {"boundary", r.diagnostics.boundary},
          {"ks_distance", r.diagnostics.ks_distance},
          {"iterations", r.diagnostics.iterations}};
}

struct FitOpts {
  DataOpts data;
  StudyConfig study;
  std::string method = "both";  // cvm | mle | both
  int bins = 101;
  std::string out_dir = default_out_dir();
};

void apply_method(const std::string& method, StudyConfig* config) {
  if (method != "cvm" && method != "mle" && method != "both") {
    throw std::invalid_argument("--method must be cvm, mle, or both");
  }
  config->run_mle = method != "cvm";
}

int run_fit(const FitOpts& opt) {
  StudyConfig config = opt.study;
  apply_method(opt.method, &config);
  const ReturnMatrix returns = load_data(opt.data, config.seed);
  const StudyResult result = run_portfolio_study(returns, config);

  json config_json = study_config_json(config);
  config_json["data"] = data_config_json(opt.data);
  config_json["method"] = opt.method;

  const FitResult& primary = (opt.method == "mle") ? result.mle : result.min_dist;
  json out = fit_result_json(primary, result.alpha_mean, config.seed, config_json);
  out["min_dist"] = fit_block(result.min_dist);
  if (config.run_mle) out["mle"] = fit_block(result.mle);
  out["baselines"] = {{"normal", {{"mu", result.normal.mu}, {"sigma", result.normal.sigma}}},
                      {"student_t",
                       {{"nu", result.student_t.nu},
                        {"mu", result.student_t.mu},
                        {"scale", result.student_t.scale},
                        {"boundary", result.student_t.boundary}}}};
  std::vector<double> alphas;
  for (const auto& p : result.portfolios) alphas.push_back(p.alpha);
  out["alpha"] = result.alpha_mean;
  out["alpha_min"] = *std::min_element(alphas.begin(), alphas.end());
  out["alpha_max"] = *std::max_element(alphas.begin(), alphas.end());
  write_json(out, out_path(opt.out_dir, "fit.json"));

  const auto prov = provenance("fit", config.seed, config_json);
  write_histogram(make_histogram(alphas, auto_histogram_spec(alphas, std::min(opt.bins, 51))),
                  out_path(opt.out_dir, "alpha_hist.csv"), prov);
  write_histogram(
      make_histogram(result.pooled_rescaled, auto_histogram_spec(result.pooled_rescaled, opt.bins)),
      out_path(opt.out_dir, "rhat_hist.csv"), prov);

  // model-vs-data curve data on the central range of the pooled sample
  {
    const std::string path = out_path(opt.out_dir, "model_curve.csv");
    std::ofstream file(path);
    if (!file) throw DataError("cannot write '" + path + "'");
    for (const auto& line : prov) file << "# " << line << "\n";
    file << "r_hat,model";
    if (config.run_mle) file << ",model_mle";
    file << ",normal_fit,student_t_fit\n";
    const double span = 6.0;
    const int points = 241;
    for (int i = 0; i < points; ++i) {
      const double r = -span + 2.0 * span * i / (points - 1);
      file << format_double(r) << "," << format_double(rescaled_pdf(result.min_dist.n_hat, r));
      if (config.run_mle) file << "," << format_double(rescaled_pdf(result.mle.n_hat, r));
      file << "," << format_double(normal_pdf(result.normal.mu, result.normal.sigma, r));
      file << ","
           << format_double(student_t_pdf(result.student_t.nu, result.student_t.mu,
                                          result.student_t.scale, r));
      file << "\n";
    }
  }

  std::cout << "fit: " << result.portfolios.size() << " portfolios, "
            << primary.diagnostics.sample_count << " pooled samples\n"
            << "  n_hat (min-dist) = " << result.min_dist.n_hat
            << (result.min_dist.diagnostics.boundary ? " [boundary]" : "") << "\n";
  if (config.run_mle) {
    std::cout << "  n_hat (mle)      = " << result.mle.n_hat
              << (result.mle.diagnostics.boundary ? " [boundary]" : "") << "\n";
  }
  std::cout << "  alpha (mean)     = " << result.alpha_mean << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
  FitOpts fit;
  std::string axis;  // a | k | dt
  std::vector<double> values;
};

int run_sweep(const SweepOpts& opt) {
  if (opt.axis != "a" && opt.axis != "k" && opt.axis != "dt") {
    throw std::invalid_argument("--axis must be a, k, or dt");
  }
  if (opt.values.empty()) throw std::invalid_argument("sweep: need at least one --values entry");

  StudyConfig base = opt.fit.study;
  apply_method(opt.fit.method, &base);
  base.run_baselines = false;

  json config_json = study_config_json(base);
  config_json["data"] = data_config_json(opt.fit.data);
  config_json["axis"] = opt.axis;
  config_json["values"] = opt.values;

  const std::string path = out_path(opt.fit.out_dir, "sweep.csv");
  std::ofstream file(path);
  if (!file) throw DataError("cannot write '" + path + "'");
  for (const auto& line : provenance("sweep", base.seed, config_json)) {
    file << "# " << line << "\n";
  }
  file << "axis,value,alpha_mean,n_min_dist,boundary_min_dist";
  if (base.run_mle) file << ",n_mle,boundary_mle";
  file << "\n";

  for (double value : opt.values) {
    DataOpts data = opt.fit.data;
    StudyConfig config = base;
    if (opt.axis == "a") {
      if (config.scheme != WeightScheme::kUniform) {
        throw std::invalid_argument("sweep over a requires --weights uniform");
      }
      if (!(value > 0.0)) throw std::invalid_argument("sweep: a values must be positive");
      config.uniform_a = value;
    } else if (opt.axis == "k") {
      if (value < 2.0 || value != std::floor(value)) {
        throw std::invalid_argument("sweep: k values must be integers >= 2");
      }
      config.k = static_cast<int>(value);
    } else {
      if (value < 1.0 || value != std::floor(value)) {
        throw std::invalid_argument("sweep: dt values must be integers >= 1");
      }
      data.dt = static_cast<int>(value);
    }
    const ReturnMatrix returns = load_data(data, config.seed);
    const StudyResult result = run_portfolio_study(returns, config);
    file << opt.axis << "," << format_double(value) << "," << format_double(result.alpha_mean)
         << "," << format_double(result.min_dist.n_hat) << ","
         << (result.min_dist.diagnostics.boundary ? 1 : 0);
    if (config.run_mle) {
      file << "," << format_double(result.mle.n_hat) << ","
           << (result.mle.diagnostics.boundary ? 1 : 0);
    }
    file << "\n";
    std::cout << "sweep " << opt.axis << "=" << value << ": alpha=" << result.alpha_mean
              << " n_hat=" << result.min_dist.n_hat << "\n";
  }
  return 0;
}

void add_data_options(CLI::App* cmd, DataOpts* data) {
  cmd->add_option("--input", data->prices_path, "price CSV (date,TICKER,... header)");
  cmd->add_option("--returns-input", data->returns_path, "returns CSV (same layout)");
  cmd->add_option("--synthetic-n", data->synthetic_n,
                  "generate synthetic returns with this fluctuation parameter N");
  cmd->add_option("--assets", data->assets, "synthetic: number of assets");
  cmd->add_option("--t", data->t, "synthetic: time steps");
  cmd->add_option("--rho", data->rho, "synthetic: constant correlation");
  cmd->add_option("--vol", data->vol, "synthetic: per-asset volatility");
  cmd->add_option("--dt", data->dt, "return interval in trading days");
}

void add_study_options(CLI::App* cmd, FitOpts* opt) {
  cmd->add_option("--portfolios", opt->study.portfolios, "number of random portfolios");
  cmd->add_option("--k", opt->study.k, "stocks per portfolio");
  cmd->add_option_function<std::string>(
         "--weights", [opt](const std::string& s) { opt->study.scheme = parse_weight_scheme(s); },
         "weight scheme: uniform | equal | markowitz")
      ->default_str("uniform");
  cmd->add_option("--a", opt->study.uniform_a, "half-width of the uniform weight distribution");
  cmd->add_option("--method", opt->method, "fit method: cvm | mle | both");
  cmd->add_option("--weight-c", opt->study.fit.weight_c, "CvM Gaussian weight width");
  cmd->add_option("--n-low", opt->study.fit.n_low, "lower fit bound for N");
  cmd->add_option("--n-high", opt->study.fit.n_high, "upper fit bound for N");
  cmd->add_option("--max-fit-samples", opt->study.max_fit_samples,
                  "cap on pooled samples used by the fit (0 = all)");
  cmd->add_option("--seed", opt->study.seed, "master RNG seed");
  cmd->add_option("--out-dir", opt->out_dir, "output directory (default $RETDIST_OUT or .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + ": portfolio return distributions under fluctuating "
               "correlations"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  PdfOpts pdf_opts;
  CLI::App* pdf_cmd = app.add_subcommand("pdf", "tabulate the analytic density");
  pdf_cmd->add_option("--n", pdf_opts.n_values, "fluctuation parameter values")
      ->required()
      ->delimiter(',');
  pdf_cmd->add_option("--alpha", pdf_opts.alpha, "portfolio variance scale");
  pdf_cmd->add_option("--range", pdf_opts.range, "grid range lo:hi");
  pdf_cmd->add_option("--points", pdf_opts.points, "grid points");
  pdf_cmd->add_flag("--normal", pdf_opts.with_normal, "overlay a normal density");
  pdf_cmd->add_option("--student-nu", pdf_opts.student_nu, "overlay a Student t density");
  pdf_cmd->add_option("--out", pdf_opts.out, "output file ('-' = stdout)");

  SimulateOpts sim_opts;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "draw synthetic ensemble returns");
  sim_cmd->add_option("--k", sim_opts.k, "number of assets");
  sim_cmd->add_option("--n", sim_opts.n, "fluctuation parameter N")->required();
  sim_cmd->add_option("--samples", sim_opts.samples, "number of draws");
  sim_cmd->add_option("--rho", sim_opts.rho, "constant correlation");
  sim_cmd->add_option("--vol", sim_opts.vol, "per-asset volatility");
  sim_cmd->add_option("--path", sim_opts.path, "sampler path: mixture | wishart");
  sim_cmd->add_option("--seed", sim_opts.seed, "RNG seed");
  sim_cmd->add_option("--out-dir", sim_opts.out_dir, "output directory");

  FitOpts fit_opts;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit N to portfolio returns");
  add_data_options(fit_cmd, &fit_opts.data);
  add_study_options(fit_cmd, &fit_opts);
  fit_cmd->add_option("--bins", fit_opts.bins, "histogram bins");

  SweepOpts sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "fit along a parameter axis");
  add_data_options(sweep_cmd, &sweep_opts.fit.data);
  add_study_options(sweep_cmd, &sweep_opts.fit);
  sweep_cmd->add_option("--axis", sweep_opts.axis, "sweep axis: a | k | dt")->required();
  sweep_cmd->add_option("--values", sweep_opts.values, "axis values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*pdf_cmd) return run_pdf(pdf_opts);
    if (*sim_cmd) return run_simulate(sim_opts);
    if (*fit_cmd) return run_fit(fit_opts);
    if (*sweep_cmd) return run_sweep(sweep_opts);
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
