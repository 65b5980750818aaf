// Batch front end: JSON/CSV reports for entropies, deficits, divergence
// grids, bound evaluations, channel comparisons, Landauer bands and
// parameter sweeps.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixent/mixent.hpp"

namespace {

using mixent::json;

struct Options {
  std::string model_path;
  std::vector<double> t_grid{0.5};
  double lambda = 1.0;
  double tau = 1.0;
  int m = 1;
  double sigma = 1.0;
  int n = 2;
  double p0 = 0.5;
  double p1 = 0.0;
  double kbt = 1.0;
  std::uint64_t seed = 0;
  std::int64_t samples = 200000;
  int chunks = 8;
  std::string output = "json";
  bool bits = false;
  std::string sweep_param = "lambda";
  std::vector<double> sweep_values;
  bool oracle_column = true;
};

double display(double nats, const Options &opt) {
  return opt.bits ? nats / std::log(2.0) : nats;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void emit(const json &j) { std::cout << j.dump(2) << "\n"; }

json estimate_json(const mixent::Estimate &e, const Options &opt) {
  json j = mixent::to_json(e);
  j["value"] = display(e.value, opt);
  j["error"] = display(e.error, opt);
  j["unit"] = opt.bits ? "bits" : "nats";
  return j;
}

json report_json(const mixent::BoundReport &r, const Options &opt) {
  json j = mixent::to_json(r);
  j["value"] = display(r.value, opt);
  j["unit"] = opt.bits ? "bits" : "nats";
  return j;
}

mixent::QuadratureSpec quad_spec() {
  mixent::QuadratureSpec q;
  q.abs_tol = 1e-10;
  q.rel_tol = 1e-10;
  return q;
}

mixent::McSpec mc_spec(const Options &opt) {
  mixent::McSpec m;
  m.seed = opt.seed;
  m.samples = opt.samples;
  m.chunks = opt.chunks;
  return m;
}

int run_entropy(const Options &opt) {
  const mixent::MixtureModel model = mixent::load_model(opt.model_path);
  const mixent::OracleResult h =
      mixent::mixture_entropy(model, quad_spec(), mc_spec(opt));
  json j;
  j["command"] = "entropy";
  j["model"] = opt.model_path;
  j["entropy"] = estimate_json(h, opt);
  emit(j);
  return 0;
}

int run_deficit(const Options &opt) {
  const mixent::MixtureModel model = mixent::load_model(opt.model_path);
  const auto quad = quad_spec();
  const auto mc = mc_spec(opt);
  const mixent::OracleResult oracle =
      mixent::concavity_deficit(model, quad, mc);
  const mixent::BoundReport upper =
      mixent::deficit_upper_tv(model, quad, mc);
  const mixent::SeparationCertificate cert(opt.lambda, opt.m, opt.tau);
  const mixent::BoundReport lower = mixent::deficit_lower(model, cert, quad);
  json j;
  j["command"] = "deficit";
  j["model"] = opt.model_path;
  j["oracle"] = estimate_json(oracle, opt);
  j["upper"] = report_json(upper, opt);
  j["lower"] = report_json(lower, opt);
  emit(j);
  return 0;
}

int run_divergence(const Options &opt) {
  const mixent::MixtureModel model = mixent::load_model(opt.model_path);
  if (model.size() != 2)
    throw mixent::input_error(
        "divergence: model must have exactly two components");
  mixent::DensityPair pair(mixent::DensityRef::from(model.component(0)),
                           mixent::DensityRef::from(model.component(1)));
  const auto quad = quad_spec();
  const auto mc = mc_spec(opt);
  const mixent::Estimate tv = mixent::total_variation(pair, quad, mc);
  const mixent::Estimate js = mixent::jsd(pair, quad, mc);

  if (opt.output == "csv") {
    std::cout << "t,skew_divergence,skew_chi2,tv,jsd\n";
    for (double t : opt.t_grid) {
      const double st =
          mixent::skew_divergence(pair, t, quad, mc).value;
      const double ct = mixent::skew_chi2(pair, t, quad, mc).value;
      std::cout << fmt(t) << "," << fmt(display(st, opt)) << ","
                << fmt(display(ct, opt)) << "," << fmt(tv.value) << ","
                << fmt(display(js.value, opt)) << "\n";
    }
    return 0;
  }
  json rows = json::array();
  for (double t : opt.t_grid) {
    json row;
    row["t"] = t;
    row["skew_divergence"] =
        estimate_json(mixent::skew_divergence(pair, t, quad, mc), opt);
    row["skew_chi2"] =
        estimate_json(mixent::skew_chi2(pair, t, quad, mc), opt);
    rows.push_back(row);
  }
  json j;
  j["command"] = "divergence";
  j["model"] = opt.model_path;
  j["tv"] = estimate_json(tv, opt);
  j["jsd"] = estimate_json(js, opt);
  j["grid"] = rows;
  emit(j);
  return 0;
}

int run_bounds(const Options &opt) {
  const mixent::MixtureModel model = mixent::load_model(opt.model_path);
  const auto quad = quad_spec();
  const auto mc = mc_spec(opt);
  const mixent::BoundReport upper =
      mixent::deficit_upper_tv(model, quad, mc);
  const mixent::SeparationCertificate cert(opt.lambda, opt.m, opt.tau);
  const mixent::BoundReport lower = mixent::deficit_lower(model, cert, quad);
  json j;
  j["command"] = "bounds";
  j["model"] = opt.model_path;
  j["upper"] = report_json(upper, opt);
  j["lower"] = report_json(lower, opt);
  emit(j);
  return 0;
}

// One comparison row at a given (N, lambda, sigma): all columns bound or
// measure H(X|Z) for the 2 lambda-spaced grid.
json channel_row(int n, double lambda, double sigma, bool with_oracle,
                 const Options &opt) {
  json row;
  row["N"] = n;
  row["lambda"] = lambda;
  row["sigma"] = sigma;
  if (with_oracle) {
    mixent::ChannelSpec ch =
        mixent::ChannelSpec::uniform_grid(n, 2.0 * lambda, sigma);
    const mixent::OracleResult h =
        mixent::conditional_entropy_x_given_z(ch.to_mixture(), quad_spec());
    row["oracle"] = display(h.value, opt);
  } else {
    row["oracle"] = nullptr;
  }
  row["paper_bound"] =
      display(mixent::agwn_1d_condentropy_bound(lambda, sigma).value, opt);
  row["fano_bound"] = display(
      mixent::fano_rhs(mixent::grid_bayes_error(n, lambda, sigma), n), opt);
  row["ozwy_bound"] =
      display(mixent::ozarow_wyner_bound(n, lambda, sigma).value, opt);
  return row;
}

void channel_csv_row(const json &row) {
  const double oracle = row["oracle"].is_null()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : row["oracle"].get<double>();
  std::cout << fmt(row["parameter"].get<double>()) << "," << fmt(oracle) << ","
            << fmt(row["paper_bound"].get<double>()) << ","
            << fmt(row["fano_bound"].get<double>()) << ","
            << fmt(row["ozwy_bound"].get<double>()) << "\n";
}

int run_channel(const Options &opt) {
  const bool with_oracle = opt.oracle_column && opt.n <= 100;
  json row = channel_row(opt.n, opt.lambda, opt.sigma, with_oracle, opt);
  row["parameter"] = static_cast<double>(opt.n);
  if (opt.output == "csv") {
    std::cout << "parameter,oracle,paper_bound,fano_bound,ozwy_bound\n";
    channel_csv_row(row);
    return 0;
  }
  json j;
  j["command"] = "channel";
  j["row"] = row;
  emit(j);
  return 0;
}

int run_landauer(const Options &opt) {
  mixent::EnergeticsSpec spec;
  spec.a = opt.lambda;
  spec.sigma = opt.sigma;
  spec.p0 = opt.p0;
  spec.p1 = opt.p1;
  spec.kBT = opt.kbt;
  const mixent::LandauerBand band = mixent::landauer_bounds(spec);
  const double oracle = mixent::landauer_oracle_heat(spec, quad_spec());
  json j;
  j["command"] = "landauer";
  j["a"] = spec.a;
  j["sigma"] = spec.sigma;
  j["p0"] = spec.p0;
  j["p1"] = spec.p1;
  j["kBT"] = spec.kBT;
  j["lower"] = display(band.lower, opt);
  j["upper"] = display(band.upper, opt);
  j["central"] = display(band.central, opt);
  j["oracle_heat"] = display(oracle, opt);
  j["unit"] = opt.bits ? "bits_kBT" : "nats_kBT";
  emit(j);
  return 0;
}

int run_sweep(const Options &opt) {
  if (opt.sweep_values.empty())
    throw mixent::input_error("sweep: --values required");
  std::vector<json> rows;
  for (double v : opt.sweep_values) {
    int n = opt.n;
    double lambda = opt.lambda, sigma = opt.sigma;
    if (opt.sweep_param == "lambda") {
      lambda = v;
    } else if (opt.sweep_param == "sigma") {
      sigma = v;
    } else if (opt.sweep_param == "N") {
      n = static_cast<int>(v);
    } else {
      throw mixent::input_error("sweep: unknown parameter '" +
                                opt.sweep_param + "'");
    }
    const bool with_oracle = opt.oracle_column && n <= 100;
    json row = channel_row(n, lambda, sigma, with_oracle, opt);
    row["parameter"] = v;
    rows.push_back(row);
  }
  if (opt.output == "csv") {
    std::cout << "parameter,oracle,paper_bound,fano_bound,ozwy_bound\n";
    for (const json &row : rows) channel_csv_row(row);
    return 0;
  }
  json j;
  j["command"] = "sweep";
  j["param"] = opt.sweep_param;
  j["rows"] = rows;
  emit(j);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"mixture entropy deficit calculator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--model", opt.model_path, "model JSON path");
    sub->add_option("--t", opt.t_grid, "skew parameter grid")->delimiter(',');
    sub->add_option("--lambda", opt.lambda, "separation / well half-width");
    sub->add_option("--tau", opt.tau, "bi-Lipschitz constant");
    sub->add_option("--M", opt.m, "overlap count bound");
    sub->add_option("--sigma", opt.sigma, "noise scale");
    sub->add_option("--N", opt.n, "constellation size");
    sub->add_option("--p0", opt.p0, "initial bit probability");
    sub->add_option("--p1", opt.p1, "final bit probability");
    sub->add_option("--kBT", opt.kbt, "energy unit");
    sub->add_option("--seed", opt.seed, "MC seed");
    sub->add_option("--samples", opt.samples, "MC samples");
    sub->add_option("--chunks", opt.chunks, "MC chunks");
    sub->add_option("--output", opt.output, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--bits", opt.bits, "display in bits");
    sub->add_option("--param", opt.sweep_param, "sweep parameter name");
    sub->add_option("--values", opt.sweep_values, "sweep values")
        ->delimiter(',');
    sub->add_flag("!--no-oracle", opt.oracle_column, "skip oracle column");
  };

  CLI::App *entropy = app.add_subcommand("entropy", "oracle h(f)");
  CLI::App *deficit = app.add_subcommand("deficit", "oracle + bounds");
  CLI::App *divergence = app.add_subcommand("divergence", "skew family grid");
  CLI::App *bounds = app.add_subcommand("bounds", "bound reports");
  CLI::App *channel = app.add_subcommand("channel", "Fano/OzWy comparison");
  CLI::App *landauer = app.add_subcommand("landauer", "erasure energy band");
  CLI::App *sweep = app.add_subcommand("sweep", "parameter sweep CSV");
  for (CLI::App *sub :
       {entropy, deficit, divergence, bounds, channel, landauer, sweep})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    json err;
    err["error"] = "parse";
    err["what"] = e.what();
    std::cout << err.dump(2) << "\n";
    return 2;
  }

  try {
    if (*entropy) return run_entropy(opt);
    if (*deficit) return run_deficit(opt);
    if (*divergence) return run_divergence(opt);
    if (*bounds) return run_bounds(opt);
    if (*channel) return run_channel(opt);
    if (*landauer) return run_landauer(opt);
    if (*sweep) return run_sweep(opt);
  } catch (const mixent::input_error &e) {
    json err;
    err["error"] = "input";
    err["what"] = e.what();
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const mixent::quadrature_error &e) {
    json err;
    err["error"] = "non_convergence";
    err["what"] = e.what();
    err["partial"] = mixent::to_json(e.best_estimate);
    std::cout << err.dump(2) << "\n";
    return 3;
  } catch (const std::exception &e) {
    json err;
    err["error"] = "numeric";
    err["what"] = e.what();
    std::cout << err.dump(2) << "\n";
    return 3;
  }
  return 2;
}
