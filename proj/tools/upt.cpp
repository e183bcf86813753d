// Copyright 2026 The upt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// upt: utility-privacy tradeoff toolkit.
//
// Subcommands: fit, tradeoff, sanitize, gaussian, simulate, solve.
// Exit codes: 0 success, 2 usage error, 3 domain error, 4 data error,
// 5 size-cap exceeded. Outputs are written atomically (temp file + rename)
// and never overwrite inputs in place; floats are printed with 12
// significant digits. UPT_THREADS bounds internal parallelism.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "upt/categorical.hpp"
#include "upt/csvio.hpp"
#include "upt/errors.hpp"
#include "upt/gaussian.hpp"
#include "upt/infotheory.hpp"
#include "upt/jsonutil.hpp"
#include "upt/kern.hpp"
#include "upt/qnb.hpp"
#include "upt/rde.hpp"
#include "upt/sanitizer.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "0.1,0.25,0.5" or "lo:hi:count" (inclusive linspace).
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split_list([&] {
      std::string s = spec;
      for (char& c : s) {
        if (c == ':') c = ',';
      }
      return s;
    }());
    if (parts.size() != 3) {
      throw upt::ArgumentError("grid: expected lo:hi:count");
    }
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const long count = std::stol(parts[2]);
    if (count < 1) throw upt::ArgumentError("grid: count must be >= 1");
    for (long i = 0; i < count; ++i) {
      grid.push_back(count == 1
                         ? lo
                         : lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
    }
    return grid;
  }
  for (const auto& tok : split_list(spec)) {
    try {
      grid.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw upt::ArgumentError("grid: bad number '" + tok + "'");
    }
  }
  if (grid.empty()) throw upt::ArgumentError("grid: empty");
  return grid;
}

upt::Pmf load_pmf(const std::string& path, bool normalize) {
  json j = upt::load_json(path);
  if (normalize && j.contains("probs")) {
    double total = 0.0;
    for (const auto& v : j["probs"]) total += v.get<double>();
    if (total <= 0.0) throw upt::DataError("pmf: non-positive total weight");
    for (auto& v : j["probs"]) v = v.get<double>() / total;
  }
  return upt::Pmf::from_json(j);
}

void write_curve_csv(const std::string& path, const upt::TradeoffCurve& curve,
                     const std::vector<std::string>& cols) {
  std::ostringstream out;
  upt::csv::write_row(out, cols);
  for (const auto& pt : curve) {
    std::vector<std::string> row;
    for (const auto& c : cols) {
      double v = 0;
      if (c == "D") v = pt.D;
      if (c == "R") v = pt.R;
      if (c == "E") v = pt.E;
      if (c == "L") v = pt.L;
      row.push_back(upt::csv::fmt12(v));
    }
    upt::csv::write_row(out, row);
  }
  upt::write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------- fit

struct FitArgs {
  std::string in, out, cols, pub, priv_;
  double smoothing = 0.0;
};

void run_fit(const FitArgs& a) {
  const auto db = upt::sanitizer::Database::from_csv_file(a.in);
  const auto attrs = split_list(a.cols);
  const auto pub = split_list(a.pub);
  const auto priv = split_list(a.priv_);
  const auto joint =
      upt::sanitizer::fit_empirical_pmf(db, attrs, a.smoothing, pub, priv);
  if (attrs.size() == 1 && pub.empty() && priv.empty()) {
    const std::size_t axis[] = {0};
    upt::save_json_atomic(a.out, joint.marginal(axis).to_json());
  } else {
    upt::save_json_atomic(a.out, joint.to_json());
  }
  std::cerr << "fit: " << db.n_rows() << " rows over " << attrs.size()
            << " attribute(s) -> " << a.out << "\n";
}

// ----------------------------------------------------------------- tradeoff

struct TradeoffArgs {
  std::string pmf, out, grid, solution, fwd_channel, test_channel;
  double at = -1.0;
  bool normalize = false;
};

void run_tradeoff(const TradeoffArgs& a) {
  const upt::Pmf source = load_pmf(a.pmf, a.normalize);
  if (!a.grid.empty()) {
    const auto grid = parse_grid(a.grid);
    const auto curve = upt::categorical::up_curve(source, grid);
    write_curve_csv(a.out, curve, {"D", "R", "E"});
  }
  if (a.at >= 0.0) {
    const auto sol = upt::categorical::reverse_waterfill(source, a.at);
    if (!a.solution.empty()) {
      upt::save_json_atomic(a.solution, sol.to_json());
    }
    if (!a.fwd_channel.empty()) {
      upt::write_file_atomic(a.fwd_channel,
                             sol.forward_channel.to_csv_string());
    }
    if (!a.test_channel.empty()) {
      upt::write_file_atomic(a.test_channel, sol.test_channel.to_csv_string());
    }
  }
}

// ----------------------------------------------------------------- sanitize

struct SanitizeArgs {
  std::string in, out, report, config, pub, priv_;
  std::vector<std::string> channels;
  std::uint64_t seed = 0;
  double target_d = 0.0;
  bool map_unseen = false;
};

void run_sanitize(const SanitizeArgs& a) {
  const auto db = upt::sanitizer::Database::from_csv_file(a.in);

  std::vector<std::string> pub = split_list(a.pub);
  std::vector<std::string> priv = split_list(a.priv_);
  if (!a.config.empty()) {
    const json cfg = upt::load_json(a.config);
    if (pub.empty() && cfg.contains("public")) {
      for (const auto& v : cfg["public"]) pub.push_back(v.get<std::string>());
    }
    if (priv.empty() && cfg.contains("private")) {
      for (const auto& v : cfg["private"]) {
        priv.push_back(v.get<std::string>());
      }
    }
  }

  // channel args: either one CSV path (joint channel over the public
  // composite) or repeated col=path pairs (independent per-attribute).
  std::vector<std::pair<std::string, upt::Channel>> per_attr;
  std::optional<upt::Channel> joint_channel;
  for (const auto& spec : a.channels) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      if (joint_channel || !per_attr.empty()) {
        throw upt::ArgumentError(
            "sanitize: give one joint channel or col=path pairs, not both");
      }
      joint_channel = upt::Channel::from_csv_file(spec);
    } else {
      per_attr.emplace_back(spec.substr(0, eq),
                            upt::Channel::from_csv_file(spec.substr(eq + 1)));
    }
  }
  if (!joint_channel && per_attr.empty()) {
    throw upt::ArgumentError("sanitize: --channel is required");
  }

  if (pub.empty()) {
    if (joint_channel && db.n_cols() == 1) {
      pub.push_back(db.schema()[0].name);
    } else if (!per_attr.empty()) {
      for (const auto& [col, ch] : per_attr) pub.push_back(col);
    } else {
      throw upt::ArgumentError(
          "sanitize: name the public columns (--public or --config)");
    }
  }

  upt::sanitizer::Database sdb =
      joint_channel
          ? upt::sanitizer::sanitize_rows(db, *joint_channel, pub, a.seed,
                                          a.map_unseen)
          : upt::sanitizer::sanitize_per_attribute(db, per_attr, a.seed,
                                                   a.map_unseen);
  upt::write_file_atomic(a.out, sdb.to_csv_string());

  if (!a.report.empty()) {
    if (!joint_channel) {
      throw upt::ArgumentError(
          "sanitize: --report needs the joint-channel form");
    }
    std::vector<std::string> design_attrs = priv;
    design_attrs.insert(design_attrs.end(), pub.begin(), pub.end());
    if (priv.empty()) design_attrs = pub;
    std::vector<std::string> design_priv = priv.empty() ? pub : priv;
    const auto design = upt::sanitizer::fit_empirical_pmf(
        db, design_attrs, 0.0, pub, design_priv);
    const auto rep = upt::sanitizer::evaluate(db, sdb, *joint_channel, design,
                                              pub, a.target_d, a.seed);
    upt::save_json_atomic(a.report, rep.to_json());
  }
}

// ----------------------------------------------------------------- gaussian

struct GaussianArgs {
  std::string out, grid, case_name = "uninformed", model_out;
  double varx = 1.0, vary = 1.0;
  double rhoxy2 = 0.0;
  double rhoxz2 = -1.0;  // < 0 means absent
};

void run_gaussian(const GaussianArgs& a) {
  upt::gaussian::GaussianModel m;
  m.var_x = a.varx;
  m.var_y = a.vary;
  if (a.rhoxy2 < 0.0 || a.rhoxy2 > 1.0) {
    throw upt::DomainError("gaussian: --rhoxy2 must lie in [0, 1]", 0, 1);
  }
  m.rho_xy = std::sqrt(a.rhoxy2);
  if (a.rhoxz2 >= 0.0) {
    if (a.rhoxz2 > 1.0) {
      throw upt::DomainError("gaussian: --rhoxz2 must lie in [0, 1]", 0, 1);
    }
    m.rho_xz = std::sqrt(a.rhoxz2);
  }
  const auto c = upt::gaussian::case_from_name(a.case_name);
  const auto grid = parse_grid(a.grid);
  const auto pts = upt::gaussian::curve(m, c, grid);

  std::ostringstream out;
  upt::csv::write_row(out, {"D", "R", "L", "case"});
  for (const auto& pt : pts) {
    upt::csv::write_row(out, {upt::csv::fmt12(pt.D), upt::csv::fmt12(pt.R),
                              upt::csv::fmt12(pt.L),
                              upt::gaussian::case_name(pt.case_tag)});
  }
  upt::write_file_atomic(a.out, out.str());
  if (!a.model_out.empty()) upt::save_json_atomic(a.model_out, m.to_json());
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config, out, blocklengths;
};

void run_simulate(const SimulateArgs& a) {
  const json cfg_json = upt::load_json(a.config);
  const auto cfg = upt::qnb::CodingConfig::from_json(cfg_json);

  std::vector<std::size_t> ns;
  if (!a.blocklengths.empty()) {
    for (const auto& tok : split_list(a.blocklengths)) {
      ns.push_back(static_cast<std::size_t>(std::stoul(tok)));
    }
  } else if (cfg_json.contains("blocklengths")) {
    for (const auto& v : cfg_json["blocklengths"]) {
      ns.push_back(v.get<std::size_t>());
    }
  } else if (cfg_json.contains("n")) {
    ns.push_back(cfg_json["n"].get<std::size_t>());
  } else {
    throw upt::ArgumentError(
        "simulate: give --blocklengths or put \"blocklengths\"/\"n\" in the "
        "config");
  }

  const auto results = upt::qnb::run_sweep(cfg, ns);
  json out;
  out["config"] = cfg.to_json();
  out["results"] = json::array();
  for (const auto& r : results) out["results"].push_back(r.to_json());
  upt::save_json_atomic(a.out, out);
  for (const auto& r : results) {
    std::cerr << "simulate: n=" << r.n << " M=" << r.M << " bins=" << r.bins
              << " err=" << r.err_rate << " dist=" << r.mean_distortion
              << "\n";
  }
}

// -------------------------------------------------------------------- solve

struct SolveArgs {
  std::string problem, out, channel_out, objective = "max_equivocation";
  double target_d = std::nan("");
};

void run_solve(const SolveArgs& a) {
  auto prob = upt::rde::RdeProblem::from_json(upt::load_json(a.problem));
  if (!std::isnan(a.target_d)) prob.target_d = a.target_d;

  upt::rde::RdeSolution sol =
      a.objective == "min_rate" ? upt::rde::solve_min_rate(prob)
                                : upt::rde::solve_max_equivocation(prob);
  json j = sol.to_json();
  double d_min, d_max;
  upt::rde::distortion_bounds(prob, &d_min, &d_max);
  j["d_min"] = upt::jreal(d_min);
  j["d_max"] = upt::jreal(d_max);
  upt::save_json_atomic(a.out, j);
  if (!a.channel_out.empty()) {
    upt::write_file_atomic(a.channel_out, sol.channel.to_csv_string());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"upt: utility-privacy tradeoff toolkit"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* cfit = app.add_subcommand(
      "fit", "Fit an empirical pmf/joint pmf from a CSV database");
  cfit->add_option("--in", fit.in, "input CSV with header row")->required();
  cfit->add_option("--cols", fit.cols, "comma list of attribute names")
      ->required();
  cfit->add_option("--smoothing", fit.smoothing, "additive smoothing alpha");
  cfit->add_option("--public", fit.pub, "public attribute names");
  cfit->add_option("--private", fit.priv_, "private attribute names");
  cfit->add_option("--out", fit.out, "output pmf JSON")->required();

  TradeoffArgs tr;
  auto* ctr = app.add_subcommand(
      "tradeoff",
      "Categorical utility-privacy boundary by reverse waterfilling");
  ctr->add_option("--pmf", tr.pmf, "source pmf JSON")->required();
  ctr->add_option("--grid", tr.grid, "distortion grid (list or lo:hi:count)");
  ctr->add_option("--out", tr.out, "output curve CSV (D,R,E)");
  ctr->add_option("--at", tr.at, "solve the mechanism at one distortion");
  ctr->add_option("--solution", tr.solution, "solution summary JSON");
  ctr->add_option("--forward-channel", tr.fwd_channel,
                  "sanitizer p(xhat|x) CSV");
  ctr->add_option("--test-channel", tr.test_channel,
                  "backward p(x|xhat) CSV");
  ctr->add_flag("--normalize", tr.normalize,
                "rescale input weights to sum 1 before solving");

  SanitizeArgs sa;
  auto* csa = app.add_subcommand(
      "sanitize", "Apply a sanitization channel to a CSV database");
  csa->add_option("--in", sa.in, "input CSV")->required();
  csa->add_option("--channel", sa.channels,
                  "channel CSV (or col=path, repeatable)")
      ->required();
  csa->add_option("--seed", sa.seed, "RNG seed; fully determines the output");
  csa->add_option("--out", sa.out, "output CSV (public columns only)")
      ->required();
  csa->add_option("--public", sa.pub, "public column names");
  csa->add_option("--private", sa.priv_, "private column names");
  csa->add_option("--config", sa.config,
                  "JSON config naming public/private columns");
  csa->add_option("--report", sa.report, "write evaluation report JSON");
  csa->add_option("--target-d", sa.target_d, "design distortion for report");
  csa->add_flag("--map-unseen", sa.map_unseen,
                "send unseen symbols through the output distribution");

  GaussianArgs ga;
  auto* cga = app.add_subcommand(
      "gaussian", "Gaussian rate/leakage curves, with/without side info");
  cga->add_option("--varx", ga.varx, "variance of the public attribute");
  cga->add_option("--vary", ga.vary, "variance of the private attribute");
  cga->add_option("--rhoxy2", ga.rhoxy2, "squared correlation of (X, Y)");
  cga->add_option("--rhoxz2", ga.rhoxz2, "squared correlation of (X, Z)");
  cga->add_option("--case", ga.case_name, "uninformed | si | informed");
  cga->add_option("--grid", ga.grid, "distortion grid")->required();
  cga->add_option("--out", ga.out, "output curve CSV (D,R,L,case)")
      ->required();
  cga->add_option("--model-out", ga.model_out, "write model JSON");

  SimulateArgs si;
  auto* csi = app.add_subcommand(
      "simulate", "Quantize-and-bin random-codebook experiment");
  csi->add_option("--config", si.config, "experiment config JSON")->required();
  csi->add_option("--blocklengths", si.blocklengths,
                  "comma list; overrides the config");
  csi->add_option("--out", si.out, "summary JSON")->required();

  SolveArgs so;
  auto* cso = app.add_subcommand(
      "solve", "Numerical RDE solver for discrete sources");
  cso->add_option("--problem", so.problem, "problem JSON")->required();
  cso->add_option("--objective", so.objective,
                  "max_equivocation | min_rate");
  cso->add_option("--target-d", so.target_d, "override the problem's target");
  cso->add_option("--out", so.out, "solution JSON")->required();
  cso->add_option("--channel-out", so.channel_out, "channel CSV");

  try {
    app.parse(argc, argv);
    if (cfit->parsed()) run_fit(fit);
    if (ctr->parsed()) run_tradeoff(tr);
    if (csa->parsed()) run_sanitize(sa);
    if (cga->parsed()) run_gaussian(ga);
    if (csi->parsed()) run_simulate(si);
    if (cso->parsed()) run_solve(so);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const upt::DomainError& e) {
    std::cerr << "upt: error: " << e.what() << "\n";
    return 3;
  } catch (const upt::ArgumentError& e) {
    std::cerr << "upt: error: " << e.what() << "\n";
    return 2;
  } catch (const upt::CapError& e) {
    std::cerr << "upt: error: " << e.what() << "\n";
    return 5;
  } catch (const upt::DataError& e) {
    std::cerr << "upt: error: " << e.what() << "\n";
    return 4;
  } catch (const upt::Error& e) {
    std::cerr << "upt: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "upt: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
