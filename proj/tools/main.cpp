// Command-line front end: model inspection, sum-rate bounds, membership
// certificates, water filling, matching reports, direct-to-remote
// conversion, trade-off curves, and Monte-Carlo validation.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaussrd/achievability.hpp"
#include "gaussrd/cyclic.hpp"
#include "gaussrd/duality.hpp"
#include "gaussrd/matching.hpp"
#include "gaussrd/model_io.hpp"
#include "gaussrd/rate_region.hpp"
#include "gaussrd/waterfill.hpp"

namespace {

using namespace gaussrd;

constexpr double kNatsPerBit = 0.6931471805599453;

struct Options {
  bool bits = false;

  double rate_scale() const { return bits ? 1.0 / kNatsPerBit : 1.0; }
  const char* rate_unit() const { return bits ? "bits" : "nats"; }
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string fmt_rate(double nats, const Options& opt) {
  return fmt(nats * opt.rate_scale()) + " " + opt.rate_unit();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("expected a comma-separated number list, got '" +
                                 text + "'");
    }
  }
  if (out.empty())
    throw CLI::ValidationError("empty number list");
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<long>(v.size()));
}

// A scalar means that multiple of the identity; otherwise k*k row-major
// entries.
Eigen::MatrixXd parse_square(const std::string& text, int k,
                             const std::string& name) {
  std::vector<double> vals = parse_list(text);
  if (vals.size() == 1)
    return vals[0] * Eigen::MatrixXd::Identity(k, k);
  if (static_cast<int>(vals.size()) != k * k)
    throw CLI::ValidationError(name + " needs 1 or " + std::to_string(k * k) +
                               " comma-separated values");
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = vals[i * k + j];
  return m;
}

void print_matrix(const std::string& label, const Eigen::MatrixXd& m) {
  std::cout << label << " =\n";
  for (int i = 0; i < m.rows(); ++i) {
    std::cout << "  ";
    for (int j = 0; j < m.cols(); ++j)
      std::cout << (j ? " " : "") << fmt(m(i, j));
    std::cout << "\n";
  }
}

struct SpecFlags {
  std::string matrix, vec, gamma = "1";
  double sum = -1.0;

  void attach(CLI::App* cmd, bool with_matrix) {
    if (with_matrix)
      cmd->add_option("--matrix", matrix,
                      "matrix criterion: k*k row-major entries (or scalar)");
    cmd->add_option("--sum", sum, "sum criterion distortion level");
    cmd->add_option("--vector", vec,
                    "vector criterion levels d1,...,dk");
    cmd->add_option("--gamma", gamma,
                    "weight matrix: scalar or k*k row-major entries");
  }

  DistortionSpec build(int k) const {
    int given = (!matrix.empty() ? 1 : 0) + (sum >= 0.0 ? 1 : 0) +
                (!vec.empty() ? 1 : 0);
    if (given != 1)
      throw CLI::ValidationError(
          "give exactly one of --matrix, --sum, --vector");
    if (!matrix.empty())
      return MatrixDistortion{parse_square(matrix, k, "--matrix")};
    Eigen::MatrixXd g = parse_square(gamma, k, "--gamma");
    if (sum >= 0.0) return SumDistortion{g, sum};
    return VectorDistortion{g, to_vector(parse_list(vec))};
  }
};

SourceModel as_remote(const LoadedModel& loaded, const Eigen::MatrixXd* gamma,
                      DistortionSpec* spec, bool* converted) {
  if (const auto* m = std::get_if<SourceModel>(&loaded)) {
    if (converted) *converted = false;
    return *m;
  }
  const auto& dm = std::get<DirectModel>(loaded);
  if (!spec || !gamma)
    throw InfeasibleSpec("this command needs a remote model");
  ConvertedProblem conv = convert_spec(dm, *gamma, *spec);
  *spec = conv.spec;
  if (converted) *converted = true;
  return conv.model;
}

int cmd_info(const std::string& path, const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  if (const auto* m = std::get_if<SourceModel>(&loaded)) {
    std::cout << "kind = remote\nk = " << m->k << "\nl = " << m->l << "\n";
    Eigen::MatrixXd cond = conditional_covariance(*m);
    print_matrix("conditional_covariance", cond);
    std::cout << "trace = " << fmt(cond.trace()) << "\n";
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m->k, m->k);
    double amax = max_information_eigenvalue(*m, id);
    std::cout << "max_information_eigenvalue = " << fmt(amax) << "\n";
    std::cout << "matching_threshold = " << fmt((m->k + 1) / amax) << "\n";
    (void)opt;
    return 0;
  }
  const auto& dm = std::get<DirectModel>(loaded);
  std::cout << "kind = direct\nl = " << dm.l << "\n";
  print_matrix("sigma_y", dm.sigma_y());
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dm.l, dm.l);
  DirectMatchReport rep = sufficient_matching_direct(dm, id, 1.0);
  std::cout << "mu_min_star = " << fmt(rep.mu_min_star) << "\n";
  std::cout << "matching_threshold = " << fmt(rep.threshold) << "\n";
  return 0;
}

int cmd_sumrate(const std::string& path, const SpecFlags& flags,
                const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  int dim = std::holds_alternative<SourceModel>(loaded)
                ? std::get<SourceModel>(loaded).k
                : std::get<DirectModel>(loaded).l;
  DistortionSpec spec = flags.build(dim);
  Eigen::MatrixXd gamma = parse_square(flags.gamma, dim, "--gamma");
  bool converted = false;
  SourceModel model = as_remote(loaded, &gamma, &spec, &converted);
  if (converted)
    std::cout << "converted direct model to the remote problem\n";

  SumRateResult inner = sum_rate_inner(model, spec);
  std::cout << "inner_sum_rate = " << fmt_rate(inner.value, opt) << "\n";

  const SumDistortion* sum_spec = std::get_if<SumDistortion>(&spec);
  SumDistortion relaxed{Eigen::MatrixXd(), 0.0};
  bool relaxation = false;
  if (!sum_spec) {
    if (const auto* v = std::get_if<VectorDistortion>(&spec)) {
      relaxed = SumDistortion{v->gamma, v->d.sum()};
      sum_spec = &relaxed;
      relaxation = true;
    }
  }
  if (sum_spec) {
    SumRateResult outer = sum_rate_outer(model, *sum_spec);
    std::cout << "outer_sum_rate = " << fmt_rate(outer.value, opt)
              << (relaxation ? " (sum relaxation)" : "") << "\n";
    std::cout << "gap = " << fmt_rate(inner.value - outer.value, opt) << "\n";
    MatchReport rep = sufficient_matching(model, sum_spec->gamma, sum_spec->d);
    std::cout << "matched = "
              << (rep.verdict == MatchReport::Verdict::Matched ? "yes"
                                                               : "unknown")
              << "\n";
  }
  return 0;
}

int cmd_member(const std::string& path, const std::string& rates,
               const SpecFlags& flags, const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  int dim = std::holds_alternative<SourceModel>(loaded)
                ? std::get<SourceModel>(loaded).k
                : std::get<DirectModel>(loaded).l;
  DistortionSpec spec = flags.build(dim);
  Eigen::MatrixXd gamma = parse_square(flags.gamma, dim, "--gamma");
  SourceModel model = as_remote(loaded, &gamma, &spec, nullptr);
  RateVector rv(to_vector(parse_list(rates)));

  MembershipVerdict v = membership_verdict(model, rv, spec);
  switch (v.kind) {
    case MembershipVerdict::Kind::InnerCertified: {
      std::ostringstream w;
      for (int i = 0; i < v.witness.size(); ++i)
        w << (i ? "," : "") << fmt(v.witness.r[i] * opt.rate_scale());
      std::cout << "achievable (r=" << w.str() << ")\n";
      break;
    }
    case MembershipVerdict::Kind::OuterCertified: {
      std::ostringstream w;
      for (int i = 0; i < v.witness.size(); ++i)
        w << (i ? "," : "") << fmt(v.witness.r[i] * opt.rate_scale());
      std::cout << "not ruled out (outer certificate at r=" << w.str()
                << ", theta=" << fmt(v.theta) << ")\n";
      break;
    }
    case MembershipVerdict::Kind::ExcludedHeuristic:
      std::cout << "excluded (heuristic, not a proof; margin = "
                << fmt_rate(v.margin, opt) << ")\n";
      break;
    case MembershipVerdict::Kind::Undetermined:
      std::cout << "undetermined\n";
      break;
  }
  return 0;
}

int cmd_waterfill(const std::string& path, const std::string& rates,
                  const SpecFlags& flags, const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  const auto* model = std::get_if<SourceModel>(&loaded);
  if (!model) throw InfeasibleSpec("waterfill needs a remote model");
  if (flags.sum < 0.0)
    throw CLI::ValidationError("waterfill needs --sum");
  Eigen::MatrixXd gamma = parse_square(flags.gamma, model->k, "--gamma");
  RateAllocation r(to_vector(parse_list(rates)));

  Eigen::VectorXd alphas = information_spectrum(*model, gamma, r);
  WaterSolution sol = water_level(alphas, flags.sum);
  std::cout << "xi = " << fmt(sol.xi) << "\n";
  std::cout << "levels =";
  for (int i = 0; i < sol.levels.size(); ++i)
    std::cout << " " << fmt(sol.levels[i]);
  std::cout << "\n";
  double g = gamma.determinant();
  std::cout << "omega = " << fmt(sol.omega / (g * g)) << "\n";
  (void)opt;
  return 0;
}

int cmd_match(const std::string& path, const SpecFlags& flags,
              const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  if (flags.sum < 0.0) throw CLI::ValidationError("match needs --sum");
  if (const auto* m = std::get_if<SourceModel>(&loaded)) {
    Eigen::MatrixXd gamma = parse_square(flags.gamma, m->k, "--gamma");
    MatchReport rep = sufficient_matching(*m, gamma, flags.sum);
    std::cout << "feasible_lower = " << fmt(rep.feasible_lower) << "\n";
    std::cout << "threshold = " << fmt(rep.threshold) << "\n";
    const char* verdict =
        rep.verdict == MatchReport::Verdict::Matched      ? "matched"
        : rep.verdict == MatchReport::Verdict::Infeasible ? "infeasible"
                                                          : "unknown";
    std::cout << "verdict = " << verdict << "\n";
    (void)opt;
    return 0;
  }
  const auto& dm = std::get<DirectModel>(loaded);
  Eigen::MatrixXd gamma = parse_square(flags.gamma, dm.l, "--gamma");
  DirectMatchReport rep = sufficient_matching_direct(dm, gamma, flags.sum);
  std::cout << "mu_min_star = " << fmt(rep.mu_min_star) << "\n";
  std::cout << "trace_b_tilde = " << fmt(rep.trace_b_tilde) << "\n";
  std::cout << "threshold = " << fmt(rep.threshold) << "\n";
  std::cout << "verdict = "
            << (rep.verdict == DirectMatchReport::Verdict::Matched
                    ? "matched"
                    : "unknown")
            << "\n";
  if (rep.split) {
    std::cout << "noise_split: delta = " << fmt(rep.split->delta)
              << ", bound = " << fmt(rep.split->bound_at_delta)
              << ", optimal_delta = " << fmt(rep.split->optimal_delta)
              << ", optimal_bound = " << fmt(rep.split->optimal_bound)
              << "\n";
  }
  return 0;
}

int cmd_convert(const std::string& path, const SpecFlags& flags) {
  LoadedModel loaded = load_model_file(path);
  const auto* dm = std::get_if<DirectModel>(&loaded);
  if (!dm) throw InfeasibleSpec("convert needs a direct model");
  DistortionSpec spec = flags.build(dm->l);
  Eigen::MatrixXd gamma = parse_square(flags.gamma, dm->l, "--gamma");
  ConvertedProblem conv = convert_spec(*dm, gamma, spec);
  std::cout << to_json(conv.model) << "\n";
  if (const auto* m = std::get_if<MatrixDistortion>(&conv.spec)) {
    print_matrix("sigma_d", m->sigma_d);
  } else if (const auto* v = std::get_if<VectorDistortion>(&conv.spec)) {
    print_matrix("gamma", v->gamma);
    std::cout << "d =";
    for (int i = 0; i < v->d.size(); ++i) std::cout << " " << fmt(v->d[i]);
    std::cout << "\n";
  } else {
    const auto& s = std::get<SumDistortion>(conv.spec);
    print_matrix("gamma", s.gamma);
    std::cout << "d = " << fmt(s.d) << "\n";
  }
  return 0;
}

int cmd_curve(const std::string& path, int steps, double rmax,
              const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  const auto* dm = std::get_if<DirectModel>(&loaded);
  if (!dm) throw InfeasibleSpec("curve needs a direct (cyclic) model");
  cyclic::CyclicInstance inst = cyclic::make_cyclic(*dm);
  if (steps < 1) throw CLI::ValidationError("--steps must be >= 1");

  std::cout << "r,R_" << opt.rate_unit() << ",D\n";
  bool all_certified = true;
  for (int j = 0; j < steps; ++j) {
    double r = steps == 1 ? 0.0 : rmax * j / (steps - 1);
    cyclic::CurvePoint p = cyclic::curve_point(inst, r);
    all_certified = all_certified && cyclic::curve_conditions(inst, r).rate_local;
    std::cout << fmt(r) << "," << fmt(p.rate * opt.rate_scale()) << ","
              << fmt(p.distortion) << "\n";
  }
  if (!all_certified)
    std::cerr << "note: curve conditions failed at some points; values are "
                 "lower bounds only there\n";
  return 0;
}

int cmd_simulate(const std::string& path, const std::string& rates,
                 std::int64_t n, std::uint64_t seed, const Options& opt) {
  LoadedModel loaded = load_model_file(path);
  const auto* model = std::get_if<SourceModel>(&loaded);
  if (!model) throw InfeasibleSpec("simulate needs a remote model");
  RateAllocation r(to_vector(parse_list(rates)));

  Eigen::MatrixXd analytic = test_channel_distortion(*model, r);
  Eigen::MatrixXd joint = test_channel_distortion_joint(*model, r);
  double route_gap = (analytic - joint).cwiseAbs().maxCoeff();
  MonteCarloResult mc = monte_carlo_distortion(*model, r, n, seed);

  print_matrix("analytic", analytic);
  print_matrix("empirical", mc.empirical);
  std::cout << "route_agreement = " << fmt(route_gap) << "\n";
  double dev = (mc.empirical - analytic).cwiseAbs().maxCoeff();
  std::cout << "max_deviation = " << fmt(dev) << "\n";
  double sigmas = ((mc.empirical - analytic).cwiseAbs().array() /
                   mc.std_error.array())
                      .maxCoeff();
  std::cout << "max_deviation_sigmas = " << fmt(sigmas) << "\n";
  (void)opt;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-distortion bounds for Gaussian distributed source coding"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--bits", opt.bits, "print rates in bits instead of nats");

  std::string model_path, rates, rate_list;
  SpecFlags flags;
  int steps = 64;
  double rmax = 2.0;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;

  auto* info = app.add_subcommand("info", "print model summary");
  info->add_option("model", model_path)->required()->check(CLI::ExistingFile);

  auto* sumrate =
      app.add_subcommand("sumrate", "inner/outer minimum sum rates");
  sumrate->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  SpecFlags sr_flags;
  sr_flags.attach(sumrate, /*with_matrix=*/false);

  auto* member =
      app.add_subcommand("member", "membership certificate for a rate vector");
  member->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  member->add_option("--rates", rate_list, "rate vector R1,...,RL (nats)")
      ->required();
  SpecFlags mb_flags;
  mb_flags.attach(member, /*with_matrix=*/true);

  auto* waterfill =
      app.add_subcommand("waterfill", "water-filling solution at a rate point");
  waterfill->add_option("model", model_path)
      ->required()
      ->check(CLI::ExistingFile);
  waterfill->add_option("-r,--rates", rates, "allocation r1,...,rL (nats)")
      ->required();
  SpecFlags wf_flags;
  wf_flags.attach(waterfill, /*with_matrix=*/false);

  auto* match = app.add_subcommand("match", "sufficient matching report");
  match->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  SpecFlags mt_flags;
  mt_flags.attach(match, /*with_matrix=*/false);

  auto* convert =
      app.add_subcommand("convert", "direct model to remote problem");
  convert->add_option("model", model_path)
      ->required()
      ->check(CLI::ExistingFile);
  SpecFlags cv_flags;
  cv_flags.attach(convert, /*with_matrix=*/true);

  auto* curve = app.add_subcommand("curve", "cyclic trade-off curve as CSV");
  curve->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  curve->add_option("--steps", steps, "number of curve samples");
  curve->add_option("--rmax", rmax, "largest rate parameter");

  auto* simulate =
      app.add_subcommand("simulate", "Monte-Carlo check of the construction");
  simulate->add_option("model", model_path)
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("-r,--rates", rates, "allocation r1,...,rL (nats)")
      ->required();
  simulate->add_option("-n,--samples", samples, "sample count");
  simulate->add_option("--seed", seed, "RNG seed");

  for (CLI::App* sub : app.get_subcommands(nullptr))
    sub->fallthrough();  // global flags may follow the subcommand

  try {
    app.parse(argc, argv);
    if (info->parsed()) return cmd_info(model_path, opt);
    if (sumrate->parsed()) return cmd_sumrate(model_path, sr_flags, opt);
    if (member->parsed()) return cmd_member(model_path, rate_list, mb_flags, opt);
    if (waterfill->parsed()) return cmd_waterfill(model_path, rates, wf_flags, opt);
    if (match->parsed()) return cmd_match(model_path, mt_flags, opt);
    if (convert->parsed()) return cmd_convert(model_path, cv_flags);
    if (curve->parsed()) return cmd_curve(model_path, steps, rmax, opt);
    if (simulate->parsed()) return cmd_simulate(model_path, rates, samples, seed, opt);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleAllocation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InsufficientBudget& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const OutsideD& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DistortionNotPositive& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const HiddenSourceNotPD& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
