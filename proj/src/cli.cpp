#include "framelab/cli.hpp"

#include <charconv>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "framelab/error.hpp"
#include "framelab/io.hpp"
#include "framelab/lab.hpp"

namespace framelab {

namespace {

using io::Json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

int cmd_check(const std::string& file, std::ostream& out) {
  const Frame frame = io::frame_from_json(io::read_json_file(file));
  emit(out, io::report_to_json(analyze_frame(frame)));
  return 0;
}

int cmd_nearest(const std::string& which, const std::string& file, std::optional<double> target,
                const std::string& out_file, std::ostream& out) {
  const Frame frame = io::frame_from_json(io::read_json_file(file));
  const NearestFrame result =
      which == "parseval" ? closest_parseval(frame) : closest_equal_norm(frame, target);
  Json doc{{"dist_sq", result.dist_sq}};
  if (out_file.empty()) {
    doc["frame"] = io::frame_to_json(result.frame);
  } else {
    io::write_json_file(out_file, io::frame_to_json(result.frame));
  }
  emit(out, doc);
  return 0;
}

int cmd_flow(const std::string& file, double t, long max_iters, double stop, const std::string& trace_file,
             const std::string& out_file, std::ostream& out) {
  const Frame frame = io::frame_from_json(io::read_json_file(file));
  const double limit = 1.0 / (2.0 * static_cast<double>(frame.size()));
  if (!(t > 0.0) || t >= limit) {
    throw UsageError("--t must satisfy 0 < t < 1/(2n) = " + format_double(limit));
  }
  FlowConfig config;
  config.step_t = t;
  config.max_iters = max_iters;
  config.stop_defect = stop;
  const FlowResult result = run_flow(frame, config);
  if (!trace_file.empty()) io::write_text_file(trace_file, flow_trace_csv(result.trace));
  if (!out_file.empty()) io::write_json_file(out_file, io::frame_to_json(result.frame));
  const auto& last = result.trace.records.back();
  emit(out, Json{{"termination", std::string(to_string(result.trace.termination))},
                 {"iterations", result.trace.final_iteration},
                 {"unit_defect_hs", last.unit_defect_hs},
                 {"frame_potential", last.frame_potential},
                 {"relatively_prime", result.relatively_prime},
                 {"initial_defect_hypothesis", result.initial_defect_hypothesis},
                 {"displacement_hs", result.displacement_hs},
                 {"displacement_bound", result.displacement_bound},
                 {"max_norm_drift", result.max_norm_drift}});
  return 0;
}

int cmd_naimark(const std::string& file, const std::string& out_file, std::ostream& out) {
  const Frame frame = io::frame_from_json(io::read_json_file(file));
  const Frame complement = naimark_complement(frame);
  if (out_file.empty()) {
    emit(out, io::frame_to_json(complement));
  } else {
    io::write_json_file(out_file, io::frame_to_json(complement));
  }
  return 0;
}

int cmd_chordal(const std::string& p_file, const std::string& q_file, std::ostream& out) {
  const auto p = certify_projection(io::projection_matrix_from_json(io::read_json_file(p_file)));
  const auto q = certify_projection(io::projection_matrix_from_json(io::read_json_file(q_file)));
  emit(out, Json{{"rank", p.rank}, {"chordal_distance", chordal_distance(p, q)}});
  return 0;
}

int cmd_asf_check(const std::string& file, std::ostream& out) {
  const ASF asf = io::asf_from_json(io::read_json_file(file));
  emit(out, io::report_to_json(analyze_asf(asf)));
  return 0;
}

int cmd_balance(const std::string& p_file, const std::string& sys_file, std::ostream& out) {
  const auto p = certify_projection(io::projection_matrix_from_json(io::read_json_file(p_file)));
  const auto sys = io::auerbach_from_json(io::read_json_file(sys_file));
  const auto balance = balance_epsilon_banach(p, sys);
  Json entries = Json::array();
  for (const auto& e : balance.entries) {
    entries.push_back(Json{{"vector_norm_sq", e.vector_norm_sq},
                           {"functional_norm_sq", e.functional_norm_sq},
                           {"pairing", e.pairing},
                           {"chain_holds", e.chain_holds},
                           {"failure", e.failure}});
  }
  Json doc{{"rank", p.rank},
           {"epsilon", balance.epsilon ? Json(*balance.epsilon) : Json(nullptr)},
           {"entries", entries}};
  if (p.self_adjoint && sys.space().p() == 2.0) {
    const auto eps = balance_epsilon_hilbert(p, sys.basis_vectors());
    doc["epsilon_hilbert"] = eps ? Json(*eps) : Json(nullptr);
  }
  emit(out, doc);
  return 0;
}

struct EstimateArgs {
  long d = 2, n = 3, trials = 1;
  double eps = 0.1;
  std::string p = "2";
  std::string kind = "perturbed_enp";
  std::uint64_t seed = 0;
  std::string out_file;
  unsigned threads = 1;
};

double parse_exponent(const std::string& text) {
  if (text == "inf") return kInfinity;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("--p must be a number or \"inf\", got '" + text + "'");
  }
  return v;
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  InstanceSpec spec;
  spec.kind = parse_instance_kind(a.kind);
  spec.d = a.d;
  spec.n = a.n;
  spec.epsilon_target = a.eps;
  spec.p = parse_exponent(a.p);
  spec.seed = a.seed;
  const auto result = estimate_paulsen({spec}, a.trials, certify_tol_from_env(), a.threads);
  const std::string csv = records_csv(result.records);
  if (a.out_file.empty()) {
    out << csv;
    return 0;
  }
  io::write_text_file(a.out_file, csv);
  Json summary = Json::array();
  for (const auto& row : result.summary) {
    summary.push_back(Json{{"kind", std::string(to_string(row.kind))},
                           {"d", row.d},
                           {"n", row.n},
                           {"eps", row.epsilon},
                           {"trials", row.trials},
                           {"fraction_certified", row.fraction_certified},
                           {"max_dist_sq", row.max_dist_sq},
                           {"mean_dist_sq", row.mean_dist_sq},
                           {"median_dist_sq", row.median_dist_sq},
                           {"max_ratio_hm", row.max_ratio_hm},
                           {"max_ratio_lower", row.max_ratio_lower}});
  }
  emit(out, Json{{"summary", summary},
                 {"hm_violations", result.hm_violations},
                 {"bc_violations", result.bc_violations}});
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frame and approximate Schauder frame laboratory", "framelab"};
  app.require_subcommand(1);

  std::string file, file2, out_file, trace_file, sys_file;
  std::optional<double> target;
  double t = 0.0, stop = 1e-6;
  long max_iters = 100000;

  auto* check = app.add_subcommand("check", "Certify a Hilbert frame");
  check->add_option("file", file, "Frame JSON")->required();

  auto* nearest = app.add_subcommand("nearest", "Closest Parseval or equal-norm frame");
  nearest->require_subcommand(1);
  auto* parseval = nearest->add_subcommand("parseval", "S^{-1/2} tau_j");
  parseval->add_option("file", file)->required();
  parseval->add_option("--out", out_file);
  auto* equalnorm = nearest->add_subcommand("equalnorm", "c tau_j / ||tau_j||");
  equalnorm->add_option("file", file)->required();
  equalnorm->add_option("--target", target);
  equalnorm->add_option("--out", out_file);

  auto* flow = app.add_subcommand("flow", "Spherical gradient flow toward a tight frame");
  flow->add_option("file", file)->required();
  flow->add_option("--t", t)->required();
  flow->add_option("--max-iters", max_iters)->required();
  flow->add_option("--stop", stop)->required();
  flow->add_option("--trace", trace_file);
  flow->add_option("--out", out_file);

  auto* naimark = app.add_subcommand("naimark", "Naimark complement of a Parseval frame");
  naimark->add_option("file", file)->required();
  naimark->add_option("--out", out_file);

  auto* chordal = app.add_subcommand("chordal", "Chordal distance between projection ranges");
  chordal->add_option("P", file)->required();
  chordal->add_option("Q", file2)->required();

  auto* asf = app.add_subcommand("asf", "Approximate Schauder frames");
  asf->require_subcommand(1);
  auto* asf_check = asf->add_subcommand("check", "Certify an ASF");
  asf_check->add_option("file", file)->required();

  auto* projection = app.add_subcommand("projection", "Projection problem quantities");
  projection->require_subcommand(1);
  auto* balance = projection->add_subcommand("balance", "Balance epsilon against an Auerbach system");
  balance->add_option("P", file)->required();
  balance->add_option("--system", sys_file)->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Empirical Paulsen-function sweep");
  estimate->add_option("--d", est.d)->required();
  estimate->add_option("--n", est.n)->required();
  estimate->add_option("--eps", est.eps)->required();
  estimate->add_option("--p", est.p);
  estimate->add_option("--kind", est.kind);
  estimate->add_option("--trials", est.trials)->required();
  estimate->add_option("--seed", est.seed);
  estimate->add_option("--out", est.out_file);
  estimate->add_option("--threads", est.threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "framelab: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*check) return cmd_check(file, out);
    if (*parseval) return cmd_nearest("parseval", file, std::nullopt, out_file, out);
    if (*equalnorm) return cmd_nearest("equalnorm", file, target, out_file, out);
    if (*flow) return cmd_flow(file, t, max_iters, stop, trace_file, out_file, out);
    if (*naimark) return cmd_naimark(file, out_file, out);
    if (*chordal) return cmd_chordal(file, file2, out);
    if (*asf_check) return cmd_asf_check(file, out);
    if (*balance) return cmd_balance(file, sys_file, out);
    if (*estimate) return cmd_estimate(est, out);
  } catch (const UsageError& e) {
    err << "framelab: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "framelab: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "framelab: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace framelab
