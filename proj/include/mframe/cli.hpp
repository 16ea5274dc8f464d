#pragma once

// Command-line front end. run() returns the process exit code:
// 0 success, 1 usage or input error, 2 a certificate failed or a
// decomposition does not exist for the input.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mframe/mframe.hpp"
#include "mframe/fixtures.hpp"
#include "mframe/io.hpp"

namespace mframe::cli {

using io::json;

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kCertificate = 2;

struct Options {
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  bool json = false;
};

namespace detail {

inline json bounds_json(const FrameBounds& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

inline json report_json(const OperatorReport& r) {
  return {{"is_unitary", r.is_unitary},
          {"is_partial_isometry", r.is_partial_isometry},
          {"is_invertible", r.is_invertible},
          {"unitary_defect", r.unitary_defect},
          {"partial_isometry_defect", r.partial_isometry_defect},
          {"min_singular_value", r.min_singular_value}};
}

inline json basis_json(const BasisCertificate& c) {
  return {{"pass", c.pass},
          {"unit_norms", c.unit_norms},
          {"orthogonality_defect", c.orthogonality_defect},
          {"idempotency_defect", c.idempotency_defect},
          {"unit_defect", c.unit_defect},
          {"generation_defect", c.generation_defect},
          {"reconstruction_residual", c.reconstruction_residual}};
}

inline json riesz_json(const RieszReport& r) {
  json w = nullptr;
  if (r.witness) {
    w = json::array();
    for (const auto& a : *r.witness) w.push_back(io::element_to_json(a));
  }
  return {{"riesz", r.riesz}, {"worst_summand", r.worst_summand}, {"witness", w}};
}

inline json frame_summary(const Frame& f) {
  return {{"size", f.size()},
          {"bounds", bounds_json(f.bounds())},
          {"is_frame", f.is_frame()},
          {"tight", f.is_tight()},
          {"normalized", f.is_normalized()},
          {"riesz", f.is_riesz()}};
}

// Text form: scalar leaves as "path: value"; frames and matrices are skipped.
inline void print_text(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    if (j.contains("format")) return;
    for (auto it = j.begin(); it != j.end(); ++it)
      print_text(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    bool flat = std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); });
    if (flat && j.size() <= 16)
      out << prefix << ": " << j.dump() << "\n";
    else if (!flat && std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_object(); }))
      for (std::size_t i = 0; i < j.size(); ++i) print_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
    else if (!flat)
      out << prefix << ": " << j.dump() << "\n";
  } else {
    out << prefix << ": " << j.dump() << "\n";
  }
}

inline void emit(const json& report, const Options& o, std::ostream& out) {
  if (o.json)
    out << report.dump(2) << "\n";
  else
    print_text(report, "", out);
}

inline double max_reconstruction_residual(const Frame& f, const Frame& dual) {
  double r = 0.0;
  for (const auto& e : standard_basis(f.module())) r = std::max(r, reconstruct(f, dual, e).residual);
  return r;
}

inline int analyze(const std::string& path, const Options& o, std::ostream& out) {
  const Frame f = io::read_frame(path, o.tol);
  json rep = {{"command", "analyze"},
              {"algebra", f.module().algebra().blocks()},
              {"rank", f.module().rank()},
              {"free", f.module().is_free()}};
  rep.update(frame_summary(f));
  const FrameCheck check = verify_frame(f, f.bounds().lower, f.bounds().upper, o.tol, o.seed);
  rep["certificate"] = {{"pass", check.pass},
                        {"operator_pass", check.operator_pass},
                        {"sample_pass", check.sample_pass},
                        {"worst_violation", check.worst_violation},
                        {"samples", check.samples}};
  rep["riesz_report"] = riesz_json(f.riesz_report());
  rep["reconstruction_residual"] = f.is_frame() ? json(max_reconstruction_residual(f, canonical_dual(f, o.tol))) : json(nullptr);
  emit(rep, o, out);
  return f.is_frame() && check.pass ? kOk : kCertificate;
}

inline int dual(const std::string& path, const std::string& out_path, const Options& o, std::ostream& out) {
  const Frame f = io::read_frame(path, o.tol);
  const Frame d = canonical_dual(f, o.tol);
  const std::string text = io::serialize_frame(d);
  if (!out_path.empty()) io::write_file(out_path, text);
  if (o.json) {
    json rep = {{"command", "dual"}, {"bounds", bounds_json(d.bounds())},
                {"reconstruction_residual", max_reconstruction_residual(f, d)}, {"dual", io::frame_to_json(d)}};
    out << rep.dump(2) << "\n";
  } else if (out_path.empty()) {
    out << text;
  } else {
    out << "bounds: [" << d.bounds().lower << ", " << d.bounds().upper << "]\n";
  }
  return kOk;
}

inline int dilate(const std::string& path, std::string kind, const std::string& prefix, const Options& o, std::ostream& out) {
  const Frame f = io::read_frame(path, o.tol);
  if (kind == "auto") kind = f.is_normalized() ? "tight" : "riesz";
  const DilationResult r = kind == "tight" ? tight_complement(f, o.tol) : riesz_complement(f, o.tol);
  const Frame back = compress(r.dilated_basis, f.module());
  double roundtrip = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) roundtrip = std::max(roundtrip, module_norm(back.element(j) - f.element(j)));
  const double bound_gap =
      std::max(std::abs(r.bounds.lower - f.bounds().lower), std::abs(r.bounds.upper - f.bounds().upper));
  const bool pass = kind == "tight" ? r.basis.pass && r.basis.unit_norms : r.riesz.riesz && bound_gap <= o.tol * (1.0 + f.bounds().upper);
  json complement_ranks = json::array();
  for (std::size_t k = 0; k < f.module().algebra().block_count(); ++k)
    complement_ranks.push_back(linalg::projection_rank(r.complement_module.projection(k)));
  json rep = {{"command", "dilate"},
              {"kind", kind},
              {"pass", pass},
              {"input_bounds", bounds_json(f.bounds())},
              {"dilated_bounds", bounds_json(r.bounds)},
              {"bound_gap", bound_gap},
              {"complement_scale", r.scale},
              {"complement_ranks", complement_ranks},
              {"roundtrip_defect", roundtrip},
              {"complement", io::frame_to_json(r.complement_frame)},
              {"dilated", io::frame_to_json(r.dilated_basis)}};
  // an orthonormal certificate only means something for the tight dilation
  if (kind == "tight") rep["basis_certificate"] = basis_json(r.basis);
  rep["riesz_report"] = riesz_json(r.riesz);
  if (!prefix.empty()) {
    io::write_file(prefix + ".complement.json", io::serialize_frame(r.complement_frame));
    io::write_file(prefix + ".dilated.json", io::serialize_frame(r.dilated_basis));
  }
  emit(rep, o, out);
  return pass ? kOk : kCertificate;
}

inline int classify(const std::string& a, const std::string& b, const Options& o, std::ostream& out) {
  const Frame x = io::read_frame(a, o.tol), y = io::read_frame(b, o.tol);
  const PairClassification c = classify_pair(x, y, o.tol);
  const StrongDisjointReport s = strong_disjoint_conditions(x, y, o.tol);
  json rep = {{"command", "classify"},
              {"classification",
               {{"strongly_complementary", c.strongly_complementary},
                {"complementary", c.complementary},
                {"strongly_disjoint", c.strongly_disjoint},
                {"disjoint", c.disjoint},
                {"weakly_disjoint", c.weakly_disjoint},
                {"complement_gap", c.complement_gap},
                {"pq_norm", c.pq_norm},
                {"lambda_min", c.lambda_min},
                {"lambda_max", c.lambda_max},
                {"difference_min_singular_value", c.difference_min_sv}}},
              {"strong_disjoint_conditions",
               {{"residuals", s.residuals}, {"holds", s.holds}, {"all_agree", s.all_agree}, {"strongly_disjoint", s.strongly_disjoint}}}};
  emit(rep, o, out);
  return s.all_agree ? kOk : kCertificate;
}

inline json parts_json(const Decomposition& d) {
  json parts = json::array();
  for (const auto& p : d.parts)
    parts.push_back({{"label", p.label}, {"report", report_json(p.report)}, {"operator", io::operator_to_json(p.op)}});
  return parts;
}

inline int decompose(const std::string& path, const std::string& method, double eps, const Options& o, std::ostream& out) {
  const Frame f = io::read_frame(path, o.tol);
  const double scale = 1.0 + f.synthesis().norm();
  const double limit = std::max(o.tol, 1e-12) * scale;
  json rep = {{"command", "decompose"}, {"method", method}};
  bool pass = true;
  auto frames_json = [](std::initializer_list<std::pair<const char*, const Frame*>> fs) {
    json j = json::object();
    for (const auto& [name, fr] : fs) j[name] = {{"summary", frame_summary(*fr)}, {"frame", io::frame_to_json(*fr)}};
    return j;
  };
  if (method == "three-unitaries" || method == "two-partial-isometries") {
    if (method == "three-unitaries" && (!f.module().is_free() || static_cast<int>(f.size()) != f.module().rank()))
      throw PreconditionError("three-unitaries needs a square frame of a free module", 0.0);
    const Decomposition d = method == "three-unitaries" ? three_unitaries(f.synthesis(), eps, o.tol)
                                                        : two_partial_isometries(f.synthesis(), o.tol);
    rep["scalar"] = d.scalar.real();
    rep["residual"] = d.residual;
    rep["parts"] = parts_json(d);
    pass = d.residual <= limit;
    for (const auto& p : d.parts)
      pass = pass && (method == "three-unitaries" ? p.report.is_unitary : p.report.is_partial_isometry);
  } else if (method == "two-tight") {
    const TwoTightResult r = frame_two_tight(f, o.tol);
    rep["scalar"] = r.mu;
    rep["residual"] = r.residual;
    rep["parts"] = frames_json({{"a", &r.a}, {"b", &r.b}});
    pass = r.residual <= limit && r.a.is_normalized() && r.b.is_normalized();
  } else if (method == "two-onb") {
    const auto r = riesz_two_onb(f, o.tol);
    if (!r) {
      rep["result"] = "none";
      rep["riesz_report"] = riesz_json(f.riesz_report());
      rep["square"] = f.module().is_free() && static_cast<int>(f.size()) == f.module().rank();
      pass = false;
    } else {
      rep["result"] = "ok";
      rep["scalar"] = r->mu;
      rep["residual"] = r->residual;
      rep["certificates"] = {basis_json(r->cert1), basis_json(r->cert2)};
      rep["parts"] = frames_json({{"onb1", &r->onb1}, {"onb2", &r->onb2}});
      pass = r->residual <= limit && r->cert1.pass && r->cert1.unit_norms && r->cert2.pass && r->cert2.unit_norms;
    }
  } else if (method == "three-onb") {
    const ThreeOnbResult r = frame_three_onb(f, eps, o.tol);
    rep["scalar"] = r.c;
    rep["residual"] = r.residual;
    rep["synthesis_norm"] = r.synthesis_norm;
    rep["upper_bound"] = r.upper_bound;
    rep["parts"] = frames_json({{"onb1", &r.onb1}, {"onb2", &r.onb2}, {"onb3", &r.onb3}});
    pass = r.residual <= limit;
    for (const auto& p : r.decomposition.parts) pass = pass && p.report.is_unitary;
  } else if (method == "half-sum") {
    const bool tight = f.is_normalized();
    const HalfSumResult r = tight ? tight_half_sum(f, o.tol) : frame_half_sum_riesz(f, o.tol);
    rep["variant"] = tight ? "orthonormal" : "riesz";
    rep["residual"] = r.residual;
    if (tight)
      rep["certificates"] = {basis_json(r.cert_f), basis_json(r.cert_g)};
    else
      rep["riesz"] = {r.riesz_f.riesz, r.riesz_g.riesz};
    rep["parts"] = frames_json({{"f", &r.onb_f}, {"g", &r.onb_g}});
    pass = r.residual <= limit && (tight ? r.cert_f.pass && r.cert_g.pass : r.riesz_f.riesz && r.riesz_g.riesz);
  } else if (method == "onb-riesz") {
    if (!(eps < 1.0)) throw CLI::ValidationError("--epsilon", "onb-riesz needs 0 < epsilon < 1");
    const OnbRieszResult r = frame_onb_plus_riesz(f, eps, o.tol);
    rep["scalar"] = r.mu;
    rep["shift"] = r.c;
    rep["contraction"] = r.contraction;
    rep["residual"] = r.residual;
    rep["frame_residual"] = r.frame_residual;
    rep["onb_certificate"] = basis_json(r.onb_cert);
    rep["riesz_report"] = riesz_json(r.riesz_report);
    rep["parts"] = frames_json({{"onb", &r.onb}, {"riesz", &r.riesz}});
    pass = r.residual <= limit && r.onb_cert.pass && r.riesz_report.riesz && r.shifted.is_invertible;
  } else {
    throw CLI::ValidationError("--method", "unknown method " + method);
  }
  rep["pass"] = pass;
  emit(rep, o, out);
  return pass ? kOk : kCertificate;
}

inline int demo(const std::string& which, int levels, const Options& o, std::ostream& out) {
  if (levels < 1 || levels > 20) throw CLI::ValidationError("--levels", "levels must be between 1 and 20");
  json rep = {{"command", "demo"}, {"example", which}, {"levels", levels}};
  bool pass = true;
  if (which == "cantor") {
    const Frame f = cantor_frame(levels, o.tol);
    const double defect = cantor_partition_defect(levels);
    rep["elements"] = f.size();
    rep["grid_points"] = f.module().algebra().block_count();
    rep["partition_defect"] = defect;
    rep["bounds"] = bounds_json(f.bounds());
    rep["normalized"] = f.is_normalized();
    pass = f.is_normalized();
  } else if (which == "single-generator") {
    const double c = single_generator_bound(levels);
    rep["lower_bound"] = c;
    rep["expected"] = std::ldexp(1.0, -2 * levels);
    rep["exact"] = c == std::ldexp(1.0, -2 * levels);
    pass = c == std::ldexp(1.0, -2 * levels);
  } else {
    throw CLI::ValidationError("demo", "unknown example " + which);
  }
  emit(rep, o, out);
  return pass ? kOk : kCertificate;
}

inline int bracket_cmd(const std::string& a, const std::string& b, const Options& o, std::ostream& out) {
  const SampledFunction phi = io::read_sampled(a), psi = io::read_sampled(b);
  const PeriodizedElement p = bracket(phi, psi);
  json rep = {{"command", "bracket"}, {"samples_per_unit", phi.samples_per_unit}, {"values", io::periodized_to_json(p)}};
  if (o.json) {
    out << rep.dump(2) << "\n";
  } else {
    out << "samples_per_unit: " << phi.samples_per_unit << "\n";
    for (std::size_t i = 0; i < p.values.size(); ++i)
      out << "value[" << i << "]: " << io::complex_to_json(p.values[i]).dump() << "\n";
  }
  return kOk;
}

inline int fixture(const std::string& kind, const std::string& prefix, const Options& o, std::ostream& out) {
  const std::vector<Frame> fs = random_fixture(kind, o.seed, o.tol);
  if (fs.size() == 1 && prefix.empty()) {
    out << io::serialize_frame(fs[0]);
    return kOk;
  }
  if (prefix.empty()) throw CLI::ValidationError("--out", "pair fixtures need --out PREFIX");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string path = fs.size() == 1 ? prefix + ".json" : prefix + "-" + std::to_string(i + 1) + ".json";
    io::write_file(path, io::serialize_frame(fs[i]));
    out << path << "\n";
  }
  return kOk;
}

}  // namespace detail

/// Entry point; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("MFRAME_TOL")) {
    try {
      std::size_t used = 0;
      o.tol = std::stod(env, &used);
      if (used != std::string(env).size() || !(o.tol > 0.0)) throw std::invalid_argument("bad");
    } catch (const std::exception&) {
      err << "error: MFRAME_TOL must be a positive number, got '" << env << "'\n";
      return kUsage;
    }
  }

  CLI::App app{"Module frames over finite-dimensional C*-algebras", "mframe"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol", o.tol, "Relative tolerance (default 1e-9, or MFRAME_TOL)")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for randomized checks and fixtures");
  app.add_flag("--json", o.json, "Machine-readable report");

  std::string file_a, file_b, out_path, kind = "auto", method, which, fixture_kind;
  double eps = 0.5;
  int levels = 0;

  auto* analyze = app.add_subcommand("analyze", "Bounds, flags and certificates of a frame");
  analyze->add_option("frame", file_a)->required();
  auto* dual = app.add_subcommand("dual", "Write the canonical dual frame");
  dual->add_option("frame", file_a)->required();
  dual->add_option("-o,--out", out_path, "Output file (default stdout)");
  auto* dilate = app.add_subcommand("dilate", "Complement and dilated basis");
  dilate->add_option("frame", file_a)->required();
  dilate->add_option("--kind", kind)->check(CLI::IsMember({"auto", "tight", "riesz"}));
  dilate->add_option("-o,--out", out_path, "Prefix for complement and dilated frame files");
  auto* classify = app.add_subcommand("classify", "Disjointness class of a frame pair");
  classify->add_option("first", file_a)->required();
  classify->add_option("second", file_b)->required();
  auto* decompose = app.add_subcommand("decompose", "Operator and frame decompositions");
  decompose->add_option("frame", file_a)->required();
  decompose->add_option("--method", method)
      ->required()
      ->check(CLI::IsMember({"three-unitaries", "two-partial-isometries", "two-tight", "two-onb", "three-onb", "half-sum", "onb-riesz"}));
  decompose->add_option("--epsilon", eps)->check(CLI::PositiveNumber);
  auto* demo = app.add_subcommand("demo", "Built-in examples");
  demo->add_option("example", which)->required()->check(CLI::IsMember({"cantor", "single-generator"}));
  demo->add_option("--levels", levels)->required();
  auto* bracket = app.add_subcommand("bracket", "Bracket product of two sampled functions");
  bracket->add_option("phi", file_a)->required();
  bracket->add_option("psi", file_b)->required();
  auto* fixture = app.add_subcommand("fixture", "Seeded random frame files");
  fixture->add_option("kind", fixture_kind)->required()->check(CLI::IsMember(fixture_kinds()));
  fixture->add_option("-o,--out", out_path, "Output prefix");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*analyze) return detail::analyze(file_a, o, out);
    if (*dual) return detail::dual(file_a, out_path, o, out);
    if (*dilate) return detail::dilate(file_a, kind, out_path, o, out);
    if (*classify) return detail::classify(file_a, file_b, o, out);
    if (*decompose) return detail::decompose(file_a, method, eps, o, out);
    if (*demo) return detail::demo(which, levels, o, out);
    if (*bracket) return detail::bracket_cmd(file_a, file_b, o, out);
    if (*fixture) return detail::fixture(fixture_kind, out_path, o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    // precondition, singularity and domain failures: the input does not admit the construction
    err << "certificate failure: " << e.what() << "\n";
    return kCertificate;
  }
  err << "error: no command\n";
  return kUsage;
}

}  // namespace mframe::cli
