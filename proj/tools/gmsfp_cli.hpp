#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmsfp/gmsfp.hpp"
#include "gmsfp/io.hpp"

namespace gmsfp::cli {

using io::json;

/// Exit codes: 0 verdict holds / converged, 1 verdict fails or no
/// convergence (report still written), 2 malformed input or I/O error.
enum Exit : int { kOk = 0, kFailed = 1, kMalformed = 2 };

namespace detail {

struct Sink {
  std::string path;
  std::ostream& fallback;

  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      fallback << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw MalformedInput("cannot write " + path);
    f << text;
  }
  void write(const json& j) const { write(j.dump(2) + "\n"); }
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw MalformedInput("cannot write " + path);
  f << text;
}

/// GMSFP_SEED wins over a seed given in a file or on the command line.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> given, std::uint64_t fallback) {
  if (const char* env = std::getenv("GMSFP_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw MalformedInput(std::string("GMSFP_SEED is not an integer: ") + env);
    }
  }
  return given.value_or(fallback);
}

/// {"report": name, ...body}.
inline json tagged(const char* name, const json& body) {
  json out = {{"report", name}};
  for (const auto& [k, v] : body.items()) out[k] = v;
  return out;
}

inline std::filesystem::path dir_of(const std::string& file) {
  return std::filesystem::path(file).parent_path();
}

template <class S>
json condition_bundle(const io::MapProblem<S>& p, ContractionKind kind) {
  json out;
  ConditionReport<typename S::point_type, typename S::scalar_type> main;
  switch (kind) {
    case ContractionKind::phi:
      main = check_phi_contraction(p.space, p.pair, p.ctrl, p.scan);
      out["controls"] = io::control_validation_to_json(validate_control(p.ctrl.phi, ControlRole::phi_contraction));
      break;
    case ContractionKind::linear:
      main = check_linear_contraction(p.space, p.pair, p.ctrl, p.scan);
      break;
    case ContractionKind::weighted:
      if (!p.ctrl.psi || !p.ctrl.beta) throw MalformedInput("the weighted condition needs 'psi' and 'beta'");
      main = check_weighted_contraction(p.space, p.pair, p.ctrl, p.scan);
      out["admissibility"] = io::condition_report_to_json(p.space, check_admissible(p.space, p.pair, *p.ctrl.beta, p.scan));
      break;
  }
  json report = io::condition_report_to_json(p.space, main);
  for (auto& [k, v] : out.items()) report[k] = v;
  return report;
}

}  // namespace detail

/// Runs one command line (args[0] is the program name). Reports go to `out`
/// unless -o is given; diagnostics go to `err` as a single line.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Checkers and solvers for generalized metric spaces, rational contractions, and coupled DP systems",
               "gmsfp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string input, output, probes, csv, trace, x0_text, condition_text;
  std::optional<std::uint64_t> seed;
  double tol = 1e-9;
  std::size_t max_iter = 0;
  bool override_hypotheses = false, no_snap = false;
  std::size_t exhaustive_cap = 64, fixture_n = 64, point_count = 4;
  std::uint64_t samples = 100'000;
  std::string kind_text = "metric";
  std::string fixture_name;
  double phi_k = -1;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("file", input, "input JSON file")->required();
    sub->add_option("-o,--output", output, "write the report here instead of stdout");
  };

  auto* validate = app.add_subcommand("validate-gms", "check the G.M.S. axioms and list triangle failures");
  add_io(validate);
  validate->add_option("--exhaustive-cap", exhaustive_cap, "largest size scanned exhaustively");
  validate->add_option("--samples", samples, "quadruples sampled above the cap");
  validate->add_option("--seed", seed, "sampling seed");

  auto* patho = app.add_subcommand("detect-pathologies", "flag convergent non-Cauchy sequences and discontinuity");
  add_io(patho);
  patho->add_option("--probes", probes, "probe sequence file")->required();

  auto* check = app.add_subcommand("check-contraction", "scan point pairs for a contraction condition");
  add_io(check);
  check->add_option("--condition", condition_text, "phi|linear|weighted (or 3|17|18)");
  check->add_option("--seed", seed, "pair sampling seed");

  auto* iterate = app.add_subcommand("iterate", "run the Jungck iteration and report the trace");
  add_io(iterate);
  iterate->add_option("--x0", x0_text, "starting point (label or value)");
  iterate->add_option("--tol", tol, "stop when successive values are closer than this")->check(CLI::NonNegativeNumber);
  iterate->add_option("--max-iter", max_iter, "iteration budget")->check(CLI::PositiveNumber);
  iterate->add_option("--csv", csv, "write the trace as CSV");
  iterate->add_flag("--no-snap", no_snap, "do not round images to the sample grid");

  auto* coinc = app.add_subcommand("find-coincidence", "gate on a condition, iterate, and certify the limit");
  add_io(coinc);
  coinc->add_option("--x0", x0_text, "starting point (label or value)");
  coinc->add_option("--condition", condition_text, "phi|linear|weighted (or 3|17|18)");
  coinc->add_option("--tol", tol, "convergence tolerance")->check(CLI::NonNegativeNumber);
  coinc->add_option("--max-iter", max_iter, "iteration budget")->check(CLI::PositiveNumber);
  coinc->add_flag("--override", override_hypotheses, "run even if a hypothesis check fails");

  auto* solve = app.add_subcommand("solve-dp", "solve the coupled functional equations");
  add_io(solve);
  solve->add_option("--tol", tol, "system residual tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iter", max_iter, "iteration budget")->check(CLI::PositiveNumber);
  solve->add_option("--trace", trace, "write d(w_k, w_k+1) per step as CSV");
  solve->add_option("--certificate-phi", phi_k, "accept lipschitz_C >= 1 if phi(t) = k t passes on the probes");
  solve->add_option("--seed", seed, "probe seed");
  solve->add_flag("--override", override_hypotheses, "skip the hypothesis gate");

  auto* orc = app.add_subcommand("oracle", "brute-force reference implementations");
  orc->require_subcommand(1);
  auto* osolve = orc->add_subcommand("solve-dp", "plain coupled value iteration");
  add_io(osolve);
  osolve->add_option("--tol", tol, "system residual tolerance")->check(CLI::PositiveNumber);
  osolve->add_option("--max-iter", max_iter, "sweep budget")->check(CLI::PositiveNumber);
  auto* oscan = orc->add_subcommand("scan-coincidence", "list every sample point x with Ax = Bx");
  add_io(oscan);
  oscan->add_option("--tol", tol, "coincidence tolerance on sampled intervals")->check(CLI::NonNegativeNumber);
  auto* ogen = orc->add_subcommand("generate", "emit a random finite table");
  ogen->add_option("--kind", kind_text, "metric|gms_only|arbitrary_symmetric");
  ogen->add_option("--points", point_count, "number of points")->check(CLI::Range(2, 64));
  ogen->add_option("--seed", seed, "generator seed");
  ogen->add_option("-o,--output", output, "write the table here instead of stdout");

  auto* fixture = app.add_subcommand("fixture", "emit a built-in example as JSON");
  fixture->add_option("name", fixture_name, "not-metric | discontinuous | discontinuous-probes")->required();
  fixture->add_option("--n", fixture_n, "length of the 1/n part")->check(CLI::Range(2, 100000));
  fixture->add_option("-o,--output", output, "write here instead of stdout");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gmsfp: " << e.what() << "\n";
    return kMalformed;
  }

  const detail::Sink sink{output, out};
  json report;
  try {
    if (*validate) {
      const auto space = io::gms_from_json(io::read_json_file(input));
      ValidationOptions opt;
      opt.exhaustive_cap = exhaustive_cap;
      opt.sample_count = samples;
      opt.seed = detail::resolve_seed(seed, opt.seed);
      const auto rep = validate_gms(space, opt);
      sink.write(io::validation_report_to_json(space, rep));
      return rep.valid_gms ? kOk : kFailed;
    }

    if (*patho) {
      const auto sj = io::read_json_file(input);
      const auto space = io::space_from_json(sj, detail::dir_of(input));
      const auto pj = io::read_json_file(probes);
      return std::visit(
          [&](const auto& s) {
            const auto [seqs, opt] = io::probes_from_json(s, pj);
            const auto findings = detect_pathologies(s, seqs, opt);
            sink.write(json{{"report", "detect-pathologies"}, {"tol", opt.tol}, {"findings", io::pathologies_to_json(s, seqs, findings)}});
            return int{kOk};
          },
          space);
    }

    if (*check || *iterate || *coinc) {
      auto problem = io::problem_from_json(io::read_json_file(input), detail::dir_of(input));
      return std::visit(
          [&](auto& p) -> int {
            using Point = typename std::decay_t<decltype(p.space)>::point_type;
            const ContractionKind kind = !condition_text.empty() ? io::condition_from_string(condition_text)
                                                                 : p.condition.value_or(ContractionKind::phi);
            if (*check) {
              p.scan.seed = detail::resolve_seed(seed, p.scan.seed);
              const json rep = detail::tagged("check-contraction", detail::condition_bundle(p, kind));
              sink.write(rep);
              bool ok = rep["holds"].get<bool>();
              if (rep.contains("admissibility")) ok = ok && rep["admissibility"]["holds"].get<bool>();
              return ok ? kOk : kFailed;
            }
            Point x0;
            if (!x0_text.empty())
              x0 = io::parse_point(p.space, x0_text);
            else if (p.x0)
              x0 = *p.x0;
            else
              throw MalformedInput("no starting point: pass --x0 or set 'x0' in the file");

            if (*iterate) {
              IterationOptions<Point> it;
              it.tol = tol;
              if (max_iter) it.max_iter = max_iter;
              it.snap = !no_snap;
              const auto t = jungck_iterate(p.space, p.pair, x0, it);
              if (!csv.empty()) detail::write_text_file(csv, io::trace_csv(p.space, t));
              sink.write(detail::tagged("iterate", io::trace_summary_to_json(p.space, t)));
              const bool ok =
                  t.status == IterationStatus::converged || t.status == IterationStatus::coincidence_found_early;
              return ok ? kOk : kFailed;
            }

            CoincidenceOptions<Point> opt;
            opt.condition = kind;
            opt.override_hypotheses = override_hypotheses;
            opt.scan = p.scan;
            opt.iteration.tol = tol;
            if (max_iter) opt.iteration.max_iter = max_iter;
            try {
              const auto r = find_coincidence(p.space, p.pair, p.ctrl, x0, opt);
              json rep = detail::tagged("find-coincidence", json{{"status", "found"}});
              const json body = io::coincidence_to_json(p.space, r);
              for (const auto& [k, v] : body.items()) rep[k] = v;
              sink.write(rep);
              return kOk;
            } catch (const HypothesisViolated& e) {
              sink.write(json{{"report", "find-coincidence"}, {"status", "hypothesis_violated"}, {"message", e.what()}});
            } catch (const NoConvergence& e) {
              sink.write(json{{"report", "find-coincidence"}, {"status", "no_convergence"}, {"message", e.what()}});
            } catch (const SelectorFailure& e) {
              sink.write(json{{"report", "find-coincidence"}, {"status", "selector_failure"}, {"message", e.what()}});
            }
            return kFailed;
          },
          problem);
    }

    if (*solve) {
      const auto p = io::dp_problem_from_json(io::read_json_file(input));
      DPSolveOptions opt;
      opt.tol = tol;
      if (max_iter) opt.max_iter = max_iter;
      opt.override_hypotheses = override_hypotheses;
      opt.probe_seed = detail::resolve_seed(seed, opt.probe_seed);
      if (phi_k >= 0) opt.certificate = SupContractionCertificate{ControlFunction<double>::scale(phi_k), 0.0};
      try {
        const auto sol = solve_system(p, opt);
        if (!trace.empty()) detail::write_text_file(trace, io::dp_steps_csv(sol));
        sink.write(io::dp_solution_to_json(p, sol));
        return kOk;
      } catch (const HypothesisViolated& e) {
        sink.write(json{{"status", "hypothesis_violated"}, {"message", e.what()}});
      } catch (const NoConvergence& e) {
        sink.write(json{{"status", "no_convergence"}, {"message", e.what()}});
      }
      return kFailed;
    }

    if (*osolve) {
      const auto p = io::dp_problem_from_json(io::read_json_file(input));
      try {
        const auto sol = oracle::coupled_value_iteration(p, tol, max_iter ? max_iter : 100'000);
        sink.write(io::dp_solution_to_json(p, sol));
        return kOk;
      } catch (const HypothesisViolated& e) {
        sink.write(json{{"status", "hypothesis_violated"}, {"message", e.what()}});
      } catch (const NoConvergence& e) {
        sink.write(json{{"status", "no_convergence"}, {"message", e.what()}});
      }
      return kFailed;
    }

    if (*oscan) {
      const auto problem = io::problem_from_json(io::read_json_file(input), detail::dir_of(input));
      return std::visit(
          [&](const auto& p) {
            json pts = json::array(), values = json::array();
            for (const auto& x : bruteforce_coincidences(p.space, p.pair, tol)) {
              pts.push_back(io::point_to_json(p.space, x));
              values.push_back(io::point_to_json(p.space, p.space.snap(p.pair.A(x))));
            }
            sink.write(json{{"report", "scan-coincidence"}, {"coincidences", pts}, {"values", values}});
            return int{kOk};
          },
          problem);
    }

    if (*ogen) {
      oracle::RandomInstanceSpec spec;
      spec.point_count = point_count;
      spec.seed = detail::resolve_seed(seed, spec.seed);
      if (kind_text == "metric")
        spec.kind = oracle::TableKind::metric;
      else if (kind_text == "gms_only")
        spec.kind = oracle::TableKind::gms_only;
      else if (kind_text == "arbitrary_symmetric")
        spec.kind = oracle::TableKind::arbitrary_symmetric;
      else
        throw MalformedInput("unknown table kind '" + kind_text + "'");
      try {
        sink.write(io::gms_to_json(oracle::generate_space(spec)));
      } catch (const GenerationExhausted& e) {
        err << "gmsfp: " << e.what() << "\n";
        return kFailed;
      }
      return kOk;
    }

    if (*fixture) {
      if (fixture_name == "not-metric") {
        sink.write(io::gms_to_json(example_gms_not_metric()));
      } else if (fixture_name == "discontinuous") {
        sink.write(io::gms_to_json(example_discontinuous_gms(fixture_n)));
      } else if (fixture_name == "discontinuous-probes") {
        const auto space = example_discontinuous_gms(fixture_n);
        const auto seq = example_discontinuous_sequence(fixture_n);
        json pts = json::array();
        for (auto p : seq.points) pts.push_back(space.label(p));
        sink.write(json{{"sequences", json::array({json{{"points", pts}, {"limit", space.label(*seq.limit)}}})},
                        {"tol", 0.05}});
      } else {
        throw MalformedInput("unknown fixture '" + fixture_name + "'");
      }
      return kOk;
    }
  } catch (const HypothesisViolated& e) {
    err << "gmsfp: " << e.what() << "\n";
    return kFailed;
  } catch (const NoConvergence& e) {
    err << "gmsfp: " << e.what() << "\n";
    return kFailed;
  } catch (const BoundednessViolation& e) {
    err << "gmsfp: internal bound violated: " << e.what() << "\n";
    return kFailed;
  } catch (const Error& e) {
    err << "gmsfp: " << e.what() << "\n";
    return kMalformed;
  } catch (const json::exception& e) {
    err << "gmsfp: " << e.what() << "\n";
    return kMalformed;
  } catch (const std::exception& e) {
    err << "gmsfp: " << e.what() << "\n";
    return kMalformed;
  }
  return kMalformed;
}

}  // namespace gmsfp::cli
