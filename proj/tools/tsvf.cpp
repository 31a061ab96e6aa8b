// Command-line front end: evaluates the closed-form rules, runs the pointer
// model and the Monte Carlo engine on JSON scenario documents, and replays the
// built-in worked examples. Exit codes: 0 success, 1 domain error or failed
// check, 2 parse/validation/usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsvf/abl.hpp"
#include "tsvf/catalog.hpp"
#include "tsvf/ensemble.hpp"
#include "tsvf/hilbert.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/scenario_io.hpp"
#include "tsvf/tsv.hpp"
#include "tsvf/weak.hpp"

namespace {

using Scalar = double;
using json = nlohmann::json;
using Doc = tsvf::ScenarioDocument<Scalar>;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string fmt(std::complex<double> z) {
  return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i";
}

struct Options {
  std::string scenario_path;
  std::string observable_name;
  std::string example_name;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> delta;
  int threads = 1;
  std::string format = "text";

  bool json_mode() const { return format == "json"; }
};

Doc load_document(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw tsvf::ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return tsvf::parse_scenario<Scalar>(buffer.str());
}

tsvf::Operator<Scalar> resolve_observable(const Doc& doc, const Options& opt) {
  if (!opt.observable_name.empty())
    return tsvf::builtin_observable<Scalar>(opt.observable_name, doc.space);
  return doc.require_observable();
}

const char* selection_name(tsvf::SelectionKind kind) {
  switch (kind) {
    case tsvf::SelectionKind::PreOnly:
      return "pre_only";
    case tsvf::SelectionKind::RankOne:
      return "rank_one";
    case tsvf::SelectionKind::Subspace:
      return "subspace";
    case tsvf::SelectionKind::Generalized:
      return "generalized";
  }
  return "?";
}

json distribution_to_json(const tsvf::OutcomeDistribution<Scalar>& dist) {
  json entries = json::array();
  for (int n = 0; n < dist.size(); ++n)
    entries.push_back({{"eigenvalue", dist.eigenvalue(n)},
                       {"probability", dist.probability(n)}});
  return entries;
}

void print_distribution(const tsvf::OutcomeDistribution<Scalar>& dist) {
  std::printf("%-26s %s\n", "eigenvalue", "probability");
  for (int n = 0; n < dist.size(); ++n)
    std::printf("%-26s %s\n", fmt(dist.eigenvalue(n)).c_str(),
                fmt(dist.probability(n)).c_str());
}

json stats_to_json(const tsvf::EnsembleStats<Scalar>& stats) {
  json outcomes = json::array();
  for (const auto& label : stats.outcome_labels) {
    json row{{"label", label}, {"count", stats.count(label)}};
    if (stats.selected > 0) {
      row["conditional_freq"] = stats.freq(label);
      row["standard_error"] = stats.standard_error.at(label);
    }
    outcomes.push_back(std::move(row));
  }
  return json{{"trials", stats.trials},
              {"selected", stats.selected},
              {"selection_rate", stats.selection_rate},
              {"outcomes", std::move(outcomes)}};
}

void print_stats(const tsvf::EnsembleStats<Scalar>& stats) {
  std::printf("%-18s %llu\n", "trials", static_cast<unsigned long long>(stats.trials));
  std::printf("%-18s %llu\n", "selected", static_cast<unsigned long long>(stats.selected));
  std::printf("%-18s %s\n", "selection_rate", fmt(stats.selection_rate).c_str());
  if (stats.no_selected_trials()) {
    std::printf("warning: no trials were selected; conditional frequencies undefined\n");
    return;
  }
  std::printf("%-12s %-12s %-26s %s\n", "outcome", "count", "conditional_freq",
              "standard_error");
  for (const auto& label : stats.outcome_labels)
    std::printf("%-12s %-12llu %-26s %s\n", label.c_str(),
                static_cast<unsigned long long>(stats.count(label)),
                fmt(stats.freq(label)).c_str(),
                fmt(stats.standard_error.count(label) ? stats.standard_error.at(label) : 0.0)
                    .c_str());
}

int run_abl(const Options& opt) {
  const Doc doc = load_document(opt.scenario_path);
  const auto observable = resolve_observable(doc, opt);
  const auto decomposition = tsvf::eigendecompose(observable);

  tsvf::OutcomeDistribution<Scalar> dist = [&] {
    switch (doc.selection_kind()) {
      case tsvf::SelectionKind::PreOnly:
        return tsvf::born_probability(*doc.pre, decomposition);
      case tsvf::SelectionKind::RankOne:
        return tsvf::abl_probability(
            tsvf::TwoStateVector<Scalar>(*doc.post_bra, *doc.pre), decomposition);
      case tsvf::SelectionKind::Subspace:
        return tsvf::abl_degenerate(*doc.pre, *doc.post_projector, decomposition);
      case tsvf::SelectionKind::Generalized:
        return tsvf::abl_generalized(*doc.generalized, decomposition);
    }
    throw tsvf::ValidationError("unreachable selection kind");
  }();

  if (opt.json_mode()) {
    json out{{"command", "abl"},
             {"selection", selection_name(doc.selection_kind())},
             {"entries", distribution_to_json(dist)}};
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("conditional probabilities (%s selection)\n",
                selection_name(doc.selection_kind()));
    print_distribution(dist);
  }
  return 0;
}

int run_weak(const Options& opt) {
  const Doc doc = load_document(opt.scenario_path);
  const auto observable = resolve_observable(doc, opt);

  tsvf::WeakValue<Scalar> wv = [&] {
    switch (doc.selection_kind()) {
      case tsvf::SelectionKind::PreOnly:
        return tsvf::weak_value_degenerate(
            *doc.pre, tsvf::Operator<Scalar>::identity(doc.space), observable);
      case tsvf::SelectionKind::RankOne:
        return tsvf::weak_value(tsvf::TwoStateVector<Scalar>(*doc.post_bra, *doc.pre),
                                observable);
      case tsvf::SelectionKind::Subspace:
        return tsvf::weak_value_degenerate(*doc.pre, *doc.post_projector, observable);
      case tsvf::SelectionKind::Generalized:
        return tsvf::weak_value_generalized(*doc.generalized, observable);
    }
    throw tsvf::ValidationError("unreachable selection kind");
  }();

  if (opt.json_mode()) {
    json out{{"command", "weak"},
             {"selection", selection_name(doc.selection_kind())},
             {"re", wv.value.real()},
             {"im", wv.value.imag()},
             {"condition", wv.condition}};
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("weak value (%s selection)\n", selection_name(doc.selection_kind()));
    std::printf("%-12s %s\n", "re", fmt(wv.value.real()).c_str());
    std::printf("%-12s %s\n", "im", fmt(wv.value.imag()).c_str());
    std::printf("%-12s %s\n", "condition", fmt(wv.condition).c_str());
  }
  return 0;
}

int run_pointer(const Options& opt) {
  const Doc doc = load_document(opt.scenario_path);
  const auto observable = resolve_observable(doc, opt);
  const auto decomposition = tsvf::eigendecompose(observable);
  if (!doc.pre.has_value())
    throw tsvf::ValidationError("pre", "the pointer model needs a pre-selected state");
  if (doc.generalized.has_value() || doc.post_projector.has_value())
    throw tsvf::ValidationError(
        "post", "the pointer model takes a rank-one post-selection or none");

  std::vector<double> lambdas, deltas;
  if (opt.lambda.has_value())
    lambdas = {*opt.lambda};
  else if (doc.coupling.has_value())
    lambdas = {doc.coupling->strength};
  else
    lambdas = {1.0, 0.1, 0.01};
  const double spread =
      decomposition.size() > 1
          ? decomposition.eigenvalues().back() - decomposition.eigenvalues().front()
          : 1.0;
  if (opt.delta.has_value())
    deltas = {*opt.delta};
  else if (doc.coupling.has_value())
    deltas = {doc.coupling->pointer_width};
  else
    deltas = {0.02 * spread, 0.2 * spread, 2 * spread, 20 * spread};

  json rows = json::array();
  if (!opt.json_mode())
    std::printf("%-24s %-24s %-24s %-24s %-24s %s\n", "lambda", "delta", "mean_q", "var_q",
                "mean_p", "survival");
  for (double lambda : lambdas) {
    for (double delta : deltas) {
      const tsvf::Coupling<Scalar> coupling(lambda, delta);
      const auto wave = tsvf::evolve_pointer(*doc.pre, decomposition, coupling, doc.post_bra);
      const auto s = tsvf::stats(wave);
      if (opt.json_mode()) {
        rows.push_back({{"lambda", lambda},
                        {"delta", delta},
                        {"mean_q", s.mean_q},
                        {"var_q", s.var_q},
                        {"mean_p", s.mean_p},
                        {"survival", s.survival}});
      } else {
        std::printf("%-24s %-24s %-24s %-24s %-24s %s\n", fmt(lambda).c_str(),
                    fmt(delta).c_str(), fmt(s.mean_q).c_str(), fmt(s.var_q).c_str(),
                    fmt(s.mean_p).c_str(), fmt(s.survival).c_str());
      }
    }
  }
  if (opt.json_mode()) {
    json out{{"command", "pointer"}, {"grid", std::move(rows)}};
    std::printf("%s\n", out.dump(2).c_str());
  }
  return 0;
}

int run_simulate(const Options& opt) {
  const Doc doc = load_document(opt.scenario_path);
  const std::uint64_t trials = opt.trials.has_value()
                                   ? *opt.trials
                                   : (doc.trials.has_value() ? *doc.trials : 0);
  if (trials == 0)
    throw tsvf::ValidationError("trials", "give a positive trial count (flag or document)");
  if (!opt.seed.has_value() && !doc.seed.has_value())
    throw tsvf::ValidationError("seed", "a seed is required; wall-clock seeding is not done");
  const tsvf::RngPolicy rng{opt.seed.has_value() ? *opt.seed : *doc.seed};

  if (doc.generalized.has_value()) {
    const auto observable = resolve_observable(doc, opt);
    const auto result = tsvf::prepare_and_compare(*doc.generalized,
                                                  tsvf::eigendecompose(observable), trials,
                                                  rng, opt.threads);
    double gap = 0;
    for (int n = 0; n < result.formula.size(); ++n)
      gap = std::max(gap, std::abs(result.formula.probability(n) -
                                   result.composite_formula.probability(n)));
    if (opt.json_mode()) {
      json out{{"command", "simulate"},
               {"mode", "prepare_and_compare"},
               {"formula", distribution_to_json(result.formula)},
               {"composite_formula", distribution_to_json(result.composite_formula)},
               {"closed_form_gap", gap},
               {"ensemble", stats_to_json(result.freq)}};
      std::printf("%s\n", out.dump(2).c_str());
    } else {
      std::printf("generalized closed form\n");
      print_distribution(result.formula);
      std::printf("composite closed form\n");
      print_distribution(result.composite_formula);
      std::printf("%-18s %s\n", "closed_form_gap", fmt(gap).c_str());
      print_stats(result.freq);
    }
    return 0;
  }

  const tsvf::Scenario<Scalar> scenario = doc.scenario();
  tsvf::EnsembleStats<Scalar> stats = [&] {
    if (std::holds_alternative<tsvf::UnitaryDevice<Scalar>>(scenario.intermediate))
      return tsvf::run_device(scenario, trials, rng, opt.threads);
    if (std::holds_alternative<tsvf::SpectralDecomposition<Scalar>>(scenario.intermediate))
      return tsvf::run_projective(scenario, trials, rng, opt.threads);
    throw tsvf::ValidationError("observable",
                                "simulate needs an observable or a device to measure");
  }();

  if (opt.json_mode()) {
    json out{{"command", "simulate"}, {"mode", "chain"}, {"ensemble", stats_to_json(stats)}};
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    print_stats(stats);
  }
  return 0;
}

int run_examples(const Options& opt) {
  const std::uint64_t trials = opt.trials.has_value() ? *opt.trials : 100000;
  const std::uint64_t seed = opt.seed.has_value() ? *opt.seed : 42;
  auto examples = tsvf::all_examples<Scalar>(trials, seed);
  if (!opt.example_name.empty()) {
    std::vector<tsvf::NamedExample<Scalar>> filtered;
    for (auto& e : examples)
      if (e.name == opt.example_name) filtered.push_back(std::move(e));
    if (filtered.empty())
      throw tsvf::ValidationError("unknown example '" + opt.example_name +
                                  "' (try three-box, shimony-pair, spin-xy)");
    examples = std::move(filtered);
  }

  bool all_passed = true;
  json out_examples = json::array();
  for (const auto& example : examples) {
    if (!opt.json_mode()) std::printf("%s: %s\n", example.name.c_str(), example.summary.c_str());
    json claims = json::array();
    for (const auto& report : tsvf::run_example(example)) {
      const bool passed = report.outcome.passed();
      all_passed = all_passed && passed;
      if (opt.json_mode()) {
        claims.push_back({{"label", report.label},
                          {"passed", passed},
                          {"measured_re", report.outcome.measured.real()},
                          {"measured_im", report.outcome.measured.imag()},
                          {"expected_re", report.outcome.expected.real()},
                          {"expected_im", report.outcome.expected.imag()},
                          {"tolerance", report.outcome.tolerance}});
      } else {
        std::printf("  [%s] %s (measured %s, expected %s, tol %s)\n",
                    passed ? "PASS" : "FAIL", report.label.c_str(),
                    fmt(report.outcome.measured).c_str(), fmt(report.outcome.expected).c_str(),
                    fmt(report.outcome.tolerance).c_str());
      }
    }
    if (opt.json_mode())
      out_examples.push_back(
          {{"name", example.name}, {"summary", example.summary}, {"claims", std::move(claims)}});
  }
  if (opt.json_mode()) {
    json out{{"command", "examples"}, {"passed", all_passed}, {"examples", out_examples}};
    std::printf("%s\n", out.dump(2).c_str());
  }
  return all_passed ? 0 : 1;
}

int run_check_symmetry(const Options& opt) {
  const Doc doc = load_document(opt.scenario_path);
  const auto observable = resolve_observable(doc, opt);
  const auto decomposition = tsvf::eigendecompose(observable);
  const double tol = 1e-12;

  double abl_gap = 0;
  double weak_gap = 0;
  if (doc.selection_kind() == tsvf::SelectionKind::RankOne) {
    const tsvf::TwoStateVector<Scalar> tsv(*doc.post_bra, *doc.pre);
    const auto forward = tsvf::abl_probability(tsv, decomposition);
    const auto backward = tsvf::abl_probability(tsvf::reverse(tsv), decomposition);
    for (int n = 0; n < forward.size(); ++n)
      abl_gap = std::max(abl_gap,
                         std::abs(forward.probability(n) - backward.probability(n)));
    weak_gap = std::abs(tsvf::weak_value(tsvf::reverse(tsv), observable).value -
                        std::conj(tsvf::weak_value(tsv, observable).value));
  } else if (doc.selection_kind() == tsvf::SelectionKind::Generalized) {
    const auto& g = *doc.generalized;
    const auto forward = tsvf::abl_generalized(g, decomposition);
    const auto backward = tsvf::abl_generalized(tsvf::reverse_generalized(g), decomposition);
    for (int n = 0; n < forward.size(); ++n)
      abl_gap = std::max(abl_gap,
                         std::abs(forward.probability(n) - backward.probability(n)));
    weak_gap =
        std::abs(tsvf::weak_value_generalized(tsvf::reverse_generalized(g), observable).value -
                 std::conj(tsvf::weak_value_generalized(g, observable).value));
  } else {
    throw tsvf::ValidationError(
        "post", "check-symmetry needs a rank-one or generalized selection");
  }

  const bool abl_ok = abl_gap <= tol;
  const bool weak_ok = weak_gap <= tol;
  if (opt.json_mode()) {
    json out{{"command", "check-symmetry"},
             {"abl_gap", abl_gap},
             {"weak_conjugation_gap", weak_gap},
             {"tolerance", tol},
             {"passed", abl_ok && weak_ok}};
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("[%s] outcome probabilities invariant under time reversal (gap %s)\n",
                abl_ok ? "PASS" : "FAIL", fmt(abl_gap).c_str());
    std::printf("[%s] weak value conjugates under time reversal (gap %s)\n",
                weak_ok ? "PASS" : "FAIL", fmt(weak_gap).c_str());
  }
  return (abl_ok && weak_ok) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsvf: pre- and post-selected quantum systems at desk scale"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario)
      cmd->add_option("--scenario", opt.scenario_path, "scenario JSON file")->required();
    cmd->add_option("--format", opt.format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--observable", opt.observable_name,
                    "builtin observable name overriding the document");
  };

  CLI::App* abl_cmd = app.add_subcommand("abl", "conditional outcome probabilities");
  add_common(abl_cmd, true);
  CLI::App* weak_cmd = app.add_subcommand("weak", "weak value of an observable");
  add_common(weak_cmd, true);

  CLI::App* pointer_cmd = app.add_subcommand("pointer", "von Neumann pointer statistics");
  add_common(pointer_cmd, true);
  pointer_cmd->add_option("--lambda", opt.lambda, "coupling strength");
  pointer_cmd->add_option("--delta", opt.delta, "pointer width");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "seeded Monte Carlo ensemble");
  add_common(simulate_cmd, true);
  simulate_cmd->add_option("--trials", opt.trials, "number of trials");
  simulate_cmd->add_option("--seed", opt.seed, "master seed (required here or in the document)");
  simulate_cmd->add_option("--threads", opt.threads, "trial-level parallelism")
      ->check(CLI::Range(1, 64));

  CLI::App* examples_cmd = app.add_subcommand("examples", "run the built-in worked examples");
  add_common(examples_cmd, false);
  examples_cmd->add_option("name", opt.example_name, "run a single example by name");
  examples_cmd->add_option("--trials", opt.trials, "Monte Carlo trials per claim");
  examples_cmd->add_option("--seed", opt.seed, "master seed for Monte Carlo claims");

  CLI::App* symmetry_cmd =
      app.add_subcommand("check-symmetry", "time-reversal invariance of a scenario");
  add_common(symmetry_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(abl_cmd)) return run_abl(opt);
    if (app.got_subcommand(weak_cmd)) return run_weak(opt);
    if (app.got_subcommand(pointer_cmd)) return run_pointer(opt);
    if (app.got_subcommand(simulate_cmd)) return run_simulate(opt);
    if (app.got_subcommand(examples_cmd)) return run_examples(opt);
    if (app.got_subcommand(symmetry_cmd)) return run_check_symmetry(opt);
  } catch (const tsvf::DomainError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const tsvf::InputError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
