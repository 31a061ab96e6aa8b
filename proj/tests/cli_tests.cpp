#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

// Drives the built binary end to end through a shell pipe.

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(TSVF_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, n);
  const int status = pclose(pipe);
  return CliResult{WEXITSTATUS(status), std::move(output)};
}

std::string fixture(const std::string& name) {
  return std::string(TSVF_FIXTURE_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("examples subcommand runs clean") {
  const auto all = run_cli("examples --trials 20000");
  CHECK(all.exit_code == 0);
  CHECK(contains(all.output, "[PASS]"));
  CHECK(!contains(all.output, "[FAIL]"));

  const auto one = run_cli("examples three-box --trials 20000");
  CHECK(one.exit_code == 0);
  CHECK(contains(one.output, "three-box"));
  CHECK(!contains(one.output, "shimony"));

  CHECK(run_cli("examples no-such-example").exit_code == 2);
}

TEST_CASE("simulate output is byte-identical across runs and thread counts") {
  const std::string base =
      "simulate --scenario " + fixture("shimony_forward.json") + " --trials 60000 --seed 7";
  const auto first = run_cli(base);
  const auto second = run_cli(base);
  const auto threaded = run_cli(base + " --threads 4");
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);
  CHECK(first.output == threaded.output);
  CHECK(contains(first.output, "selection_rate"));
}

TEST_CASE("simulate without any seed refuses to run") {
  const auto result =
      run_cli("simulate --scenario " + fixture("orthogonal.json") + " --trials 100");
  CHECK(result.exit_code == 2);
  CHECK(contains(result.output, "seed"));
}

TEST_CASE("weak on an orthogonal selection exits with the domain error named") {
  const auto result = run_cli("weak --scenario " + fixture("orthogonal.json"));
  CHECK(result.exit_code == 1);
  CHECK(contains(result.output, "OrthogonalSelection"));

  // the same selection blocks every path of an ideal measurement
  const auto blocked = run_cli("abl --scenario " + fixture("orthogonal.json"));
  CHECK(blocked.exit_code == 1);
  CHECK(contains(blocked.output, "NullEvent"));
}

TEST_CASE("abl emits the three-box certainty in both formats") {
  const auto text = run_cli("abl --scenario " + fixture("three_box.json"));
  CHECK(text.exit_code == 0);
  CHECK(contains(text.output, "probability"));

  const auto as_json =
      run_cli("abl --scenario " + fixture("three_box.json") + " --format json");
  CHECK(as_json.exit_code == 0);
  const auto parsed = nlohmann::json::parse(as_json.output);
  CHECK(parsed["command"] == "abl");
  CHECK(parsed["entries"][1]["eigenvalue"].get<double>() == 1.0);
  CHECK(parsed["entries"][1]["probability"].get<double>() == 1.0);

  const auto box_b = run_cli("abl --scenario " + fixture("three_box.json") +
                             " --observable projector:B --format json");
  CHECK(nlohmann::json::parse(box_b.output)["entries"][1]["probability"].get<double>() ==
        1.0);
}

TEST_CASE("weak json carries the complex value at full precision") {
  const auto result = run_cli("weak --scenario " + fixture("spin_xy.json") + " --format json");
  CHECK(result.exit_code == 0);
  const auto parsed = nlohmann::json::parse(result.output);
  CHECK(parsed["re"].get<double>() == 0.0);
  CHECK(parsed["im"].get<double>() == 1.0);
  CHECK(parsed["condition"].get<double>() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("text and json report the same numbers") {
  const std::string base =
      "simulate --scenario " + fixture("three_box.json") + " --trials 30000 --seed 5";
  const auto text = run_cli(base);
  const auto as_json = run_cli(base + " --format json");
  REQUIRE(text.exit_code == 0);
  REQUIRE(as_json.exit_code == 0);

  const auto line_start = text.output.find("selection_rate");
  REQUIRE(line_start != std::string::npos);
  const double text_rate =
      std::strtod(text.output.c_str() + line_start + std::string("selection_rate").size(),
                  nullptr);
  const auto parsed = nlohmann::json::parse(as_json.output);
  CHECK(parsed["ensemble"]["selection_rate"].get<double>() == text_rate);
}

TEST_CASE("pointer grid and single-point modes") {
  const auto single = run_cli("pointer --scenario " + fixture("three_box.json") +
                              " --observable projector:C --lambda 0.1 --delta 10 "
                              "--format json");
  CHECK(single.exit_code == 0);
  const auto parsed = nlohmann::json::parse(single.output);
  REQUIRE(parsed["grid"].size() == 1);
  CHECK(parsed["grid"][0]["mean_q"].get<double>() == doctest::Approx(-0.1).epsilon(0.01));

  const auto grid = run_cli("pointer --scenario " + fixture("spin_xy.json"));
  CHECK(grid.exit_code == 0);
  CHECK(contains(grid.output, "mean_q"));

  // with no post-selection the pointer state is a mixture; survival stays 1
  const auto mixture = run_cli("pointer --scenario " + fixture("preonly_qubit.json") +
                               " --lambda 1 --delta 0.5 --format json");
  CHECK(mixture.exit_code == 0);
  const auto parsed_mix = nlohmann::json::parse(mixture.output);
  CHECK(parsed_mix["grid"][0]["survival"].get<double>() == 1.0);
  // mean_q = lambda * <psi|sigma_z|psi> = 0.36 - 0.64
  CHECK(parsed_mix["grid"][0]["mean_q"].get<double>() == doctest::Approx(-0.28));

  // without flags or a coupling block the tool sweeps a default grid
  const auto sweep =
      run_cli("pointer --scenario " + fixture("preonly_qubit.json") + " --format json");
  CHECK(sweep.exit_code == 0);
  CHECK(nlohmann::json::parse(sweep.output)["grid"].size() == 12);

  // a lambda that is not a positive number is a validation error
  CHECK(run_cli("pointer --scenario " + fixture("preonly_qubit.json") +
                " --lambda -1 --delta 1")
            .exit_code == 2);
  // post-selecting an orthogonal state leaves no pointer state at all
  const auto null_sel = run_cli("pointer --scenario " + fixture("orthogonal.json") +
                                " --lambda 1 --delta 0.1");
  CHECK(null_sel.exit_code == 1);
  CHECK(contains(null_sel.output, "NullSelection"));
}

TEST_CASE("generalized documents simulate through the ancilla construction") {
  const auto result = run_cli("simulate --scenario " + fixture("generalized_demo.json") +
                              " --trials 20000 --seed 11 --format json");
  CHECK(result.exit_code == 0);
  const auto parsed = nlohmann::json::parse(result.output);
  CHECK(parsed["mode"] == "prepare_and_compare");
  CHECK(parsed["closed_form_gap"].get<double>() < 1e-12);
}

TEST_CASE("the reversed device fixture never yields outcome 1") {
  const auto result = run_cli("simulate --scenario " + fixture("shimony_reversed.json") +
                              " --format json");
  CHECK(result.exit_code == 0);
  const auto parsed = nlohmann::json::parse(result.output);
  for (const auto& row : parsed["ensemble"]["outcomes"]) {
    if (row["label"] == "1") CHECK(row["count"].get<std::uint64_t>() == 0);
  }
  CHECK(parsed["ensemble"]["selected"].get<std::uint64_t>() > 0);
}

TEST_CASE("check-symmetry passes on shipped scenarios") {
  const auto spin = run_cli("check-symmetry --scenario " + fixture("spin_xy.json"));
  CHECK(spin.exit_code == 0);
  CHECK(contains(spin.output, "[PASS]"));
  const auto generalized =
      run_cli("check-symmetry --scenario " + fixture("generalized_demo.json"));
  CHECK(generalized.exit_code == 0);
  const auto boxes = run_cli("check-symmetry --scenario " + fixture("three_box.json"));
  CHECK(boxes.exit_code == 0);
}

TEST_CASE("parse and usage failures exit with code 2") {
  const std::string bad_path = "/tmp/tsvf_cli_bad_fixture.json";
  {
    std::ofstream out(bad_path);
    out << "{ not json";
  }
  const auto bad = run_cli("abl --scenario " + bad_path);
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.output, "ParseError"));
  std::remove(bad_path.c_str());

  CHECK(run_cli("abl --scenario /no/such/file.json").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("simulate").exit_code == 2);  // missing required --scenario

  const std::string badnorm_path = "/tmp/tsvf_cli_badnorm.json";
  {
    std::ofstream out(badnorm_path);
    out << R"({"space": {"dimension": 2}, "pre": [[0.5, 0.0], [0.0, 0.0]],)"
        << R"( "observable": {"builtin": "pauli_z"}})";
  }
  const auto badnorm = run_cli("abl --scenario " + badnorm_path);
  CHECK(badnorm.exit_code == 2);
  CHECK(contains(badnorm.output, "ValidationError"));
  CHECK(contains(badnorm.output, "pre"));
  std::remove(badnorm_path.c_str());
}
