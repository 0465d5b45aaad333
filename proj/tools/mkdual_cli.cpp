// mkdual: run duality scenarios on JSON instance files.
//
// Exit codes: 0 success, 1 an invariant check failed, 2 input error.

#include <fstream>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "mkdual/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kInputError = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw mkdual::ParseError(out_path, "cannot write report");
  out << text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Monge-Kantorovich duality scenarios on finite probability spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string mode_flag;
  double tol = 1e-9;
  std::string out_path;
  bool timing = false;
  app.add_option("--mode", mode_flag, "Arithmetic, overriding the instance file")
      ->check(CLI::IsMember({"rational", "float"}));
  app.add_option("--tolerance", tol, "Float-mode comparison tolerance")->check(CLI::PositiveNumber);
  app.add_option("-o,--out", out_path, "Write the report here instead of stdout");
  app.add_flag("--timing", timing, "Add wall-clock timing to the report");

  mkdual::ScenarioOptions opt;
  std::string instance_path;
  for (const auto& name : mkdual::scenario_commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("instance", instance_path, "Instance JSON file")->required();
    if (name == "approx") sub->add_option("--n", opt.n_values, "Stage parameters (default 1,2,4,... up to the modulus)")->delimiter(',');
    if (name == "partition" || name == "extend") {
      sub->add_option("--eps", opt.eps, "Oscillation level for the partition search");
      sub->add_option("--lipschitz", opt.lipschitz, "Uniform Lipschitz bound u (default: the cost's modulus)");
    }
  }
  std::uint64_t seed = 0;
  std::string size;
  auto* gen = app.add_subcommand("gen", "Write a random rational instance");
  gen->add_option("--seed", seed)->required();
  gen->add_option("--size", size, "RxC")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  mkdual::set_tolerance(tol);
  try {
    if (gen->parsed()) {
      std::smatch m;
      if (!std::regex_match(size, m, std::regex(R"((\d+)x(\d+))")))
        throw mkdual::ParseError("--size", "expected RxC, e.g. 3x4");
      auto inst = mkdual::generate_instance(seed, std::stoul(m[1]), std::stoul(m[2]));
      emit(mkdual::to_json(inst).dump(2), out_path);
      return kOk;
    }
    opt.command = app.get_subcommands().front()->get_name();
    opt.timing = timing;
    std::optional<mkdual::ArithmeticMode> mode;
    if (mode_flag == "rational") mode = mkdual::ArithmeticMode::rational;
    if (mode_flag == "float") mode = mkdual::ArithmeticMode::floating;
    auto inst = mkdual::load_instance(instance_path, mode);
    auto report = mkdual::run_scenario(inst, opt);
    emit(report.document.dump(2), out_path);
    return report.ok ? kOk : kViolation;
  } catch (const mkdual::LipschitzBoundViolated& e) {
    std::cerr << "error: " << e.what() << " (pair " << e.pair().first << ", " << e.pair().second << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kInputError;
}
