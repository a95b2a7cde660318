#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "eskit/reports.hpp"

// Batch driver: subcommands ideal / stickelberger / kolyvagin / stark / suite.
// All I/O is UTF-8 JSON with numbers as decimal strings.  Exit codes:
//   0  success
//   1  suite (or validation) failure
//   2  usage or parse error
//   3  mathematical-hypothesis violation

namespace {

using esk::json;

json read_input(const std::string& input) {
  if (input.empty()) throw esk::usage_error("--input is required for this subcommand");
  std::string text;
  if (!input.empty() && input.front() == '{') {
    text = input;
  } else {
    std::ifstream f(input);
    if (!f) throw esk::usage_error("cannot open input file: " + input);
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  return json::parse(text);
}

void write_output(const json& report, const std::string& output) {
  std::string text = report.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) throw esk::usage_error("cannot open output file: " + output);
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Iwasawa-module and Euler-system toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string input, output;
  esk::u64 seed = 1, p = 3, pool_max = 4;
  unsigned n = 1;
  bool oracle = false;
  std::vector<std::string> suites;

  app.add_option("--input", input, "input file path or inline JSON object");
  app.add_option("--output", output, "output file path (default: stdout)");
  app.add_option("--seed", seed, "seed for randomized suites");
  app.add_option("--p", p, "coefficient prime");
  app.add_option("--n", n, "coefficient exponent (modulus p^n)");
  app.add_option("--pool-max", pool_max, "bound on auxiliary prime pools");
  app.add_flag("--oracle", oracle, "include brute-force oracle cross-checks");

  CLI::App* c_ideal = app.add_subcommand("ideal", "Fitting/characteristic/annihilator ideals");
  CLI::App* c_stick = app.add_subcommand("stickelberger", "Stickelberger elements and L-values");
  CLI::App* c_koly = app.add_subcommand("kolyvagin", "derived classes and derived ideals");
  CLI::App* c_stark = app.add_subcommand("stark", "synthetic Selmer data and formal systems");
  CLI::App* c_suite = app.add_subcommand("suite", "property-suite runner");
  c_suite->add_option("names", suites, "suites to run (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_ideal->parsed()) {
      write_output(esk::cmd_ideal(read_input(input), oracle), output);
    } else if (c_stick->parsed()) {
      write_output(esk::cmd_stickelberger(read_input(input), p, n, oracle), output);
    } else if (c_koly->parsed()) {
      write_output(esk::cmd_kolyvagin(read_input(input), p, n), output);
    } else if (c_stark->parsed()) {
      json report = esk::cmd_stark(read_input(input));
      write_output(report, output);
      if (!report.at("valid").get<bool>()) return 1;
    } else if (c_suite->parsed()) {
      if (suites.empty()) suites = esk::suite_names();
      json arr = json::array();
      unsigned failed = 0;
      for (const auto& name : suites) {
        esk::SuiteResult res = esk::run_suite(name, seed, p, n, pool_max);
        failed += res.failed();
        arr.push_back(res.to_json());
      }
      json summary{{"seed", esk::dec(seed)}, {"suites", arr},
                   {"failed", esk::dec(failed)}};
      write_output(summary, output);
      if (failed) return 1;
    }
  } catch (const esk::usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const esk::math_error& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
