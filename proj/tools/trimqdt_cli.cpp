// Command-line driver: one subcommand per task.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trimqdt/pipeline.hpp"

namespace {

void error_record(const std::string& out, const std::string& task, const std::string& msg) {
  nlohmann::json j;
  j["status"] = "error";
  j["task"] = task;
  j["message"] = msg;
  std::cerr << j.dump() << "\n";
  if (out.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  std::ofstream f(std::filesystem::path(out) / "error.json");
  if (f) f << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rovibrational levels of H3+ and MQDT Rydberg levels of H3"};
  app.set_version_flag("--version", std::string(trimqdt::pipe::version()));
  app.require_subcommand(1);

  std::string config, out = "out";
  int threads = 1;
  std::optional<double> tolerance;
  std::vector<std::string> sets;

  for (const auto& t : trimqdt::pipe::tasks()) {
    auto* sub = app.add_subcommand(t, "run the " + t + " task");
    sub->add_option("--config", config, "key = value configuration file");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--tolerance", tolerance, "rms tolerance for the comparison [cm^-1]")->check(CLI::PositiveNumber);
    sub->add_option("--set", sets, "override a config key (key=value)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  try {
    std::map<std::string, std::string> values;
    std::string base = ".";
    if (!config.empty()) {
      const auto kv = trimqdt::textio::read_key_values(config);
      values = kv.values;
      const auto parent = std::filesystem::path(config).parent_path();
      if (!parent.empty()) base = parent.string();
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
      values[trimqdt::textio::trim(s.substr(0, eq))] = trimqdt::textio::trim(s.substr(eq + 1));
    }
    const auto cfg = trimqdt::pipe::make_config(task, values, base);
    const int status = trimqdt::pipe::run(cfg, out, threads, tolerance);
    std::cout << task << ": " << (status == 0 ? "ok" : "comparison over tolerance") << " (outputs in " << out
              << ")\n";
    return status;
  } catch (const std::exception& e) {
    error_record(out, task, e.what());
    return 2;
  }
}
