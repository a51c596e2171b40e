#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/mc_runtime.hpp"
#include "commands.hpp"

#ifndef CHAOSLAB_VERSION
#define CHAOSLAB_VERSION "0.0.0"
#endif

namespace chaoslab::cli {

namespace {

struct Extra {
  const char* sub;
  const char* flag;
  const char* key;
  bool list;
  const char* help;
};

// Per-subcommand shorthands for keys under "options".
const Extra kExtras[] = {
    {"tail", "--n", "options.n", false, "remainder order"},
    {"tail", "--grid", "options.grid", false, "number of t grid cells on [-1/2, 1/2)"},
    {"admissible", "--d", "options.d", false, "dimension"},
    {"admissible", "--r", "options.r_cap", false, "radius cap"},
    {"covariance", "--ns", "options.ns", true, "truncation levels"},
    {"covariance", "--pairs", "options.pairs", false, "number of point pairs"},
    {"mgf", "--jmax", "options.j_max", false, "largest block"},
    {"martingale", "--mode", "options.mode", false, "exact or mc"},
    {"martingale", "--m", "options.m", false, "Monte Carlo continuations"},
    {"partition", "--n", "options.n", false, "number of blocks"},
    {"supdecay", "--ls", "options.ls", true, "block levels"},
    {"l2ratio", "--l", "options.l", false, "block level"},
    {"l2ratio", "--ns", "options.ns", true, "horizons"},
    {"l2ratio", "--outer", "options.outer", false, "outer replicas"},
    {"l2ratio", "--inner", "options.inner", false, "inner continuations"},
    {"analyticity", "--mode", "options.mode", false, "analytic or modulus_control"},
    {"analyticity", "--level", "options.level", false, "truncation level"},
    {"expsum", "--nmax", "options.n_max", false, "sequence length"},
    {"audit", "--n", "options.n", false, "number of levels"},
    {"audit", "--epsilon", "options.epsilon", false, "moment exponent excess"},
};

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> sets;
  // key path -> raw values
  std::map<std::string, std::vector<std::string>> values;
};

json parse_value(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::exception&) {
    return json(s);
  }
}

void assign(json& root, const std::string& path, json value) {
  json* cur = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("--set: malformed key path '" + path + "'");
    if (!cur->is_object()) throw ConfigError("--set: '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*cur)[key] = std::move(value);
      return;
    }
    cur = &(*cur)[key];
    if (cur->is_null()) *cur = json::object();
    start = dot + 1;
  }
}

json load_config(const std::string& file, const std::string& sub) {
  std::ifstream is(file);
  if (!is) throw ConfigError("--config: cannot open '" + file + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config: '" + file + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("--config: top level must be an object");
  // A run manifest: rerun its config.
  if (j.contains("subcommand") && j.contains("config")) {
    if (j["subcommand"] != sub)
      throw ConfigError("--config: manifest is for '" + j["subcommand"].get<std::string>() + "', not '" + sub + "'");
    return j["config"];
  }
  return j;
}

int execute(const std::string& sub, const Flags& flags) {
  const auto start = std::chrono::steady_clock::now();
  json merged = flags.config.empty() ? json::object() : load_config(flags.config, sub);
  for (const auto& [key, vals] : flags.values) {
    if (vals.empty()) continue;
    const bool is_list =
        key == "beta" || key == "levels" || std::any_of(std::begin(kExtras), std::end(kExtras), [&](const Extra& e) {
          return e.sub == sub && e.key == key && e.list;
        });
    if (is_list) {
      json arr = json::array();
      for (const auto& v : vals) arr.push_back(key == "beta" ? json(v) : parse_value(v));
      assign(merged, key, arr);
    } else {
      assign(merged, key, key == "model.law" ? json(vals.back()) : parse_value(vals.back()));
    }
  }
  for (const auto& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + s + "'");
    assign(merged, s.substr(0, eq), parse_value(s.substr(eq + 1)));
  }
  if (flags.seed) assign(merged, "mc.master_seed", *flags.seed);
  if (!flags.out.empty()) merged["output_dir"] = flags.out;

  Context ctx;
  ctx.name = sub;
  ctx.cfg = parse_run_config(merged);
  ctx.threads = flags.threads ? *flags.threads : ctx.cfg.threads.value_or(default_thread_count());
  if (ctx.threads == 0) throw ConfigError("--threads: must be at least 1");
  ctx.out = ctx.cfg.output_dir.value_or(".");
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) throw ConfigError("output_dir: cannot create '" + ctx.out.string() + "': " + ec.message());

  const int code = commands().at(sub)(ctx);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest{{"chaoslab_version", CHAOSLAB_VERSION},
                {"subcommand", sub},
                {"config", merged},
                {"seed", ctx.cfg.seed ? json(*ctx.cfg.seed) : json(nullptr)},
                {"threads", ctx.threads},
                {"wall_time_s", wall},
                {"exit_code", code},
                {"outputs", ctx.outputs}};
  std::ofstream(ctx.out / "manifest.json") << manifest.dump(2) << '\n';
  return code;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Non-Gaussian log-correlated fields, their exponential chaos, and numerical checks of its properties.",
               "chaoslab"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", CHAOSLAB_VERSION);
  Flags flags;
  for (const auto& [name, help] : command_help()) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", flags.config, "JSON run config or a manifest.json to rerun");
    s->add_option("--out", flags.out, "output directory");
    s->add_option("--seed", flags.seed, "master seed");
    s->add_option("--threads", flags.threads, "worker threads (default: CHAOSLAB_THREADS or all cores)");
    s->add_option("--set", flags.sets, "override any config key, e.g. --set quadrature.g=11");
    s->add_option("--beta", flags.values["beta"], "inverse temperature(s), e.g. 1+0.4i");
    s->add_option("--levels", flags.values["levels"], "truncation levels");
    s->add_option("--g", flags.values["quadrature.g"], "log2 of the grid size");
    s->add_option("--oversample", flags.values["quadrature.oversample"], "grid points per period of the top frequency");
    s->add_option("--replicas", flags.values["mc.replicas"], "Monte Carlo replicas");
    s->add_option("--alpha", flags.values["events.alpha"], "exceedance parameter or auto");
    s->add_option("--p", flags.values["events.p"], "moment exponent");
    s->add_option("--law", flags.values["model.law"], "coefficient law of the Fourier model");
    for (const auto& e : kExtras)
      if (name == e.sub) s->add_option(e.flag, flags.values[e.key], e.help);
  }

  if (argc > 1 && argv[1][0] != '-' && !command_help().count(argv[1])) {
    std::cerr << "chaoslab: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << CHAOSLAB_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "chaoslab: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return execute(sub, flags);
  } catch (const ConfigError& e) {
    std::cerr << "chaoslab " << sub << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "chaoslab " << sub << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "chaoslab " << sub << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const ResolutionError& e) {
    std::cerr << "chaoslab " << sub << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "chaoslab " << sub << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "chaoslab " << sub << ": error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace chaoslab::cli
