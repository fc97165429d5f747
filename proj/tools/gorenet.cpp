#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "gorenet/corpus.hpp"
#include "gorenet/error.hpp"
#include "gorenet/export.hpp"
#include "gorenet/service.hpp"

namespace fs = std::filesystem;
using namespace gorenet;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kEnvironment = 2;

struct Exit {
  int code;
};

// A relative path that does not exist is looked up in the corpus directory.
fs::path locate(const std::string& path) {
  fs::path p(path);
  if (p.is_relative() && !fs::exists(p)) {
    fs::path in_corpus = corpus_dir() / p;
    if (fs::exists(in_corpus)) return in_corpus;
    in_corpus = corpus_dir() / p.filename();
    if (fs::exists(in_corpus)) return in_corpus;
  }
  return p;
}

SourceDocument read_or_exit(const std::string& path) {
  try {
    return read_document(locate(path));
  } catch (const Error& e) {
    std::cerr << "gorenet: " << e.what() << "\n";
    throw Exit{kEnvironment};
  }
}

TwoLayerModel model_or_exit(const std::string& path) {
  SourceDocument doc = read_or_exit(path);
  ParseResult parsed = parse(doc);
  for (const auto& d : parsed.diagnostics) std::cerr << format_diagnostic(d, doc.origin) << "\n";
  if (!parsed.ok()) throw Exit{kDomain};
  return std::move(*parsed.model);
}

std::string element_id(const GoalModel& g, const std::string& key) {
  if (g.find_element(key) != nullptr) return key;
  if (const Element* e = g.find_element_by_name(key)) return e->id;
  std::cerr << "gorenet: no element '" << key << "'\n";
  throw Exit{kDomain};
}

std::string name_of(const GoalModel& g, const std::string& id) {
  const Element* e = g.find_element(id);
  return e != nullptr ? e->name : id;
}

std::string given_text(const std::vector<QualLabel>& given) {
  std::string out = "{";
  for (std::size_t i = 0; i < given.size(); ++i) out += (i ? ", " : "") + std::string(to_string(given[i]));
  return out + "}";
}

int cmd_validate(const std::string& path, bool json) {
  SourceDocument doc = read_or_exit(path);
  ParseResult parsed = parse(doc);
  if (json) {
    std::cout << Json{{"valid", parsed.ok()}, {"diagnostics", diagnostics_to_json(parsed.diagnostics, doc.origin)}}.dump(2)
              << "\n";
  } else {
    for (const auto& d : parsed.diagnostics) std::cout << format_diagnostic(d, doc.origin) << "\n";
    if (parsed.ok()) std::cout << doc.origin << ": ok\n";
  }
  return parsed.ok() ? kOk : kDomain;
}

FiringScript split_steps(const std::string& text) {
  FiringScript out;
  std::stringstream in(text);
  for (std::string step; std::getline(in, step, ',');) {
    step.erase(0, step.find_first_not_of(" \t"));
    step.erase(step.find_last_not_of(" \t") + 1);
    if (!step.empty()) out.push_back(step);
  }
  return out;
}

int cmd_simulate(const std::string& path, const std::vector<std::string>& scripts, std::size_t rounds, bool json) {
  TwoLayerModel m = model_or_exit(path);
  if (!m.net) {
    std::cerr << "gorenet: the model has no Petri net layer\n";
    return kDomain;
  }
  HybridOptions options;
  options.rounds = rounds;
  options.round_transition = m.round_transition;
  for (const auto& s : scripts.empty() ? m.default_run : scripts) {
    if (const NamedScript* named = m.find_script(s)) {
      options.scripts.push_back(named->steps);
    } else {
      options.scripts.push_back(split_steps(s));
    }
  }
  if (options.scripts.empty()) {
    std::cerr << "gorenet: no --script given and the model has no run plan\n";
    return kDomain;
  }
  HybridTrace trace;
  try {
    trace = hybrid_simulate(m.goals, *m.net, m.binding, m.initial_marking, options);
  } catch (const Error& e) {
    std::cerr << "gorenet: " << e.what() << "\n";
    return kDomain;
  }
  if (json) {
    std::cout << trace_to_json(trace, m).dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < trace.markings.size(); ++i) {
      std::cout << "M" << i << " = " << format_marking(trace.markings[i]);
      if (i > 0) std::cout << "  (" << trace.fired[i - 1] << ")";
      std::cout << "\n";
    }
    for (const auto& [id, t] : trace.tallies) {
      const std::string name = name_of(m.goals, id);
      if (t.help > 0) std::cout << name << ": +" << t.help << "\n";
      if (t.hurt > 0) std::cout << name << ": -" << t.hurt << "\n";
      if (t.help == 0 && t.hurt == 0) std::cout << name << ": 0\n";
    }
  }
  if (trace.error) {
    std::cerr << "gorenet: step " << trace.error->step << " (" << trace.error->transition
              << "): " << trace.error->message << "\n";
    return kDomain;
  }
  return kOk;
}

std::optional<QualLabel> prompt(const JudgmentPoint& p, const GoalModel& g) {
  for (;;) {
    std::cerr << "Judgment needed: \"" << name_of(g, p.element) << "\" receives " << given_text(p.given)
              << " in scenario " << p.scenario << ".\nLabel [S, PS, C, U, PD, D]: " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) return std::nullopt;
    line.erase(0, line.find_first_not_of(" \t"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) { return std::toupper(c); });
    if (auto l = parse_label(line)) return l;
    std::cerr << "not a label: " << line << "\n";
  }
}

int cmd_evaluate(const std::string& path, const std::string& scenario_name, const std::string& judgments_path,
                 bool interactive, const std::string& session_file, bool json) {
  TwoLayerModel m = model_or_exit(path);
  const Scenario* scenario = m.find_scenario(scenario_name);
  if (scenario == nullptr) {
    std::cerr << "gorenet: no scenario '" << scenario_name << "'\n";
    return kDomain;
  }
  JudgmentTable table = m.judgments;
  auto load = [&](const fs::path& p) {
    SourceDocument doc = read_or_exit(p.string());
    auto parsed = parse_judgments(doc, m.goals);
    for (const auto& d : parsed.diagnostics) std::cerr << format_diagnostic(d, doc.origin) << "\n";
    if (!parsed.table) throw Exit{kDomain};
    table.merge(*parsed.table);
  };
  if (!judgments_path.empty()) load(judgments_path);
  if (interactive && fs::exists(session_file)) load(session_file);

  std::vector<Judgment> answered;
  JudgmentResolver resolver = [&](const JudgmentPoint& p) {
    auto l = prompt(p, m.goals);
    if (l) answered.push_back({p.element, p.given, "", *l, Provenance::interactive});
    return l;
  };
  EvaluationOptions options;
  if (interactive) options.resolver = &resolver;

  EvaluationResult result;
  try {
    result = propagate_forward(m.goals, *scenario, m.baseline, table, options);
  } catch (const Error& e) {
    std::cerr << "gorenet: " << e.what() << "\n";
    return kDomain;
  }
  if (!answered.empty()) {
    std::ofstream out(session_file, std::ios::app);
    if (!out) {
      std::cerr << "gorenet: cannot write " << session_file << "\n";
      return kEnvironment;
    }
    for (const auto& j : answered) out << format_judgment(j, m.goals) << "\n";
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  if (json) {
    std::cout << evaluation_to_json(result, m.goals).dump(2) << "\n";
  } else {
    for (const auto& e : m.goals.elements) {
      auto l = result.label(e.id);
      std::cout << e.name << ": " << (l ? std::string(to_string(*l)) : "unlabeled") << "\n";
    }
  }
  if (!result.pending.empty()) {
    std::cerr << "unresolved judgments:\n";
    for (const auto& p : result.pending) {
      std::cerr << "  \"" << name_of(m.goals, p.element) << "\" given " << given_text(p.given) << "\n";
    }
    return kDomain;
  }
  return kOk;
}

int cmd_backward(const std::string& path, const std::string& target, const std::string& label_text,
                 const std::string& judgments_path, bool json) {
  TwoLayerModel m = model_or_exit(path);
  auto desired = parse_label(label_text);
  if (!desired) {
    std::cerr << "gorenet: unknown label '" << label_text << "'\n";
    throw Exit{kEnvironment};
  }
  const std::string id = element_id(m.goals, target);
  JudgmentTable table = m.judgments;
  if (!judgments_path.empty()) {
    SourceDocument doc = read_or_exit(judgments_path);
    auto parsed = parse_judgments(doc, m.goals);
    for (const auto& d : parsed.diagnostics) std::cerr << format_diagnostic(d, doc.origin) << "\n";
    if (!parsed.table) return kDomain;
    table.merge(*parsed.table);
  }
  BackwardResult result;
  try {
    result = backward_search(m.goals, m.baseline, id, *desired, table);
  } catch (const Error& e) {
    std::cerr << "gorenet: " << e.what() << "\n";
    return kDomain;
  }
  if (json) {
    std::cout << backward_to_json(result, m.goals, id, *desired).dump(2) << "\n";
    return kOk;
  }
  std::cout << result.solutions.size() << " assignment(s) give " << name_of(m.goals, id) << " = "
            << to_string(*desired) << "\n";
  for (const auto& s : result.solutions) {
    std::string line;
    for (const auto& [e, l] : s.labels) line += (line.empty() ? "" : ", ") + name_of(m.goals, e) + "=" + std::string(to_string(l));
    std::cout << "  " << line << "\n";
  }
  if (!result.skipped.empty()) {
    std::cout << result.skipped.size() << " assignment(s) need judgments before the target is labelled\n";
  }
  return kOk;
}

int cmd_export(const std::string& path, const std::string& format, const std::string& layer_text) {
  TwoLayerModel m = model_or_exit(path);
  if (format == "json") {
    std::cout << export_json(m) << "\n";
    return kOk;
  }
  auto layer = parse_dot_layer(layer_text);
  if (!layer) {
    std::cerr << "gorenet: unknown layer '" << layer_text << "'\n";
    return kEnvironment;
  }
  try {
    std::cout << export_dot(m, *layer);
  } catch (const Error& e) {
    std::cerr << "gorenet: " << e.what() << "\n";
    return kDomain;
  }
  return kOk;
}

int cmd_serve(const std::string& host, int port) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (sig != 0) stop_serving();
  });
  Service service;
  const bool ok = serve(service, host, port, [](int bound) { std::cout << "listening on port " << bound << std::endl; });
  if (!ok) {
    spdlog::error("cannot listen on {}:{}", host, port);
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kEnvironment;
  }
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gorenet: goal models layered with Petri nets"};
  app.require_subcommand(1);
  std::string model;
  bool json = false;

  auto* validate = app.add_subcommand("validate", "Parse and check a model");
  validate->add_option("model", model, "Model file")->required();
  validate->add_flag("--json", json);

  std::vector<std::string> scripts;
  std::size_t rounds = 1;
  auto* simulate = app.add_subcommand("simulate", "Play the token game and tally softgoal contributions");
  simulate->add_option("model", model, "Model file")->required();
  simulate->add_option("--script", scripts, "Script name or comma-separated transitions; one per round")
      ->take_all();
  simulate->add_option("--rounds", rounds, "Rounds of the feedback loop");
  simulate->add_flag("--json", json);

  std::string scenario, judgments, session_file = "gorenet-session.gnet";
  bool interactive = false;
  auto* evaluate = app.add_subcommand("evaluate", "Forward label propagation for one scenario");
  evaluate->add_option("model", model, "Model file")->required();
  evaluate->add_option("--scenario", scenario)->required();
  evaluate->add_option("--judgments", judgments, "Judgment file");
  evaluate->add_flag("--interactive", interactive, "Ask for missing judgments");
  evaluate->add_option("--session-file", session_file, "Where interactive answers are appended");
  evaluate->add_flag("--json", json);

  std::string target, label;
  auto* backward = app.add_subcommand("backward", "Decision assignments that give a target label");
  backward->add_option("model", model, "Model file")->required();
  backward->add_option("--target", target)->required();
  backward->add_option("--label", label)->required();
  backward->add_option("--judgments", judgments, "Judgment file");
  backward->add_flag("--json", json);

  std::string format = "json", layer = "hybrid";
  auto* exporter = app.add_subcommand("export", "Write the model as JSON or DOT");
  exporter->add_option("model", model, "Model file")->required();
  exporter->add_option("--format", format)->check(CLI::IsMember({"json", "dot"}));
  exporter->add_option("--layer", layer)->check(CLI::IsMember({"goal", "net", "hybrid"}));

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* server = app.add_subcommand("serve", "Run the HTTP service");
  server->add_option("--port", port);
  server->add_option("--host", host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kEnvironment;
  }

  try {
    if (*validate) return cmd_validate(model, json);
    if (*simulate) return cmd_simulate(model, scripts, rounds, json);
    if (*evaluate) return cmd_evaluate(model, scenario, judgments, interactive, session_file, json);
    if (*backward) return cmd_backward(model, target, label, judgments, json);
    if (*exporter) return cmd_export(model, format, layer);
    if (*server) return cmd_serve(host, port);
  } catch (const Exit& e) {
    return e.code;
  } catch (const Error& e) {
    std::cerr << "gorenet: " << e.what() << "\n";
    return kDomain;
  }
  return kEnvironment;
}
