// persona: command-line front end for the personality-driven dialogue agent.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "persona/analysis.hpp"
#include "persona/errors.hpp"
#include "persona/runtime.hpp"
#include "persona/service.hpp"

using namespace persona;

namespace {

PersonalityVector parse_personality_arg(const std::string& s) {
  std::vector<double> w;
  std::stringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::logic_error&) {
      throw ConfigError("--personality expects wc,we,wa numbers, got '" + s + "'");
    }
  }
  if (w.size() != 3) throw ConfigError("--personality expects three values wc,we,wa");
  return make_personality(w[0], w[1], w[2]);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string describe_turn(const RobotTurn& t) {
  std::ostringstream out;
  out << (t.proactive ? "[proactive " : "[") << to_string(t.action.kind) << ", " << to_string(t.robot_emotion)
      << "] " << t.text << "   (f_c=" << t.comfort.fc() << " f_e=" << t.comfort.fe() << " f_a=" << t.comfort.fa()
      << ")";
  return out.str();
}

int cmd_simulate(const std::vector<std::string>& configs, const std::string& script, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  for (const auto& path : configs) {
    SessionConfig cfg = SessionConfig::load(path);
    if (seed) cfg.seed = *seed;
    std::cout << run_scripted(cfg, script, out_dir).string() << '\n';
  }
  return 0;
}

int cmd_chat(const std::string& config_path) {
  SessionConfig cfg = config_path.empty() ? SessionConfig{} : SessionConfig::load(config_path);
  Session session = start_session(cfg, nullptr);
  const auto start = std::chrono::steady_clock::now();
  auto now = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  };
  std::cout << "Robot personality: " << personality_description(cfg.personality) << "\n"
            << "Commands: :face <emotion>, :gaze mutual|averted, :quit\n";
  std::optional<Emotion> face;
  std::optional<bool> mutual;
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    const TimestampMs t = now();
    // Catch up on silence before the user spoke.
    for (TimestampMs tick = kTickMs; tick < t; tick += kTickMs)
      if (auto turn = session.proactive_tick(tick)) std::cout << describe_turn(*turn) << '\n';
    if (line == ":quit" || line == ":q") break;
    if (line.rfind(":face ", 0) == 0) {
      face = parse_emotion(line.substr(6));
      if (!face) std::cout << "unknown emotion\n";
      continue;
    }
    if (line.rfind(":gaze ", 0) == 0) {
      mutual = line.substr(6) == "mutual";
      continue;
    }
    if (face) session.perception().push_face({t, *face});
    if (mutual) session.perception().push_gaze({t, *mutual});
    std::cout << describe_turn(session.step(line, session.perception().snapshot(t))) << '\n';
  }
  return 0;
}

int cmd_serve(int port, const std::string& config_path, const std::string& address) {
  SessionConfig base = config_path.empty() ? SessionConfig{} : SessionConfig::load(config_path);
  SessionService service(base);
  Server server(service, static_cast<unsigned short>(port), address);
  std::cout << "listening on http://" << address << ':' << server.port() << std::endl;
  server.run();
  return 0;
}

int cmd_plan(const std::string& domain_path, const std::string& personality, int horizon, std::uint64_t seed,
             const std::vector<double>& fluents, const std::string& facts_path) {
  const DomainSpec domain = load_domain(domain_path);
  const PersonalityVector p = parse_personality_arg(personality);
  const Dynamics dyn;
  FactSet facts = facts_path.empty() ? FactSet{} : SemanticMemory::load(facts_path).facts();
  WorldState s = initial_world(dyn, std::move(facts));
  if (!fluents.empty()) {
    if (fluents.size() != 3) throw ConfigError("--fluents expects f_c,f_e,f_a");
    s.comfort = ComfortabilityState(fluents[0], fluents[1], fluents[2], dyn.theta);
  }
  const Plan pl = plan(domain, s, p, horizon, seed);
  std::cout << "step,action,reward,f_c,f_e,f_a\n";
  char buf[160];
  for (std::size_t i = 0; i < pl.steps.size(); ++i) {
    const auto& st = pl.steps[i];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.6f,%.4f,%.4f,%.4f\n", i + 1,
                  std::string(to_string(st.action.kind)).c_str(), st.reward, st.predicted_comfort.fc(),
                  st.predicted_comfort.fe(), st.predicted_comfort.fa());
    std::cout << buf;
  }
  std::snprintf(buf, sizeof buf, "total,,%.6f,,,\n", pl.total_reward);
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personality-driven social dialogue agent"};
  app.require_subcommand(1);

  std::vector<std::string> sim_configs;
  std::string sim_script, sim_out;
  std::optional<std::uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "Run scripted sessions and write telemetry");
  sim->add_option("--config", sim_configs, "Session config file (repeatable)")->required();
  sim->add_option("--script", sim_script, "Scripted percept file")->required();
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--seed", sim_seed, "Override the config seed");

  std::string chat_config;
  auto* chat = app.add_subcommand("chat", "Terminal conversation");
  chat->add_option("--config", chat_config, "Session config file");

  int port = 8080;
  std::string serve_config, address = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "HTTP + WebSocket session service");
  serve->add_option("--port", port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--config", serve_config, "Base config for data files and defaults");
  serve->add_option("--address", address, "Bind address");

  std::string plan_domain, plan_personality, plan_facts;
  int plan_horizon = 3;
  std::uint64_t plan_seed = 0;
  std::vector<double> plan_fluents;
  auto* pl = app.add_subcommand("plan", "Plan over a domain file");
  pl->add_option("--domain", plan_domain, "Domain file")->required();
  pl->add_option("--personality", plan_personality, "wc,we,wa")->required();
  pl->add_option("--horizon", plan_horizon, "Plan length")->required();
  pl->add_option("--seed", plan_seed, "Seed");
  pl->add_option("--fluents", plan_fluents, "Initial f_c,f_e,f_a")->delimiter(',');
  pl->add_option("--facts", plan_facts, "Initial facts file");

  auto* analyze = app.add_subcommand("analyze", "Statistics over telemetry");
  analyze->require_subcommand(1);
  std::string occ_in, occ_out;
  auto* occ = analyze->add_subcommand("occurrences", "Per-pole robot emotion occurrence matrix");
  occ->add_option("--in", occ_in, "Directory of telemetry files")->required();
  occ->add_option("--out", occ_out, "CSV output (default stdout)");
  std::string cmp_axis, cmp_emotion = "all", cmp_in = ".", cmp_out;
  auto* cmp = analyze->add_subcommand("compare", "Mann-Whitney U between the poles of an axis");
  cmp->add_option("--axis", cmp_axis, "C, E or A")->required();
  cmp->add_option("--emotion", cmp_emotion, "Emotion name, or all");
  cmp->add_option("--in", cmp_in, "Directory of telemetry files");
  cmp->add_option("--out", cmp_out, "CSV output (default stdout)");
  std::string alpha_in;
  auto* alpha = analyze->add_subcommand("alpha", "Cronbach's alpha of an item matrix");
  alpha->add_option("--in", alpha_in, "CSV, one respondent per row")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(sim_configs, sim_script, sim_out, sim_seed);
    if (*chat) return cmd_chat(chat_config);
    if (*serve) return cmd_serve(port, serve_config, address);
    if (*pl) return cmd_plan(plan_domain, plan_personality, plan_horizon, plan_seed, plan_fluents, plan_facts);
    if (*occ) {
      const auto m = emotion_occurrences(telemetry_files(occ_in));
      write_text(occ_out, m.to_csv());
      return 0;
    }
    if (*cmp) {
      auto axis = parse_axis(cmp_axis);
      if (!axis) throw ConfigError("unknown axis '" + cmp_axis + "'");
      std::vector<Emotion> emotions;
      if (cmp_emotion == "all") {
        emotions.assign(kAllEmotions.begin(), kAllEmotions.end());
      } else {
        auto e = parse_emotion(cmp_emotion);
        if (!e) throw ConfigError("unknown emotion '" + cmp_emotion + "'");
        emotions.push_back(*e);
      }
      const auto m = emotion_occurrences(telemetry_files(cmp_in));
      std::vector<PoleComparison> rows;
      for (Emotion e : emotions) rows.push_back(compare_poles(m, *axis, e));
      write_text(cmp_out, comparison_csv(rows));
      return 0;
    }
    if (*alpha) {
      const auto items = read_items_csv(alpha_in);
      char buf[128];
      std::snprintf(buf, sizeof buf, "alpha,items,respondents\n%.6f,%zu,%zu\n", cronbach_alpha(items),
                    items.empty() ? std::size_t{0} : items.front().size(), items.size());
      std::cout << buf;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
