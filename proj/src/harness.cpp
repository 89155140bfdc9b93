#include "erl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "erl/errors.hpp"

namespace erl {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reads typed values out of a JSON object, remembering which keys were
// consumed so leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_unsigned()) throw ConfigError(name(key), "expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ConfigError(name(key), "expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError(name(key), "expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ConfigError(name(key), "expected a string");
      }
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name(key), e.what());
    }
  }

  template <typename Enum, typename Parse>
  void get_enum(const char* key, Enum& out, Parse parse) {
    std::string s;
    bool present = obj_.contains(key);
    get(key, s);
    if (present) out = parse(s, name(key));
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(name(it.key()), "unknown key");
    }
  }

  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

SelectionMode parse_selection(const std::string& s, const std::string& key) {
  if (s == "tournament") return SelectionMode::tournament;
  if (s == "random_ns") return SelectionMode::random_ns;
  throw ConfigError(key, "expected 'tournament' or 'random_ns'");
}

MutationMode parse_mutation_mode(const std::string& s, const std::string& key) {
  if (s == "proportional_additive") return MutationMode::proportional_additive;
  if (s == "literal_multiplicative") return MutationMode::literal_multiplicative;
  throw ConfigError(key, "expected 'proportional_additive' or 'literal_multiplicative'");
}

ClipMode parse_clip(const std::string& s, const std::string& key) {
  if (s == "norm") return ClipMode::norm;
  if (s == "value") return ClipMode::value;
  throw ConfigError(key, "expected 'norm' or 'value'");
}

UpdateMode parse_update(const std::string& s, const std::string& key) {
  if (s == "per_step") return UpdateMode::per_step;
  if (s == "literal") return UpdateMode::literal;
  throw ConfigError(key, "expected 'per_step' or 'literal'");
}

json config_json(const ErlConfig& c) {
  json j;
  j["env"] = c.env;
  j["k"] = c.k;
  j["psi"] = c.psi;
  j["xi"] = c.xi;
  j["omega"] = c.omega;
  j["sync"] = c.sync;
  j["mutation"] = {
      {"mut_prob", c.mutation.mut_prob},
      {"mut_frac", c.mutation.mut_frac},
      {"mut_strength", c.mutation.mut_strength},
      {"supermut_prob", c.mutation.supermut_prob},
      {"reset_prob", c.mutation.reset_prob},
      {"mode", std::string(to_string(c.mutation.mode))},
      {"weight_limit", c.mutation.weight_limit},
  };
  j["selection_mode"] = std::string(to_string(c.selection_mode));
  j["tournament_size"] = c.tournament_size;
  j["gamma"] = c.gamma;
  j["tau"] = c.tau;
  j["batch_size"] = c.batch_size;
  j["buffer_capacity"] = c.buffer_capacity;
  j["actor_lr"] = c.actor_lr;
  j["critic_lr"] = c.critic_lr;
  j["clip_norm"] = c.clip_norm;
  j["clip_mode"] = std::string(to_string(c.clip_mode));
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["update_ratio"] = c.update_ratio;
  j["update_mode"] = std::string(to_string(c.update_mode));
  j["ou"] = {{"mu", c.ou_mu}, {"theta", c.ou_theta}, {"sigma", c.ou_sigma}};
  j["actor_hidden"] = c.actor_hidden;
  j["critic_state_width"] = c.critic_state_width;
  j["critic_action_width"] = c.critic_action_width;
  j["critic_hidden"] = c.critic_hidden;
  j["layer_norm"] = c.layer_norm;
  j["champion_episodes"] = c.champion_episodes;
  j["solve_threshold"] = c.solve_threshold;
  j["step_budget"] = c.step_budget;
  j["stop_on_solve"] = c.stop_on_solve;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

ErlConfig config_from(const json& j) {
  ErlConfig c;
  Reader r(j, "");
  r.get("env", c.env);
  r.get("k", c.k);
  r.get("psi", c.psi);
  r.get("xi", c.xi);
  r.get("omega", c.omega);
  r.get("sync", c.sync);
  if (const json* m = r.child("mutation")) {
    Reader mr(*m, "mutation");
    mr.get("mut_prob", c.mutation.mut_prob);
    mr.get("mut_frac", c.mutation.mut_frac);
    mr.get("mut_strength", c.mutation.mut_strength);
    mr.get("supermut_prob", c.mutation.supermut_prob);
    mr.get("reset_prob", c.mutation.reset_prob);
    mr.get_enum("mode", c.mutation.mode, parse_mutation_mode);
    mr.get("weight_limit", c.mutation.weight_limit);
    mr.reject_unknown();
  }
  r.get_enum("selection_mode", c.selection_mode, parse_selection);
  r.get("tournament_size", c.tournament_size);
  r.get("gamma", c.gamma);
  r.get("tau", c.tau);
  r.get("batch_size", c.batch_size);
  r.get("buffer_capacity", c.buffer_capacity);
  r.get("actor_lr", c.actor_lr);
  r.get("critic_lr", c.critic_lr);
  r.get("clip_norm", c.clip_norm);
  r.get_enum("clip_mode", c.clip_mode, parse_clip);
  r.get("adam_beta1", c.adam_beta1);
  r.get("adam_beta2", c.adam_beta2);
  r.get("adam_epsilon", c.adam_epsilon);
  r.get("update_ratio", c.update_ratio);
  r.get_enum("update_mode", c.update_mode, parse_update);
  if (const json* o = r.child("ou")) {
    Reader orr(*o, "ou");
    orr.get("mu", c.ou_mu);
    orr.get("theta", c.ou_theta);
    orr.get("sigma", c.ou_sigma);
    orr.reject_unknown();
  }
  r.get("actor_hidden", c.actor_hidden);
  r.get("critic_state_width", c.critic_state_width);
  r.get("critic_action_width", c.critic_action_width);
  r.get("critic_hidden", c.critic_hidden);
  r.get("layer_norm", c.layer_norm);
  r.get("champion_episodes", c.champion_episodes);
  r.get("solve_threshold", c.solve_threshold);
  r.get("step_budget", c.step_budget);
  r.get("stop_on_solve", c.stop_on_solve);
  r.get("seed", c.seed);
  r.get("workers", c.workers);
  r.reject_unknown();
  c.validate();
  return c;
}

json spec_json(const NetworkSpec& s) {
  auto act = [](Activation a) {
    switch (a) {
      case Activation::tanh:
        return "tanh";
      case Activation::elu:
        return "elu";
      case Activation::identity:
        break;
    }
    return "identity";
  };
  json j = {{"input_dim", s.input_dim},          {"hidden_dims", s.hidden_dims},
            {"output_dim", s.output_dim},        {"activation", act(s.activation)},
            {"output_activation", act(s.output_activation)}, {"layer_norm", s.layer_norm}};
  if (s.critic_split) {
    j["critic_split"] = {{"state_dim", s.critic_split->state_dim},
                         {"action_dim", s.critic_split->action_dim},
                         {"state_width", s.critic_split->state_width},
                         {"action_width", s.critic_split->action_width}};
  }
  return j;
}

NetworkSpec spec_from(const json& j) {
  auto act = [](const std::string& s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "elu") return Activation::elu;
    if (s == "identity") return Activation::identity;
    throw InputError("snapshot: unknown activation '" + s + "'");
  };
  NetworkSpec s;
  s.input_dim = j.at("input_dim").get<std::size_t>();
  s.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  s.output_dim = j.at("output_dim").get<std::size_t>();
  s.activation = act(j.at("activation").get<std::string>());
  s.output_activation = act(j.at("output_activation").get<std::string>());
  s.layer_norm = j.at("layer_norm").get<bool>();
  if (j.contains("critic_split")) {
    const auto& c = j.at("critic_split");
    s.critic_split = CriticSplit{c.at("state_dim").get<std::size_t>(), c.at("action_dim").get<std::size_t>(),
                                 c.at("state_width").get<std::size_t>(), c.at("action_width").get<std::size_t>()};
  }
  s.validate();
  return s;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

ErlConfig config_from_json(std::string_view text) {
  const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); });
  if (blank) return config_from(json::object());
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("parse error: ") + e.what());
  }
  return config_from(j);
}

ErlConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file '" + path.string() + "' does not exist");
  return config_from_json(read_file(path));
}

std::string config_to_json(const ErlConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

void save_config(const ErlConfig& cfg, const fs::path& path) { write_file(path, config_to_json(cfg)); }

std::string snapshot_to_json(const std::vector<std::pair<std::string, const Parameters*>>& nets) {
  json j;
  j["format"] = "erl-snapshot/1";
  json networks = json::object();
  for (const auto& [name, p] : nets) {
    networks[name] = {{"spec", spec_json(p->spec())},
                      {"values", std::vector<double>(p->values().begin(), p->values().end())}};
  }
  j["networks"] = std::move(networks);
  return j.dump() + "\n";
}

std::vector<std::pair<std::string, Parameters>> snapshot_from_json(std::string_view text) {
  const json j = parse_json(text, "snapshot");
  if (j.value("format", "") != "erl-snapshot/1") throw InputError("snapshot: unsupported format");
  std::vector<std::pair<std::string, Parameters>> out;
  for (auto it = j.at("networks").begin(); it != j.at("networks").end(); ++it) {
    Parameters p(spec_from(it->at("spec")));
    const auto values = it->at("values").get<std::vector<double>>();
    if (values.size() != p.size()) throw InputError("snapshot: value count does not match spec for '" + it.key() + "'");
    std::copy(values.begin(), values.end(), p.values().begin());
    out.emplace_back(it.key(), std::move(p));
  }
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["config"] = config_json(m.config);
  j["algorithm"] = std::string(to_string(m.algorithm));
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["status"] = m.status;
  if (!m.error.empty()) j["error"] = m.error;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
  const json j = parse_json(text, "manifest");
  RunManifest m;
  try {
    m.config = config_from(j.at("config"));
    m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.value("version", "");
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.status = j.value("status", "");
    m.error = j.value("error", "");
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string format_curve_row(const CurvePoint& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%.17g", p.generation,
                static_cast<unsigned long long>(p.cumulative_steps), p.champion_score, p.best_fitness,
                p.mean_fitness);
  return buf;
}

std::vector<CurvePoint> read_curve(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw InputError("curve file '" + path.string() + "' has an unexpected header");
  }
  std::vector<CurvePoint> curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CurvePoint p;
    unsigned long long steps = 0;
    if (std::sscanf(line.c_str(), "%zu,%llu,%lf,%lf,%lf", &p.generation, &steps, &p.champion_score,
                    &p.best_fitness, &p.mean_fitness) != 5) {
      throw InputError("curve file '" + path.string() + "': malformed row '" + line + "'");
    }
    p.cumulative_steps = steps;
    curve.push_back(p);
  }
  return curve;
}

std::optional<std::uint64_t> steps_to_threshold(const std::vector<CurvePoint>& curve, double threshold) {
  for (const auto& p : curve) {
    if (p.champion_score >= threshold) return p.cumulative_steps;
  }
  return std::nullopt;
}

namespace {

std::string selection_rates_text(const SyncCounts& s) {
  const auto pct = s.percentages();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "syncs=%zu\nelite=%.4f\nselected=%.4f\ndiscarded=%.4f\nelite_count=%zu\nselected_count=%zu\n"
                "discarded_count=%zu\n",
                s.total(), pct[0], pct[1], pct[2], s.counts[0], s.counts[1], s.counts[2]);
  return buf;
}

}  // namespace

RunResult run_experiment(const RunManifest& manifest, const fs::path& out_dir, const ProgressFn& progress) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create run directory '" + out_dir.string() + "': " + ec.message());

  RunResult result;
  result.dir = out_dir;
  result.manifest = manifest;
  result.manifest.started_at = timestamp();
  result.manifest.status = "running";
  write_file(out_dir / "manifest.json", manifest_to_json(result.manifest));

  const fs::path curve_path = out_dir / "curve.csv";
  std::ofstream curve(curve_path, std::ios::binary | std::ios::trunc);
  if (!curve) throw IoError("cannot write '" + curve_path.string() + "'");
  curve << kCurveHeader << '\n';

  try {
    const ErlConfig cfg = configure_arm(manifest.config, manifest.algorithm);
    Trainer trainer(cfg, manifest.seed);
    while (trainer.cumulative_steps() < cfg.step_budget) {
      const GenerationReport r = trainer.run_generation();
      const CurvePoint p{r.generation, r.cumulative_steps, r.champion_score, r.best_fitness, r.mean_fitness};
      result.curve.push_back(p);
      curve << format_curve_row(p) << '\n';
      curve.flush();
      if (progress) progress(r);
      if (cfg.stop_on_solve && r.champion_score >= cfg.solve_threshold) break;
    }
    result.sync = trainer.sync_counts();

    write_file(out_dir / "final_params.json",
               snapshot_to_json({{"champion", &trainer.champion()},
                                 {"rl_actor", &trainer.learner().actor()},
                                 {"rl_critic", &trainer.learner().critic()}}));
    if (manifest.algorithm == Algorithm::erl || manifest.algorithm == Algorithm::erl_ns) {
      write_file(out_dir / "selection_rates.txt", selection_rates_text(result.sync));
    }
    result.manifest.status = "ok";
  } catch (const std::exception& e) {
    result.manifest.status = "error";
    result.manifest.error = e.what();
    result.manifest.finished_at = timestamp();
    write_file(out_dir / "manifest.json", manifest_to_json(result.manifest));
    throw;
  }
  result.manifest.finished_at = timestamp();
  write_file(out_dir / "manifest.json", manifest_to_json(result.manifest));
  return result;
}

RunResult load_run(const fs::path& dir) {
  RunResult r;
  r.dir = dir;
  r.manifest = manifest_from_json(read_file(dir / "manifest.json"));
  r.curve = read_curve(dir / "curve.csv");
  return r;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Comparison compare_runs(const std::vector<fs::path>& dirs) {
  if (dirs.empty()) throw InputError("compare: no run directories given");
  Comparison c;
  std::vector<std::string> order;
  std::map<std::string, std::vector<RunResult>> by_arm;
  for (const auto& d : dirs) {
    RunResult r = load_run(d);
    if (c.env.empty()) {
      c.env = r.manifest.config.env;
      c.threshold = r.manifest.config.solve_threshold;
    } else if (r.manifest.config.env != c.env) {
      throw InputError("compare: run '" + d.string() + "' uses env '" + r.manifest.config.env + "', expected '" +
                       c.env + "'");
    }
    const std::string arm(to_string(r.manifest.algorithm));
    if (!by_arm.count(arm)) order.push_back(arm);
    by_arm[arm].push_back(std::move(r));
  }

  for (const auto& arm : order) {
    ArmSummary s;
    s.arm = arm;
    std::vector<double> steps;
    std::vector<double> finals;
    for (const auto& r : by_arm[arm]) {
      const auto st = steps_to_threshold(r.curve, c.threshold);
      s.steps_to_threshold.push_back(st);
      steps.push_back(st ? static_cast<double>(*st) : std::numeric_limits<double>::infinity());
      if (!r.curve.empty()) finals.push_back(r.curve.back().champion_score);
    }
    s.seeds = by_arm[arm].size();
    const double m = median(steps);
    if (std::isfinite(m)) s.median_steps = m;
    if (!finals.empty()) {
      double sum = 0.0;
      for (double f : finals) sum += f;
      s.final_mean = sum / static_cast<double>(finals.size());
      double sq = 0.0;
      for (double f : finals) sq += (f - s.final_mean) * (f - s.final_mean);
      s.final_stddev = finals.size() > 1 ? std::sqrt(sq / static_cast<double>(finals.size() - 1)) : 0.0;
      s.final_median = median(finals);
    }
    c.arms.push_back(std::move(s));
  }
  return c;
}

std::string format_comparison(const Comparison& c) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "env=%s threshold=%g\n", c.env.c_str(), c.threshold);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-8s %5s %18s %14s %14s %14s\n", "arm", "seeds", "median_steps_to_thr",
                "final_median", "final_mean", "final_std");
  out << buf;
  for (const auto& a : c.arms) {
    const std::string steps = a.median_steps ? std::to_string(static_cast<std::uint64_t>(*a.median_steps)) : "unreached";
    std::snprintf(buf, sizeof buf, "%-8s %5zu %18s %14.3f %14.3f %14.3f\n", a.arm.c_str(), a.seeds, steps.c_str(),
                  a.final_median, a.final_mean, a.final_stddev);
    out << buf;
  }
  return out.str();
}

std::vector<CheckpointStat> aggregate_curves(const std::vector<std::vector<CurvePoint>>& curves,
                                             std::uint64_t interval) {
  if (interval == 0) throw InputError("aggregate_curves: interval must be >= 1");
  std::uint64_t last = 0;
  for (const auto& c : curves) {
    if (!c.empty()) last = std::max(last, c.back().cumulative_steps);
  }
  std::vector<CheckpointStat> stats;
  for (std::uint64_t cp = interval; cp <= last; cp += interval) {
    std::vector<double> vals;
    for (const auto& c : curves) {
      const CurvePoint* latest = nullptr;
      for (const auto& p : c) {
        if (p.cumulative_steps > cp) break;
        latest = &p;
      }
      if (latest) vals.push_back(latest->champion_score);
    }
    if (vals.empty()) continue;
    CheckpointStat s;
    s.steps = cp;
    s.runs = vals.size();
    for (double v : vals) s.mean += v;
    s.mean /= static_cast<double>(vals.size());
    double sq = 0.0;
    for (double v : vals) sq += (v - s.mean) * (v - s.mean);
    s.stddev = vals.size() > 1 ? std::sqrt(sq / static_cast<double>(vals.size() - 1)) : 0.0;
    stats.push_back(s);
  }
  return stats;
}

}  // namespace erl
