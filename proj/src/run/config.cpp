#include "tleague/run/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace tleague::run {

namespace {

std::string Trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Ctx {
  const std::string& file;
  int line = 0;

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError(file, line, what);
  }

  double Double(const std::string& v) const {
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) Fail("trailing characters in number '" + v + "'");
      return d;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      Fail("expected a number, got '" + v + "'");
    }
  }

  std::uint64_t U64(const std::string& v) const {
    try {
      std::size_t pos = 0;
      unsigned long long u = std::stoull(v, &pos);
      if (pos != v.size()) Fail("trailing characters in integer '" + v + "'");
      return u;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      Fail("expected an integer, got '" + v + "'");
    }
  }

  std::uint32_t U32(const std::string& v) const {
    std::uint64_t u = U64(v);
    if (u > 0xffffffffull) Fail("integer out of range: '" + v + "'");
    return static_cast<std::uint32_t>(u);
  }

  bool Bool(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    Fail("expected a boolean, got '" + v + "'");
  }

  std::vector<double> Row(const std::string& v) const {
    std::istringstream in(v);
    std::vector<double> row;
    std::string tok;
    while (in >> tok) row.push_back(Double(tok));
    if (row.empty()) Fail("empty payoff row");
    return row;
  }
};

bool ApplyHyperKey(HyperParams& hp, const std::string& key, const std::string& value,
                   const Ctx& ctx) {
  if (key == "learning_rate") hp.learning_rate = ctx.Double(value);
  else if (key == "gamma") hp.gamma = ctx.Double(value);
  else if (key == "lam") hp.lam = ctx.Double(value);
  else if (key == "clip_eps") hp.clip_eps = ctx.Double(value);
  else if (key == "vf_coef") hp.vf_coef = ctx.Double(value);
  else if (key == "ent_coef") hp.ent_coef = ctx.Double(value);
  else if (key == "kl_teacher_coef") hp.kl_teacher_coef = ctx.Double(value);
  else if (key == "rho_bar") hp.rho_bar = ctx.Double(value);
  else if (key == "c_bar") hp.c_bar = ctx.Double(value);
  else if (key == "elo_sigma") hp.elo_sigma = ctx.Double(value);
  else if (key == "elo_k") hp.elo_k = ctx.Double(value);
  else if (key == "batch_size") hp.batch_size = ctx.U32(value);
  else if (key == "unroll_len") hp.unroll_len = ctx.U32(value);
  else if (key == "max_reuse") hp.max_reuse = ctx.U32(value);
  else if (key == "adv_norm") hp.adv_norm = ctx.Bool(value);
  else return false;
  return true;
}

bool ApplySchemeKey(league::SamplingScheme& s, const std::string& key,
                    const std::string& value, const Ctx& ctx) {
  if (key == "scheme") {
    try {
      s.kind = league::ParseSchemeKind(value);
    } catch (const std::exception& e) {
      ctx.Fail(e.what());
    }
  } else if (key == "recent_k") {
    s.recent_k = ctx.U32(value);
  } else if (key == "pfsp_exponent") {
    s.pfsp_exponent = ctx.Double(value);
  } else if (key == "mixture_self_play_weight") {
    s.mixture_self_play_weight = ctx.Double(value);
  } else if (key == "elo_matching_sigma") {
    s.elo_matching_sigma = ctx.Double(value);
  } else {
    return false;
  }
  return true;
}

bool ApplyGroupKey(league::LearnerGroupConfig& g, const std::string& key,
                   const std::string& value, const Ctx& ctx) {
  if (ApplyHyperKey(g.hyper, key, value, ctx)) return true;
  if (ApplySchemeKey(g.scheme, key, value, ctx)) return true;
  if (key == "lineage") g.lineage = value;
  else if (key == "n_opponents") g.n_opponents = ctx.U32(value);
  else if (key == "perturb_hyper") g.perturb_hyper = ctx.Bool(value);
  else if (key == "opponent_group") g.opponent_group = ctx.U32(value);
  else if (key == "init_scale") g.init_scale = ctx.Double(value);
  else if (key == "family") {
    if (value == "tabular") g.family = PolicyFamily::kTabularSoftmax;
    else if (value == "linear") g.family = PolicyFamily::kLinearSoftmax;
    else ctx.Fail("unknown policy family '" + value + "'");
  } else {
    return false;
  }
  return true;
}

}  // namespace

RunConfig ParseRunConfigText(const std::string& text, const std::string& file_name) {
  RunConfig cfg;
  league::LearnerGroupConfig group_defaults;
  Ctx ctx{file_name};

  std::istringstream in(text);
  std::string raw;
  int current_group = -1;  // -1: top-level
  bool seen_section = false;

  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') ctx.Fail("unterminated section header");
      std::istringstream hdr(line.substr(1, line.size() - 2));
      std::string word;
      hdr >> word;
      if (word != "group") ctx.Fail("unknown section '" + line + "'");
      std::string idx;
      if (!(hdr >> idx)) ctx.Fail("section needs a group index");
      std::uint32_t g = ctx.U32(idx);
      if (g >= cfg.n_groups) {
        ctx.Fail("group index " + idx + " out of range (groups: " +
                 std::to_string(cfg.n_groups) + ")");
      }
      if (!seen_section) {
        // Freeze the top-level defaults into every group before overrides.
        cfg.groups.assign(cfg.n_groups, group_defaults);
        seen_section = true;
      }
      current_group = static_cast<int>(g);
      continue;
    }

    auto colon = line.find(':');
    if (colon == std::string::npos) ctx.Fail("expected 'key: value'");
    std::string key = Trim(line.substr(0, colon));
    std::string value = Trim(line.substr(colon + 1));
    if (key.empty()) ctx.Fail("empty key");
    if (value.empty()) ctx.Fail("missing value for '" + key + "'");

    if (current_group >= 0) {
      if (!ApplyGroupKey(cfg.groups[static_cast<std::size_t>(current_group)], key,
                         value, ctx)) {
        ctx.Fail("unknown group key '" + key + "'");
      }
      continue;
    }
    if (seen_section) ctx.Fail("top-level key '" + key + "' after a section");

    if (ApplyGroupKey(group_defaults, key, value, ctx)) continue;

    if (key == "env") cfg.env.env_name = value;
    else if (key == "horizon") cfg.env.horizon = ctx.U32(value);
    else if (key == "payoff_row") {
      if (!cfg.env.payoff_table) cfg.env.payoff_table.emplace();
      cfg.env.payoff_table->push_back(ctx.Row(value));
    } else if (key == "payoff_row_b") {
      if (!cfg.env.payoff_table_b) cfg.env.payoff_table_b.emplace();
      cfg.env.payoff_table_b->push_back(ctx.Row(value));
    } else if (key == "mode") {
      if (value == "lockstep") cfg.mode = RunMode::kLockstep;
      else if (value == "threads") cfg.mode = RunMode::kThreads;
      else if (value == "process") cfg.mode = RunMode::kProcess;
      else ctx.Fail("unknown mode '" + value + "'");
    } else if (key == "algo") {
      try {
        cfg.algo = learner::ParseAlgo(value);
      } catch (const std::exception& e) {
        ctx.Fail(e.what());
      }
    } else if (key == "groups") cfg.n_groups = ctx.U32(value);
    else if (key == "shards") cfg.shards = ctx.U32(value);
    else if (key == "actors") cfg.actors = ctx.U32(value);
    else if (key == "pool_replicas") cfg.pool_replicas = ctx.U32(value);
    else if (key == "inf_servers") cfg.inf_servers = ctx.U32(value);
    else if (key == "seed") cfg.seed = ctx.U64(value);
    else if (key == "periods") cfg.periods = ctx.U32(value);
    else if (key == "period_steps") cfg.period_steps = ctx.U32(value);
    else if (key == "publish_interval") cfg.publish_interval = ctx.U32(value);
    else if (key == "param_refresh_interval") cfg.param_refresh_interval = ctx.U32(value);
    else if (key == "replay_capacity") cfg.replay_capacity = ctx.U64(value);
    else if (key == "base_port") cfg.base_port = static_cast<std::uint16_t>(ctx.U32(value));
    else ctx.Fail("unknown key '" + key + "'");
  }

  ctx.line = 0;  // post-parse validation has no single line
  if (cfg.env.env_name.empty()) throw ConfigError(file_name, 1, "missing 'env:'");
  if (cfg.n_groups == 0 || cfg.shards == 0 || cfg.actors == 0 || cfg.pool_replicas == 0) {
    throw ConfigError(file_name, 1, "groups/shards/actors/pool_replicas must be >= 1");
  }
  if (!seen_section) cfg.groups.assign(cfg.n_groups, group_defaults);

  cfg.env.seed = cfg.seed;
  cfg.family = cfg.groups.front().family;
  cfg.init_scale = cfg.groups.front().init_scale;
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
    auto& grp = cfg.groups[g];
    if (grp.opponent_group && *grp.opponent_group >= cfg.n_groups) {
      throw ConfigError(file_name, 1,
                        "opponent_group out of range in group " + std::to_string(g));
    }
    if (grp.lineage == "main" && g > 0) grp.lineage = "g" + std::to_string(g);
    try {
      grp.hyper.Validate();
    } catch (const std::exception& e) {
      throw ConfigError(file_name, 1,
                        "group " + std::to_string(g) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseRunConfigText(buf.str(), path);
}

}  // namespace tleague::run
