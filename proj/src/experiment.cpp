#include "treebandit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <sstream>
#include <variant>

#include "treebandit/errors.hpp"
#include "treebandit/tree_io.hpp"

namespace treebandit {

PolicyKind policy_kind_from(const std::string& name) {
  if (name == "flat") return PolicyKind::Flat;
  if (name == "hcb") return PolicyKind::Hcb;
  if (name == "phcb") return PolicyKind::Phcb;
  if (name == "cb-leaf") return PolicyKind::CbLeaf;
  if (name == "cb-category") return PolicyKind::CbCategory;
  throw ConfigError("unknown policy '" + name + "' (expected flat|hcb|phcb|cb-leaf|cb-category)");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Flat: return "flat";
    case PolicyKind::Hcb: return "hcb";
    case PolicyKind::Phcb: return "phcb";
    case PolicyKind::CbLeaf: return "cb-leaf";
    case PolicyKind::CbCategory: return "cb-category";
  }
  return "?";
}

namespace {

int decision_stages(PolicyKind kind, int tree_depth) {
  switch (kind) {
    case PolicyKind::Flat: return 1;
    case PolicyKind::Hcb: return tree_depth + 1;
    default: return 2;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (budget < 1) throw ConfigError("budget must be >= 1");
  if (q < 0.0) throw ConfigError("q must be >= 0");
  if (p < 0.0 || p > 1.0) throw ConfigError("p must be in [0, 1]");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (policies.empty()) throw ConfigError("at least one policy is required");

  std::set<std::string> names;
  for (const PolicySpec& ps : policies) {
    if (ps.name.empty()) throw ConfigError("policy with empty name");
    if (!names.insert(ps.name).second) throw ConfigError("duplicate policy name '" + ps.name + "'");
  }

  if (world.kind == WorldSpec::Kind::Generate) {
    if (world.num_users < 1 || world.num_items < 1 || world.dimension < 1 || world.num_blobs < 1)
      throw ConfigError("world counts must be >= 1");
    if (world.num_blobs > world.num_items) throw ConfigError("more blobs than items");
  } else {
    if (world.item_file.empty() || world.user_file.empty())
      throw ConfigError("import world requires item and user embedding files");
    for (const PolicySpec& ps : policies) {
      if (ps.kind == PolicyKind::CbCategory && world.label_file.empty())
        throw ConfigError("cb-category needs a label file when importing a world");
    }
  }
  if (world.model.noise_sigma < 0.0 || world.model.noise_sigma > 1.0)
    throw ConfigError("noise_sigma must be in [0, 1]");

  if (tree_file.empty()) {
    if (level_sizes.size() < 2 || level_sizes[0] != 1)
      throw ConfigError("level_sizes must be {1, k_1, ..., k_L}");
    for (std::size_t l = 1; l < level_sizes.size(); ++l)
      if (level_sizes[l] <= level_sizes[l - 1])
        throw ConfigError("level_sizes must strictly increase from root to leaves");
    if (world.kind == WorldSpec::Kind::Generate && level_sizes.back() > world.num_items)
      throw ConfigError("more leaves than items");
    int depth = static_cast<int>(level_sizes.size()) - 1;
    for (const PolicySpec& ps : policies) {
      if (budget < decision_stages(ps.kind, depth))
        throw ConfigError("budget " + std::to_string(budget) + " cannot cover policy '" + ps.name +
                          "' with " + std::to_string(decision_stages(ps.kind, depth)) + " stages");
    }
  }
  if (kmeans_max_iter < 1) throw ConfigError("kmeans_max_iter must be >= 1");
  for (int c : checkpoints)
    if (c < 1) throw ConfigError("checkpoints must be >= 1");
}

PreparedWorld prepare_world(const ExperimentConfig& config, std::uint64_t seed) {
  PreparedWorld prep;
  if (config.world.kind == WorldSpec::Kind::Generate) {
    prep.world = gen_synthetic(config.world.num_users, config.world.num_items,
                               config.world.dimension, config.world.num_blobs,
                               derive_seed(seed, {kWorldStream}), config.world.model);
  } else {
    prep.world = import_world(config.world.item_file, config.world.user_file, config.world.model,
                              config.world.label_file);
  }

  if (!config.tree_file.empty()) {
    prep.tree = deserialize_tree(config.tree_file);
    if (prep.tree.dimension() != prep.world.dimension())
      throw InputError("tree file dimension does not match world dimension");
  } else {
    prep.tree = build_tree(prep.world.items(), config.level_sizes, config.kmeans_max_iter,
                           derive_seed(seed, {kTreeStream}));
  }

  if (!prep.world.item_categories().empty()) {
    prep.category_tree = build_category_grouping(prep.world.items(), prep.world.category_labels());
    prep.has_category_tree = true;
  }

  prep.oracle_expected.reserve(prep.world.num_users());
  for (UserId uid : prep.world.user_ids())
    prep.oracle_expected.push_back(prep.world.oracle_best(uid).second);
  return prep;
}

namespace {

using UserState = std::variant<RidgeState, HcbUserState, PhcbUserState, TwoStageUserState>;

UserState make_user_state(PolicyKind kind, const PreparedWorld& prep) {
  const int d = prep.world.dimension();
  switch (kind) {
    case PolicyKind::Flat: return RidgeState(d);
    case PolicyKind::Hcb: return HcbUserState(d, prep.tree.depth());
    case PolicyKind::Phcb: return PhcbUserState(d, prep.tree.root().node_id);
    case PolicyKind::CbLeaf: return TwoStageUserState(d);
    case PolicyKind::CbCategory: return TwoStageUserState(d);
  }
  throw InternalError("make_user_state: unreachable");
}

}  // namespace

PolicyRunResult run_policy(const PreparedWorld& prep, const PolicySpec& policy, int rounds,
                           int budget, double q, double p, std::uint64_t seed) {
  const SyntheticWorld& world = prep.world;
  const ItemCatalog& catalog = world.catalog();
  const std::size_t num_users = world.num_users();
  const HierarchyTree& tree =
      policy.kind == PolicyKind::CbCategory ? prep.category_tree : prep.tree;
  if (policy.kind == PolicyKind::CbCategory && !prep.has_category_tree)
    throw ConfigError("policy '" + policy.name + "': world has no category labels");

  std::vector<UserState> states;
  states.reserve(num_users);
  for (std::size_t u = 0; u < num_users; ++u) states.push_back(make_user_state(policy.kind, prep));

  PolicyRunResult res;
  res.rows.reserve(rounds);

  const double oracle_round_sum =
      std::accumulate(prep.oracle_expected.begin(), prep.oracle_expected.end(), 0.0);

  std::vector<std::size_t> visit_order(num_users);
  std::vector<double> policy_expected_per_round(rounds, 0.0);
  std::int64_t realized_total = 0;
  double expected_total = 0.0;
  std::int64_t scores_total = 0;
  BudgetLedger ledger(budget);

  for (int round = 1; round <= rounds; ++round) {
    // Fixed visit permutation per (seed, round); user streams do not depend
    // on the position within the round.
    std::iota(visit_order.begin(), visit_order.end(), std::size_t{0});
    Rng order_rng(derive_seed(seed, {kOrderStream, static_cast<std::uint64_t>(round)}));
    order_rng.shuffle(visit_order);

    double expected_round = 0.0;
    for (std::size_t u : visit_order) {
      UserId uid = world.user_ids()[u];
      Rng rng(derive_seed(seed, {kUserStream, uid, static_cast<std::uint64_t>(round)}));
      ledger.begin_round();

      PolicyOutcome outcome;
      switch (policy.kind) {
        case PolicyKind::Flat:
          outcome = flat_select(std::get<RidgeState>(states[u]), catalog, policy.estimator, budget,
                                rng, &ledger);
          break;
        case PolicyKind::Hcb:
          outcome = hcb_select(std::get<HcbUserState>(states[u]), tree, catalog, policy.estimator,
                               budget, rng, &ledger);
          break;
        case PolicyKind::Phcb:
          outcome = phcb_select(std::get<PhcbUserState>(states[u]), tree, catalog,
                                policy.estimator, budget, rng, &ledger);
          break;
        case PolicyKind::CbLeaf:
        case PolicyKind::CbCategory:
          outcome = two_stage_select(std::get<TwoStageUserState>(states[u]), tree, catalog,
                                     policy.estimator, budget, rng, &ledger);
          break;
      }

      RewardDraw draw = world.draw_reward(uid, outcome.chosen_item, rng);

      switch (policy.kind) {
        case PolicyKind::Flat:
          flat_update(std::get<RidgeState>(states[u]), catalog, outcome, draw.realized);
          break;
        case PolicyKind::Hcb:
          hcb_update(std::get<HcbUserState>(states[u]), tree, catalog, outcome, draw.realized);
          break;
        case PolicyKind::Phcb:
          phcb_update(std::get<PhcbUserState>(states[u]), tree, catalog, outcome, draw.realized,
                      q, p);
          break;
        case PolicyKind::CbLeaf:
        case PolicyKind::CbCategory:
          two_stage_update(std::get<TwoStageUserState>(states[u]), tree, catalog, outcome,
                           draw.realized);
          break;
      }

      realized_total += draw.realized;
      expected_round += draw.expected;
      scores_total += outcome.scores_charged;
      res.audit.max_scores_user_round = std::max(res.audit.max_scores_user_round, ledger.spent());
      for (int s : outcome.stage_scores)
        res.audit.max_stage_scores = std::max(res.audit.max_stage_scores, s);
    }

    expected_total += expected_round;
    policy_expected_per_round[round - 1] = expected_round;

    LogRow row;
    row.seed = seed;
    row.policy = policy.name;
    row.round = round;
    row.user_count = static_cast<int>(num_users);
    row.cum_reward_realized = static_cast<double>(realized_total) / static_cast<double>(num_users);
    row.cum_reward_expected = expected_total / static_cast<double>(num_users);
    row.scores_charged = scores_total;
    res.rows.push_back(std::move(row));
  }

  // Expected regret from the per-round series (Eq.-style oracle-minus-policy).
  std::vector<double> oracle_series(rounds, oracle_round_sum);
  std::vector<double> regret = cumulative_regret(oracle_series, policy_expected_per_round);
  for (int t = 0; t < rounds; ++t)
    res.rows[t].cum_regret_expected = regret[t] / static_cast<double>(num_users);

  return res;
}

ExperimentLog run_experiment(const ExperimentConfig& config, BudgetAudit* audit) {
  config.validate();

  struct SeedResult {
    std::vector<PolicyRunResult> per_policy;
  };

  auto run_seed = [&config](std::uint64_t seed) {
    PreparedWorld prep = prepare_world(config, seed);
    SeedResult sr;
    sr.per_policy.reserve(config.policies.size());
    for (const PolicySpec& ps : config.policies)
      sr.per_policy.push_back(
          run_policy(prep, ps, config.rounds, config.budget, config.q, config.p, seed));
    return sr;
  };

  std::vector<std::future<SeedResult>> futures;
  futures.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds)
    futures.push_back(std::async(std::launch::async, run_seed, seed));

  ExperimentLog log;
  log.rows.reserve(config.seeds.size() * config.policies.size() *
                   static_cast<std::size_t>(config.rounds));
  BudgetAudit total_audit;
  for (auto& fut : futures) {
    SeedResult sr = fut.get();
    for (PolicyRunResult& prr : sr.per_policy) {
      total_audit.max_scores_user_round =
          std::max(total_audit.max_scores_user_round, prr.audit.max_scores_user_round);
      total_audit.max_stage_scores =
          std::max(total_audit.max_stage_scores, prr.audit.max_stage_scores);
      for (LogRow& row : prr.rows) log.rows.push_back(std::move(row));
    }
  }
  if (audit) *audit = total_audit;
  return log;
}

// --------------------------------------------------------------------------
// CSV + report
// --------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void write_log_csv(const ExperimentLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("write_log_csv: cannot open " + path);
  out << "seed,policy,round,user_count,cum_reward_realized,cum_reward_expected,"
         "cum_regret_expected\n";
  for (const LogRow& r : log.rows) {
    out << r.seed << ',' << r.policy << ',' << r.round << ',' << r.user_count << ','
        << fmt_double(r.cum_reward_realized) << ',' << fmt_double(r.cum_reward_expected) << ','
        << fmt_double(r.cum_regret_expected) << "\n";
  }
  if (!out) throw InputError("write_log_csv: write failed for " + path);
}

ExperimentLog read_log_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("read_log_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("log file " + path + ": empty file");
  ExperimentLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    LogRow row;
    try {
      std::getline(ss, field, ',');
      row.seed = std::stoull(field);
      std::getline(ss, row.policy, ',');
      std::getline(ss, field, ',');
      row.round = std::stoi(field);
      std::getline(ss, field, ',');
      row.user_count = std::stoi(field);
      std::getline(ss, field, ',');
      row.cum_reward_realized = std::stod(field);
      std::getline(ss, field, ',');
      row.cum_reward_expected = std::stod(field);
      if (!std::getline(ss, field, ',')) throw std::runtime_error("short row");
      row.cum_regret_expected = std::stod(field);
    } catch (const std::exception&) {
      throw InputError("log file " + path + " line " + std::to_string(lineno) + ": malformed row");
    }
    log.rows.push_back(std::move(row));
  }
  return log;
}

std::vector<ReportCell> summarize(const ExperimentLog& log, const std::vector<int>& checkpoints) {
  if (log.rows.empty()) throw InputError("summarize: empty log");

  // policy -> seed -> set of rounds present; preserve first-seen policy order.
  std::vector<std::string> policy_order;
  std::map<std::string, std::map<std::uint64_t, std::map<int, const LogRow*>>> by_policy;
  std::set<std::uint64_t> all_seeds;
  int max_round = 0;
  for (const LogRow& r : log.rows) {
    if (by_policy.find(r.policy) == by_policy.end()) policy_order.push_back(r.policy);
    by_policy[r.policy][r.seed][r.round] = &r;
    all_seeds.insert(r.seed);
    max_round = std::max(max_round, r.round);
  }
  for (const auto& [policy, seeds] : by_policy) {
    if (seeds.size() != all_seeds.size())
      throw InternalError("summarize: policy '" + policy + "' missing from some seeds");
  }

  auto mean_std = [](const std::vector<double>& xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2) return std::pair<double, double>{mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
  };

  std::vector<ReportCell> cells;
  for (const std::string& policy : policy_order) {
    for (int cp : checkpoints) {
      if (cp > max_round) continue;
      std::vector<double> rewards, regrets;
      for (const auto& [seed, rounds] : by_policy[policy]) {
        auto it = rounds.find(cp);
        if (it == rounds.end())
          throw InternalError("summarize: seed " + std::to_string(seed) + " lacks round " +
                              std::to_string(cp) + " for policy '" + policy + "'");
        rewards.push_back(it->second->cum_reward_realized);
        regrets.push_back(it->second->cum_regret_expected);
      }
      ReportCell cell;
      cell.policy = policy;
      cell.round = cp;
      cell.seed_count = static_cast<int>(rewards.size());
      std::tie(cell.reward_mean, cell.reward_std) = mean_std(rewards);
      std::tie(cell.regret_mean, cell.regret_std) = mean_std(regrets);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_report_csv(const std::vector<ReportCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("write_report_csv: cannot open " + path);
  out << "policy,round,seeds,reward_mean,reward_std,regret_mean,regret_std\n";
  for (const ReportCell& c : cells) {
    out << c.policy << ',' << c.round << ',' << c.seed_count << ',' << fmt_double(c.reward_mean)
        << ',' << fmt_double(c.reward_std) << ',' << fmt_double(c.regret_mean) << ','
        << fmt_double(c.regret_std) << "\n";
  }
  if (!out) throw InputError("write_report_csv: write failed for " + path);
}

std::string format_report_table(const std::vector<ReportCell>& cells) {
  // One row per policy, one column per checkpoint: "mean +- std" of the
  // cumulative realized reward.
  std::vector<std::string> policies;
  std::vector<int> rounds;
  for (const ReportCell& c : cells) {
    if (std::find(policies.begin(), policies.end(), c.policy) == policies.end())
      policies.push_back(c.policy);
    if (std::find(rounds.begin(), rounds.end(), c.round) == rounds.end()) rounds.push_back(c.round);
  }
  std::sort(rounds.begin(), rounds.end());

  auto cell_text = [&](const std::string& policy, int round) -> std::string {
    for (const ReportCell& c : cells) {
      if (c.policy == policy && c.round == round) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f +- %.2f", c.reward_mean, c.reward_std);
        return buf;
      }
    }
    return "-";
  };

  std::size_t name_w = 6;
  for (const auto& p : policies) name_w = std::max(name_w, p.size());
  std::vector<std::size_t> col_w(rounds.size());
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    col_w[j] = std::to_string(rounds[j]).size();
    for (const auto& p : policies) col_w[j] = std::max(col_w[j], cell_text(p, rounds[j]).size());
  }

  std::ostringstream out;
  out << std::string(name_w, ' ');
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    std::string head = std::to_string(rounds[j]);
    out << "  " << std::string(col_w[j] - head.size(), ' ') << head;
  }
  out << "\n";
  for (const auto& p : policies) {
    out << p << std::string(name_w - p.size(), ' ');
    for (std::size_t j = 0; j < rounds.size(); ++j) {
      std::string text = cell_text(p, rounds[j]);
      out << "  " << std::string(col_w[j] - text.size(), ' ') << text;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace treebandit
