#pragma once

#include <string>
#include <vector>

#include "treebandit/policies.hpp"
#include "treebandit/simulator.hpp"

namespace treebandit {

enum class PolicyKind { Flat, Hcb, Phcb, CbLeaf, CbCategory };

PolicyKind policy_kind_from(const std::string& name);  // throws ConfigError
std::string to_string(PolicyKind kind);

struct PolicySpec {
  std::string name;  // log label; defaults to the kind name
  PolicyKind kind = PolicyKind::Flat;
  EstimatorConfig estimator;
};

struct WorldSpec {
  enum class Kind { Generate, Import } kind = Kind::Generate;
  // generate
  int num_users = 100;
  int num_items = 10000;
  int dimension = 16;
  int num_blobs = 20;
  // import
  std::string item_file, user_file, label_file;
  RewardModel model{5.0, 3.0, 0.0};
};

struct ExperimentConfig {
  WorldSpec world;
  std::vector<int> level_sizes{1, 20, 400};
  int kmeans_max_iter = 100;
  std::string tree_file;  // optional: load instead of building per seed
  std::vector<PolicySpec> policies;
  int rounds = 1000;
  int budget = 50;
  double q = 10.0;  // expansion count scale
  double p = 0.1;   // expansion reward threshold scale
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> checkpoints{100, 500, 1000, 2000};
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError with the offending field
};

// One log record per (seed, policy, round). Cumulative quantities are
// averaged over users so scales match between differently sized worlds;
// round r covers one recommendation to every user.
struct LogRow {
  std::uint64_t seed = 0;
  std::string policy;
  int round = 0;
  int user_count = 0;
  double cum_reward_realized = 0.0;
  double cum_reward_expected = 0.0;
  double cum_regret_expected = 0.0;
  std::int64_t scores_charged = 0;  // cumulative, all users; not exported
};

struct ExperimentLog {
  std::vector<LogRow> rows;
};

// Budget audit collected while running (acceptance checks read these).
struct BudgetAudit {
  int max_scores_user_round = 0;   // max charged by any (user, round)
  int max_stage_scores = 0;        // max charged in any single decision stage
  std::int64_t violations = 0;     // ledger overruns observed (always 0 or thrown)
};

// World + tree prepared for one seed, shareable across policies.
struct PreparedWorld {
  SyntheticWorld world;
  HierarchyTree tree;
  HierarchyTree category_tree;      // empty unless categories available
  bool has_category_tree = false;
  std::vector<double> oracle_expected;  // per user, fixed across rounds
};

PreparedWorld prepare_world(const ExperimentConfig& config, std::uint64_t seed);

struct PolicyRunResult {
  std::vector<LogRow> rows;
  BudgetAudit audit;
};

// Runs one policy for `rounds` passes over all users of a prepared world.
// Fully deterministic: every random stream is derived from (seed, user,
// round), so policies can run in any order with identical results.
PolicyRunResult run_policy(const PreparedWorld& prep, const PolicySpec& policy, int rounds,
                           int budget, double q, double p, std::uint64_t seed);

// Full protocol: for each seed, prepare the world once and run every policy.
// Seeds execute in parallel; row order is (seed, policy, round).
ExperimentLog run_experiment(const ExperimentConfig& config, BudgetAudit* audit = nullptr);

// Log CSV: header seed,policy,round,user_count,cum_reward_realized,
// cum_reward_expected,cum_regret_expected. Deterministic formatting.
void write_log_csv(const ExperimentLog& log, const std::string& path);
ExperimentLog read_log_csv(const std::string& path);

// Mean and std (across seeds) of cumulative realized reward and expected
// regret per policy at each checkpoint.
struct ReportCell {
  std::string policy;
  int round = 0;
  int seed_count = 0;
  double reward_mean = 0.0, reward_std = 0.0;
  double regret_mean = 0.0, regret_std = 0.0;
};

std::vector<ReportCell> summarize(const ExperimentLog& log, const std::vector<int>& checkpoints);
void write_report_csv(const std::vector<ReportCell>& cells, const std::string& path);
std::string format_report_table(const std::vector<ReportCell>& cells);

}  // namespace treebandit
