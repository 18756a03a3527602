// treebandit - hierarchical contextual bandit exploration over a clustered
// item space, with a synthetic-world benchmark harness.
//
// Subcommands:
//   gen-world   write synthetic item/user embeddings and category labels
//   build-tree  cluster an embedding file into a hierarchy tree (JSON)
//   run         execute a multi-seed policy comparison from a config file
//   report      summarize log CSVs into a mean +- std table

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "treebandit/config.hpp"
#include "treebandit/embedding_io.hpp"
#include "treebandit/errors.hpp"
#include "treebandit/experiment.hpp"
#include "treebandit/tree_io.hpp"

namespace fs = std::filesystem;
using namespace treebandit;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

int cmd_gen_world(int users, int items, int dim, int blobs, std::uint64_t seed, double scale,
                  double bias, double sigma, const std::string& out_dir) {
  SyntheticWorld world = gen_synthetic(users, items, dim, blobs, seed, {scale, bias, sigma});
  WorldFiles files = export_world(world, out_dir);
  std::cout << "wrote " << files.items_bin << " (" << world.num_items() << " items), "
            << files.users_bin << " (" << world.num_users() << " users), " << files.labels_csv
            << "\n";
  return 0;
}

int cmd_build_tree(const std::string& embeddings, const std::string& levels_csv, int max_iter,
                   std::uint64_t seed, const std::string& out_path) {
  std::vector<int> levels;
  for (const std::string& part : split_list(levels_csv)) levels.push_back(std::stoi(part));
  std::vector<ItemEmbedding> items = read_embeddings(embeddings);
  HierarchyTree tree = build_tree(items, levels, max_iter, seed);
  serialize_tree(tree, out_path);
  std::cout << "wrote " << out_path << " (" << tree.node_count() << " nodes, depth "
            << tree.depth() << ")\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& seeds_csv,
            const std::string& out_override, const std::string& policies_csv, int budget_override) {
  ExperimentConfig config = load_config(config_path);
  if (!seeds_csv.empty()) {
    config.seeds.clear();
    for (const std::string& part : split_list(seeds_csv))
      config.seeds.push_back(std::stoull(part));
  }
  if (!out_override.empty()) config.out_dir = out_override;
  if (budget_override > 0) config.budget = budget_override;
  if (!policies_csv.empty()) {
    std::vector<std::string> keep = split_list(policies_csv);
    std::vector<PolicySpec> filtered;
    for (const std::string& name : keep) {
      auto it = std::find_if(config.policies.begin(), config.policies.end(),
                             [&](const PolicySpec& ps) { return ps.name == name; });
      if (it == config.policies.end())
        throw ConfigError("--policies: no policy named '" + name + "' in config");
      filtered.push_back(*it);
    }
    config.policies = std::move(filtered);
  }
  config.validate();

  ExperimentLog log = run_experiment(config);
  fs::create_directories(config.out_dir);
  std::string log_path = (fs::path(config.out_dir) / "logs.csv").string();
  write_log_csv(log, log_path);
  std::cout << "wrote " << log_path << " (" << log.rows.size() << " rows)\n";

  std::vector<ReportCell> cells = summarize(log, config.checkpoints);
  std::cout << format_report_table(cells);
  return 0;
}

int cmd_report(const std::string& logs_csv, const std::string& checkpoints_csv,
               const std::string& out_dir) {
  ExperimentLog merged;
  for (const std::string& path : split_list(logs_csv)) {
    ExperimentLog log = read_log_csv(path);
    merged.rows.insert(merged.rows.end(), log.rows.begin(), log.rows.end());
  }
  std::vector<int> checkpoints;
  for (const std::string& part : split_list(checkpoints_csv)) checkpoints.push_back(std::stoi(part));

  std::vector<ReportCell> cells = summarize(merged, checkpoints);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::string path = (fs::path(out_dir) / "summary.csv").string();
    write_report_csv(cells, path);
    std::cout << "wrote " << path << "\n";
  }
  std::cout << format_report_table(cells);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical contextual bandit explorer"};
  app.require_subcommand(1);

  // gen-world
  auto* gen = app.add_subcommand("gen-world", "generate a synthetic world");
  int users = 100, items = 10000, dim = 16, blobs = 20;
  std::uint64_t gen_seed = 1;
  double scale = 5.0, bias = 3.0, sigma = 0.0;
  std::string gen_out = "world";
  gen->add_option("--users", users, "number of users");
  gen->add_option("--items", items, "number of items");
  gen->add_option("--dim", dim, "embedding dimension");
  gen->add_option("--blobs", blobs, "number of interest clusters");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--scale", scale, "reward logit scale");
  gen->add_option("--bias", bias, "reward logit bias");
  gen->add_option("--sigma", sigma, "reward logit noise sigma");
  gen->add_option("--out", gen_out, "output directory");

  // build-tree
  auto* bt = app.add_subcommand("build-tree", "cluster embeddings into a hierarchy tree");
  std::string bt_embeddings, bt_levels = "1,20,400", bt_out = "tree.json";
  int bt_max_iter = 100;
  std::uint64_t bt_seed = 1;
  bt->add_option("--embeddings", bt_embeddings, "embedding file (binary or CSV)")->required();
  bt->add_option("--levels", bt_levels, "level sizes, root to leaves (e.g. 1,20,400)");
  bt->add_option("--max-iter", bt_max_iter, "k-means iteration cap");
  bt->add_option("--seed", bt_seed, "clustering seed");
  bt->add_option("--out", bt_out, "output tree JSON path");

  // run
  auto* run = app.add_subcommand("run", "run a configured experiment");
  std::string run_config, run_seeds, run_out, run_policies;
  int run_budget = 0;
  run->add_option("--config", run_config, "experiment config file")->required();
  run->add_option("--seed", run_seeds, "comma-separated seed list (overrides config)");
  run->add_option("--out", run_out, "output directory (overrides config)");
  run->add_option("--policies", run_policies, "comma-separated policy names (overrides config)");
  run->add_option("--budget", run_budget, "per-round score budget (overrides config)");

  // report
  auto* rep = app.add_subcommand("report", "summarize log CSVs");
  std::string rep_logs, rep_checkpoints = "100,500,1000,2000", rep_out;
  rep->add_option("--logs", rep_logs, "comma-separated log CSV paths")->required();
  rep->add_option("--checkpoints", rep_checkpoints, "rounds to report");
  rep->add_option("--out", rep_out, "directory for summary.csv (optional)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen_world(users, items, dim, blobs, gen_seed, scale, bias, sigma, gen_out);
    if (bt->parsed()) return cmd_build_tree(bt_embeddings, bt_levels, bt_max_iter, bt_seed, bt_out);
    if (run->parsed()) return cmd_run(run_config, run_seeds, run_out, run_policies, run_budget);
    if (rep->parsed()) return cmd_report(rep_logs, rep_checkpoints, rep_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
