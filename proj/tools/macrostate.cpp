// macrostate: command-line driver for macrostate clustering.

#include "macrostate/error.hpp"
#include "macrostate/io.hpp"
#include "macrostate/pipeline.hpp"
#include "macrostate/synthetic.hpp"
#include "macrostate/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace macrostate;

namespace {

// ---------------------------------------------------------------------------
// Config files: "key = value" lines; [sections] and '#'/';' comments ignored.
// Values are spliced into argv ahead of parsing unless the same flag is
// already present, so explicit flags always win.

std::string strip(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> file;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file) return rest;
  std::ifstream in(*file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + *file + "'");
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(rest.begin(), rest.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "config line '" + t + "' is not key=value");
    std::string key = strip(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = strip(t.substr(eq + 1));
    if (key == "config" || value.empty() || given(key)) continue;
    if (!value.empty() && value.front() == '[') {
      std::string body = value.substr(1, value.size() >= 2 ? value.size() - 2 : 0);
      std::stringstream ss(body);
      extra.push_back("--" + key);
      for (std::string item; std::getline(ss, item, ',');) extra.push_back(strip(item));
    } else {
      extra.push_back("--" + key + "=" + value);
    }
  }
  // Subcommand name stays first so the spliced flags attach to it.
  std::vector<std::string> out;
  if (!rest.empty()) out.push_back(rest.front());
  out.insert(out.end(), extra.begin(), extra.end());
  if (rest.size() > 1) out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

// ---------------------------------------------------------------------------
// Shared option groups

struct InputArgs {
  std::string grid, items, graph;
  bool id_column = false;
  double round_dedup = 0.0;
  double floor_ratio = 1e-12;
  std::string kernel = "gaussian";
  double scale = 0.0;
  double hard_threshold = 0.0;
  std::string normalization = "symmetric";
  double outlier_ratio = 0.2;
};

struct BetaArgs {
  double beta = 1.0;
  double beta_start = 0.0, beta_stop = 0.0;
  int beta_count = 0;
  bool beta_log = false;

  bool is_grid() const { return beta_count > 0; }
  std::vector<double> values() const {
    return is_grid() ? beta_grid(beta_start, beta_stop, beta_count, beta_log) : std::vector<double>{beta};
  }
};

struct FitArgs {
  int m_max = 20;
  double gap_cutoff = 1.5;
  int m = 0;
  int n_starts = 16;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool threshold = false;
  bool trace = false;
  unsigned workers = 0;
  std::string truth;
};

void add_input(CLI::App* app, InputArgs& in, bool graph_only = false) {
  auto* g = app->add_option("--graph", in.graph, "edge list: src<TAB>dst<TAB>weight?");
  if (graph_only) {
    g->required();
    return;
  }
  auto* grid = app->add_option("--grid", in.grid, "density grid JSON");
  auto* items = app->add_option("--items", in.items, "item CSV");
  grid->excludes(items)->excludes(g);
  items->excludes(g);
  app->add_flag("--id-column", in.id_column, "first item column is an id");
  app->add_option("--round-dedup", in.round_dedup, "round items to this step and drop duplicates")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  app->add_option("--floor-ratio", in.floor_ratio, "density floor relative to max")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--kernel", in.kernel, "similarity kernel")->check(CLI::IsMember({"gaussian"}))->capture_default_str();
  app->add_option("--scale", in.scale, "kernel length scale (items)")->check(CLI::PositiveNumber);
  app->add_option("--hard-threshold", in.hard_threshold, "zero similarities below this")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app->add_option("--normalization", in.normalization, "item Laplacian normalization")
      ->check(CLI::IsMember({"symmetric", "unnormalized"}))->capture_default_str();
  app->add_option("--outlier-ratio", in.outlier_ratio, "item outlier ratio, 0 disables")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
}

void add_beta(CLI::App* app, BetaArgs& b) {
  app->add_option("--beta", b.beta, "drift sensitivity")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--beta-start", b.beta_start, "beta grid start")->check(CLI::PositiveNumber);
  app->add_option("--beta-stop", b.beta_stop, "beta grid stop")->check(CLI::PositiveNumber);
  app->add_option("--beta-count", b.beta_count, "beta grid size (0: scalar --beta)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  app->add_flag("--beta-log", b.beta_log, "logarithmic beta grid");
}

void add_fit(CLI::App* app, FitArgs& f) {
  app->add_option("--m-max", f.m_max, "largest m tabulated")->check(CLI::Range(2, 1000))->capture_default_str();
  app->add_option("--gap-cutoff", f.gap_cutoff, "gap cutoff for selecting m")
      ->check(CLI::Range(1.0, 1e300))->capture_default_str();
  app->add_option("--m", f.m, "explicit component count (0: select)")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--n-starts", f.n_starts, "optimizer starts")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--seed", f.seed, "random seed")->required();
  app->add_option("--tol", f.tol, "optimizer tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_flag("--threshold", f.threshold, "also emit the hard-thresholded model");
  app->add_flag("--trace", f.trace, "write the optimizer trace as JSON lines");
  app->add_option("--workers", f.workers, "threads (0: hardware)")->capture_default_str();
  app->add_option("--truth", f.truth, "true weighted components CSV (n x m)");
}

// ---------------------------------------------------------------------------
// Input handling

struct LoadedInput {
  SourceKind kind = SourceKind::grid;
  DensityGrid grid;
  double floor_ratio = 1e-12;
  ItemSet items;
  std::vector<Index> kept;  // surviving item rows
  SimilarityMatrix W;
  Normalization normalization = Normalization::symmetric;
  GraphSpec graph;

  LaplacianSystem build(double beta) const {
    switch (kind) {
      case SourceKind::grid: return build_grid_system(grid, beta, floor_ratio);
      case SourceKind::items: return build_item_system(W, normalization, beta);
      case SourceKind::graph: return build_graph_system(graph, beta);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown input kind");
  }
};

LoadedInput load_input(const InputArgs& a) {
  LoadedInput in;
  in.floor_ratio = a.floor_ratio;
  if (!a.grid.empty()) {
    in.kind = SourceKind::grid;
    in.grid = read_density_grid(a.grid);
  } else if (!a.items.empty()) {
    in.kind = SourceKind::items;
    if (!(a.scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "--scale is required for item input");
    in.items = read_items_csv(a.items, a.id_column, a.round_dedup);
    const SimilarityMatrix full = kernel_similarity(in.items, kernel_from_string(a.kernel), a.scale, a.hard_threshold);
    if (a.outlier_ratio > 0.0) {
      in.kept = filter_outliers(full, a.outlier_ratio);
      in.W = restrict_similarity(full, in.kept);
    } else {
      in.kept.resize(static_cast<std::size_t>(full.rows()));
      for (Index i = 0; i < full.rows(); ++i) in.kept[static_cast<std::size_t>(i)] = i;
      in.W = full;
    }
    in.normalization = normalization_from_string(a.normalization);
  } else if (!a.graph.empty()) {
    in.kind = SourceKind::graph;
    in.graph = read_graph_tsv(a.graph);
  } else {
    throw Error(ErrorCode::InvalidArgument, "one of --grid, --items or --graph is required");
  }
  return in;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_config_echo(const fs::path& out, const CLI::App* sub) {
  write_text(out / "config.ini", sub->config_to_str(true, false));
}

// Identification columns for per-point outputs.
void id_columns(const LoadedInput& in, const LaplacianSystem& sys, std::vector<std::string>& header,
                std::vector<std::vector<std::string>>& rows) {
  const Index n = sys.size();
  rows.assign(static_cast<std::size_t>(n), {});
  if (in.kind == SourceKind::grid) {
    header.push_back("node");
    for (std::size_t d = 0; d < in.grid.shape.dims.size(); ++d) header.push_back("x" + std::to_string(d));
    for (Index j = 0; j < n; ++j) {
      const Index node = sys.node_ids.empty() ? j : sys.node_ids[static_cast<std::size_t>(j)];
      auto& r = rows[static_cast<std::size_t>(j)];
      r.push_back(std::to_string(node));
      for (double c : in.grid.shape.coordinates(node)) r.push_back(format_double(c));
    }
  } else if (in.kind == SourceKind::items) {
    header.push_back("id");
    for (Index j = 0; j < n; ++j)
      rows[static_cast<std::size_t>(j)].push_back(in.items.ids[static_cast<std::size_t>(in.kept[static_cast<std::size_t>(j)])]);
  } else {
    header.push_back("node");
    for (Index j = 0; j < n; ++j) rows[static_cast<std::size_t>(j)].push_back(std::to_string(sys.node_ids[static_cast<std::size_t>(j)]));
  }
}

Eigen::MatrixXd kept_items(const LoadedInput& in) {
  Eigen::MatrixXd X(static_cast<Index>(in.kept.size()), in.items.items.cols());
  for (std::size_t i = 0; i < in.kept.size(); ++i) X.row(static_cast<Index>(i)) = in.items.items.row(in.kept[i]);
  return X;
}

FitOptions fit_options(const FitArgs& f) {
  FitOptions o;
  o.gap_cutoff = f.gap_cutoff;
  o.m_max = f.m_max;
  o.m = f.m;
  o.n_starts = f.n_starts;
  o.seed = f.seed;
  o.threshold = f.threshold;
  o.qp.tol = f.tol;
  o.qp.workers = f.workers;
  return o;
}

struct TraceLog {
  std::mutex mu;
  std::vector<TraceEvent> events;
};

// Runs the fit and writes model.json, assignments.csv, components.csv,
// run.json and (optionally) trace.jsonl and validation.json.
FitResult run_fit(const LoadedInput& in, const LaplacianSystem& sys, const FitArgs& args, const fs::path& out,
                  const std::string& command, const CLI::App* sub) {
  FitOptions opts = fit_options(args);
  TraceLog log;
  if (args.trace)
    opts.qp.trace = [&log](const TraceEvent& e) {
      std::lock_guard<std::mutex> lock(log.mu);
      log.events.push_back(e);
    };
  std::optional<Eigen::VectorXd> density;
  if (in.kind == SourceKind::grid) density = in.grid.values / in.grid.values.sum();
  FitResult res = fit(sys, opts, density ? &*density : nullptr);

  write_json(out / "model.json", model_json(res));

  const MacrostateModel& model = res.model;
  const int m = model.m();
  {
    CsvTable t;
    id_columns(in, sys, t.header, t.rows);
    for (int a = 0; a < m; ++a) t.header.push_back("w_" + std::to_string(a));
    t.header.push_back("label");
    for (std::size_t j = 0; j < t.rows.size(); ++j) {
      for (int a = 0; a < m; ++a) t.rows[j].push_back(format_double(model.w(static_cast<Index>(j), a)));
      t.rows[j].push_back(std::to_string(model.labels[j]));
    }
    write_csv(out / "assignments.csv", t);
  }
  {
    // Grid components are rendered as densities (per unit cell volume).
    double cell = 1.0;
    if (in.kind == SourceKind::grid)
      for (double h : in.grid.shape.spacing) cell *= h;
    auto emit = [&](const MacrostateModel& mm, const std::string& name) {
      CsvTable t;
      id_columns(in, sys, t.header, t.rows);
      for (int a = 0; a < m; ++a) t.header.push_back("f_" + std::to_string(a));
      for (std::size_t j = 0; j < t.rows.size(); ++j)
        for (int a = 0; a < m; ++a) t.rows[j].push_back(format_double(mm.components(static_cast<Index>(j), a) / cell));
      write_csv(out / name, t);
    };
    emit(model, "components.csv");
    if (res.crisp) emit(*res.crisp, "components_crisp.csv");
    // a_k f_k as plain columns, the layout `validate --components` reads.
    std::vector<std::string> header;
    for (int a = 0; a < m; ++a) header.push_back("a_f_" + std::to_string(a));
    write_matrix_csv(out / "weighted_components.csv", header, weighted_components(model));
  }
  if (args.trace) {
    std::sort(log.events.begin(), log.events.end(), [](const TraceEvent& x, const TraceEvent& y) {
      return std::tie(x.start, x.iteration) < std::tie(y.start, y.iteration);
    });
    std::ostringstream ss;
    for (const auto& e : log.events) {
      Json j;
      j["start"] = e.start;
      j["iteration"] = e.iteration;
      j["upsilon"] = e.upsilon;
      j["violated_rows"] = e.violated_rows;
      ss << j.dump() << '\n';
    }
    write_text(out / "trace.jsonl", ss.str());
  }

  Json validation;
  if (!args.truth.empty()) {
    const Eigen::MatrixXd truth = read_matrix_csv(args.truth);
    validation["relative_error"] = relative_error(weighted_components(model), truth);
    if (res.crisp) validation["relative_error_crisp"] = relative_error(weighted_components(*res.crisp), truth);
  }
  if (in.kind == SourceKind::items && m >= 2) {
    const Eigen::MatrixXd X = kept_items(in);
    const SilhouetteReport rep = silhouette(X, model.labels);
    validation["silhouette"] = rep.overall_mean;
    validation["silhouette_per_cluster"] =
        std::vector<double>(rep.per_cluster_mean.data(), rep.per_cluster_mean.data() + rep.per_cluster_mean.size());
    const auto km = kmeans_baseline(X, m, args.seed);
    validation["kmeans_silhouette"] = silhouette(X, km).overall_mean;
    write_matrix_csv(out / "silhouette.csv", {"silhouette"}, rep.per_point);
  }
  if (!validation.empty()) write_json(out / "validation.json", validation);

  Json run;
  run["command"] = command;
  run["timestamp"] = timestamp();
  run["source_kind"] = std::string(to_string(in.kind));
  run["points"] = sys.size();
  run["m"] = m;
  run["start_index"] = res.solution.start_index;
  run["iterations"] = res.solution.iterations;
  run["det_abs"] = res.solution.det_abs;
  run["converged"] = res.solution.converged;
  run["config"] = sub->config_to_str(true, false);
  write_json(out / "run.json", run);
  write_config_echo(out, sub);
  return res;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_gaps(const InputArgs& ia, const BetaArgs& ba, const FitArgs& fa, const fs::path& out, const CLI::App* sub) {
  const LoadedInput in = load_input(ia);
  const std::vector<double> betas = ba.values();
  in.build(betas.front());  // surfaces input errors (e.g. DisconnectedInput) directly
  ScanOptions so;
  so.workers = fa.workers;
  const GapTable table = scan_beta([&in](double b) { return in.build(b); }, betas, fa.m_max, so);
  write_gap_table_csv(out / "gaps.csv", table);

  Json summary;
  summary["betas"] = table.betas;
  summary["m_max"] = table.m_max;
  summary["gap_cutoff"] = fa.gap_cutoff;
  Json selected = Json::array(), errors = Json::array(), rates = Json::array();
  bool any = false;
  for (std::size_t c = 0; c < table.betas.size(); ++c) {
    const auto& r = table.rates[c];
    rates.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    if (!table.column_ok(c)) {
      selected.push_back(nullptr);
      errors.push_back(table.errors[c]);
      continue;
    }
    try {
      selected.push_back(select_m(table.profile(c), fa.gap_cutoff));
      errors.push_back(nullptr);
      any = true;
    } catch (const Error& e) {
      selected.push_back(nullptr);
      errors.push_back(e.what());
    }
  }
  summary["selected_m"] = selected;
  summary["errors"] = errors;
  summary["rates"] = rates;
  write_json(out / "gaps.json", summary);
  write_config_echo(out, sub);
  if (!any) throw Error(ErrorCode::NoSeparableStructure, "no beta has a gap above the cutoff");
  return 0;
}

int cmd_fit(const InputArgs& ia, const BetaArgs& ba, const FitArgs& fa, const fs::path& out, const CLI::App* sub) {
  if (ba.is_grid()) throw Error(ErrorCode::InvalidArgument, "fit takes a scalar --beta");
  const LoadedInput in = load_input(ia);
  const LaplacianSystem sys = in.build(ba.beta);
  run_fit(in, sys, fa, out, "fit", sub);
  return 0;
}

int cmd_partition(const InputArgs& ia, const BetaArgs& ba, const FitArgs& fa, const fs::path& out,
                  const CLI::App* sub) {
  if (ba.is_grid()) throw Error(ErrorCode::InvalidArgument, "partition takes a scalar --beta");
  const LoadedInput in = load_input(ia);
  const LaplacianSystem sys = in.build(ba.beta);
  const FitResult res = run_fit(in, sys, fa, out, "partition", sub);
  const auto& labels = res.model.labels;
  const int m = res.model.m();

  std::vector<int> cluster(static_cast<std::size_t>(in.graph.n_nodes), -1);
  for (std::size_t j = 0; j < sys.node_ids.size(); ++j) cluster[static_cast<std::size_t>(sys.node_ids[j])] = labels[j];
  {
    CsvTable t;
    t.header = {"node", "cluster"};
    for (std::size_t v = 0; v < cluster.size(); ++v) t.rows.push_back({std::to_string(v), std::to_string(cluster[v])});
    write_csv(out / "partition.csv", t);
  }
  {
    std::vector<long> sizes(static_cast<std::size_t>(m), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    CsvTable t;
    t.header = {"cluster", "size"};
    for (int a = 0; a < m; ++a) t.rows.push_back({std::to_string(a), std::to_string(sizes[static_cast<std::size_t>(a)])});
    t.rows.push_back({"-1", std::to_string(sys.dropped_nodes.size())});
    write_csv(out / "clusters.csv", t);
  }
  {
    // Node order: by cluster, then node id; dropped nodes last.
    std::vector<Index> order(cluster.size());
    for (std::size_t v = 0; v < order.size(); ++v) order[v] = static_cast<Index>(v);
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
      const int cx = cluster[static_cast<std::size_t>(x)], cy = cluster[static_cast<std::size_t>(y)];
      if ((cx < 0) != (cy < 0)) return cy < 0;
      return cx < cy;
    });
    std::vector<Index> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<Index>(i);
    CsvTable t;
    t.header = {"src", "dst", "src_pos", "dst_pos", "weight"};
    for (const auto& e : in.graph.edges)
      t.rows.push_back({std::to_string(e.src), std::to_string(e.dst), std::to_string(pos[static_cast<std::size_t>(e.src)]),
                        std::to_string(pos[static_cast<std::size_t>(e.dst)]), format_double(e.weight)});
    write_csv(out / "edges_reordered.csv", t);
  }
  return 0;
}

struct SynthArgs {
  SyntheticSpec spec;
  std::vector<std::string> profiles{"gaussian", "laplace", "sech"};
};

int cmd_synth(SynthArgs& sa, const fs::path& out, const CLI::App* sub) {
  sa.spec.profiles.clear();
  for (const auto& p : sa.profiles) sa.spec.profiles.push_back(profile_from_string(p));
  const SyntheticMixture mix = generate_synthetic_mixture(sa.spec);
  write_density_grid(out / "grid.json", mix.grid);
  std::vector<std::string> header;
  for (std::size_t k = 0; k < mix.profiles.size(); ++k)
    header.push_back("component_" + std::to_string(k) + "_" + std::string(to_string(mix.profiles[k])));
  write_matrix_csv(out / "truth.csv", header, mix.truth);
  write_config_echo(out, sub);
  return 0;
}

struct ValidateArgs {
  std::string items, labels, components, truth;
  bool id_column = false;
  int kmeans_k = 0;
  std::uint64_t seed = 0;
};

int cmd_validate(const ValidateArgs& va, const fs::path& out, const CLI::App* sub) {
  Json summary;
  if (!va.items.empty()) {
    if (va.labels.empty()) throw Error(ErrorCode::InvalidArgument, "--labels is required with --items");
    const ItemSet items = read_items_csv(va.items, va.id_column);
    const auto labels = read_labels_csv(va.labels);
    const SilhouetteReport rep = silhouette(items.items, labels);
    CsvTable t;
    t.header = {"id", "label", "silhouette"};
    for (Index j = 0; j < items.size(); ++j)
      t.rows.push_back({items.ids[static_cast<std::size_t>(j)], std::to_string(labels[static_cast<std::size_t>(j)]),
                        format_double(rep.per_point[j])});
    write_csv(out / "silhouette.csv", t);
    summary["silhouette"] = rep.overall_mean;
    summary["clusters"] = rep.clusters;
    summary["per_cluster"] =
        std::vector<double>(rep.per_cluster_mean.data(), rep.per_cluster_mean.data() + rep.per_cluster_mean.size());
    if (va.kmeans_k > 0) {
      const auto km = kmeans_baseline(items.items, va.kmeans_k, va.seed);
      summary["kmeans_silhouette"] = silhouette(items.items, km).overall_mean;
    }
  }
  if (!va.components.empty()) {
    if (va.truth.empty()) throw Error(ErrorCode::InvalidArgument, "--truth is required with --components");
    summary["relative_error"] = relative_error(read_matrix_csv(va.components), read_matrix_csv(va.truth));
  }
  if (summary.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to validate: give --items/--labels or --components/--truth");
  write_json(out / "validation.json", summary);
  write_config_echo(out, sub);
  return 0;
}

void emit_error(const Json& j) { std::cerr << j.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macrostate clustering: spectral gaps, macrostate mixture models and partitions"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  InputArgs ia;
  BetaArgs ba;
  FitArgs fa;

  auto* gaps = app.add_subcommand("gaps", "tabulate spectral gaps over beta");
  auto* fit_cmd = app.add_subcommand("fit", "fit a macrostate mixture model");
  auto* part = app.add_subcommand("partition", "partition a graph");
  for (auto* sub : {gaps, fit_cmd, part}) {
    add_input(sub, ia, sub == part);
    add_beta(sub, ba);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
  }
  gaps->add_option("--m-max", fa.m_max, "largest m tabulated")->check(CLI::Range(2, 1000))->capture_default_str();
  gaps->add_option("--gap-cutoff", fa.gap_cutoff, "gap cutoff for selecting m")
      ->check(CLI::Range(1.0, 1e300))->capture_default_str();
  gaps->add_option("--workers", fa.workers, "threads (0: hardware)")->capture_default_str();
  add_fit(fit_cmd, fa);
  add_fit(part, fa);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic tri-mixture density");
  synth->add_option("--grid-size", sa.spec.grid, "nodes per axis")->check(CLI::Range(2, 100000))->capture_default_str();
  synth->add_option("--extent", sa.spec.extent, "domain half-width")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--profiles", sa.profiles, "component profiles")
      ->check(CLI::IsMember({"gaussian", "laplace", "sech"}))->capture_default_str();
  synth->add_option("--bumps", sa.spec.bumps, "bumps per component")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--anchor-radius", sa.spec.anchor_radius, "component anchor radius / extent")->capture_default_str();
  synth->add_option("--center-jitter", sa.spec.center_jitter, "bump center scatter")->capture_default_str();
  synth->add_option("--scale-min", sa.spec.scale_min, "smallest bump scale")->capture_default_str();
  synth->add_option("--scale-max", sa.spec.scale_max, "largest bump scale")->capture_default_str();
  synth->add_option("--seed", sa.spec.seed, "random seed")->required();
  synth->add_option("--out", out_dir, "output directory")->capture_default_str();

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "silhouette and relative-error reports");
  validate->add_option("--items", va.items, "item CSV");
  validate->add_flag("--id-column", va.id_column, "first item column is an id");
  validate->add_option("--labels", va.labels, "labels CSV");
  validate->add_option("--kmeans-k", va.kmeans_k, "also score a k-means baseline with k clusters");
  validate->add_option("--seed", va.seed, "random seed for the k-means baseline");
  validate->add_option("--components", va.components, "estimated weighted components CSV (weighted_components.csv from fit)");
  validate->add_option("--truth", va.truth, "true weighted components CSV");
  validate->add_option("--out", out_dir, "output directory")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      Json j;
      j["error"] = "InvalidArgument";
      j["message"] = e.what();
      emit_error(j);
      return 1;
    }
    if (validate->parsed() && va.kmeans_k > 0 && validate->count("--seed") == 0)
      throw Error(ErrorCode::InvalidArgument, "--seed is required with --kmeans-k");

    const fs::path out(out_dir);
    if (gaps->parsed()) return cmd_gaps(ia, ba, fa, out, gaps);
    if (fit_cmd->parsed()) return cmd_fit(ia, ba, fa, out, fit_cmd);
    if (part->parsed()) return cmd_partition(ia, ba, fa, out, part);
    if (synth->parsed()) return cmd_synth(sa, out, synth);
    if (validate->parsed()) return cmd_validate(va, out, validate);
  } catch (const Error& e) {
    emit_error(error_json(e));
    return e.code() == ErrorCode::NoSeparableStructure ? 2 : 1;
  } catch (const std::exception& e) {
    emit_error(error_json(e));
    return 1;
  }
  return 0;
}
