#include "cbn/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "cbn/baselines.hpp"
#include "cbn/cbn.hpp"
#include "cbn/eval.hpp"
#include "cbn/homology.hpp"
#include "cbn/ingest.hpp"
#include "cbn/io.hpp"
#include "cbn/synth.hpp"

namespace cbn {
namespace {

using nlohmann::json;

// Bad flag values detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kTauRule =
    "upper boxplot whisker: largest pooled relative change <= Q3 + 1.5*IQR, quartiles by "
    "linear interpolation at position 1+(n-1)p (type 7); undefined changes excluded";

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buffer;
  body(buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", path));
  out << buffer.str();
  if (!out) throw ParseError(fmt::format("failed writing '{}'", path));
}

std::optional<double> parse_tau(const std::string& text, const char* name) {
  if (text == "auto") return std::nullopt;
  double value = 0.0;
  try {
    value = parse_double(text);
  } catch (const ParseError&) {
    throw UsageError(fmt::format("--{} must be 'auto' or a nonnegative number, got '{}'", name, text));
  }
  if (value < 0.0) throw UsageError(fmt::format("--{} must be nonnegative", name));
  return value;
}

unsigned default_threads() {
  if (const char* env = std::getenv("CBN_THREADS")) {
    try {
      const double v = parse_double(env);
      if (v >= 1 && v == static_cast<unsigned>(v)) return static_cast<unsigned>(v);
    } catch (const ParseError&) {
    }
  }
  return 1;
}

DistanceSpec make_distance(const std::string& kind, const std::string& matrix_path) {
  DistanceSpec spec;
  try {
    spec.kind = parse_distance_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (spec.kind == DistanceKind::Precomputed) {
    if (matrix_path.empty()) throw UsageError("--distance precomputed needs --matrix");
    spec.precomputed = read_distance_matrix_csv(matrix_path);
  } else if (!matrix_path.empty()) {
    throw UsageError("--matrix is only valid with --distance precomputed");
  }
  return spec;
}

std::vector<std::string> point_ids(const PointCloud& cloud) {
  std::vector<std::string> ids(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) ids[i] = cloud.id(i);
  return ids;
}

ShapeSpec shape_from_json(const json& j) {
  ShapeSpec s;
  s.kind = parse_shape_kind(j.at("kind").get<std::string>());
  const auto center = j.at("center").get<std::vector<double>>();
  if (center.size() != 2) throw ParseError("shape center must have two coordinates");
  s.center = {center[0], center[1]};
  s.scale = j.at("scale").get<double>();
  s.count = j.at("count").get<std::size_t>();
  s.rotation = j.value("rotation", s.rotation);
  s.inner = j.value("inner", s.inner);
  s.offset = j.value("offset", s.offset);
  s.aspect = j.value("aspect", s.aspect);
  s.amplitude = j.value("amplitude", s.amplitude);
  s.waves = j.value("waves", s.waves);
  return s;
}

std::pair<std::vector<ShapeSpec>, Box> read_shapes_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  try {
    const json doc = json::parse(in);
    std::vector<ShapeSpec> shapes;
    for (const auto& j : doc.at("shapes")) shapes.push_back(shape_from_json(j));
    const auto b = doc.at("box").get<std::vector<double>>();
    if (b.size() != 4) throw ParseError("box must be [xmin, ymin, xmax, ymax]");
    return {shapes, Box{b[0], b[1], b[2], b[3]}};
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()));
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()));
  }
}

// ------------------------------------------------------------ subcommands

struct GenerateArgs {
  bool benchmark = false;
  std::string shapes;
  std::size_t noise = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string truth;
};

int cmd_generate(const GenerateArgs& a, std::ostream&) {
  if (a.benchmark == !a.shapes.empty()) {
    throw UsageError("give exactly one of --benchmark13 and --shapes");
  }
  SyntheticDataset data = [&] {
    if (a.benchmark) return benchmark13(a.seed, a.noise);
    const auto [shapes, box] = read_shapes_json(a.shapes);
    return generate(shapes, a.noise, box, a.seed);
  }();
  write_file(a.out, [&](std::ostream& os) { write_dataset_csv(os, data); });
  if (!a.truth.empty()) {
    write_file(a.truth,
               [&](std::ostream& os) { write_partition_csv(os, point_ids(data.cloud), data.truth); });
  }
  return kExitOk;
}

struct ClusterArgs {
  std::string input;
  std::string out;
  std::size_t k = 12;
  std::string tau0 = "auto";
  std::string tau1 = "auto";
  std::string mode = "strong";
  std::size_t min_cluster_size = 0;
  std::size_t grid_size = 100;
  double grid_step = 0.01;
  std::string distance = "euclidean";
  std::string matrix;
  bool no_refine = false;
  std::string report;
  std::string format = "json";
  std::string betti_out;
  std::string summary_out;
  unsigned threads = 1;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
  TuningParams params;
  params.tau0 = parse_tau(a.tau0, "tau0");
  params.tau1 = parse_tau(a.tau1, "tau1");
  try {
    params.mode = parse_component_mode(a.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.min_cluster_size > 0) params.min_cluster_size = a.min_cluster_size;
  params.refine = !a.no_refine;
  if (a.threads < 1) throw UsageError("--threads must be at least 1");
  const ThresholdGrid grid = [&] {
    try {
      return ThresholdGrid::uniform(a.grid_size, a.grid_step);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();

  const auto distance = make_distance(a.distance, a.matrix);
  const auto cloud = read_point_cloud_csv(a.input);
  const auto result = run_cbn(cloud, distance, a.k, params, grid, a.threads);
  const auto ids = point_ids(cloud);

  write_file(a.out, [&](std::ostream& os) { write_partition_csv(os, ids, result.partition); });

  const auto sizes = result.partition.cluster_sizes();
  const auto singletons = static_cast<std::size_t>(std::count(sizes.begin(), sizes.end(), 1));
  auto emit_report = [&](std::ostream& os) {
    if (a.format == "json") {
      json report = {
          {"points", cloud.size()},
          {"k", a.k},
          {"mode", to_string(params.mode)},
          {"refined", params.refine},
          {"grid", {{"size", grid.size()}, {"step", a.grid_step}}},
          {"clusters", result.partition.cluster_count()},
          {"singleton_clusters", singletons},
          {"undefined_changes",
           {{"beta0", result.changes.undefined_beta0}, {"beta1", result.changes.undefined_beta1}}},
      };
      if (params.refine) {
        report["tau0"] = result.taus.tau0;
        report["tau1"] = result.taus.tau1;
        report["tau0_auto"] = result.tau0_auto;
        report["tau1_auto"] = result.tau1_auto;
        report["tau_rule"] = kTauRule;
      }
      os << report.dump(2) << '\n';
    } else {
      os << "key,value\n";
      fmt::print(os, "points,{}\nk,{}\nmode,{}\nrefined,{}\nclusters,{}\nsingleton_clusters,{}\n",
                 cloud.size(), a.k, to_string(params.mode), params.refine ? "true" : "false",
                 result.partition.cluster_count(), singletons);
      if (params.refine) {
        fmt::print(os, "tau0,{:.17g}\ntau1,{:.17g}\ntau0_auto,{}\ntau1_auto,{}\ntau_rule,\"{}\"\n",
                   result.taus.tau0, result.taus.tau1, result.tau0_auto, result.tau1_auto, kTauRule);
      }
    }
  };
  if (a.report.empty()) {
    emit_report(out);
  } else {
    write_file(a.report, emit_report);
  }

  if (!a.betti_out.empty()) {
    write_file(a.betti_out, [&](std::ostream& os) {
      os << "id";
      for (std::size_t j = 0; j < grid.size(); ++j) os << ",b0_" << j;
      for (std::size_t j = 0; j < grid.size(); ++j) os << ",b1_" << j;
      os << '\n';
      for (std::size_t i = 0; i < result.profiles.size(); ++i) {
        os << ids[i];
        for (int v : result.profiles[i].beta0) os << ',' << v;
        for (int v : result.profiles[i].beta1) os << ',' << v;
        os << '\n';
      }
    });
  }
  if (!a.summary_out.empty()) {
    const auto rows = betti_dynamics_summary(result.profiles);
    write_file(a.summary_out, [&](std::ostream& os) {
      os << "threshold,b0_min,b0_q1,b0_median,b0_q3,b0_max,b1_min,b1_q1,b1_median,b1_q3,b1_max\n";
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& b0 = rows[j].beta0;
        const auto& b1 = rows[j].beta1;
        fmt::print(os, "{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n",
                   grid[j], b0.min, b0.q1, b0.median, b0.q3, b0.max, b1.min, b1.q1, b1.median, b1.q3,
                   b1.max);
      }
    });
  }
  return kExitOk;
}

struct BaselineArgs {
  std::string input;
  std::string out;
  std::string algorithm;
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::size_t max_iter = 300;
  std::string linkage = "single";
  std::optional<double> cut_height;
  std::optional<std::size_t> clusters;
  double eps = 0.0;
  std::size_t min_pts = 4;
  std::string distance = "euclidean";
  std::string matrix;
  std::string dendrogram_out;
};

int cmd_baseline(const BaselineArgs& a, std::ostream&) {
  const auto distance = make_distance(a.distance, a.matrix);
  if (a.algorithm == "hierarchical" && a.cut_height && a.clusters) {
    throw UsageError("give at most one of --cut-height and --clusters");
  }
  if (a.algorithm == "dbscan" && !(a.eps > 0.0)) throw UsageError("--eps must be positive");
  if (a.algorithm == "kmeans" && distance.kind != DistanceKind::Euclidean) {
    throw UsageError("k-means works on Euclidean coordinates only");
  }
  Linkage linkage = Linkage::Single;
  try {
    linkage = parse_linkage(a.linkage);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto cloud = read_point_cloud_csv(a.input);
  Partition partition;
  if (a.algorithm == "kmeans") {
    partition = kmeans(cloud, a.k, a.seed, a.max_iter).partition;
  } else if (a.algorithm == "hierarchical") {
    DendrogramCut cut = DendrogramCut::largest_gap();
    if (a.cut_height) cut = DendrogramCut::at_height(*a.cut_height);
    if (a.clusters) cut = DendrogramCut::into(*a.clusters);
    const auto result = hierarchical(build_distance_matrix(cloud, distance), linkage, cut);
    partition = result.partition;
    if (!a.dendrogram_out.empty()) {
      write_file(a.dendrogram_out, [&](std::ostream& os) {
        os << "step,left,right,height,size\n";
        for (std::size_t i = 0; i < result.dendrogram.merges.size(); ++i) {
          const auto& m = result.dendrogram.merges[i];
          fmt::print(os, "{},{},{},{:.17g},{}\n", i, m.left, m.right, m.height, m.size);
        }
      });
    }
  } else {
    partition = dbscan(build_distance_matrix(cloud, distance), a.eps, a.min_pts);
  }
  write_file(a.out, [&](std::ostream& os) { write_partition_csv(os, point_ids(cloud), partition); });
  return kExitOk;
}

struct EvaluateArgs {
  std::string reference;
  std::string candidate;
  std::string format = "json";
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto reference = read_partition_csv(a.reference);
  const auto candidate = read_partition_csv(a.candidate);
  const auto aligned = align_partition(reference, candidate);
  const auto counts = pair_counts(reference.partition, aligned);
  const double ri = rand_index(counts);
  const double jac = jaccard_index(counts);
  auto emit = [&](std::ostream& os) {
    if (a.format == "json") {
      const json doc = {{"points", reference.ids.size()},
                        {"tp", counts.tp},
                        {"tn", counts.tn},
                        {"fp", counts.fp},
                        {"fn", counts.fn},
                        {"rand", ri},
                        {"jaccard", jac}};
      os << doc.dump(2) << '\n';
    } else {
      fmt::print(os, "points,tp,tn,fp,fn,rand,jaccard\n{},{},{},{},{},{:.6f},{:.6f}\n",
                 reference.ids.size(), counts.tp, counts.tn, counts.fp, counts.fn, ri, jac);
    }
  };
  if (a.out.empty()) {
    emit(out);
  } else {
    write_file(a.out, emit);
  }
  return kExitOk;
}

struct IngestArgs {
  std::string input;
  std::string out;
  std::string report;
  std::string window;
  std::string col_station = "station";
  std::string col_date = "date";
  std::string col_value = "value";
  std::string col_lat;
  std::string col_lon;
  std::string delimiter = "auto";
};

int cmd_ingest(const IngestArgs& a, std::ostream&, std::ostream& err) {
  const MonthWindow window = [&] {
    try {
      return MonthWindow::parse(a.window);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  ColumnMapping columns;
  columns.station = a.col_station;
  columns.date = a.col_date;
  columns.value = a.col_value;
  if (!a.col_lat.empty()) columns.latitude = a.col_lat;
  if (!a.col_lon.empty()) columns.longitude = a.col_lon;
  if (a.delimiter == "tab") {
    columns.delimiter = '\t';
  } else if (a.delimiter == "comma") {
    columns.delimiter = ',';
  } else if (a.delimiter != "auto") {
    throw UsageError("--delimiter must be auto, comma or tab");
  }

  const auto loaded = load_observations(std::filesystem::path(a.input), columns);
  if (loaded.skipped > 0) {
    fmt::print(err, "skipped {} unparseable row(s)\n", loaded.skipped);
    for (const auto& reason : loaded.skip_reasons) fmt::print(err, "  {}\n", reason);
  }
  const auto monthly = monthly_average(loaded.records, window);
  const auto imputed = impute_from_neighbors(monthly);
  const auto scaled = zscale(imputed.series);
  const auto cloud = to_point_cloud(scaled);

  write_file(a.out, [&](std::ostream& os) {
    write_point_cloud_csv(os, cloud, month_column_names(window));
  });
  const std::string report = a.report.empty() ? a.out + ".imputation.csv" : a.report;
  write_file(report, [&](std::ostream& os) { write_imputation_report(os, imputed.report); });
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clustering using Betti numbers, with baselines, evaluation, "
               "synthetic benchmarks and station time-series ingestion",
               "cbn"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  const std::vector<std::string> distance_kinds{"euclidean", "manhattan", "chebyshev", "precomputed"};

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a labelled synthetic dataset");
  generate_cmd->add_flag("--benchmark13", gen.benchmark, "Use the fixed 13-shape layout (3800 points)");
  generate_cmd->add_option("--shapes", gen.shapes, "JSON file with 'box' and 'shapes'")
      ->check(CLI::ExistingFile);
  generate_cmd->add_option("--noise", gen.noise, "Uniform noise points appended in the box");
  generate_cmd->add_option("--seed", gen.seed, "Random seed (mt19937_64)");
  generate_cmd->add_option("--out", gen.out, "Dataset CSV (x,y,label,is_noise)")->required();
  generate_cmd->add_option("--truth", gen.truth, "Ground-truth partition CSV (id,label)");

  ClusterArgs cl;
  cl.threads = default_threads();
  auto* cluster_cmd = app.add_subcommand("cluster", "Run CBN on a point CSV");
  cluster_cmd->add_option("--input", cl.input, "Point CSV with header")->required();
  cluster_cmd->add_option("--out", cl.out, "Partition CSV (id,label)")->required();
  cluster_cmd->add_option("--k", cl.k, "Neighborhood size, center included");
  cluster_cmd->add_option("--tau0", cl.tau0, "Betti-0 relative change bound or 'auto'");
  cluster_cmd->add_option("--tau1", cl.tau1, "Betti-1 relative change bound or 'auto'");
  cluster_cmd->add_option("--mode", cl.mode, "Connected components: strong or weak")
      ->check(CLI::IsMember({"strong", "weak"}));
  cluster_cmd->add_option("--min-cluster-size", cl.min_cluster_size,
                          "Reassign clusters smaller than this by Mahalanobis depth (0 = off)");
  cluster_cmd->add_option("--grid-size", cl.grid_size, "Number of thresholds l");
  cluster_cmd->add_option("--grid-step", cl.grid_step, "Threshold spacing (eps_j = step*(j-1))");
  cluster_cmd->add_option("--distance", cl.distance, "Distance kind")->check(CLI::IsMember(distance_kinds));
  cluster_cmd->add_option("--matrix", cl.matrix, "Precomputed distance matrix CSV");
  cluster_cmd->add_flag("--no-refine", cl.no_refine, "Skip the Betti refinement (kNN digraph only)");
  cluster_cmd->add_option("--report", cl.report, "Write the tau/cluster report here instead of stdout");
  cluster_cmd->add_option("--format", cl.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cluster_cmd->add_option("--betti-out", cl.betti_out, "Per-point Betti profiles CSV");
  cluster_cmd->add_option("--summary-out", cl.summary_out, "Per-threshold Betti quartile table CSV");
  cluster_cmd->add_option("--threads", cl.threads, "Worker threads (default from CBN_THREADS)")
      ->check(CLI::PositiveNumber);

  BaselineArgs bl;
  auto* baseline_cmd = app.add_subcommand("baseline", "Run k-means, hierarchical or DBSCAN");
  baseline_cmd->add_option("--input", bl.input, "Point CSV with header")->required();
  baseline_cmd->add_option("--out", bl.out, "Partition CSV (id,label; noise = -1)")->required();
  baseline_cmd->add_option("--algorithm", bl.algorithm, "kmeans, hierarchical or dbscan")
      ->required()
      ->check(CLI::IsMember({"kmeans", "hierarchical", "dbscan"}));
  baseline_cmd->add_option("--k", bl.k, "k-means cluster count K");
  baseline_cmd->add_option("--seed", bl.seed, "k-means seeding seed");
  baseline_cmd->add_option("--max-iter", bl.max_iter, "k-means iteration cap");
  baseline_cmd->add_option("--linkage", bl.linkage, "single, complete or average")
      ->check(CLI::IsMember({"single", "complete", "average"}));
  baseline_cmd->add_option("--cut-height", bl.cut_height, "Keep merges below this height");
  baseline_cmd->add_option("--clusters", bl.clusters, "Cut into this many clusters");
  baseline_cmd->add_option("--eps", bl.eps, "DBSCAN radius");
  baseline_cmd->add_option("--min-pts", bl.min_pts, "DBSCAN core threshold (self included)");
  baseline_cmd->add_option("--distance", bl.distance, "Distance kind")->check(CLI::IsMember(distance_kinds));
  baseline_cmd->add_option("--matrix", bl.matrix, "Precomputed distance matrix CSV");
  baseline_cmd->add_option("--dendrogram-out", bl.dendrogram_out, "Merge table CSV (hierarchical)");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Rand and Jaccard indexes of two partitions");
  evaluate_cmd->add_option("--reference", ev.reference, "Reference partition CSV")->required();
  evaluate_cmd->add_option("--candidate", ev.candidate, "Candidate partition CSV")->required();
  evaluate_cmd->add_option("--format", ev.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  evaluate_cmd->add_option("--out", ev.out, "Write here instead of stdout");

  IngestArgs in;
  auto* ingest_cmd = app.add_subcommand("ingest", "Monthly station series to a scaled point CSV");
  ingest_cmd->add_option("--input", in.input, "Observation CSV/TSV")->required();
  ingest_cmd->add_option("--out", in.out, "Point CSV (id + one column per month)")->required();
  ingest_cmd->add_option("--report", in.report, "Imputation report CSV (default: <out>.imputation.csv)");
  ingest_cmd->add_option("--window", in.window, "Inclusive month range YYYY-MM:YYYY-MM")->required();
  ingest_cmd->add_option("--col-station", in.col_station, "Station id column");
  ingest_cmd->add_option("--col-date", in.col_date, "Date column (YYYY-MM-DD or MM/DD/YYYY)");
  ingest_cmd->add_option("--col-value", in.col_value, "Measurement column");
  ingest_cmd->add_option("--col-lat", in.col_lat, "Latitude column (decimal degrees)");
  ingest_cmd->add_option("--col-lon", in.col_lon, "Longitude column (decimal degrees)");
  ingest_cmd->add_option("--delimiter", in.delimiter, "auto, comma or tab")
      ->check(CLI::IsMember({"auto", "comma", "tab"}));

  std::vector<const char*> argv{"cbn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, out);
    if (*cluster_cmd) return cmd_cluster(cl, out);
    if (*baseline_cmd) return cmd_baseline(bl, out);
    if (*evaluate_cmd) return cmd_evaluate(ev, out);
    if (*ingest_cmd) return cmd_ingest(in, out, err);
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    fmt::print(err, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitAlgorithm;
  }
  return kExitUsage;
}

}  // namespace cbn
