#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "baltor/abstain.h"
#include "baltor/data.h"
#include "baltor/errors.h"
#include "baltor/eval.h"
#include "baltor/oracle.h"
#include "baltor/probmodel.h"
#include "baltor/scorer.h"

namespace baltor::cli {
namespace {

namespace fs = std::filesystem;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct RunConfig {
  std::string data;
  std::string model = "bt";
  std::string scorer = "builtin";
  std::string grid = "0.99,0.95,0.90,0.85,0.80,0.75,0.70";
  std::string mode = "det";
  std::string theta = "auto";
  bool standardize = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string baselines = "balto,entropy,random";
  std::string model_file;
  std::string policies_file;
  TrainConfig train;
};

std::vector<std::string_view> SplitComma(std::string_view s) {
  std::vector<std::string_view> parts;
  while (true) {
    const std::size_t comma = s.find(',');
    std::string_view part = s.substr(0, comma);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) parts.push_back(part);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return parts;
}

double ParseDoubleOr(std::string_view text, int code, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw CliError(code, fmt::format("invalid {} '{}'", what, text));
  }
  return v;
}

// Values in (0, 1], sorted strictly decreasing.
std::vector<double> ParseGrid(std::string_view text) {
  std::vector<double> grid;
  for (auto part : SplitComma(text)) {
    const double c = ParseDoubleOr(part, kExitSchemaMismatch, "coverage");
    if (!(c > 0.0 && c <= 1.0)) {
      throw CliError(kExitSchemaMismatch, fmt::format("coverage {} outside (0, 1]", c));
    }
    grid.push_back(c);
  }
  if (grid.empty()) throw CliError(kExitSchemaMismatch, "empty coverage grid");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<Method> ParseMethods(std::string_view text) {
  std::set<Method> methods;
  for (auto part : SplitComma(text)) {
    try {
      methods.insert(ParseMethod(part));
    } catch (const ArgumentError& e) {
      throw CliError(kExitSchemaMismatch, e.what());
    }
  }
  return {methods.begin(), methods.end()};
}

bool Has(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

fs::path RequireFile(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw CliError(kExitMissingInput, fmt::format("missing input file: {}", path.string()));
  }
  return path;
}

fs::path SplitFile(const fs::path& data, std::string_view split) {
  if (fs::is_directory(data)) return RequireFile(data / fmt::format("{}.txt", split));
  return RequireFile(data);
}

Dataset LoadDataset(const fs::path& path, bool allow_unlabeled) {
  RequireFile(path);
  try {
    return LoadLetorFile(path.string(), ParseOptions{allow_unlabeled});
  } catch (const ParseError& e) {
    throw CliError(kExitSchemaMismatch, e.what());
  } catch (const Error& e) {
    throw CliError(kExitMissingInput, e.what());
  }
}

std::string ReadFile(const fs::path& path) {
  RequireFile(path);
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes to `path`, or to `out` when path is empty or "-".
void Emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path);
  if (!file) throw CliError(kExitMissingInput, fmt::format("cannot write {}", path));
  file << content;
}

std::string Join(const std::vector<double>& values, std::string_view sep) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    out += fmt::format("{}{}", k ? sep : "", values[k]);
  }
  return out;
}

Metadata Echo(const RunConfig& cfg) {
  return {{"data", cfg.data},
          {"model", cfg.model},
          {"scorer", cfg.scorer},
          {"grid", Join(ParseGrid(cfg.grid), ",")},
          {"mode", std::string(ToString(ParseSelectionMode(cfg.mode)))},
          {"theta", cfg.theta},
          {"standardize", cfg.standardize ? "1" : "0"},
          {"seed", std::to_string(cfg.seed)},
          {"baselines", cfg.baselines}};
}

std::string EchoComments(const Metadata& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += fmt::format("# {}={}\n", k, v);
  return out;
}

// --- model file -------------------------------------------------------------

struct ModelFile {
  std::string scorer = "builtin";
  std::string scores_root;
  ScoreModel model;
  double theta = 1.0;
  std::string theta_source = "auto";
  bool standardize = false;
  ScoreStandardizer standardizer;
  std::vector<double> loss_trace;
};

std::string SerializeModel(const ModelFile& m, const Metadata& echo) {
  std::string out = "# baltor model\n" + EchoComments(echo);
  out += fmt::format("scorer={}\n", m.scorer);
  if (m.scorer == "external") out += fmt::format("scores_path={}\n", m.scores_root);
  out += fmt::format("feature_dim={}\n", m.model.weights.size());
  out += fmt::format("weights={}\n", Join(m.model.weights, " "));
  out += fmt::format("bias={}\n", m.model.bias);
  out += fmt::format("theta={}\nepsilon={}\ntheta_source={}\n", m.theta, std::log(m.theta),
                     m.theta_source);
  out += fmt::format("standardize={}\nscore_mean={}\nscore_sd={}\n", m.standardize ? 1 : 0,
                     m.standardizer.mean, m.standardizer.sd);
  out += fmt::format("loss_trace={}\n", Join(m.loss_trace, " "));
  return out;
}

std::vector<double> ParseNumberList(std::string_view text, std::size_t line) {
  std::vector<double> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw CliError(kExitSchemaMismatch, fmt::format("model file line {}: bad number '{}'",
                                                      line, tok));
    }
    out.push_back(v);
  }
  return out;
}

double SingleNumber(std::string_view text, std::size_t line) {
  auto values = ParseNumberList(text, line);
  if (values.size() != 1) {
    throw CliError(kExitSchemaMismatch, fmt::format("model file line {}: expected one number",
                                                    line));
  }
  return values[0];
}

ModelFile ParseModel(const std::string& text) {
  ModelFile m;
  std::optional<std::size_t> dim;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw CliError(kExitSchemaMismatch, fmt::format("model file line {}: expected key=value",
                                                      line_no));
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "scorer") {
      m.scorer = value;
    } else if (key == "scores_path") {
      m.scores_root = value;
    } else if (key == "feature_dim") {
      dim = static_cast<std::size_t>(SingleNumber(value, line_no));
    } else if (key == "weights") {
      m.model.weights = ParseNumberList(value, line_no);
    } else if (key == "bias") {
      m.model.bias = SingleNumber(value, line_no);
    } else if (key == "theta") {
      m.theta = SingleNumber(value, line_no);
    } else if (key == "theta_source") {
      m.theta_source = value;
    } else if (key == "standardize") {
      m.standardize = SingleNumber(value, line_no) != 0.0;
    } else if (key == "score_mean") {
      m.standardizer.mean = SingleNumber(value, line_no);
    } else if (key == "score_sd") {
      m.standardizer.sd = SingleNumber(value, line_no);
    } else if (key == "loss_trace") {
      m.loss_trace = ParseNumberList(value, line_no);
    }
  }
  if (m.scorer != "builtin" && m.scorer != "external") {
    throw CliError(kExitSchemaMismatch, fmt::format("unknown scorer '{}' in model file", m.scorer));
  }
  if (dim && *dim != m.model.weights.size()) {
    throw CliError(kExitSchemaMismatch, "model file weights do not match feature_dim");
  }
  if (!(m.theta >= 1.0)) throw CliError(kExitSchemaMismatch, "model file theta must be >= 1");
  if (!m.standardize) m.standardizer = ScoreStandardizer::Identity();
  return m;
}

// --- scoring ----------------------------------------------------------------

struct ScorerSpec {
  bool external = false;
  std::string path;
};

ScorerSpec ParseScorer(std::string_view text) {
  if (text == "builtin") return {};
  if (text.starts_with("external:") && text.size() > 9) {
    return {true, std::string(text.substr(9))};
  }
  throw CliError(kExitSchemaMismatch,
                 fmt::format("scorer must be builtin or external:PATH, got '{}'", text));
}

// A directory root holds `<split>.scores` next to each `<split>.txt`; a plain
// file is used as is.
fs::path ExternalScoresFor(const fs::path& root, const fs::path& data_file) {
  if (fs::is_directory(root)) {
    return root / data_file.filename().replace_extension(".scores");
  }
  return root;
}

std::vector<double> RowScores(const ModelFile& m, Dataset& dataset, const fs::path& data_file) {
  if (m.scorer == "external") {
    const fs::path path = RequireFile(ExternalScoresFor(m.scores_root, data_file));
    std::ifstream in(path);
    try {
      return LoadExternalScores(in, dataset.rows.size());
    } catch (const FormatError& e) {
      throw CliError(kExitSchemaMismatch, fmt::format("{}: {}", path.string(), e.what()));
    }
  }
  const std::size_t dim = m.model.weights.size();
  if (dataset.feature_dim > dim) {
    throw CliError(kExitSchemaMismatch,
                   fmt::format("{} has {} features but the model expects {}", data_file.string(),
                               dataset.feature_dim, dim));
  }
  PadFeatures(dataset, dim);
  return ScoreRows(m.model, dataset);
}

ModelFile TrainModel(const RunConfig& cfg, const fs::path& train_file, const fs::path& scores_root) {
  Dataset train = LoadDataset(train_file, false);
  const auto groups = GroupByQuery(train);
  const auto pairs = EnumerateAllPairs(groups);

  ModelFile m;
  const ScorerSpec spec = ParseScorer(cfg.scorer);
  if (cfg.theta == "auto") {
    try {
      m.theta = EstimateTheta(pairs).theta();
    } catch (const Error& e) {
      throw CliError(kExitSchemaMismatch, fmt::format("{}: {}", train_file.string(), e.what()));
    }
  } else {
    std::string_view value = cfg.theta;
    if (value.starts_with("fixed:")) value.remove_prefix(6);
    m.theta = ParseDoubleOr(value, kExitSchemaMismatch, "theta");
    if (m.theta < 1.0) throw CliError(kExitSchemaMismatch, "theta must be >= 1");
    m.theta_source = "fixed";
  }

  if (spec.external) {
    m.scorer = "external";
    m.scores_root = scores_root.string();
    m.model = ScoreModel::Zero(train.feature_dim);
  } else {
    const auto training = MakeTrainingPairs(groups, pairs);
    if (training.empty()) {
      throw CliError(kExitSchemaMismatch,
                     fmt::format("{} has no non-tied pairs to train on", train_file.string()));
    }
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    TrainResult result = TrainLinearRanker(training, train.feature_dim, tc);
    m.model = std::move(result.model);
    m.loss_trace = std::move(result.loss_trace);
  }

  m.standardize = cfg.standardize;
  if (cfg.standardize) {
    const auto scores = RowScores(m, train, train_file);
    m.standardizer = scores.empty() ? ScoreStandardizer::Identity() : ScoreStandardizer::Fit(scores);
  }
  return m;
}

ScoredPairs ScoreSplit(const ModelFile& m, ProbModelKind kind, const fs::path& file,
                       bool allow_unlabeled) {
  Dataset dataset = LoadDataset(file, allow_unlabeled);
  const auto scores = RowScores(m, dataset, file);
  const auto groups = GroupByQuery(dataset);
  const auto pairs = EnumerateAllPairs(groups);
  return ScorePairs(groups, pairs, scores, kind, TieParams::FromTheta(m.theta), m.standardizer,
                    dataset.labeled);
}

// --- policies ---------------------------------------------------------------

struct PolicySet {
  ProbModelKind kind = ProbModelKind::kBradleyTerry;
  std::vector<SelectivePolicy> policies;
};

std::vector<SelectivePolicy> CalibrateSplit(const RunConfig& cfg, const ModelFile& m,
                                            ProbModelKind kind, const fs::path& vali_file) {
  const ScoredPairs cal = ScoreSplit(m, kind, vali_file, true);
  if (cal.size() == 0) {
    throw CliError(kExitEmptyCalibration,
                   fmt::format("{} yields no calibration pairs", vali_file.string()));
  }
  const auto grid = ParseGrid(cfg.grid);
  const auto mode = ParseSelectionMode(cfg.mode);
  std::vector<SelectivePolicy> policies;
  for (Method method : ParseMethods(cfg.baselines)) {
    if (method == Method::kRandom) continue;
    const ScoreKind score_kind = method == Method::kBaltor ? ScoreKind::kRisk : ScoreKind::kEntropy;
    const auto values = cal.Values(score_kind);
    for (double c : grid) {
      policies.push_back(CalibratePolicy(score_kind, values, c, mode, cfg.seed));
    }
  }
  return policies;
}

std::string SerializePolicies(const PolicySet& set, const ModelFile& m, const Metadata& echo) {
  std::string out = "# baltor policies\n" + EchoComments(echo);
  out += fmt::format("# theta_resolved={}\n", m.theta);
  out += fmt::format("model={}\n", ToString(set.kind));
  for (const auto& p : set.policies) out += "\n[policy]\n" + SerializePolicy(p);
  return out;
}

PolicySet ParsePolicies(const std::string& text) {
  PolicySet set;
  const std::string marker = "[policy]";
  std::size_t first = text.find(marker);
  std::string_view header = std::string_view(text).substr(0, first);
  std::istringstream hin{std::string(header)};
  std::string line;
  bool seen_model = false;
  while (std::getline(hin, line)) {
    if (line.starts_with("model=")) {
      try {
        set.kind = ParseProbModelKind(line.substr(6));
      } catch (const ArgumentError& e) {
        throw CliError(kExitSchemaMismatch, e.what());
      }
      seen_model = true;
    }
  }
  if (!seen_model) throw CliError(kExitSchemaMismatch, "policies file lacks model=bt|tm");
  while (first != std::string::npos) {
    const std::size_t begin = first + marker.size();
    const std::size_t next = text.find(marker, begin);
    try {
      set.policies.push_back(DeserializePolicy(std::string_view(text).substr(
          begin, next == std::string::npos ? std::string::npos : next - begin)));
    } catch (const ParseError& e) {
      throw CliError(kExitSchemaMismatch, fmt::format("policies file: {}", e.what()));
    }
    first = next;
  }
  return set;
}

// --- folds ------------------------------------------------------------------

struct FoldPaths {
  std::string name;
  fs::path dir;
};

bool IsSplitDir(const fs::path& dir) {
  return fs::is_regular_file(dir / "train.txt") && fs::is_regular_file(dir / "vali.txt") &&
         fs::is_regular_file(dir / "test.txt");
}

std::vector<FoldPaths> DiscoverFolds(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw CliError(kExitMissingInput,
                   fmt::format("{} is not a directory with train/vali/test splits", root.string()));
  }
  if (IsSplitDir(root)) return {{root.filename().string(), root}};
  std::vector<FoldPaths> folds;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && IsSplitDir(entry.path())) {
      folds.push_back({entry.path().filename().string(), entry.path()});
    }
  }
  std::sort(folds.begin(), folds.end(),
            [](const FoldPaths& a, const FoldPaths& b) { return a.name < b.name; });
  if (folds.empty()) {
    throw CliError(kExitMissingInput,
                   fmt::format("no train.txt/vali.txt/test.txt found under {}", root.string()));
  }
  return folds;
}

// --- subcommands ------------------------------------------------------------

int CmdTrain(const RunConfig& cfg, std::ostream& out) {
  const fs::path train_file = SplitFile(cfg.data, "train");
  const ScorerSpec spec = ParseScorer(cfg.scorer);
  ModelFile m = TrainModel(cfg, train_file, spec.path);
  Metadata echo = Echo(cfg);
  echo.emplace_back("epochs", std::to_string(cfg.train.epochs));
  echo.emplace_back("learning_rate", fmt::format("{}", cfg.train.learning_rate));
  echo.emplace_back("batch_size", std::to_string(cfg.train.batch_size));
  echo.emplace_back("l2", fmt::format("{}", cfg.train.l2));
  echo.emplace_back("mode_scorer", spec.external ? "pass-through" : "trained");
  Emit(cfg.out, SerializeModel(m, echo), out);
  return kExitOk;
}

int CmdCalibrate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model_file.empty()) throw CliError(kExitMissingInput, "--model-file is required");
  const ModelFile m = ParseModel(ReadFile(cfg.model_file));
  const fs::path vali_file = SplitFile(cfg.data, "vali");
  PolicySet set;
  set.kind = ParseProbModelKind(cfg.model);
  set.policies = CalibrateSplit(cfg, m, set.kind, vali_file);
  Emit(cfg.out, SerializePolicies(set, m, Echo(cfg)), out);
  return kExitOk;
}

int CmdSweep(const RunConfig& cfg, std::ostream& out) {
  const auto methods = ParseMethods(cfg.baselines);
  std::vector<EvalReport> reports;
  Metadata meta = Echo(cfg);
  meta.emplace_back("std", "sample (n-1)");

  SweepOptions options;
  options.grid = ParseGrid(cfg.grid);
  options.include_random = Has(methods, Method::kRandom);
  options.random_seed = cfg.seed;

  auto keep_methods = [&](std::vector<SelectivePolicy> policies) {
    std::erase_if(policies, [&](const SelectivePolicy& p) { return !Has(methods, MethodFor(p.kind)); });
    return policies;
  };

  if (!cfg.policies_file.empty()) {
    if (cfg.model_file.empty()) {
      throw CliError(kExitMissingInput, "--policies requires --model-file");
    }
    const ModelFile m = ParseModel(ReadFile(cfg.model_file));
    const PolicySet set = ParsePolicies(ReadFile(cfg.policies_file));
    const fs::path test_file = SplitFile(cfg.data, "test");
    options.fold = fs::is_directory(cfg.data) ? fs::path(cfg.data).filename().string() : "test";
    const ScoredPairs test = ScoreSplit(m, set.kind, test_file, false);
    const auto policies = keep_methods(set.policies);
    auto fold_reports = Sweep(test, policies, options);
    reports.insert(reports.end(), fold_reports.begin(), fold_reports.end());
    meta.emplace_back("model_kind", std::string(ToString(set.kind)));
    meta.emplace_back("theta_resolved", fmt::format("{}", m.theta));
  } else {
    const auto kind = ParseProbModelKind(cfg.model);
    meta.emplace_back("model_kind", std::string(ToString(kind)));
    const ScorerSpec spec = ParseScorer(cfg.scorer);
    for (const auto& fold : DiscoverFolds(cfg.data)) {
      ModelFile m;
      if (!cfg.model_file.empty()) {
        m = ParseModel(ReadFile(cfg.model_file));
      } else {
        fs::path scores_root = spec.path;
        if (spec.external && fs::is_directory(scores_root / fold.name)) scores_root /= fold.name;
        m = TrainModel(cfg, fold.dir / "train.txt", scores_root);
      }
      const auto policies = CalibrateSplit(cfg, m, kind, fold.dir / "vali.txt");
      const ScoredPairs test = ScoreSplit(m, kind, fold.dir / "test.txt", false);
      options.fold = fold.name;
      auto fold_reports = Sweep(test, keep_methods(policies), options);
      reports.insert(reports.end(), fold_reports.begin(), fold_reports.end());
      meta.emplace_back("theta_resolved." + fold.name, fmt::format("{}", m.theta));
    }
  }

  const auto aggregates = AggregateFolds(reports);
  std::ostringstream csv;
  WriteReportCsv(csv, reports, aggregates, meta);
  Emit(cfg.out, csv.str(), out);
  if (!cfg.out.empty() && cfg.out != "-") {
    std::ostringstream json;
    WriteReportJson(json, reports, aggregates, meta);
    Emit(fs::path(cfg.out).replace_extension(".json").string(), json.str(), out);
  }
  return kExitOk;
}

struct OracleConfig {
  int worlds = 200;
  int states = 3;
  int grid = 40;
  std::uint64_t seed = 0;
  std::string coverages = "0.3,0.5,0.7,0.9,1.0";
  std::string loss = "mixed";
  std::string out;
};

int CmdOracle(const OracleConfig& cfg, std::ostream& out) {
  if (cfg.states > static_cast<int>(kMaxOracleStates)) {
    throw CliError(kExitOracleSize, fmt::format("--states {} exceeds the exhaustive bound of {}",
                                                cfg.states, kMaxOracleStates));
  }
  if (cfg.states < 1 || cfg.worlds < 0) throw CliError(kExitSchemaMismatch, "invalid oracle sizes");
  if (cfg.grid < 20) throw CliError(kExitSchemaMismatch, "--grid-k must be at least 20");
  if (cfg.loss != "mixed" && cfg.loss != "zero-one" && cfg.loss != "random-symmetric") {
    throw CliError(kExitSchemaMismatch, fmt::format("unknown loss '{}'", cfg.loss));
  }
  const auto coverages = ParseGrid(cfg.coverages);

  std::string report = fmt::format(
      "# seed={}\n# worlds={}\n# states={}\n# grid_k={}\n# loss={}\n# coverages={}\n", cfg.seed,
      cfg.worlds, cfg.states, cfg.grid, cfg.loss, Join(coverages, ","));
  report += "world,m,loss,c,theorem_risk,brute_risk,gap,p1,p2,p3,coverage,feasible,ok\n";
  const double slack = 2.0 / cfg.grid;
  double max_gap = 0.0, min_gap = 0.0, max_residual = 0.0;
  int violations = 0;
  for (int w = 0; w < cfg.worlds; ++w) {
    WorldLoss loss = cfg.loss == "mixed" ? (w % 2 == 0 ? WorldLoss::kZeroOne
                                                       : WorldLoss::kRandomSymmetric)
                                         : ParseWorldLoss(cfg.loss);
    const FiniteWorld world =
        RandomWorld(static_cast<std::size_t>(cfg.states), cfg.seed + static_cast<std::uint64_t>(w),
                    loss);
    for (double c : coverages) {
      const auto g = TheoremSelector(world, c);
      const double theorem = SelectiveRisk(world, g);
      const auto brute = BruteForceOptimum(world, c, cfg.grid);
      const auto res = VerifyConditions(world, g, c);
      const double phi = Coverage(world, g);
      const double gap = brute.risk - theorem;
      const bool feasible = phi >= c - 1e-12;
      const bool ok = gap >= -1e-9 && gap <= slack && res.Max() <= 1e-9 && feasible;
      if (!ok) ++violations;
      max_gap = std::max(max_gap, gap);
      min_gap = std::min(min_gap, gap);
      max_residual = std::max(max_residual, res.Max());
      report += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", w, cfg.states,
                            ToString(loss), c, theorem, brute.risk, gap, res.p1, res.p2, res.p3,
                            phi, feasible ? 1 : 0, ok ? 1 : 0);
    }
  }
  report += fmt::format("# summary worlds={} max_gap={} min_gap={} max_residual={} violations={}\n",
                        cfg.worlds, max_gap, min_gap, max_residual, violations);
  Emit(cfg.out, report, out);
  return violations == 0 ? kExitOk : kExitBoundViolated;
}

struct SynthCliConfig {
  SynthConfig synth{300, 20, 10, 5, 1.0, 0};
  int folds = 1;
  std::string out;
};

Dataset Subset(const Dataset& d, const std::vector<QueryGroup>& groups, std::size_t begin,
               std::size_t end) {
  Dataset out;
  out.feature_dim = d.feature_dim;
  for (std::size_t g = begin; g < end; ++g) {
    for (const auto& item : groups[g].items) out.rows.push_back(d.rows[item.row]);
  }
  return out;
}

int CmdSynth(const SynthCliConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw CliError(kExitMissingInput, "--out DIR is required");
  if (cfg.folds != 1 && cfg.folds < 3) throw CliError(kExitSchemaMismatch, "--folds must be 1 or >= 3");
  SynthResult result;
  try {
    result = SynthGenerate(cfg.synth);
  } catch (const ArgumentError& e) {
    throw CliError(kExitSchemaMismatch, e.what());
  }
  const auto groups = GroupByQuery(result.dataset);
  const std::size_t n = groups.size();
  auto write = [&](const fs::path& dir, std::size_t tb, std::size_t te,
                   const std::vector<std::pair<std::size_t, std::size_t>>& train_parts,
                   std::size_t vb, std::size_t ve) {
    fs::create_directories(dir);
    Dataset train;
    train.feature_dim = result.dataset.feature_dim;
    for (auto [b, e] : train_parts) {
      auto part = Subset(result.dataset, groups, b, e);
      train.rows.insert(train.rows.end(), part.rows.begin(), part.rows.end());
    }
    Emit((dir / "train.txt").string(), WriteLetor(train), out);
    Emit((dir / "vali.txt").string(), WriteLetor(Subset(result.dataset, groups, vb, ve)), out);
    Emit((dir / "test.txt").string(), WriteLetor(Subset(result.dataset, groups, tb, te)), out);
  };
  if (cfg.folds == 1) {
    const std::size_t a = n * 3 / 5, b = n * 4 / 5;
    write(cfg.out, b, n, {{0, a}}, a, b);
  } else {
    const auto F = static_cast<std::size_t>(cfg.folds);
    auto bound = [&](std::size_t p) { return p * n / F; };
    for (std::size_t k = 0; k < F; ++k) {
      const std::size_t vk = (k + 1) % F;
      std::vector<std::pair<std::size_t, std::size_t>> train_parts;
      for (std::size_t p = 0; p < F; ++p) {
        if (p != k && p != vk) train_parts.emplace_back(bound(p), bound(p + 1));
      }
      write(fs::path(cfg.out) / fmt::format("Fold{}", k + 1), bound(k), bound(k + 1), train_parts,
            bound(vk), bound(vk + 1));
    }
  }
  Emit((fs::path(cfg.out) / "true_weights.txt").string(), Join(result.true_weights, "\n") + "\n",
       out);
  return kExitOk;
}

void AddPipelineFlags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--data", cfg.data, "Fold directory (train/vali/test.txt) or a single file")
      ->required();
  cmd->add_option("--model", cfg.model, "Pairwise probability model")
      ->check(CLI::IsMember({"bt", "tm"}));
  cmd->add_option("--scorer", cfg.scorer, "builtin or external:PATH");
  cmd->add_option("--grid", cfg.grid, "Comma-separated target coverages");
  cmd->add_option("--mode", cfg.mode, "Selection mode")->check(CLI::IsMember({"det", "rand"}));
  cmd->add_option("--theta", cfg.theta, "auto or a fixed value >= 1");
  cmd->add_flag("--standardize", cfg.standardize, "Standardize scores using training items");
  cmd->add_option("--seed", cfg.seed, "Seed for training, boundary coins and the random baseline");
  cmd->add_option("--out", cfg.out, "Output path (stdout when omitted)");
  cmd->add_option("--baselines", cfg.baselines, "Subset of balto,entropy,random");
  cmd->add_option("--epochs", cfg.train.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--lr", cfg.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", cfg.train.batch_size, "Mini-batch size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--l2", cfg.train.l2, "L2 penalty")->check(CLI::NonNegativeNumber);
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded-abstention pairwise learning to rank", "baltor"};
  app.require_subcommand(1);
  app.require_subcommand(1);

  RunConfig cfg;
  OracleConfig oracle;
  SynthCliConfig synth;

  auto* train = app.add_subcommand("train", "Train the builtin scorer and estimate theta");
  AddPipelineFlags(train, cfg);

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate selection thresholds per coverage");
  AddPipelineFlags(calibrate, cfg);
  calibrate->add_option("--model-file", cfg.model_file, "Model written by `train`")->required();

  auto* sweep = app.add_subcommand("sweep", "Evaluate selective metrics over the coverage grid");
  AddPipelineFlags(sweep, cfg);
  sweep->add_option("--model-file", cfg.model_file, "Model written by `train`");
  sweep->add_option("--policies", cfg.policies_file, "Policies written by `calibrate`");

  auto* oracle_cmd = app.add_subcommand("oracle", "Check the optimal selector on finite worlds");
  oracle_cmd->add_option("--worlds", oracle.worlds, "Number of random worlds");
  oracle_cmd->add_option("--states", oracle.states, "States per world (at most 4)");
  oracle_cmd->add_option("--grid-k", oracle.grid, "Brute-force grid resolution K");
  oracle_cmd->add_option("--seed", oracle.seed, "Base seed");
  oracle_cmd->add_option("--coverages", oracle.coverages, "Comma-separated target coverages");
  oracle_cmd->add_option("--loss", oracle.loss, "zero-one, random-symmetric or mixed");
  oracle_cmd->add_option("--out", oracle.out, "Output path (stdout when omitted)");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic LETOR fold layout");
  synth_cmd->add_option("--queries", synth.synth.n_queries, "Number of queries");
  synth_cmd->add_option("--items", synth.synth.items_per_query, "Items per query");
  synth_cmd->add_option("--dim", synth.synth.feature_dim, "Feature dimension");
  synth_cmd->add_option("--grades", synth.synth.n_grades, "Relevance grades");
  synth_cmd->add_option("--noise", synth.synth.noise_sd, "Latent score noise sd");
  synth_cmd->add_option("--seed", synth.synth.seed, "Seed");
  synth_cmd->add_option("--folds", synth.folds, "1 for a single split, >= 3 for FoldK rotation");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train) return CmdTrain(cfg, out);
    if (*calibrate) return CmdCalibrate(cfg, out);
    if (*sweep) return CmdSweep(cfg, out);
    if (*oracle_cmd) return CmdOracle(oracle, out);
    if (*synth_cmd) return CmdSynth(synth, out);
  } catch (const CliError& e) {
    err << "baltor: " << e.what() << '\n';
    return e.code();
  } catch (const ParseError& e) {
    err << "baltor: " << e.what() << '\n';
    return kExitSchemaMismatch;
  } catch (const Error& e) {
    err << "baltor: " << e.what() << '\n';
    return kExitSchemaMismatch;
  }
  return kExitOk;
}

}  // namespace baltor::cli
