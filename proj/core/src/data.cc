#include "baltor/data.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "baltor/errors.h"

namespace baltor {
namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && IsSpace(s[pos])) ++pos;
    std::size_t start = pos;
    while (pos < s.size() && !IsSpace(s[pos])) ++pos;
    if (pos > start) tokens.push_back(s.substr(start, pos - start));
  }
  return tokens;
}

template <typename T>
bool ParseNumber(std::string_view token, T& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// `docid = <token>` anywhere in the comment wins; otherwise the whole comment.
std::optional<std::string> ExtractDocId(std::string_view comment) {
  comment = Trim(comment);
  if (comment.empty()) return std::nullopt;
  std::size_t at = comment.find("docid");
  if (at != std::string_view::npos) {
    std::string_view rest = comment.substr(at + 5);
    std::size_t k = 0;
    while (k < rest.size() && IsSpace(rest[k])) ++k;
    if (k < rest.size() && rest[k] == '=') {
      ++k;
      while (k < rest.size() && IsSpace(rest[k])) ++k;
      std::size_t start = k;
      while (k < rest.size() && !IsSpace(rest[k])) ++k;
      if (k > start) return std::string(rest.substr(start, k - start));
    }
  }
  return std::string(comment);
}

struct SparseRow {
  DatasetRow row;
  std::vector<std::pair<std::size_t, double>> entries;
};

SparseRow ParseLine(std::string_view line, std::size_t line_no, const ParseOptions& options,
                    bool& labeled) {
  SparseRow out;
  std::size_t hash = line.find('#');
  if (hash != std::string_view::npos) {
    out.row.doc_id = ExtractDocId(line.substr(hash + 1));
    line = line.substr(0, hash);
  }
  auto tokens = SplitWhitespace(line);
  if (tokens.empty()) throw ParseError(line_no, "missing relevance and qid");

  std::size_t next = 0;
  if (tokens[0].starts_with("qid:")) {
    if (!options.allow_unlabeled) throw ParseError(line_no, "missing relevance grade");
    labeled = false;
  } else {
    int rel = 0;
    if (!ParseNumber(tokens[0], rel)) {
      throw ParseError(line_no, fmt::format("invalid relevance grade '{}'", tokens[0]));
    }
    if (rel < 0) throw ParseError(line_no, "relevance grade must be non-negative");
    out.row.relevance = rel;
    next = 1;
  }

  if (next >= tokens.size() || !tokens[next].starts_with("qid:")) {
    throw ParseError(line_no, "expected qid:<id>");
  }
  std::string_view qid = tokens[next].substr(4);
  if (qid.empty()) throw ParseError(line_no, "empty query id");
  out.row.query_id = std::string(qid);

  for (std::size_t t = next + 1; t < tokens.size(); ++t) {
    std::string_view tok = tokens[t];
    std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, fmt::format("expected <fid>:<value>, got '{}'", tok));
    }
    std::size_t fid = 0;
    if (!ParseNumber(tok.substr(0, colon), fid) || fid == 0) {
      throw ParseError(line_no, fmt::format("invalid feature id in '{}'", tok));
    }
    double value = 0.0;
    if (!ParseNumber(tok.substr(colon + 1), value)) {
      throw ParseError(line_no, fmt::format("non-numeric feature value in '{}'", tok));
    }
    out.entries.emplace_back(fid, value);
  }

  auto sorted = out.entries;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k].first == sorted[k - 1].first) {
      throw ParseError(line_no, fmt::format("duplicate feature id {}", sorted[k].first));
    }
  }
  return out;
}

}  // namespace

Dataset ParseLetor(std::istream& in, const ParseOptions& options) {
  std::vector<SparseRow> sparse;
  std::size_t max_fid = 0;
  std::optional<bool> file_labeled;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    bool labeled = true;
    SparseRow row = ParseLine(view, line_no, options, labeled);
    if (file_labeled && *file_labeled != labeled) {
      throw ParseError(line_no, "file mixes labeled and unlabeled rows");
    }
    file_labeled = labeled;
    for (const auto& [fid, value] : row.entries) max_fid = std::max(max_fid, fid);
    sparse.push_back(std::move(row));
  }

  Dataset dataset;
  dataset.feature_dim = max_fid;
  dataset.labeled = file_labeled.value_or(true);
  dataset.rows.reserve(sparse.size());
  for (auto& s : sparse) {
    s.row.features.assign(max_fid, 0.0);
    for (const auto& [fid, value] : s.entries) s.row.features[fid - 1] = value;
    dataset.rows.push_back(std::move(s.row));
  }
  return dataset;
}

Dataset ParseLetor(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return ParseLetor(in, options);
}

Dataset LoadLetorFile(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return ParseLetor(in, options);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

std::string WriteLetor(const Dataset& dataset) {
  std::string out;
  for (const auto& row : dataset.rows) {
    if (dataset.labeled) out += fmt::format("{} ", row.relevance);
    out += "qid:" + row.query_id;
    for (std::size_t f = 0; f < row.features.size(); ++f) {
      out += fmt::format(" {}:{}", f + 1, row.features[f]);
    }
    if (row.doc_id) {
      const std::string& id = *row.doc_id;
      bool single_token = std::none_of(id.begin(), id.end(), IsSpace);
      out += single_token ? " # docid = " + id : " # " + id;
    }
    out += '\n';
  }
  return out;
}

void PadFeatures(Dataset& dataset, std::size_t dim) {
  if (dim < dataset.feature_dim) {
    throw ArgumentError(fmt::format("cannot shrink feature dimension {} to {}",
                                    dataset.feature_dim, dim));
  }
  for (auto& row : dataset.rows) row.features.resize(dim, 0.0);
  dataset.feature_dim = dim;
}

std::vector<QueryGroup> GroupByQuery(const Dataset& dataset) {
  std::vector<QueryGroup> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    const auto& row = dataset.rows[r];
    auto [it, inserted] = index.try_emplace(row.query_id, groups.size());
    if (inserted) groups.push_back(QueryGroup{row.query_id, {}});
    groups[it->second].items.push_back(QueryItem{row.features, row.relevance, row.doc_id, r});
  }
  return groups;
}

int PairLabel(int rel_i, int rel_j) { return (rel_i > rel_j) - (rel_i < rel_j); }

std::vector<PairInstance> EnumeratePairs(const QueryGroup& group) {
  std::vector<PairInstance> pairs;
  const std::size_t m = group.items.size();
  if (m < 2) return pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      pairs.push_back({group.query_id, i, j,
                       PairLabel(group.items[i].relevance, group.items[j].relevance)});
    }
  }
  return pairs;
}

std::vector<GroupedPair> EnumerateAllPairs(const std::vector<QueryGroup>& groups) {
  std::vector<GroupedPair> all;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto& p : EnumeratePairs(groups[g])) all.push_back({g, std::move(p)});
  }
  return all;
}

SynthResult SynthGenerate(const SynthConfig& config) {
  if (config.n_queries <= 0 || config.items_per_query <= 0 || config.feature_dim <= 0) {
    throw ArgumentError("synthetic sizes must be positive");
  }
  if (config.n_grades < 2) throw ArgumentError("n_grades must be at least 2");
  if (!(config.noise_sd >= 0.0)) throw ArgumentError("noise_sd must be non-negative");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dim = static_cast<std::size_t>(config.feature_dim);
  const auto m = static_cast<std::size_t>(config.items_per_query);

  SynthResult result;
  result.true_weights.resize(dim);
  for (auto& w : result.true_weights) w = normal(rng);

  Dataset& d = result.dataset;
  d.feature_dim = dim;
  d.rows.reserve(static_cast<std::size_t>(config.n_queries) * m);
  std::vector<double> latent(m);
  std::vector<std::size_t> order(m);
  for (int q = 1; q <= config.n_queries; ++q) {
    const std::size_t first = d.rows.size();
    for (std::size_t k = 0; k < m; ++k) {
      DatasetRow row;
      row.query_id = std::to_string(q);
      row.features.resize(dim);
      double s = 0.0;
      for (std::size_t f = 0; f < dim; ++f) {
        row.features[f] = normal(rng);
        s += result.true_weights[f] * row.features[f];
      }
      latent[k] = s + config.noise_sd * normal(rng);
      d.rows.push_back(std::move(row));
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return latent[a] < latent[b]; });
    for (std::size_t rank = 0; rank < m; ++rank) {
      d.rows[first + order[rank]].relevance =
          static_cast<int>(rank * static_cast<std::size_t>(config.n_grades) / m);
    }
  }
  return result;
}

}  // namespace baltor
