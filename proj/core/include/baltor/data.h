#ifndef BALTOR_DATA_H_
#define BALTOR_DATA_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace baltor {

// One line of a LETOR/SVMLight file.
struct DatasetRow {
  int relevance = 0;
  std::string query_id;
  std::vector<double> features;
  std::optional<std::string> doc_id;

  bool operator==(const DatasetRow&) const = default;
};

// Rows with densified features. All rows share `feature_dim`.
//
// `labeled` is false only for files whose lines omit the leading relevance
// grade (allowed for calibration data, where labels are not needed). In that
// case every relevance is 0 and must not be interpreted.
struct Dataset {
  std::vector<DatasetRow> rows;
  std::size_t feature_dim = 0;
  bool labeled = true;

  bool operator==(const Dataset&) const = default;
};

struct ParseOptions {
  // Accept lines of the form `qid:<id> <fid>:<val> ...` without a grade.
  // A file must be uniformly labeled or uniformly unlabeled.
  bool allow_unlabeled = false;
};

// Parses `<rel> qid:<id> <fid>:<val> ... [# comment]` lines. Feature ids are
// 1-based; missing ids densify to 0.0. A comment containing `docid = <tok>`
// yields `<tok>` as doc_id, any other non-empty comment is kept verbatim
// (trimmed). Throws ParseError carrying the 1-based line number.
Dataset ParseLetor(std::istream& in, const ParseOptions& options = {});
Dataset ParseLetor(std::string_view text, const ParseOptions& options = {});
Dataset LoadLetorFile(const std::string& path, const ParseOptions& options = {});

// Inverse of ParseLetor. Values are printed in shortest round-trip form and
// only non-zero features are written; doc ids go to a `# docid = ` comment.
std::string WriteLetor(const Dataset& dataset);

// Pads every row with zeros up to `dim`. Throws ArgumentError if `dim` is
// smaller than the current feature_dim.
void PadFeatures(Dataset& dataset, std::size_t dim);

struct QueryItem {
  std::vector<double> features;
  int relevance = 0;
  std::optional<std::string> doc_id;
  // Index of the originating row in the Dataset.
  std::size_t row = 0;
};

struct QueryGroup {
  std::string query_id;
  std::vector<QueryItem> items;
};

// Groups rows by query id. Groups appear in first-appearance order and keep
// file order within each group.
std::vector<QueryGroup> GroupByQuery(const Dataset& dataset);

// sign(rel_i - rel_j): +1 when item i is preferred, -1 when j is, 0 for a tie.
int PairLabel(int rel_i, int rel_j);

// An unordered within-query pair, stored with i < j. The reversed
// orientation carries the negated label.
struct PairInstance {
  std::string query_id;
  std::size_t i = 0;
  std::size_t j = 0;
  int label = 0;

  PairInstance Reversed() const { return {query_id, j, i, -label}; }
  bool operator==(const PairInstance&) const = default;
};

// All m(m-1)/2 pairs of a group, in (0,1),(0,2),...,(m-2,m-1) order.
std::vector<PairInstance> EnumeratePairs(const QueryGroup& group);

// A pair together with the index of the group it belongs to, so that item
// features can be looked up without searching by query id.
struct GroupedPair {
  std::size_t group = 0;
  PairInstance pair;
};

// Concatenation of EnumeratePairs over all groups.
std::vector<GroupedPair> EnumerateAllPairs(const std::vector<QueryGroup>& groups);

struct SynthConfig {
  int n_queries = 1;
  int items_per_query = 2;
  int feature_dim = 1;
  int n_grades = 2;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset dataset;
  std::vector<double> true_weights;
};

// Synthetic ranking data. Features are i.i.d. N(0,1), the latent score is
// w*.x + N(0, noise_sd^2), and grades are equal-mass quantile bins of the
// latent score within each query, so ties are frequent when n_grades is small
// relative to items_per_query. Query ids are "1".."n_queries".
SynthResult SynthGenerate(const SynthConfig& config);

}  // namespace baltor

#endif  // BALTOR_DATA_H_
