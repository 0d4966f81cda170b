#include "reloc/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "reloc/format.hpp"

namespace reloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumExceedsOne: return "RowSumExceedsOne";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::Periodic: return "Periodic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::StateCapExceeded: return "StateCapExceeded";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::InvalidArgument, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix out(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != out.cols()) throw Error(ErrorCode::InvalidArgument, "ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> Matrix::row_sums() const {
  std::vector<double> sums(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (double x : row(i)) sums[i] += x;
  }
  return sums;
}

double Matrix::max_row_sum() const {
  const auto sums = row_sums();
  return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

double Matrix::min_entry() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::scaled(double c) const {
  Matrix out = *this;
  for (double& x : out.data_) x *= c;
  return out;
}

void Matrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    const auto r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

void Matrix::left_multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) y[j] += x[i] * r[j];
  }
}

std::vector<double> Matrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

StateSpace::StateSpace(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "state space must be nonempty");
  labels_.reserve(m);
  for (std::size_t i = 0; i < m; ++i) labels_.push_back(std::to_string(i + 1));
}

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::InvalidArgument, "state space must be nonempty");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate state label '" + l + "'");
  }
}

std::size_t StateSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown state label '" + std::string(label) + "'");
}

GraphStructure analyze_digraph(std::span<const std::size_t> offsets, std::span<const std::size_t> targets) {
  const std::size_t n = offsets.size() - 1;
  GraphStructure out;
  if (n == 0) return out;

  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> depth(n, kUnseen);
  std::queue<std::size_t> frontier;
  depth[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t e = offsets[u]; e < offsets[u + 1]; ++e) {
      const std::size_t v = targets[e];
      if (depth[v] == kUnseen) {
        depth[v] = depth[u] + 1;
        frontier.push(v);
      }
    }
  }
  if (std::find(depth.begin(), depth.end(), kUnseen) != depth.end()) return out;

  // Reverse reachability from node 0.
  std::vector<std::size_t> in_count(n + 1, 0);
  for (std::size_t e = 0; e < targets.size(); ++e) ++in_count[targets[e] + 1];
  std::partial_sum(in_count.begin(), in_count.end(), in_count.begin());
  std::vector<std::size_t> rev(targets.size());
  std::vector<std::size_t> fill(in_count.begin(), in_count.end() - 1);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t e = offsets[u]; e < offsets[u + 1]; ++e) rev[fill[targets[e]]++] = u;

  std::vector<char> seen(n, 0);
  seen[0] = 1;
  std::size_t reached = 1;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t e = in_count[u]; e < in_count[u + 1]; ++e) {
      const std::size_t v = rev[e];
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  if (reached != n) return out;
  out.strongly_connected = true;

  std::size_t g = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t e = offsets[u]; e < offsets[u + 1]; ++e) {
      const std::size_t v = targets[e];
      const auto diff = static_cast<long long>(depth[u]) + 1 - static_cast<long long>(depth[v]);
      g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
    }
  }
  out.period = g;
  return out;
}

StructureFlags structure_flags(const Matrix& raw) {
  if (!raw.is_square()) throw Error(ErrorCode::NotSquare, "structure_flags needs a square matrix");
  const std::size_t m = raw.rows();
  std::vector<std::size_t> offsets(m + 1, 0);
  std::vector<std::size_t> targets;
  bool positive = m > 0;
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t t = 0; t < m; ++t) {
      if (raw(s, t) > 0.0) {
        targets.push_back(t);
      } else {
        positive = false;
      }
    }
    offsets[s + 1] = targets.size();
  }
  const GraphStructure g = analyze_digraph(offsets, targets);
  return {g.strongly_connected, g.strongly_connected && g.period == 1, positive};
}

SubStochasticMatrix validate_substochastic(const Matrix& raw, std::vector<std::string> labels) {
  if (!raw.is_square() || raw.rows() == 0) {
    throw Error(ErrorCode::NotSquare, "expected a nonempty square matrix");
  }
  const std::size_t m = raw.rows();
  Matrix entries = raw;
  for (std::size_t s = 0; s < m; ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const double x = entries(s, t);
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(s + 1) + "," + std::to_string(t + 1) + ") = " + format_real(x));
      }
      sum += x;
    }
    if (sum > 1.0 + kRowSumTolerance) {
      throw Error(ErrorCode::RowSumExceedsOne, "row " + std::to_string(s + 1) + " sums to " + format_real(sum));
    }
    if (sum > 1.0) {
      for (double& x : entries.row(s)) x /= sum;
    }
  }

  StateSpace space = labels.empty() ? StateSpace(m) : StateSpace(std::move(labels));
  if (space.size() != m) throw Error(ErrorCode::InvalidArgument, "label count does not match matrix size");

  const StructureFlags flags = structure_flags(entries);
  if (!flags.irreducible) throw Error(ErrorCode::Reducible, "support digraph is not strongly connected");
  if (!flags.aperiodic) throw Error(ErrorCode::Periodic, "support digraph has period > 1");

  SubStochasticMatrix out(std::move(space), std::move(entries));
  out.flags_ = flags;
  const auto sums = out.entries_.row_sums();
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  out.proportional_ = (*hi - *lo) <= kRowSumTolerance;
  if (out.proportional_) {
    out.warnings_.push_back("matrix is proportional to a stochastic matrix; relocations cannot change the persistence rate");
  }
  return out;
}

namespace {

double parse_number(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Matrix parse_matrix_text(std::string_view text) {
  std::vector<std::pair<std::string_view, std::size_t>> tokens;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\n' && text[i] != '\r') ++i;
    tokens.emplace_back(text.substr(start, i - start), line);
  }
  if (tokens.empty()) throw Error(ErrorCode::ParseError, "empty matrix text");

  const double m_real = parse_number(tokens[0].first, tokens[0].second);
  if (m_real < 1 || m_real != std::floor(m_real)) {
    throw Error(ErrorCode::ParseError, "line 1: matrix size must be a positive integer");
  }
  const auto m = static_cast<std::size_t>(m_real);
  if (tokens.size() != 1 + m * m) {
    throw Error(ErrorCode::ParseError, "expected " + std::to_string(m * m) + " entries, found " +
                                           std::to_string(tokens.size() - 1));
  }
  Matrix out(m, m);
  for (std::size_t k = 0; k < m * m; ++k) {
    out(k / m, k % m) = parse_number(tokens[k + 1].first, tokens[k + 1].second);
  }
  return out;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open matrix file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix_text(buffer.str());
}

std::string format_matrix_text(const Matrix& m) {
  std::string out = std::to_string(m.rows()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_real(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix benchmark_sigma() { return Matrix{{0.72, 0.08}, {0.18, 0.58}}; }

}  // namespace reloc
