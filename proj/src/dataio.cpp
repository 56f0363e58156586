#include "pireduce/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pireduce/errors.hpp"
#include "pireduce/random.hpp"

namespace pireduce {

using Eigen::Index;

// ---- Dataset ---------------------------------------------------------------

Eigen::VectorXd Dataset::column(const std::string& name) const { return values.col(schema.index_of(name)); }

Dataset Dataset::subset(const std::vector<Index>& row_indices) const {
  Dataset out;
  out.schema = schema;
  out.values.resize(static_cast<Index>(row_indices.size()), values.cols());
  out.provenance.reserve(row_indices.size());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    const Index r = row_indices[i];
    if (r < 0 || r >= rows()) throw DimensionError("Dataset::subset: row index out of range");
    out.values.row(static_cast<Index>(i)) = values.row(r);
    out.provenance.push_back(provenance.empty() ? std::string{} : provenance[static_cast<std::size_t>(r)]);
  }
  return out;
}

void Dataset::check() const {
  if (values.cols() != static_cast<Index>(schema.size())) {
    throw IngestError("dataset has " + std::to_string(values.cols()) + " columns, schema has " +
                      std::to_string(schema.size()));
  }
  if (!provenance.empty() && static_cast<Index>(provenance.size()) != values.rows()) {
    throw IngestError("provenance tags do not match row count");
  }
  if (!values.allFinite()) throw IngestError("dataset contains non-finite values");
}

// ---- CSV -------------------------------------------------------------------

namespace {

constexpr const char* kProvenance = "provenance";

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_real(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last && std::isfinite(value);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset read_csv(std::istream& in, const DatasetSchema& schema, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw IngestError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  // header position -> schema column (or -1 for provenance)
  std::vector<Index> target(header.size());
  std::vector<bool> seen(schema.size(), false);
  Index provenance_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == kProvenance) {
      provenance_col = static_cast<Index>(i);
      target[i] = -1;
      continue;
    }
    if (!schema.contains(header[i])) {
      throw IngestError(source + ": header column '" + header[i] + "' is not in the schema");
    }
    const Index c = schema.index_of(header[i]);
    if (seen[static_cast<std::size_t>(c)]) throw IngestError(source + ": duplicate header column '" + header[i] + "'");
    seen[static_cast<std::size_t>(c)] = true;
    target[i] = c;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!seen[c]) throw IngestError(source + ": header is missing column '" + schema.columns()[c].name + "'");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> provenance;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row_no;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw IngestError(source + ": row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> row(schema.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (target[i] < 0) continue;
      double v = 0.0;
      if (!parse_real(cells[i], v)) {
        throw IngestError(source + ": row " + std::to_string(row_no) + ", column '" + header[i] +
                          "': cannot parse '" + cells[i] + "' as a finite real");
      }
      row[static_cast<std::size_t>(target[i])] = v;
    }
    rows.push_back(std::move(row));
    provenance.push_back(provenance_col >= 0 ? cells[static_cast<std::size_t>(provenance_col)] : std::string{});
  }
  if (rows.empty()) throw IngestError(source + ": no data rows");

  Dataset data;
  data.schema = schema;
  data.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(schema.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) data.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  data.provenance = std::move(provenance);
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());
  return read_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  data.check();
  const bool tagged = std::any_of(data.provenance.begin(), data.provenance.end(), [](const auto& p) { return !p.empty(); });
  const auto& cols = data.schema.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].name;
  if (tagged) out << ',' << kProvenance;
  out << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.values.cols(); ++c) out << (c ? "," : "") << format_real(data.values(r, c));
    if (tagged) out << ',' << data.provenance[static_cast<std::size_t>(r)];
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write " + path.string());
  write_csv(out, data);
}

// ---- Standardizer ----------------------------------------------------------

Standardizer Standardizer::fit(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  if (X.rows() < 2) throw ConstantColumn("standardizer needs at least two rows");
  Standardizer s;
  s.means_ = X.colwise().mean();
  s.stds_.resize(X.cols());
  for (Index c = 0; c < X.cols(); ++c) {
    const double ss = (X.col(c).array() - s.means_(c)).square().sum();
    s.stds_(c) = std::sqrt(ss / double(X.rows() - 1));
    if (!(s.stds_(c) > 0.0)) {
      const std::string name = c < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(c)] : std::to_string(c);
      throw ConstantColumn("column '" + name + "' has zero variance and cannot be standardized");
    }
  }
  s.columns_ = names;
  return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& X) const {
  if (X.cols() != means_.size()) throw DimensionError("Standardizer::transform: column count mismatch");
  return (X.rowwise() - means_.transpose()).array().rowwise() / stds_.transpose().array();
}

Eigen::MatrixXd Standardizer::inverse_transform(const Eigen::MatrixXd& Z) const {
  if (Z.cols() != means_.size()) throw DimensionError("Standardizer::inverse_transform: column count mismatch");
  return (Z.array().rowwise() * stds_.transpose().array()).matrix().rowwise() + means_.transpose();
}

Standardizer fit_standardizer(const Dataset& train, const std::vector<std::string>& columns) {
  Eigen::MatrixXd X(train.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) X.col(static_cast<Index>(j)) = train.column(columns[j]);
  return Standardizer::fit(X, columns);
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& data) {
  if (s.columns().empty()) throw ConfigError("apply_standardizer: standardizer has no column names");
  Eigen::MatrixXd X(data.rows(), static_cast<Index>(s.columns().size()));
  for (std::size_t j = 0; j < s.columns().size(); ++j) X.col(static_cast<Index>(j)) = data.column(s.columns()[j]);
  const Eigen::MatrixXd Z = s.transform(X);
  Dataset out = data;
  for (std::size_t j = 0; j < s.columns().size(); ++j) {
    out.values.col(data.schema.index_of(s.columns()[j])) = Z.col(static_cast<Index>(j));
  }
  return out;
}

// ---- Splits ----------------------------------------------------------------

HoldoutSplit holdout_split(const Dataset& data, double fraction, std::uint64_t seed,
                           const std::optional<std::string>& stratify_block) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw SplitError("holdout fraction must lie in (0, 1)");
  const Index n = data.rows();
  const auto n_test = static_cast<Index>(std::llround(fraction * double(n)));
  if (n_test < 1 || n_test >= n) {
    throw SplitError("holdout of " + std::to_string(fraction) + " on " + std::to_string(n) + " rows leaves an empty side");
  }

  std::vector<Index> pool;
  for (Index r = 0; r < n; ++r) {
    if (!stratify_block || (!data.provenance.empty() && data.provenance[static_cast<std::size_t>(r)] == *stratify_block)) {
      pool.push_back(r);
    }
  }
  if (static_cast<Index>(pool.size()) < n_test) {
    throw SplitError("block '" + stratify_block.value_or("") + "' has " + std::to_string(pool.size()) +
                     " rows, fewer than the " + std::to_string(n_test) + " requested test rows");
  }
  Rng rng = make_rng(seed, 0x4801d);
  std::shuffle(pool.begin(), pool.end(), rng);

  HoldoutSplit split;
  split.test_rows.assign(pool.begin(), pool.begin() + n_test);
  std::sort(split.test_rows.begin(), split.test_rows.end());
  std::vector<bool> is_test(static_cast<std::size_t>(n), false);
  for (Index r : split.test_rows) is_test[static_cast<std::size_t>(r)] = true;
  for (Index r = 0; r < n; ++r) {
    if (!is_test[static_cast<std::size_t>(r)]) split.train_rows.push_back(r);
  }
  split.train = data.subset(split.train_rows);
  split.test = data.subset(split.test_rows);
  return split;
}

std::vector<std::vector<Index>> kfold_indices(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw SplitError("k-fold needs k >= 2");
  if (n < k) throw SplitError("k-fold needs at least k=" + std::to_string(k) + " rows, got " + std::to_string(n));
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_rng(seed, 0xf01d);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
  const Index base = n / k;
  const Index extra = n % k;
  auto it = perm.begin();
  for (int f = 0; f < k; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    folds[static_cast<std::size_t>(f)].assign(it, it + size);
    std::sort(folds[static_cast<std::size_t>(f)].begin(), folds[static_cast<std::size_t>(f)].end());
    it += size;
  }
  return folds;
}

// ---- Synthetic data --------------------------------------------------------

DatasetSchema widen_ranges(const DatasetSchema& schema, double scale) {
  if (!(scale >= 1.0)) throw ConfigError("range scale must be >= 1");
  std::vector<VariableSpec> cols = schema.columns();
  for (auto& c : cols) {
    if (c.declared_range && c.declared_range->lo < c.declared_range->hi) {
      c.declared_range->lo /= scale;
      c.declared_range->hi *= scale;
    }
  }
  return DatasetSchema(std::move(cols), schema.base_dimensions(), schema.preferred_base());
}

Dataset synth_generate(const DatasetSchema& schema_in, Index n, const MonomialModel& law, double noise_sigma,
                       std::uint64_t seed, const SynthOptions& options) {
  if (n < 1) throw ConfigError("synth_generate: n must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synth_generate: noise_sigma must be non-negative");
  const DatasetSchema schema = options.range_scale == 1.0 ? schema_in : widen_ranges(schema_in, options.range_scale);

  const std::vector<std::string> base =
      options.base_subset ? *options.base_subset : select_base_subset(schema, schema.preferred_base());
  const PiBasis basis = derive_pi_basis(schema, base);
  if (law.exponents.size() != static_cast<Index>(basis.groups.size())) {
    throw ConfigError("law has " + std::to_string(law.exponents.size()) + " exponents, the Pi basis has " +
                      std::to_string(basis.groups.size()) + " groups");
  }
  if (!law.feature_names.empty() && law.feature_names != basis.group_labels()) {
    throw ConfigError("law feature names do not match the Pi group labels");
  }

  struct Sampler {
    Index col;
    double log_lo;
    double log_hi;
    double fixed;
    bool degenerate;
  };
  std::vector<Sampler> samplers;
  for (const auto& name : schema.independent_names()) {
    const auto& spec = schema.column(name);
    if (!spec.declared_range) throw SchemaError("synth_generate: column '" + name + "' has no range");
    const Range r = *spec.declared_range;
    if (r.lo == r.hi) {
      samplers.push_back({schema.index_of(name), 0.0, 0.0, r.lo, true});
      continue;
    }
    if (!(r.lo > 0.0)) throw SchemaError("synth_generate: log-uniform sampling needs a positive range for '" + name + "'");
    samplers.push_back({schema.index_of(name), std::log(r.lo), std::log(r.hi), 0.0, false});
  }

  Rng rng = make_rng(seed, 0x5e7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset data;
  data.schema = schema;
  data.values = Eigen::MatrixXd::Ones(n, static_cast<Index>(schema.size()));
  Eigen::VectorXd noise(n);
  for (Index r = 0; r < n; ++r) {
    for (const auto& s : samplers) {
      data.values(r, s.col) = s.degenerate ? s.fixed : std::exp(s.log_lo + (s.log_hi - s.log_lo) * unif(rng));
    }
    noise(r) = noise_sigma * normal(rng);
  }
  data.provenance.assign(static_cast<std::size_t>(n), options.provenance);

  const Dataset pi = nondimensionalize(data, basis);
  Eigen::VectorXd y_pi(n);
  for (Index r = 0; r < n; ++r) {
    double log_y = law.intercept_log + noise(r);
    for (Index j = 0; j < law.exponents.size(); ++j) {
      if (law.exponents(j) == 0.0) continue;
      const double u = pi.values(r, j);
      if (!(u > 0.0)) throw LogDomain("synth_generate: Pi group " + basis.groups[static_cast<std::size_t>(j)].label + " is not positive");
      log_y += law.exponents(j) * std::log(u);
    }
    y_pi(r) = std::exp(log_y);
  }
  data.values.col(schema.index_of(schema.dependent().name)) = dimensionalize_target(y_pi, data, basis);
  data.check();
  return data;
}

}  // namespace pireduce
