#include "fwsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fwsel/rng.hpp"

namespace fwsel {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels[r]);
  out.feature_names = feature_names;
  out.informative = informative;
  return out;
}

Dataset Dataset::subset_cols(std::span<const std::size_t> cols) const {
  Dataset out;
  out.features = features.select_cols(cols);
  out.labels = labels;
  for (auto c : cols) {
    if (!feature_names.empty()) out.feature_names.push_back(feature_names[c]);
    if (!informative.empty()) out.informative.push_back(informative[c]);
  }
  return out;
}

void Dataset::validate() const {
  if (features.rows() != labels.size())
    throw DataError("dataset: " + std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  if (!feature_names.empty() && feature_names.size() != features.cols())
    throw DataError("dataset: feature name count does not match column count");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != 0 && labels[i] != 1)
      throw DataError("dataset: row " + std::to_string(i + 1) + ": label outside {0,1}");
  for (double v : features.data())
    if (!std::isfinite(v)) throw DataError("dataset: non-finite feature value");
}

Dataset parse_csv(std::string_view text, const std::string& origin) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      lines.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError(origin + ": empty file");

  auto header = split_fields(trim(lines[0]));
  std::size_t label_col = header.size();
  Dataset ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto name = trim(header[c]);
    if (name == "label") {
      if (label_col != header.size()) throw DataError(origin + ": header: duplicate `label` column");
      label_col = c;
    } else {
      ds.feature_names.emplace_back(name);
    }
  }
  if (label_col == header.size()) throw DataError(origin + ": header: no column named `label`");
  if (lines.size() == 1) throw DataError(origin + ": no data rows");

  std::vector<double> values(header.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = origin + ": row " + std::to_string(li) + " (line " + std::to_string(li + 1) + ")";
    auto fields = split_fields(trim(lines[li]));
    if (fields.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    std::size_t out = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0;
      if (!parse_double(fields[c], v) || !std::isfinite(v)) {
        if (c == label_col) throw DataError(where + ", column " + std::to_string(c + 1) + ": label outside {0,1}");
        throw DataError(where + ", column " + std::to_string(c + 1) + ": non-numeric value '" +
                        std::string(trim(fields[c])) + "'");
      }
      if (c == label_col) {
        if (v != 0.0 && v != 1.0)
          throw DataError(where + ", column " + std::to_string(c + 1) + ": label outside {0,1}");
        ds.labels.push_back(static_cast<int>(v));
      } else {
        values[out++] = v;
      }
    }
    ds.features.append_row(values);
  }
  if (ds.features.cols() == 0 && ds.features.rows() == 0) ds.features = Matrix(ds.labels.size(), 0);
  ds.validate();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

std::string format_csv(const Dataset& ds) {
  std::string out;
  for (std::size_t c = 0; c < ds.dims(); ++c) {
    out += ds.feature_names.empty() ? "x" + std::to_string(c) : ds.feature_names[c];
    out += ',';
  }
  out += "label\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.features.row(r)) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(ds.labels[r]);
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << format_csv(ds);
}

SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("stratified_split: test_fraction must be in (0, 1)");
  SplitPair split;
  split.seed = seed;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
      if (ds.labels[i] == cls) members.push_back(i);
    if (members.size() < 2)
      throw DataError("stratified_split: class " + std::to_string(cls) + " has " +
                      std::to_string(members.size()) + " sample(s); at least 2 are needed to stratify");
    auto rng = make_stream(seed, Stream::Split, {static_cast<std::uint64_t>(cls)});
    std::shuffle(members.begin(), members.end(), rng);
    const auto n = static_cast<double>(members.size());
    auto n_test = static_cast<std::size_t>(std::llround(n * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    split.test_rows.insert(split.test_rows.end(), members.begin(), members.begin() + n_test);
    split.train_rows.insert(split.train_rows.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.test_rows.begin(), split.test_rows.end());
  std::sort(split.train_rows.begin(), split.train_rows.end());
  split.train = ds.subset_rows(split.train_rows);
  split.test = ds.subset_rows(split.test_rows);
  return split;
}

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.d_informative < 1) throw std::invalid_argument("generate_synthetic: d_informative must be >= 1");
  if (!(spec.class_imbalance > 0.0 && spec.class_imbalance < 1.0))
    throw std::invalid_argument("generate_synthetic: class_imbalance must be in (0, 1)");
  if (spec.noise_sigma < 0.0) throw std::invalid_argument("generate_synthetic: noise_sigma must be >= 0");

  const std::size_t n = spec.n_samples;
  const std::size_t d = spec.d_informative + spec.d_noise;
  const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.class_imbalance));

  Dataset ds;
  ds.labels.assign(n, 0);
  std::fill_n(ds.labels.begin(), std::min(n_pos, n), 1);
  auto rng = make_stream(spec.seed, Stream::Synth);
  std::shuffle(ds.labels.begin(), ds.labels.end(), rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  ds.features = Matrix(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const double centre = ds.labels[r] == 1 ? 0.5 : -0.5;
    for (std::size_t c = 0; c < d; ++c) {
      const double z = gauss(rng);
      ds.features(r, c) = c < spec.d_informative ? centre + spec.noise_sigma * z : z;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    ds.feature_names.push_back("x" + std::to_string(c));
    ds.informative.push_back(c < spec.d_informative);
  }
  return ds;
}

void Standardizer::apply(Matrix& x) const {
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      x(r, c) = scale[c] > 0.0 ? (x(r, c) - mean[c]) / scale[c] : 0.0;
}

Standardizer standardize(SplitPair& split) {
  const Matrix& train = split.train.features;
  if (train.rows() < 2) throw std::invalid_argument("standardize: train needs at least 2 rows");
  const std::size_t d = train.cols();
  const auto n = static_cast<double>(train.rows());
  Standardizer st{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0;
    for (std::size_t r = 0; r < train.rows(); ++r) sum += train(r, c);
    st.mean[c] = sum / n;
    double ss = 0;
    for (std::size_t r = 0; r < train.rows(); ++r) ss += (train(r, c) - st.mean[c]) * (train(r, c) - st.mean[c]);
    st.scale[c] = std::sqrt(ss / n);
  }
  st.apply(split.train.features);
  st.apply(split.test.features);
  return st;
}

}  // namespace fwsel
