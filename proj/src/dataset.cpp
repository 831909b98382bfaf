#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "radtherm/errors.hpp"
#include "radtherm/surrogate.hpp"

namespace radtherm {

LabeledDataset generate_dataset(Eigen::Index n, const ParameterRanges& ranges, std::uint64_t seed,
                                const QuadratureConfig& q) {
  if (n < 1) throw DomainError("generate_dataset: n must be >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };

  LabeledDataset data;
  data.seed = seed;
  data.inputs.resize(n, kFeatureCount);
  data.targets.resize(n);
  Eigen::RowVectorXd row(kFeatureCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tube = draw(ranges.tube_temp);
    for (int f = 1; f < kFeatureCount; ++f) row[f] = draw(ranges.feature(f));
    const FurnaceScene scene = scene_from_features(row, tube);
    row[kSignal] = forward_signal(ModelKind::D, scene, q);
    data.inputs.row(i) = row;
    data.targets[i] = tube;
  }
  return data;
}

namespace {

constexpr const char* kTargetColumn = "tube_temp_K";

std::string header_line() {
  std::string h;
  for (const char* name : kFeatureNames) {
    h += name;
    h += ',';
  }
  return h + kTargetColumn;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  (void)ec;
  out.append(buf, end);
}

}  // namespace

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
  out << "# seed=" << data.seed << '\n' << header_line() << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    line.clear();
    for (int f = 0; f < kFeatureCount; ++f) {
      append_number(line, data.inputs(i, f));
      line += ',';
    }
    append_number(line, data.targets[i]);
    line += '\n';
    out << line;
  }
}

LabeledDataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t offset = 0;
  LabeledDataset data;
  if (!std::getline(in, line) || line.rfind("# seed=", 0) != 0) throw ParseError("dataset: missing seed line", 0);
  {
    const char* b = line.data() + 7;
    const auto [p, ec] = std::from_chars(b, line.data() + line.size(), data.seed);
    if (ec != std::errc()) throw ParseError("dataset: invalid seed", 7);
  }
  offset += line.size() + 1;
  if (!std::getline(in, line) || line != header_line()) throw ParseError("dataset: unexpected header", offset);
  offset += line.size() + 1;

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) {
      ++offset;
      continue;
    }
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c <= kFeatureCount; ++c) {
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ParseError("dataset: invalid number", offset + static_cast<std::size_t>(p - line.data()));
      values.push_back(v);
      p = next;
      if (c < kFeatureCount) {
        if (p == end || *p != ',') throw ParseError("dataset: expected ','", offset + static_cast<std::size_t>(p - line.data()));
        ++p;
      }
    }
    if (p != end) throw ParseError("dataset: trailing characters", offset + static_cast<std::size_t>(p - line.data()));
    offset += line.size() + 1;
  }
  const auto rows = static_cast<Eigen::Index>(values.size() / (kFeatureCount + 1));
  data.inputs.resize(rows, kFeatureCount);
  data.targets.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto base = static_cast<std::size_t>(i) * (kFeatureCount + 1);
    for (int f = 0; f < kFeatureCount; ++f) data.inputs(i, f) = values[base + static_cast<std::size_t>(f)];
    data.targets[i] = values[base + kFeatureCount];
  }
  return data;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write_dataset_csv(f, data);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NotFoundError("cannot open dataset " + path.string());
  return read_dataset_csv(f);
}

}  // namespace radtherm
