#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <vector>

#include "radtherm/errors.hpp"
#include "radtherm/surrogate.hpp"

namespace radtherm {

static_assert(std::endian::native == std::endian::little, "model files are little-endian");

namespace {

constexpr char kMagic[4] = {'M', 'L', 'P', 'T'};

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

  template <typename T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw ParseError(std::string("model file truncated while reading ") + what, pos_);
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const MlpModel& model) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kModelFileVersion);
  put<std::uint32_t>(out, MlpTopology::layer_count);
  for (const auto& w : model.weights()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put<double>(out, w(r, c));
    }
  }
  for (const auto& r : model.input_norm()) {
    put<double>(out, r.lo);
    put<double>(out, r.hi);
  }
  put<double>(out, model.output_norm().lo);
  put<double>(out, model.output_norm().hi);
  put<std::uint64_t>(out, model.seed());
}

MlpModel read_model(std::istream& in) {
  Reader rd{std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>())};
  char magic[4];
  for (char& c : magic) c = rd.get<char>("magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("model file: bad magic", 0);
  const auto version_at = rd.pos();
  const auto version = rd.get<std::uint32_t>("version");
  if (version != kModelFileVersion) {
    throw ParseError("model file: unsupported version " + std::to_string(version), version_at);
  }
  const auto layers_at = rd.pos();
  const auto layers = rd.get<std::uint32_t>("layer count");
  if (layers != MlpTopology::layer_count) {
    throw ShapeError("model file: expected " + std::to_string(MlpTopology::layer_count) + " layers, found " +
                         std::to_string(layers),
                     layers_at);
  }
  MlpModel::Weights weights;
  for (std::uint32_t l = 0; l < layers; ++l) {
    const auto shape_at = rd.pos();
    const auto rows = rd.get<std::uint32_t>("layer rows");
    const auto cols = rd.get<std::uint32_t>("layer cols");
    const auto want_rows = static_cast<std::uint32_t>(MlpTopology::layer_sizes[l + 1]);
    const auto want_cols = static_cast<std::uint32_t>(MlpTopology::layer_sizes[l]);
    if (rows != want_rows || cols != want_cols) {
      throw ShapeError("model file: layer " + std::to_string(l) + " declares " + std::to_string(rows) + "x" +
                           std::to_string(cols) + ", topology requires " + std::to_string(want_rows) + "x" +
                           std::to_string(want_cols),
                       shape_at);
    }
    auto& w = weights[l];
    w.resize(rows, cols);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rd.get<double>("weights");
    }
  }
  std::array<Range, kFeatureCount> input_norm;
  for (auto& r : input_norm) {
    r.lo = rd.get<double>("normalisation");
    r.hi = rd.get<double>("normalisation");
  }
  Range output_norm;
  output_norm.lo = rd.get<double>("normalisation");
  output_norm.hi = rd.get<double>("normalisation");
  const auto seed = rd.get<std::uint64_t>("seed");
  if (!rd.at_end()) throw ParseError("model file: trailing bytes", rd.pos());
  try {
    return MlpModel(std::move(weights), input_norm, output_norm, seed);
  } catch (const DomainError& e) {
    throw ParseError(std::string("model file: ") + e.what(), rd.pos());
  }
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write_model(f, model);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NotFoundError("cannot open model file " + path.string());
  return read_model(f);
}

}  // namespace radtherm
