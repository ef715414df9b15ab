#include "son/data_io.hpp"

#include "son/errors.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace son {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

double parse_double(std::string_view tok, long line_no, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line_no);
  return v;
}

}  // namespace

std::optional<Example> parse_libsvm_line(std::string_view line, long line_no) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) toks.push_back(line.substr(start, i - start));
  }
  if (toks.empty()) return std::nullopt;

  Example ex;
  ex.label = parse_double(toks[0], line_no, "label") > 0.0 ? 1.0 : -1.0;
  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(toks.size() - 1);
  val.reserve(toks.size() - 1);
  for (std::size_t k = 1; k < toks.size(); ++k) {
    const std::string_view tok = toks[k];
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size())
      throw ParseError("malformed feature '" + std::string(tok) + "'", line_no);
    long long one_based = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, one_based);
    if (ec != std::errc() || ptr != tok.data() + colon || one_based < 1)
      throw ParseError("malformed feature index '" + std::string(tok) + "'", line_no);
    const Index j = static_cast<Index>(one_based - 1);
    if (!idx.empty() && j <= idx.back()) throw ParseError("feature indices not strictly increasing", line_no);
    idx.push_back(j);
    val.push_back(parse_double(tok.substr(colon + 1), line_no, "feature value"));
  }
  const Index dim = idx.empty() ? 0 : idx.back() + 1;
  ex.features = SparseVec(dim, std::move(idx), std::move(val));
  return ex;
}

std::string serialize_libsvm(const Example& ex) {
  std::string out = ex.label > 0.0 ? "+1" : "-1";
  char buf[64];
  for (std::size_t k = 0; k < ex.features.nnz(); ++k) {
    out += ' ';
    out += std::to_string(ex.features.index(k) + 1);
    out += ':';
    const auto res = std::to_chars(buf, buf + sizeof buf, ex.features.value(k));
    out.append(buf, res.ptr);
  }
  return out;
}

struct LibsvmReader::Impl {
  gzFile file = nullptr;
  std::string buf;
};

LibsvmReader::LibsvmReader(const std::string& path) : impl_(std::make_unique<Impl>()), path_(path) {
  impl_->file = gzopen(path.c_str(), "rb");
  if (impl_->file == nullptr) throw ParseError("cannot open '" + path + "'", 0);
  impl_->buf.resize(1 << 16);
}

LibsvmReader::~LibsvmReader() {
  if (impl_ && impl_->file) gzclose(impl_->file);
}

bool LibsvmReader::next(Example& out, Index dim) {
  std::string line;
  for (;;) {
    line.clear();
    bool got = false;
    // A physical line may span several gzgets calls.
    while (gzgets(impl_->file, impl_->buf.data(), static_cast<int>(impl_->buf.size())) != nullptr) {
      got = true;
      line += impl_->buf.c_str();
      if (!line.empty() && line.back() == '\n') break;
    }
    if (!got) {
      int err = 0;
      const char* msg = gzerror(impl_->file, &err);
      if (err != Z_OK && err != Z_STREAM_END) throw ParseError(path_, ParseError(msg, line_));
      return false;
    }
    ++line_;
    std::optional<Example> ex;
    try {
      ex = parse_libsvm_line(line, line_);
    } catch (const ParseError& e) {
      throw ParseError(path_, e);
    }
    if (!ex) continue;
    if (ex->features.dim() > dim)
      throw ParseError(path_, ParseError("feature index exceeds dimension " + std::to_string(dim), line_));
    ex->features.set_dim(dim);
    out = std::move(*ex);
    return true;
  }
}

FileScan scan_libsvm(const std::string& path) {
  LibsvmReader reader(path);
  FileScan scan;
  Example ex;
  while (reader.next(ex, std::numeric_limits<Index>::max())) {
    if (!ex.features.empty()) scan.dim = std::max(scan.dim, ex.features.index(ex.features.nnz() - 1) + 1);
    ++scan.examples;
  }
  return scan;
}

void SyntheticSpec::validate() const {
  if (t < 1) throw InvalidConfig("synthetic: T must be >= 1");
  if (d <= 10) throw InvalidConfig("synthetic: d must be > 10");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw InvalidConfig("synthetic: kappa must be >= 1");
}

Vector synthetic_spectrum(Index d, double kappa) {
  Vector lambda = Vector::Ones(d);
  for (Index i = 1; i <= 10; ++i) lambda[d - 10 + i - 1] = 1.0 + static_cast<double>(i) * (kappa - 1.0) / 10.0;
  return lambda;
}

SyntheticStream::SyntheticStream(const SyntheticSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec.validate();
  const Index d = spec.d;
  Matrix gauss(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) gauss(i, j) = normal_(rng_);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  v_ = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) v_.col(j) = -v_.col(j);
  }
  theta_.resize(d);
  for (Index i = 0; i < d; ++i) theta_[i] = normal_(rng_);
  theta_ /= theta_.norm();
  sqrt_lambda_ = synthetic_spectrum(d, spec.kappa).cwiseSqrt();
}

bool SyntheticStream::next(Example& out) {
  if (produced_ >= spec_.t) return false;
  Vector z(spec_.d);
  for (Index i = 0; i < spec_.d; ++i) z[i] = normal_(rng_);
  const Vector vz = v_ * z;
  out.label = theta_.dot(vz) >= 0.0 ? 1.0 : -1.0;
  out.features = SparseVec::from_dense(v_ * sqrt_lambda_.cwiseProduct(z));
  ++produced_;
  return true;
}

}  // namespace son
