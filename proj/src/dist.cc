#include "quasimix/dist.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace quasimix {

void CheckDenseBudget(const ProductGroup& space) {
  if (space.size() > kMaxDenseStates) {
    throw BudgetError("state space " + space.base().spec().ToString() + "^" +
                      std::to_string(space.arity()) + " has " + std::to_string(space.size()) +
                      " states; the dense limit is " + std::to_string(kMaxDenseStates) +
                      " (alt5^4)");
  }
}

Dist::Dist(ProductGroup space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_.size()) {
    throw std::invalid_argument("Dist: expected " + std::to_string(space_.size()) +
                                " values, got " + std::to_string(values_.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double& v = values_[i];
    if (!std::isfinite(v)) throw std::invalid_argument("Dist: non-finite entry");
    if (v < 0.0) {
      if (v < -kNegativeClamp) {
        throw std::invalid_argument("Dist: negative entry " + std::to_string(v) + " at index " +
                                    std::to_string(i));
      }
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kDistSumTolerance) {
    throw std::invalid_argument("Dist: values sum to " + std::to_string(sum) + ", not 1");
  }
}

Dist Dist::Uniform(const ProductGroup& space) {
  CheckDenseBudget(space);
  return Dist(space, std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())));
}

Dist Dist::PointMass(const ProductGroup& space, std::size_t flat) {
  CheckDenseBudget(space);
  if (flat >= space.size()) throw std::out_of_range("PointMass: index out of range");
  std::vector<double> v(space.size(), 0.0);
  v[flat] = 1.0;
  return Dist(space, std::move(v));
}

Dist Dist::Mix(const Dist& a, const Dist& b, double t) {
  if (!a.space().SameSpace(b.space())) throw std::invalid_argument("Mix: space mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("Mix: weight outside [0, 1]");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - t) * a[i] + t * b[i];
  return Dist(a.space(), std::move(v));
}

Dist NormalizeWeights(const ProductGroup& space, std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("NormalizeWeights: negative weight");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("NormalizeWeights: zero total weight");
  for (double& w : weights) w /= sum;
  return Dist(space, std::move(weights));
}

std::vector<int> CanonicalSubset(std::span<const int> coords, int arity) {
  std::vector<int> s(coords.begin(), coords.end());
  if (s.empty()) throw std::invalid_argument("coordinate subset is empty");
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= arity) {
      throw std::invalid_argument("coordinate " + std::to_string(s[i]) + " outside [0, " +
                                  std::to_string(arity) + ")");
    }
    if (i > 0 && s[i] == s[i - 1]) {
      throw std::invalid_argument("coordinate " + std::to_string(s[i]) + " repeated");
    }
  }
  return s;
}

Dist Marginalize(const Dist& p, std::span<const int> coords) {
  const std::vector<int> subset = CanonicalSubset(coords, p.space().arity());
  std::vector<double> v = MarginalizeValues<double>(p.space(), p.values(), subset);
  return Dist(ProductGroup(p.space().base_ptr(), static_cast<int>(subset.size())), std::move(v));
}

std::vector<std::vector<int>> Subsets(int m, int k) {
  if (k < 1 || k > m) throw std::invalid_argument("Subsets: need 1 <= k <= m");
  std::vector<std::vector<int>> out;
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[i] == m - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

namespace {

constexpr std::string_view kDistMagic = "quasimix-dist";

std::string Shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void WriteDist(const std::string& path, const Dist& p, DistFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const ProductGroup& s = p.space();
  out << kDistMagic << " 1 " << (format == DistFormat::kText ? "text" : "binary") << '\n'
      << "group " << s.base().spec().ToString() << '\n'
      << "fingerprint " << s.base().fingerprint_hex() << '\n'
      << "arity " << s.arity() << '\n'
      << "size " << s.size() << '\n';
  if (format == DistFormat::kText) {
    for (double v : p.values()) out << Shortest(v) << '\n';
  } else {
    static_assert(std::endian::native == std::endian::little, "binary dist files are little-endian");
    out.write(reinterpret_cast<const char*>(p.values().data()),
              static_cast<std::streamsize>(p.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Dist ReadDist(const std::string& path, const ProductGroup& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  auto header_line = [&](std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated header");
    std::istringstream ls(line);
    std::string k, v;
    ls >> k >> v;
    if (k != key) throw std::runtime_error(path + ": expected '" + std::string(key) + "'");
    return v;
  };
  std::string first;
  if (!std::getline(in, first)) throw std::runtime_error(path + ": empty file");
  std::istringstream fs(first);
  std::string magic, version, kind;
  fs >> magic >> version >> kind;
  if (magic != kDistMagic || version != "1" || (kind != "text" && kind != "binary")) {
    throw std::runtime_error(path + ": not a quasimix dist file");
  }
  header_line("group");
  const std::string fp = header_line("fingerprint");
  const std::string arity = header_line("arity");
  const std::string size = header_line("size");
  if (fp != space.base().fingerprint_hex() || arity != std::to_string(space.arity())) {
    throw std::runtime_error(path + ": distribution belongs to a different space (fingerprint " +
                             fp + ", arity " + arity + ")");
  }
  if (size != std::to_string(space.size())) throw std::runtime_error(path + ": size mismatch");
  std::vector<double> values(space.size());
  if (kind == "text") {
    std::string tok;
    for (double& v : values) {
      if (!(in >> tok)) throw std::runtime_error(path + ": truncated values");
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw std::runtime_error(path + ": malformed value '" + tok + "'");
      }
    }
  } else {
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
      throw std::runtime_error(path + ": truncated values");
    }
  }
  return Dist(space, std::move(values));
}

}  // namespace quasimix
