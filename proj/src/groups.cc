#include "quasimix/groups.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace quasimix {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void FnvMix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
}

int KindId(GroupKind k) {
  switch (k) {
    case GroupKind::kCyclic: return 1;
    case GroupKind::kSl2: return 2;
    case GroupKind::kAlt5: return 3;
  }
  return 0;
}

int ParsePositive(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("group spec: cannot parse " +
                                std::string(what) + " from '" +
                                std::string(s) + "'");
  }
  return v;
}

GroupTable BuildCyclic(const GroupSpec& spec) {
  const int n = spec.param;
  std::vector<Element> mul(static_cast<std::size_t>(n) * n);
  std::vector<Element> inv(n);
  std::vector<std::string> labels(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) mul[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
    inv[a] = (n - a) % n;
    labels[a] = std::to_string(a);
  }
  return GroupTable(spec, n, std::move(mul), std::move(inv), std::move(labels));
}

GroupTable BuildSl2(const GroupSpec& spec) {
  const int q = spec.param;
  using Mat = std::array<int, 4>;  // a b c d
  std::vector<Mat> elems;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        for (int d = 0; d < q; ++d)
          if (((a * d - b * c) % q + q) % q == 1 % q) elems.push_back({a, b, c, d});

  const Mat id = {1 % q, 0, 0, 1 % q};
  auto it = std::find(elems.begin(), elems.end(), id);
  std::iter_swap(elems.begin(), it);

  auto code = [q](const Mat& m) {
    return ((m[0] * q + m[1]) * q + m[2]) * q + m[3];
  };
  std::vector<int> index_of(static_cast<std::size_t>(q) * q * q * q, -1);
  for (std::size_t i = 0; i < elems.size(); ++i) index_of[code(elems[i])] = static_cast<int>(i);

  const int n = static_cast<int>(elems.size());
  std::vector<Element> mul(static_cast<std::size_t>(n) * n);
  std::vector<Element> inv(n);
  std::vector<std::string> labels(n);
  for (int x = 0; x < n; ++x) {
    const Mat& m = elems[x];
    for (int y = 0; y < n; ++y) {
      const Mat& r = elems[y];
      Mat p = {(m[0] * r[0] + m[1] * r[2]) % q, (m[0] * r[1] + m[1] * r[3]) % q,
               (m[2] * r[0] + m[3] * r[2]) % q, (m[2] * r[1] + m[3] * r[3]) % q};
      mul[static_cast<std::size_t>(x) * n + y] = index_of[code(p)];
    }
    // det = 1, so the inverse is [[d,-b],[-c,a]].
    Mat mi = {m[3], (q - m[1]) % q, (q - m[2]) % q, m[0]};
    inv[x] = index_of[code(mi)];
    labels[x] = "[[" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "],[" +
                std::to_string(m[2]) + "," + std::to_string(m[3]) + "]]";
  }
  return GroupTable(spec, n, std::move(mul), std::move(inv), std::move(labels));
}

GroupTable BuildAlt5(const GroupSpec& spec) {
  using Perm = std::array<int, 5>;
  std::vector<Perm> elems;
  Perm p = {0, 1, 2, 3, 4};
  do {
    int inversions = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) inversions += p[i] > p[j];
    if (inversions % 2 == 0) elems.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  auto code = [](const Perm& x) {
    int c = 0;
    for (int v : x) c = c * 5 + v;
    return c;
  };
  std::vector<int> index_of(3125, -1);
  for (std::size_t i = 0; i < elems.size(); ++i) index_of[code(elems[i])] = static_cast<int>(i);

  const int n = static_cast<int>(elems.size());
  std::vector<Element> mul(static_cast<std::size_t>(n) * n);
  std::vector<Element> inv(n);
  std::vector<std::string> labels(n);
  for (int x = 0; x < n; ++x) {
    const Perm& a = elems[x];
    for (int y = 0; y < n; ++y) {
      const Perm& b = elems[y];
      Perm c;  // (a*b)(i) = a(b(i))
      for (int i = 0; i < 5; ++i) c[i] = a[b[i]];
      mul[static_cast<std::size_t>(x) * n + y] = index_of[code(c)];
    }
    Perm ai;
    for (int i = 0; i < 5; ++i) ai[a[i]] = i;
    inv[x] = index_of[code(ai)];
    std::string word;
    for (int v : a) word.push_back(static_cast<char>('0' + v));
    labels[x] = word;
  }
  return GroupTable(spec, n, std::move(mul), std::move(inv), std::move(labels));
}

}  // namespace

GroupSpec GroupSpec::Cyclic(int n) { return {GroupKind::kCyclic, n}; }
GroupSpec GroupSpec::Sl2(int q) { return {GroupKind::kSl2, q}; }
GroupSpec GroupSpec::Alt5() { return {GroupKind::kAlt5, 0}; }

GroupSpec GroupSpec::Parse(std::string_view text) {
  if (text == "a5" || text == "alt5" || text == "A5") return Alt5();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("group spec: expected 'cyclic:<n>', 'sl2:<q>' or 'a5', got '" +
                                std::string(text) + "'");
  }
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  GroupSpec spec;
  if (kind == "cyclic") {
    spec = Cyclic(ParsePositive(arg, "n"));
  } else if (kind == "sl2") {
    spec = Sl2(ParsePositive(arg, "q"));
  } else {
    throw std::invalid_argument("group spec: unknown group kind '" + std::string(kind) + "'");
  }
  spec.Validate();
  return spec;
}

std::string GroupSpec::ToString() const {
  switch (kind) {
    case GroupKind::kCyclic: return "cyclic:" + std::to_string(param);
    case GroupKind::kSl2: return "sl2:" + std::to_string(param);
    case GroupKind::kAlt5: return "a5";
  }
  return "?";
}

bool IsPrime(int q) {
  if (q < 2) return false;
  for (int d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

void GroupSpec::Validate() const {
  switch (kind) {
    case GroupKind::kCyclic:
      if (param < 1) throw std::invalid_argument("cyclic group: n must be >= 1");
      if (param > 10'000) throw std::invalid_argument("cyclic group: n must be <= 10000");
      break;
    case GroupKind::kSl2:
      if (!IsPrime(param)) throw std::invalid_argument("sl2 group: q must be prime (got " +
                                                       std::to_string(param) + ")");
      if (param * (param * param - 1) > 10'000) {
        throw std::invalid_argument("sl2 group: order q(q^2-1) must be <= 10000");
      }
      break;
    case GroupKind::kAlt5:
      break;
  }
}

GroupTable::GroupTable(GroupSpec spec, int order, std::vector<Element> mul,
                       std::vector<Element> inv, std::vector<std::string> labels)
    : spec_(spec),
      order_(order),
      mul_(std::move(mul)),
      inv_(std::move(inv)),
      labels_(std::move(labels)) {
  if (order_ < 1 || mul_.size() != static_cast<std::size_t>(order_) * order_ ||
      inv_.size() != static_cast<std::size_t>(order_) ||
      labels_.size() != static_cast<std::size_t>(order_)) {
    throw std::invalid_argument("GroupTable: inconsistent table sizes");
  }
  std::uint64_t h = kFnvOffset;
  FnvMix(h, static_cast<std::uint64_t>(KindId(spec_.kind)));
  FnvMix(h, static_cast<std::uint64_t>(spec_.param));
  FnvMix(h, static_cast<std::uint64_t>(order_));
  const std::size_t count = std::min<std::size_t>(64, mul_.size());
  for (std::size_t i = 0; i < count; ++i) FnvMix(h, static_cast<std::uint64_t>(mul_[i]));
  fingerprint_ = h;
}

std::string GroupTable::fingerprint_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint_));
  return buf;
}

GroupTable BuildGroup(const GroupSpec& spec) {
  spec.Validate();
  switch (spec.kind) {
    case GroupKind::kCyclic: return BuildCyclic(spec);
    case GroupKind::kSl2: return BuildSl2(spec);
    case GroupKind::kAlt5: return BuildAlt5(spec);
  }
  throw std::invalid_argument("unknown group kind");
}

std::shared_ptr<const GroupTable> MakeGroup(const GroupSpec& spec) {
  return std::make_shared<const GroupTable>(BuildGroup(spec));
}

bool GroupReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

const AxiomCheck* GroupReport::Find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

GroupReport VerifyGroup(const GroupTable& g, std::uint64_t seed) {
  const int n = g.order();
  GroupReport report;

  AxiomCheck closure{"closure", true, ""};
  for (Element v : g.mul_table()) {
    if (v < 0 || v >= n) {
      closure.passed = false;
      closure.detail = "table entry out of range: " + std::to_string(v);
      break;
    }
  }
  for (Element v : g.inv_table()) {
    if (closure.passed && (v < 0 || v >= n)) {
      closure.passed = false;
      closure.detail = "inverse entry out of range: " + std::to_string(v);
    }
  }
  report.checks.push_back(closure);
  if (!closure.passed) {
    // The remaining checks would index out of bounds.
    report.checks.push_back({"identity", false, "skipped: closure failed"});
    report.checks.push_back({"inverse", false, "skipped: closure failed"});
    report.checks.push_back({"associativity", false, "skipped: closure failed"});
    return report;
  }

  AxiomCheck identity{"identity", true, ""};
  for (Element x = 0; x < n && identity.passed; ++x) {
    if (g.mul(0, x) != x || g.mul(x, 0) != x) {
      identity.passed = false;
      identity.detail = "identity law fails at element " + std::to_string(x);
    }
  }
  report.checks.push_back(identity);

  AxiomCheck inverse{"inverse", true, ""};
  for (Element x = 0; x < n && inverse.passed; ++x) {
    if (g.mul(x, g.inv(x)) != 0 || g.mul(g.inv(x), x) != 0) {
      inverse.passed = false;
      inverse.detail = "inverse law fails at element " + std::to_string(x);
    }
  }
  report.checks.push_back(inverse);

  AxiomCheck assoc{"associativity", true, ""};
  auto check = [&](Element x, Element y, Element z) {
    if (g.mul(g.mul(x, y), z) != g.mul(x, g.mul(y, z))) {
      assoc.passed = false;
      assoc.detail = "(" + std::to_string(x) + "," + std::to_string(y) + "," +
                     std::to_string(z) + ") is not associative";
    }
  };
  if (n <= kExhaustiveAssociativityLimit) {
    for (Element x = 0; x < n && assoc.passed; ++x)
      for (Element y = 0; y < n && assoc.passed; ++y)
        for (Element z = 0; z < n && assoc.passed; ++z) check(x, y, z);
    if (assoc.passed) assoc.detail = "exhaustive";
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Element> pick(0, n - 1);
    for (std::size_t i = 0; i < kSampledAssociativityTriples && assoc.passed; ++i) {
      const Element x = pick(rng), y = pick(rng), z = pick(rng);
      check(x, y, z);
    }
    if (assoc.passed) assoc.detail = "sampled";
  }
  report.checks.push_back(assoc);
  return report;
}

ProductGroup::ProductGroup(std::shared_ptr<const GroupTable> base, int arity)
    : base_(std::move(base)), arity_(arity) {
  if (!base_) throw std::invalid_argument("ProductGroup: null base group");
  if (arity_ < 1) throw std::invalid_argument("ProductGroup: arity must be >= 1");
  strides_.resize(arity_ + 1);
  strides_[0] = 1;
  const std::size_t n = static_cast<std::size_t>(base_->order());
  for (int c = 0; c < arity_; ++c) {
    if (strides_[c] > std::numeric_limits<std::size_t>::max() / n) {
      throw std::invalid_argument("ProductGroup: size overflows");
    }
    strides_[c + 1] = strides_[c] * n;
  }
  size_ = strides_[arity_];
}

std::size_t ProductGroup::TupleToFlat(std::span<const Element> t) const {
  if (t.size() != static_cast<std::size_t>(arity_)) {
    throw std::invalid_argument("TupleToFlat: tuple has " + std::to_string(t.size()) +
                                " coordinates, expected " + std::to_string(arity_));
  }
  std::size_t flat = 0;
  for (int c = 0; c < arity_; ++c) {
    if (t[c] < 0 || t[c] >= base_->order()) {
      throw std::out_of_range("TupleToFlat: coordinate " + std::to_string(c) +
                              " out of range: " + std::to_string(t[c]));
    }
    flat += static_cast<std::size_t>(t[c]) * strides_[c];
  }
  return flat;
}

std::vector<Element> ProductGroup::FlatToTuple(std::size_t flat) const {
  if (flat >= size_) throw std::out_of_range("FlatToTuple: index out of range");
  std::vector<Element> t(arity_);
  const std::size_t n = static_cast<std::size_t>(base_->order());
  for (int c = 0; c < arity_; ++c) {
    t[c] = static_cast<Element>(flat % n);
    flat /= n;
  }
  return t;
}

std::size_t ProductGroup::Multiply(std::size_t a, std::size_t b) const {
  const std::size_t n = static_cast<std::size_t>(base_->order());
  std::size_t out = 0;
  for (int c = 0; c < arity_; ++c) {
    out += static_cast<std::size_t>(base_->mul(static_cast<Element>(a % n),
                                               static_cast<Element>(b % n))) * strides_[c];
    a /= n;
    b /= n;
  }
  return out;
}

std::size_t ProductGroup::Inverse(std::size_t a) const {
  const std::size_t n = static_cast<std::size_t>(base_->order());
  std::size_t out = 0;
  for (int c = 0; c < arity_; ++c) {
    out += static_cast<std::size_t>(base_->inv(static_cast<Element>(a % n))) * strides_[c];
    a /= n;
  }
  return out;
}

bool ProductGroup::SameSpace(const ProductGroup& other) const {
  return arity_ == other.arity_ &&
         (base_ == other.base_ || base_->fingerprint() == other.base_->fingerprint());
}

}  // namespace quasimix
