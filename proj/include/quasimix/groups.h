#ifndef QUASIMIX_GROUPS_H_
#define QUASIMIX_GROUPS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quasimix {

// Element of a finite group, as an index into its multiplication table.
using Element = int;

enum class GroupKind { kCyclic, kSl2, kAlt5 };

struct GroupSpec {
  GroupKind kind = GroupKind::kCyclic;
  int param = 1;  // n for cyclic, q for sl2, unused (0) for alt5

  static GroupSpec Cyclic(int n);
  static GroupSpec Sl2(int q);
  static GroupSpec Alt5();

  // Accepts "cyclic:12", "sl2:5", "a5" (also "alt5").
  static GroupSpec Parse(std::string_view text);
  std::string ToString() const;

  // Throws std::invalid_argument naming the offending parameter.
  void Validate() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

bool IsPrime(int q);

// A finite group given by its full multiplication table. Element 0 is the
// identity. Immutable once built.
class GroupTable {
 public:
  // Takes ownership of a raw table. No axioms are checked here; use
  // VerifyGroup. `mul` is row-major: mul[a * order + b] = a * b.
  GroupTable(GroupSpec spec, int order, std::vector<Element> mul,
             std::vector<Element> inv, std::vector<std::string> labels);

  const GroupSpec& spec() const { return spec_; }
  int order() const { return order_; }
  Element identity() const { return 0; }

  Element mul(Element a, Element b) const {
    return mul_[static_cast<std::size_t>(a) * order_ + b];
  }
  Element inv(Element a) const { return inv_[a]; }
  const std::string& label(Element a) const { return labels_[a]; }

  // Row `a` of the table: b -> a * b.
  std::span<const Element> row(Element a) const {
    return {mul_.data() + static_cast<std::size_t>(a) * order_,
            static_cast<std::size_t>(order_)};
  }
  std::span<const Element> mul_table() const { return mul_; }
  std::span<const Element> inv_table() const { return inv_; }

  // Stable 64-bit FNV-1a hash over (kind, parameter, order, first 64 mul
  // entries). Keys irrep caches.
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::string fingerprint_hex() const;

 private:
  GroupSpec spec_;
  int order_;
  std::vector<Element> mul_;
  std::vector<Element> inv_;
  std::vector<std::string> labels_;
  std::uint64_t fingerprint_;
};

// Canonical enumeration:
//   cyclic: by residue;
//   sl2:    lexicographic in (a,b,c,d), identity swapped to index 0;
//   alt5:   lexicographic by permutation image (identity is first).
// Throws std::invalid_argument for an invalid spec (e.g. "q must be prime").
GroupTable BuildGroup(const GroupSpec& spec);

std::shared_ptr<const GroupTable> MakeGroup(const GroupSpec& spec);

struct AxiomCheck {
  std::string name;  // "closure", "identity", "inverse", "associativity"
  bool passed = true;
  std::string detail;
};

struct GroupReport {
  std::vector<AxiomCheck> checks;
  bool ok() const;
  const AxiomCheck* Find(std::string_view name) const;
};

// Associativity is exhaustive for order <= 256, otherwise 10^6 seeded
// random triples.
inline constexpr int kExhaustiveAssociativityLimit = 256;
inline constexpr std::size_t kSampledAssociativityTriples = 1'000'000;

GroupReport VerifyGroup(const GroupTable& g, std::uint64_t seed = 1);

// H^m with mixed-radix flat indexing; coordinate 0 is least significant.
class ProductGroup {
 public:
  ProductGroup(std::shared_ptr<const GroupTable> base, int arity);

  const GroupTable& base() const { return *base_; }
  const std::shared_ptr<const GroupTable>& base_ptr() const { return base_; }
  int arity() const { return arity_; }
  int base_order() const { return base_->order(); }
  std::size_t size() const { return size_; }

  // n^c for coordinate c.
  std::size_t stride(int c) const { return strides_[c]; }

  std::size_t TupleToFlat(std::span<const Element> t) const;
  std::vector<Element> FlatToTuple(std::size_t flat) const;
  Element Coordinate(std::size_t flat, int c) const {
    return static_cast<Element>((flat / strides_[c]) % base_->order());
  }

  std::size_t Multiply(std::size_t a, std::size_t b) const;
  std::size_t Inverse(std::size_t a) const;

  bool SameSpace(const ProductGroup& other) const;

 private:
  std::shared_ptr<const GroupTable> base_;
  int arity_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

}  // namespace quasimix

#endif  // QUASIMIX_GROUPS_H_
