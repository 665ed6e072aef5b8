#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "quasimix/repr.h"

namespace quasimix {
namespace {

constexpr std::string_view kMagic = "quasimix-irreps";
constexpr int kVersion = 1;

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IrrepFileError("cannot format double");
  return std::string(buf, ptr);
}

double ParseDouble(const std::string& token, const std::string& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw IrrepFileError(path + ": malformed number '" + token + "'");
  }
  return v;
}

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  std::string Token() {
    std::string t;
    if (!(in_ >> t)) throw IrrepFileError(path_ + ": unexpected end of file (truncated?)");
    return t;
  }

  void Expect(std::string_view keyword) {
    const std::string t = Token();
    if (t != keyword) {
      throw IrrepFileError(path_ + ": expected '" + std::string(keyword) + "', found '" + t + "'");
    }
  }

  long long Integer() {
    const std::string t = Token();
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw IrrepFileError(path_ + ": malformed integer '" + t + "'");
    }
    return v;
  }

  double Real() { return ParseDouble(Token(), path_); }

 private:
  std::istream& in_;
  std::string path_;
};

}  // namespace

void SaveIrreps(const IrrepSet& s, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IrrepFileError("cannot open '" + path + "' for writing");
  const GroupTable& g = s.group();
  out << kMagic << ' ' << kVersion << '\n';
  out << "group " << g.spec().ToString() << '\n';
  out << "fingerprint " << g.fingerprint_hex() << '\n';
  out << "order " << g.order() << '\n';
  out << "tol " << FormatDouble(s.tol()) << '\n';
  out << "count " << s.size() << '\n';
  for (int r = 0; r < s.size(); ++r) {
    const Irrep& rho = s[r];
    out << "irrep " << r << " dim " << rho.dim << '\n';
    for (const auto& m : rho.matrices) {
      bool first = true;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          if (!first) out << ' ';
          first = false;
          out << FormatDouble(m(i, j).real()) << ' ' << FormatDouble(m(i, j).imag());
        }
      }
      out << '\n';
    }
  }
  out << "end\n";
  if (!out) throw IrrepFileError("write to '" + path + "' failed");
}

IrrepSet LoadIrreps(const std::string& path, std::shared_ptr<const GroupTable> group) {
  if (!group) throw std::invalid_argument("LoadIrreps: null group");
  std::ifstream in(path);
  if (!in) throw IrrepFileError("cannot open '" + path + "'");
  Reader rd(in, path);

  rd.Expect(kMagic);
  if (rd.Integer() != kVersion) throw IrrepFileError(path + ": unsupported version");
  rd.Expect("group");
  const std::string spec_text = rd.Token();
  rd.Expect("fingerprint");
  const std::string fp = rd.Token();
  if (fp != group->fingerprint_hex()) {
    throw FingerprintMismatchError(path + ": fingerprint " + fp + " (" + spec_text +
                                   ") does not match group " + group->spec().ToString() + " (" +
                                   group->fingerprint_hex() + ")");
  }
  rd.Expect("order");
  const long long order = rd.Integer();
  if (order != group->order()) throw FingerprintMismatchError(path + ": group order mismatch");
  rd.Expect("tol");
  const double tol = rd.Real();
  rd.Expect("count");
  const long long count = rd.Integer();
  if (count < 1 || count > order) throw IrrepFileError(path + ": bad irrep count");

  std::vector<Irrep> irreps;
  irreps.reserve(count);
  for (long long r = 0; r < count; ++r) {
    rd.Expect("irrep");
    if (rd.Integer() != r) throw IrrepFileError(path + ": irreps out of order");
    rd.Expect("dim");
    const long long dim = rd.Integer();
    if (dim < 1 || dim * dim > order) throw IrrepFileError(path + ": bad irrep dimension");
    Irrep rho;
    rho.dim = static_cast<int>(dim);
    rho.matrices.assign(order, ComplexMatrix(dim, dim));
    rho.character.resize(order);
    for (long long x = 0; x < order; ++x) {
      ComplexMatrix& m = rho.matrices[x];
      for (long long i = 0; i < dim; ++i) {
        for (long long j = 0; j < dim; ++j) {
          const double re = rd.Real();
          const double im = rd.Real();
          m(i, j) = Complex(re, im);
        }
      }
      rho.character[x] = m.trace();
    }
    irreps.push_back(std::move(rho));
  }
  rd.Expect("end");

  IrrepSet set(std::move(group), std::move(irreps), tol);
  const IrrepReport report = ValidateIrreps(set, tol);
  for (const auto& c : report.checks) {
    if (!c.passed) {
      throw IrrepFileError(path + ": cached irreps fail the " + c.name + " check (residual " +
                           FormatDouble(c.residual) + ")");
    }
  }
  return set;
}

}  // namespace quasimix
