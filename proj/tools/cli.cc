#include "cli.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "quasimix/boost.h"
#include "quasimix/nof.h"
#include "quasimix/repair.h"
#include "quasimix/uniformity.h"

namespace quasimix::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

const char* Bool(bool b) { return b ? "true" : "false"; }

void Require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw UsageError("invalid --" + field + ": " + why);
}

ConvolutionEngine ParseEngine(const std::string& s) {
  if (s == "auto") return ConvolutionEngine::kAuto;
  if (s == "direct") return ConvolutionEngine::kDirect;
  if (s == "fourier") return ConvolutionEngine::kFourier;
  throw UsageError("invalid --engine: expected auto, direct or fourier, got '" + s + "'");
}

std::shared_ptr<const GroupTable> GroupOf(const RunConfig& c) {
  try {
    return MakeGroup(GroupSpec::Parse(c.group));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid --group: ") + e.what());
  }
}

fs::path CacheDir(const RunConfig& c) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  const char* env = std::getenv("QUASIMIX_CACHE_DIR");
  return env && *env ? fs::path(env) : fs::path(".quasimix-cache");
}

fs::path CachePath(const RunConfig& c, const GroupTable& g) {
  return CacheDir(c) / ("irreps-" + g.fingerprint_hex() + "-tol" + Num(c.tol) + "-seed" +
                        std::to_string(c.seed) + ".txt");
}

// Loads the cached irreps for (group, tol, seed) or computes and stores
// them. A cache file that fails to load is an error, not a miss.
std::shared_ptr<const IrrepSet> IrrepsOf(const RunConfig& c, std::shared_ptr<const GroupTable> g,
                                         std::ostream& err) {
  Require(c.tol >= 1e-12 && c.tol <= 1e-6, "tol", "must be in [1e-12, 1e-6]");
  if (c.no_cache) return std::make_shared<const IrrepSet>(ComputeIrreps(g, c.tol, c.seed));
  const fs::path path = CachePath(c, *g);
  if (fs::exists(path)) return std::make_shared<const IrrepSet>(LoadIrreps(path.string(), g));
  auto s = std::make_shared<const IrrepSet>(ComputeIrreps(g, c.tol, c.seed));
  try {
    fs::create_directories(path.parent_path());
    SaveIrreps(*s, path.string());
  } catch (const std::exception& e) {
    err << "warning: irrep cache not written: " << e.what() << '\n';
  }
  return s;
}

std::string DimsText(const IrrepSet& s) {
  std::string t = "[";
  const std::vector<int> dims = s.dims();
  for (std::size_t i = 0; i < dims.size(); ++i) t += (i ? "," : "") + std::to_string(dims[i]);
  return t + "]";
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

int PartiesForArity(int m) {
  for (int parties = 2; parties <= 4; ++parties)
    if (m == 1 << parties) return parties;
  throw UsageError("invalid --m: the box input needs m = 2^k with k in [2, 4], got " +
                   std::to_string(m));
}

// Box-norm s for m = 2^k, or a dist file.
Dist InputOf(const RunConfig& c, const ProductGroup& space) {
  if (c.input == "box") return ExactS(space.base_ptr(), PartiesForArity(space.arity())).ToDist();
  return ReadDist(c.input, space);
}

double TargetOf(const RunConfig& c, const ProductGroup& space) {
  return c.target_eps ? *c.target_eps : std::pow(space.base_order(), -space.arity());
}

std::vector<double> RandomWeights(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) s += (x = e(rng));
  for (double& x : v) x /= s;
  return v;
}

int CmdIrreps(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto s = IrrepsOf(c, GroupOf(c), err);
  out << "dims=" << DimsText(*s) << " sum_sq=" << s->SumOfSquares()
      << " d=" << QuasirandomnessDegree(*s) << '\n';
  return kExitOk;
}

struct Row {
  std::string name;
  double residual, tolerance;
  bool ok;
  Row(std::string n, double r, double t) : name(std::move(n)), residual(r), tolerance(t), ok(r <= t) {}
  Row(std::string n, double r, double t, bool passed)
      : name(std::move(n)), residual(r), tolerance(t), ok(passed) {}
  bool passed() const { return ok; }
};

std::vector<Row> ParsevalRows(const std::shared_ptr<const SpectralBasis>& basis, int m,
                              std::mt19937_64& rng) {
  const ProductGroup space(basis->irreps().group_ptr(), m);
  double roundtrip = 0.0, parseval = 0.0;
  for (int t = 0; t < 5; ++t) {
    const std::vector<double> f = RandomWeights(space.size(), rng);
    const FourierData c = ProductFourierForward(f, m, basis);
    double spectral = 0.0;
    ForEachBlock(*basis, m, [&](const BlockLayout& b) {
      double sq = 0.0;
      for (std::size_t r : b.row)
        for (std::size_t col : b.col) sq += std::norm(c.data()[b.base + r + col]);
      spectral += static_cast<double>(b.row.size()) * sq;
    });
    spectral *= static_cast<double>(space.size());
    double direct = 0.0;
    for (double v : f) direct += v * v;
    parseval = std::max(parseval, std::abs(spectral - direct) / direct);
    const std::vector<double> back = ProductFourierInverseReal(c);
    for (std::size_t x = 0; x < f.size(); ++x)
      roundtrip = std::max(roundtrip, std::abs(back[x] - f[x]));
  }
  const std::string suffix = m == 1 ? "" : "_m" + std::to_string(m);
  return {Row("roundtrip" + suffix, roundtrip, 1e-10), Row("parseval" + suffix, parseval, 1e-10)};
}

Row ConvolutionRow(const std::shared_ptr<const SpectralBasis>& basis, int m, int pairs,
                   std::mt19937_64& rng) {
  const ProductGroup space(basis->irreps().group_ptr(), m);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const Dist p(space, RandomWeights(space.size(), rng));
    const Dist q(space, RandomWeights(space.size(), rng));
    const Dist a = ConvolveDirect(p, q), b = ConvolveFourier(p, q, basis);
    for (std::size_t x = 0; x < space.size(); ++x) worst = std::max(worst, std::abs(a[x] - b[x]));
  }
  return Row("convolution" + (m == 1 ? std::string() : "_m" + std::to_string(m)), worst, 1e-9);
}

int CmdVerify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Require(c.which == "all" || c.which == "schur" || c.which == "parseval" ||
              c.which == "convolution",
          "which", "expected schur, parseval, convolution or all");
  const auto g = GroupOf(c);
  std::shared_ptr<const IrrepSet> s;
  try {
    s = IrrepsOf(c, g, err);
  } catch (const IrrepFileError& e) {
    out << "check residual tolerance status\n"
        << "cache - - fail\n"
        << "all_pass=false\n";
    err << "irrep cache rejected: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  const auto basis = MakeSpectralBasis(s);
  std::mt19937_64 rng(c.seed);
  const bool square_ok = static_cast<std::size_t>(g->order()) * g->order() <= 20'000;
  std::vector<Row> rows;
  if (c.which == "all" || c.which == "schur") {
    for (const ResidualCheck& r : ValidateIrreps(*s, 1e-8).checks)
      rows.emplace_back(r.name, r.residual, r.tolerance, r.passed);
  }
  if (c.which == "all" || c.which == "parseval") {
    for (int m = 1; m <= (square_ok ? 2 : 1); ++m)
      for (Row& r : ParsevalRows(basis, m, rng)) rows.push_back(std::move(r));
  }
  if (c.which == "all" || c.which == "convolution") {
    rows.push_back(ConvolutionRow(basis, 1, 20, rng));
    if (square_ok) rows.push_back(ConvolutionRow(basis, 2, 3, rng));
  }
  bool all = true;
  out << "check residual tolerance status\n";
  for (const Row& r : rows) {
    out << r.name << ' ' << Num(r.residual) << ' ' << Num(r.tolerance) << ' '
        << (r.passed() ? "pass" : "fail") << '\n';
    all = all && r.passed();
  }
  out << "all_pass=" << Bool(all) << '\n';
  return all ? kExitOk : kExitCheckFailed;
}

int CmdFlatten(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ProductGroup space(GroupOf(c), c.m);
  Require(c.k >= 1 && c.k <= c.m, "k", "must satisfy 1 <= k <= m");
  CheckDenseBudget(space);
  const auto irreps = IrrepsOf(c, space.base_ptr(), err);
  const int d = c.d ? *c.d : QuasirandomnessDegree(*irreps);
  Require(d >= 1, "d", "must be >= 1");
  const Dist p = InputOf(c, space);
  FlattenRecord r;
  try {
    r = FlattenBoundCheck(p, c.k, d, MakeSpectralBasis(irreps), ParseEngine(c.engine));
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  const std::string ratio = r.ratio ? Num(*r.ratio) : "floor";
  if (!c.output.empty()) {
    std::ostringstream rep;
    rep << "group=" << c.group << "\nm=" << c.m << "\nk=" << c.k << "\nd=" << d
        << "\neps_k=" << Num(r.eps_k) << "\nfactor=" << Num(r.factor) << "\nlhs=" << Num(r.lhs)
        << "\nrhs=" << Num(r.rhs) << "\nratio=" << ratio << "\nhold=" << Bool(r.holds) << '\n';
    WriteText(c.output, rep.str());
  }
  out << "lhs=" << Num(r.lhs) << " rhs=" << Num(r.rhs) << " ratio=" << ratio
      << " hold=" << Bool(r.holds) << '\n';
  return r.holds ? kExitOk : kExitCheckFailed;
}

void EmitCsv(const RunConfig& c, const ExperimentLog& log, std::ostream& out) {
  if (c.output.empty()) {
    out << log.ToCsv(c.timing);
  } else {
    log.WriteCsv(c.output, c.timing);
  }
}

int CmdBoost(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ProductGroup space(GroupOf(c), c.m);
  Require(c.k >= 1 && c.k <= c.m, "k", "must satisfy 1 <= k <= m");
  Require(c.max_steps >= 0, "max-steps", "must be >= 0");
  CheckDenseBudget(space);
  BoostConfig config;
  config.mode = c.mode.empty() ? BoostMode::kSelfSquare : ParseBoostMode(c.mode);
  config.ks = {c.k};
  config.max_steps = c.max_steps;
  config.target_eps = TargetOf(c, space);
  config.engine = ParseEngine(c.engine);
  const auto irreps = IrrepsOf(c, space.base_ptr(), err);
  const Dist p = InputOf(c, space);
  const BoostResult r = BoostPipeline(p, config, MakeSpectralBasis(irreps));

  // Monotonicity is asserted only where the flattening bound applies.
  const double h = space.base_order();
  const int d = QuasirandomnessDegree(*irreps);
  const double factor = 2.0 * std::pow(h, c.m - c.k) * std::pow(d, -(c.k + 1));
  const bool asserted = factor < 1.0 && r.log.steps()[0].eps_k[0] <= std::pow(h, -c.k);
  bool decreasing = true;
  const auto& steps = r.log.steps();
  for (std::size_t t = 1; t < steps.size(); ++t) {
    if (AtNumericalFloor(steps[t - 1].l2_sq, space.size())) break;
    if (!(steps[t].l2_sq < steps[t - 1].l2_sq)) decreasing = false;
  }
  EmitCsv(c, r.log, out);
  out << "reached_target=" << Bool(r.reached_target) << " steps=" << r.steps
      << " copies=" << r.copies << " eps_uniform=" << Num(steps.back().linf_rel)
      << " l2_decreasing=" << Bool(decreasing) << " monotone_asserted=" << Bool(asserted) << '\n';
  return r.reached_target && (decreasing || !asserted) ? kExitOk : kExitCheckFailed;
}

int CmdNof(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto g = GroupOf(c);
  Require(c.parties >= 2 && c.parties <= 4, "parties", "must be in [2, 4]");
  Require(c.max_steps >= 1, "max-steps", "must be >= 1 (t_max)");
  const ProductGroup space(g, 1 << c.parties);
  CheckDenseBudget(space);
  const SUniformityReport rep = VerifySUniformity(g, c.parties);
  const BoxDist s = ExactS(g, c.parties);
  const auto irreps = IrrepsOf(c, g, err);
  const std::vector<int> ks = {std::min(3, space.arity())};
  const AdvantageCurve curve = ComputeAdvantageCurve(s, c.max_steps, TargetOf(c, space),
                                                     MakeSpectralBasis(irreps), ks,
                                                     ParseEngine(c.engine));
  EmitCsv(c, curve.log, out);
  out << "three_wise_eps=" << rep.three_wise_eps.ToString()
      << " four_wise_deviation=" << rep.four_wise_deviation.ToString()
      << " identity_exhaustive=" << Bool(rep.identity_exhaustive)
      << " monotone=" << Bool(curve.monotone) << '\n';
  out << "3-uniform=" << Bool(rep.is_3_uniform)
      << " reached_target_at_t=" << curve.reached_target_at_t << '\n';
  const bool ok = rep.is_3_uniform && curve.monotone && curve.reached_target_at_t > 0;
  return ok ? kExitOk : kExitCheckFailed;
}

int CmdRepair(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ProductGroup space(GroupOf(c), c.m);
  Require(c.k >= 1 && c.k <= c.m, "k", "must satisfy 1 <= k <= m");
  Require(c.delta >= 0.0 && c.delta <= 1.0, "delta", "must be in [0, 1]");
  CheckDenseBudget(space);
  RepairOptions options;
  options.mode = c.mode.empty() ? RepairMode::kPaperFormula : ParseRepairMode(c.mode);
  options.strict = c.strict;
  const auto irreps = IrrepsOf(c, space.base_ptr(), err);
  const Dist p = Dist::Mix(InputOf(c, space), Dist::PointMass(space, 0), c.delta);
  try {
    const RepairResult r = Repair(p, c.k, MakeSpectralBasis(irreps), options);
    const std::string text = r.certificate.ToText();
    if (!c.output.empty()) WriteText(c.output, text);
    out << text;
    return r.certificate.ok() ? kExitOk : kExitCheckFailed;
  } catch (const RepairError& e) {
    err << "repair failed: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string kind;
  double target = 0.0;
  int d = 0;
  CLI::App app{"Fourier analysis over product groups and its experiments", "quasimix"};
  app.set_config("--config", "", "key=value file of defaults; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--group", c.group, "cyclic:<n>, sl2:<q> or a5");
  app.add_option("--m", c.m, "arity of the product space");
  app.add_option("--k", c.k, "uniformity order");
  app.add_option("--parties", c.parties, "nof parties (arity 2^parties)");
  app.add_option("--seed", c.seed, "seed for irreps and random instances");
  app.add_option("--tol", c.tol, "irrep numerical tolerance");
  app.add_option("--max-steps", c.max_steps, "pipeline steps; t_max for nof");
  auto* target_opt = app.add_option("--target-eps", target, "stop at this eps_uniform");
  app.add_option("--output", c.output, "log or report path");
  app.add_option("--engine", c.engine, "auto, direct or fourier");
  app.add_option("--mode", c.mode, "self-square|fresh-copy, or paper-formula|adaptive");
  app.add_option("--input", c.input, "'box' or a dist file");
  auto* d_opt = app.add_option("--d", d, "quasirandomness degree for flatten");
  app.add_option("--delta", c.delta, "repair perturbation weight");
  app.add_option("--which", c.which, "verify: schur, parseval, convolution or all");
  app.add_option("--cache-dir", c.cache_dir, "irrep cache directory");
  app.add_flag("--no-cache", c.no_cache, "recompute irreps");
  app.add_flag("--timing", c.timing, "write wall-clock seconds to CSV logs");
  app.add_flag("--strict", c.strict, "repair: fail instead of capping beta at 1");

  auto* irreps = app.add_subcommand("irreps", "compute or load irreps and summarize them");
  auto* verify = app.add_subcommand("verify", "residual checks for irreps and transforms");
  auto* experiment = app.add_subcommand("experiment", "run one experiment");
  experiment->add_option("kind", kind, "flatten, boost, nof or repair")
      ->required()
      ->check(CLI::IsMember({"flatten", "boost", "nof", "repair"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (target_opt->count() > 0) c.target_eps = target;
  if (d_opt->count() > 0) c.d = d;

  try {
    Require(c.m >= 1, "m", "must be >= 1");
    if (irreps->parsed()) return CmdIrreps(c, out, err);
    if (verify->parsed()) return CmdVerify(c, out, err);
    if (kind == "flatten") return CmdFlatten(c, out, err);
    if (kind == "boost") return CmdBoost(c, out, err);
    if (kind == "nof") return CmdNof(c, out, err);
    return CmdRepair(c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace quasimix::cli
