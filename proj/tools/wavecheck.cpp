// Batch-experiment front end.  Every subcommand prints one JSON document to
// stdout (schema + seed + timestamp fields) and is deterministic given its
// flags apart from the timestamp.  Exit codes: 0 success, 2 invalid
// parameters, 3 numerical failure; errors go to stderr as JSON.
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wavecheck/eigenlab.hpp"
#include "wavecheck/entropy.hpp"
#include "wavecheck/frame.hpp"
#include "wavecheck/graph.hpp"
#include "wavecheck/lift.hpp"
#include "wavecheck/rng.hpp"
#include "wavecheck/spectrum.hpp"
#include "wavecheck/stats.hpp"
#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

namespace {

using nlohmann::json;
using namespace wavecheck;

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(json& j) {
  j["timestamp"] = timestamp_utc();
  std::cout << j.dump(2) << "\n";
}

int fail(int code, const std::string& msg) {
  json e;
  e["schema"] = "wavecheck.error/1";
  e["error"] = msg;
  e["exit_code"] = code;
  std::cerr << e.dump() << "\n";
  return code;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands "--config file" into the flat key=value pairs the file holds,
// appending "--key=value" for every key not already given on the command
// line, so explicit flags always win.
std::vector<std::string> apply_config_file(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::invalid_argument("--config requires a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(s.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const std::string& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
    if (!overridden) out.push_back(flag + "=" + trim(s.substr(eq + 1)));
  }
  return out;
}

// ---------------------------------------------------------------- gen ----

struct GenOpts {
  int n = 2000, d = 3;
  std::uint64_t seed = 1;
  std::string out = "graph.edges";
  bool with_omega = false, with_lambda2 = false;
};

int run_gen(const GenOpts& o) {
  Rng rng(o.seed);
  const RegularGraph g = random_regular(o.n, o.d, rng);
  std::ostringstream edges;
  save_edge_list(g, edges);
  write_file(o.out, edges.str());
  json j;
  j["schema"] = "wavecheck.gen/1";
  j["seed"] = o.seed;
  j["n"] = g.n;
  j["d"] = g.d;
  j["edges"] = g.edge_count();
  j["connected"] = is_connected(g);
  j["file"] = o.out;
  if (o.with_omega) j["omega"] = essential_girth_omega(g);
  if (o.with_lambda2) {
    bool disconnected = false;
    j["lambda2"] = lambda2(g, &disconnected);
    j["lambda2_disconnected"] = disconnected;
  }
  emit(j);
  return 0;
}

// --------------------------------------------------------------- wave ----

struct WaveOpts {
  int d = 3, k = 8;
  double lambda = 1.0;
  int brute = -1;  // -1: automatic (k <= 6)
  std::string check;  // "", "markov"
  std::string csv;
};

int run_wave(const WaveOpts& o) {
  const WaveParams p{o.d, o.lambda};
  if (!p.in_spectrum())
    throw std::domain_error("lambda outside the tree spectrum [-2 sqrt(d-1), 2 sqrt(d-1)]");
  json j;
  j["schema"] = "wavecheck.wave/1";
  j["d"] = o.d;
  j["lambda"] = o.lambda;
  if (o.check == "markov") {
    const double dev = conditional_independence_check(p, 2);
    j["check"] = "markov";
    j["max_partial_covariance"] = dev;
    j["pass"] = dev <= 1e-8;
    emit(j);
    return 0;
  }
  if (!o.check.empty())
    throw std::invalid_argument("unknown --check value: " + o.check);
  json rows = json::array();
  std::ostringstream csv;
  csv << "k,s1,s2,s3,s4,delta_closed,delta_brute\n";
  for (int k = 1; k <= o.k; ++k) {
    const bool brute = o.brute < 0 ? k <= 6 : o.brute > 0;
    const SpectrumReport r = delta_k(p, k, brute);
    rows.push_back(json::parse(to_json_string(r)));
    char line[256];
    if (r.delta_brute)
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    k, r.s1, r.s2, r.s3, r.s4, r.delta_closed, *r.delta_brute);
    else
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,\n",
                    k, r.s1, r.s2, r.s3, r.s4, r.delta_closed);
    csv << line;
  }
  j["rows"] = rows;
  if (!o.csv.empty()) {
    write_file(o.csv, csv.str());
    j["csv"] = o.csv;
  }
  emit(j);
  return 0;
}

// --------------------------------------------------------- almost-eig ----

struct AlmostEigOpts {
  int n = 2000, d = 3, k = 1, r = 3;
  double lambda = 1.0, eps = 0.05;
  std::uint64_t seed = 1;
  std::int64_t lifts = 100000;
  std::string mode = "window";  // window | localized | kernel
};

int run_almost_eig(const AlmostEigOpts& o) {
  Rng rng(o.seed);
  const RegularGraph g = random_regular(o.n, o.d, rng);
  const WaveParams p{o.d, o.lambda};
  json j;
  j["schema"] = "wavecheck.almost-eig/1";
  j["seed"] = o.seed;
  j["n"] = o.n;
  j["d"] = o.d;
  j["lambda"] = o.lambda;
  j["mode"] = o.mode;
  j["ball_radius"] = o.k;

  Eigen::VectorXd v;
  double model_lambda = o.lambda;
  if (o.mode == "window") {
    const SpectralData sd = eigendecompose(g, EigMode::dense);
    v = spectral_window_vector(sd, o.lambda, o.eps, rng);
    const AlmostEigReport rep = almost_eig_bound_check(g, v, o.lambda, o.eps);
    json w;
    w["eps"] = o.eps;
    w["entry_sum"] = rep.entry_sum;
    w["residual"] = rep.residual_value;
    w["lambda2"] = rep.lambda2_value;
    w["bound_holds"] = rep.holds;
    j["window"] = w;
  } else if (o.mode == "localized") {
    const int center = static_cast<int>(rng.below(static_cast<std::uint64_t>(o.n)));
    v = localized_vector(g, center, o.r, p);
    j["localized"] = json{{"center", center}, {"r", o.r}};
  } else if (o.mode == "kernel") {
    const KernelCoeffs kc = linear_factor_coeffs(p, o.r);
    v = apply_local_kernel(g, kc, rng);
    j["kernel"] = json{{"r", o.r}, {"objective", kc.objective}};
  } else {
    throw std::invalid_argument("unknown --mode value: " + o.mode);
  }

  const BallIndex ball = build_ball(BallKind::star, o.d, o.k);
  const LocalStatsReport rep = local_stats(g, v, model_lambda, ball, o.lifts, rng);
  j["stats"] = json::parse(to_json_string(rep, o.seed));
  emit(j);
  return 0;
}

// ------------------------------------------------------------ entropy ----

struct EntropyOpts {
  std::string check = "debruijn";  // debruijn | ladder | entropy-inequality
  int dim = 1;
  std::vector<int> ladder = {4, 16, 64};
  double sigma = 1.0;
  std::int64_t samples = 200000;
  // entropy-inequality options
  int n = 5000, d = 3, a = 2, colorings = 20, r = 3;
  double lambda = 1.0;
  std::int64_t lifts = 1000000;
  std::uint64_t seed = 1;
  std::string csv;
};

GaussianMixture demo_mixture(int dim) {
  GaussianMixture gm;
  gm.weights = {0.6, 0.4};
  if (dim == 1) {
    gm.means = {Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.5)};
    gm.covs = {Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 0.36)};
  } else if (dim == 2) {
    Eigen::VectorXd m1(2), m2(2);
    m1 << -1.0, 0.5;
    m2 << 1.0, -0.5;
    Eigen::MatrixXd c1(2, 2), c2(2, 2);
    c1 << 1.0, 0.3, 0.3, 0.7;
    c2 << 0.5, -0.1, -0.1, 0.9;
    gm.means = {m1, m2};
    gm.covs = {c1, c2};
  } else {
    throw std::invalid_argument("entropy --check debruijn supports --dim 1 or 2");
  }
  return gm;
}

int run_entropy(const EntropyOpts& o) {
  json j;
  j["schema"] = "wavecheck.entropy/1";
  j["check"] = o.check;
  if (o.check == "debruijn") {
    const GaussianMixture gm = demo_mixture(o.dim);
    const std::vector<double> ts = {0.05, 0.1, 0.2, 0.5, 1.0};
    const std::vector<DeBruijnRow> rows = debruijn_check(gm, ts);
    json arr = json::array();
    std::ostringstream csv;
    csv << "t,entropy,entropy_derivative,fisher,rel_err\n";
    double worst = 0.0;
    for (const DeBruijnRow& r : rows) {
      arr.push_back(json{{"t", r.t},
                         {"entropy", r.entropy},
                         {"entropy_derivative", r.entropy_derivative},
                         {"fisher", r.fisher},
                         {"rel_err", r.rel_err}});
      char line[192];
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    r.t, r.entropy, r.entropy_derivative, r.fisher, r.rel_err);
      csv << line;
      worst = std::max(worst, r.rel_err);
    }
    j["dim"] = o.dim;
    j["rows"] = arr;
    j["max_rel_err"] = worst;
    j["pass"] = worst <= 1e-3;
    if (!o.csv.empty()) {
      write_file(o.csv, csv.str());
      j["csv"] = o.csv;
    }
  } else if (o.check == "ladder") {
    Rng rng(o.seed);
    const double target = 0.5 * std::log(2.0 * M_PI * std::exp(1.0) *
                                         (1.0 + o.sigma * o.sigma));
    const std::vector<LadderRow> rows = discretization_ladder_check(
        [](Rng& r) { return Eigen::VectorXd::Constant(1, r.normal()).eval(); },
        1, o.sigma, o.ladder, o.samples, target, rng);
    json arr = json::array();
    std::ostringstream csv;
    csv << "a,discrete,discrete_stderr,shifted,target,gap\n";
    for (const LadderRow& r : rows) {
      arr.push_back(json{{"a", r.a},
                         {"discrete", r.discrete.value},
                         {"discrete_stderr", r.discrete.stderr_},
                         {"shifted", r.shifted},
                         {"target", r.target},
                         {"gap", r.gap}});
      char line[192];
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    r.a, r.discrete.value, r.discrete.stderr_, r.shifted,
                    r.target, r.gap);
      csv << line;
    }
    j["seed"] = o.seed;
    j["sigma"] = o.sigma;
    j["samples"] = o.samples;
    j["rows"] = arr;
    if (!o.csv.empty()) {
      write_file(o.csv, csv.str());
      j["csv"] = o.csv;
    }
  } else if (o.check == "entropy-inequality") {
    Rng rng(o.seed);
    const RegularGraph g = random_regular(o.n, o.d, rng);
    const WaveParams p{o.d, o.lambda};
    const KernelCoeffs kc = linear_factor_coeffs(p, o.r);
    const Eigen::VectorXd v = apply_local_kernel(g, kc, rng);
    const EntropyInequalityAggregate agg = entropy_inequality_experiment(
        g, v, o.sigma, o.a, o.lifts, o.colorings, rng);
    j = json::parse(to_json_string(agg, o.seed));
    j["check"] = "entropy-inequality";
    j["n"] = o.n;
    j["d"] = o.d;
    j["a"] = o.a;
    j["sigma"] = o.sigma;
    j["lambda"] = o.lambda;
    j["kernel_r"] = o.r;
    j["colorings"] = o.colorings;
  } else {
    throw std::invalid_argument("unknown --check value: " + o.check);
  }
  emit(j);
  return 0;
}

// -------------------------------------------------------------- frame ----

struct FrameOpts {
  int d = 3;
  double lambda = 1.0;
};

int run_frame(const FrameOpts& o) {
  const FrameDecomposition f = frame_decomposition(o.d, o.lambda);
  json j;
  j["schema"] = "wavecheck.frame/1";
  j["d"] = o.d;
  j["lambda"] = o.lambda;
  j["s"] = f.s;
  j["t1"] = f.t1;
  j["t2"] = f.t2;
  j["frame_sum_defect"] = frame_sum_defect(f);
  j["umbrella_defect"] = umbrella_defect(f);
  j["reconstruction_defect"] = reconstruction_defect(f);
  emit(j);
  return 0;
}

// --------------------------------------------------------- lift-stats ----

struct LiftStatsOpts {
  std::string graph;
  double lambda = 1.0;
  int k = 1;
  std::int64_t lifts = 100000;
  std::uint64_t seed = 1;
};

int run_lift_stats(const LiftStatsOpts& o) {
  std::ifstream in(o.graph);
  if (!in) throw std::invalid_argument("cannot open graph file: " + o.graph);
  const RegularGraph g = load_edge_list(in);
  const SpectralData sd = eigendecompose(g, EigMode::dense);
  int best = 0;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(sd.eigenvalues(i) - o.lambda) <
        std::abs(sd.eigenvalues(best) - o.lambda))
      best = i;
  const double lambda_used = sd.eigenvalues(best);
  Rng rng(o.seed);
  const BallIndex ball = build_ball(BallKind::star, g.d, o.k);
  const LocalStatsReport rep =
      local_stats(g, sd.eigenvectors.col(best), lambda_used, ball, o.lifts, rng);
  json j = json::parse(to_json_string(rep, o.seed));
  j["file"] = o.graph;
  j["n"] = g.n;
  j["d"] = g.d;
  j["lambda_target"] = o.lambda;
  j["lambda_used"] = lambda_used;
  j["ball_radius"] = o.k;
  emit(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-wave and almost-eigenvector experiment runner"};
  app.require_subcommand(1);

  GenOpts gen;
  CLI::App* cgen = app.add_subcommand("gen", "generate a random regular graph");
  cgen->add_option("--config", "flat key=value config file; flags override it");
  cgen->add_option("--n", gen.n, "vertex count");
  cgen->add_option("--d", gen.d, "degree");
  cgen->add_option("--seed", gen.seed, "random seed");
  cgen->add_option("--out", gen.out, "edge-list output path");
  cgen->add_flag("--omega", gen.with_omega, "include essential-girth omega");
  cgen->add_flag("--lambda2", gen.with_lambda2, "include second eigenvalue");

  WaveOpts wave;
  CLI::App* cwave = app.add_subcommand("wave", "tree covariance spectra and log-determinant gaps");
  cwave->add_option("--config", "flat key=value config file; flags override it");
  cwave->add_option("--d", wave.d, "degree");
  cwave->add_option("--lambda", wave.lambda, "eigenvalue");
  cwave->add_option("--k", wave.k, "max ball radius");
  cwave->add_option("--brute", wave.brute, "force (1) or skip (0) brute-force check");
  cwave->add_option("--check", wave.check, "extra check: markov");
  cwave->add_option("--csv", wave.csv, "tidy CSV output path");

  AlmostEigOpts ae;
  CLI::App* cae = app.add_subcommand("almost-eig", "almost-eigenvector constructions and lift statistics");
  cae->add_option("--config", "flat key=value config file; flags override it");
  cae->add_option("--n", ae.n, "vertex count");
  cae->add_option("--d", ae.d, "degree");
  cae->add_option("--seed", ae.seed, "random seed");
  cae->add_option("--lambda", ae.lambda, "target eigenvalue");
  cae->add_option("--eps", ae.eps, "window half-width (window mode)");
  cae->add_option("--mode", ae.mode, "window | localized | kernel");
  cae->add_option("--r", ae.r, "radius of the localized/kernel construction");
  cae->add_option("--k", ae.k, "lift ball radius");
  cae->add_option("--lifts", ae.lifts, "lift sample count");

  EntropyOpts ent;
  CLI::App* cent = app.add_subcommand("entropy", "entropy functionals and inequalities");
  cent->add_option("--config", "flat key=value config file; flags override it");
  cent->add_option("--check", ent.check, "debruijn | ladder | entropy-inequality");
  cent->add_option("--dim", ent.dim, "mixture dimension (debruijn)");
  cent->add_option("--a", ent.ladder, "grid resolutions (ladder)")->delimiter(',');
  cent->add_option("--sigma", ent.sigma, "noise scale");
  cent->add_option("--samples", ent.samples, "sample count (ladder)");
  cent->add_option("--n", ent.n, "vertex count (entropy-inequality)");
  cent->add_option("--d", ent.d, "degree (entropy-inequality)");
  cent->add_option("--alphabet-a", ent.a, "grid parameter a (entropy-inequality)");
  cent->add_option("--colorings", ent.colorings, "coloring repetitions");
  cent->add_option("--r", ent.r, "kernel radius (entropy-inequality)");
  cent->add_option("--lambda", ent.lambda, "kernel eigenvalue");
  cent->add_option("--lifts", ent.lifts, "lift samples per coloring");
  cent->add_option("--seed", ent.seed, "random seed");
  cent->add_option("--csv", ent.csv, "tidy CSV output path");

  FrameOpts fr;
  CLI::App* cfr = app.add_subcommand("frame", "single-star frame decomposition identities");
  cfr->add_option("--config", "flat key=value config file; flags override it");
  cfr->add_option("--d", fr.d, "degree");
  cfr->add_option("--lambda", fr.lambda, "eigenvalue");

  LiftStatsOpts ls;
  CLI::App* cls = app.add_subcommand("lift-stats", "lift statistics of an eigenvector of a stored graph");
  cls->add_option("--config", "flat key=value config file; flags override it");
  cls->add_option("--graph", ls.graph, "edge-list file")->required();
  cls->add_option("--lambda", ls.lambda, "target eigenvalue");
  cls->add_option("--k", ls.k, "lift ball radius");
  cls->add_option("--lifts", ls.lifts, "lift sample count");
  cls->add_option("--seed", ls.seed, "random seed");

  std::vector<std::string> merged;
  try {
    merged = apply_config_file(argc, argv);
  } catch (const std::exception& e) {
    return fail(2, e.what());
  }
  std::vector<const char*> cargs;
  cargs.reserve(merged.size());
  for (const std::string& a : merged) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(2, e.what());
  }

  try {
    if (*cgen) return run_gen(gen);
    if (*cwave) return run_wave(wave);
    if (*cae) return run_almost_eig(ae);
    if (*cent) return run_entropy(ent);
    if (*cfr) return run_frame(fr);
    if (*cls) return run_lift_stats(ls);
  } catch (const std::invalid_argument& e) {
    return fail(2, e.what());
  } catch (const std::domain_error& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(3, e.what());
  }
  return fail(2, "no subcommand selected");
}
