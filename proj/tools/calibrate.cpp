// Offline calibration runs that pin the frozen constants used by the test
// suite: brute-force delta(k) values at sizes too large for CI, statistical
// spreads of the estimators, and threshold scans.  Each mode prints plain
// text; results are copied into the tests by hand.
#include <cstdio>
#include <cstring>
#include <string>

#include "wavecheck/dense_eig.hpp"
#include "wavecheck/spectrum.hpp"
#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

using namespace wavecheck;

namespace {

int mode_delta(int d, double lambda, int k, bool with_eig) {
  const WaveParams p{d, lambda};
  const SpectrumReport closed = delta_k(p, k, false);
  std::printf("d=%d lambda=%.6f k=%d closed=%.15g\n", d, lambda, k, closed.delta_closed);
  std::fflush(stdout);

  const BallIndex star = build_ball(BallKind::star, d, k - 1);
  const BallIndex edge = build_ball(BallKind::edge, d, k - 1);
  std::printf("star ball %d vertices, edge ball %d vertices\n", star.size(), edge.size());
  std::fflush(stdout);

  const double lds = logdet_sp_chol(covariance_matrix(star, p),
                                    eigenspace_dim(BallKind::star, d, k - 1));
  std::printf("logdet_sp_chol(star)=%.15g\n", lds);
  std::fflush(stdout);
  const double lde = logdet_sp_chol(covariance_matrix(edge, p),
                                    eigenspace_dim(BallKind::edge, d, k - 1));
  std::printf("logdet_sp_chol(edge)=%.15g\n", lde);
  const double brute = lds - d / 2.0 * lde;
  std::printf("delta_chol=%.15g  diff_closed=%.3e\n", brute, brute - closed.delta_closed);
  std::fflush(stdout);

  if (with_eig) {
    const double elds = logdet_sp(covariance_matrix(star, p),
                                  eigenspace_dim(BallKind::star, d, k - 1));
    const double elde = logdet_sp(covariance_matrix(edge, p),
                                  eigenspace_dim(BallKind::edge, d, k - 1));
    const double ebrute = elds - d / 2.0 * elde;
    std::printf("delta_eig=%.15g  diff_chol=%.3e  diff_closed=%.3e\n", ebrute,
                ebrute - brute, ebrute - closed.delta_closed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr,
                 "usage: wavecheck-calibrate <mode> [args]\n"
                 "  delta <d> <lambda> <k> [eig]   brute-force delta(k)\n");
    return 2;
  }
  const std::string mode = argv[1];
  if (mode == "delta" && argc >= 5)
    return mode_delta(std::atoi(argv[2]), std::atof(argv[3]), std::atoi(argv[4]),
                      argc > 5 && std::strcmp(argv[5], "eig") == 0);
  std::fprintf(stderr, "unknown mode or missing args\n");
  return 2;
}
