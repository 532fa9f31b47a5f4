#include "dfrc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace dfrc {

CMatrix gen_streams(int n_streams, int frame_len, std::uint64_t seed) {
  if (n_streams < 1 || frame_len < 1) throw Error(ErrorCode::InvalidArgument, "stream count and length must be positive");
  if (n_streams > frame_len)
    throw Error(ErrorCode::TooManyStreams, "cannot fit " + std::to_string(n_streams) + " orthogonal streams in " +
                                               std::to_string(frame_len) + " samples");
  Rng rng(seed);
  CMatrix G = complex_gaussian(frame_len, n_streams, 1.0, rng);
  Eigen::HouseholderQR<CMatrix> qr(G);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(frame_len, n_streams);
  return std::sqrt(static_cast<double>(frame_len)) * Q.adjoint();
}

CMatrix synth_tx(const CMatrix& W, const CMatrix& S) {
  if (W.cols() != S.rows()) throw Error(ErrorCode::DimensionMismatch, "beamformer count must equal stream count");
  return W * S;
}

CMatrix radar_echo(const CMatrix& X, const CMatrix& G, double noise_radar, std::uint64_t seed) {
  if (G.cols() != X.rows()) throw Error(ErrorCode::DimensionMismatch, "response and transmit sizes disagree");
  CMatrix Y = G * X;
  if (noise_radar > 0.0) {
    Rng rng(seed);
    Y += complex_gaussian(Y.rows(), Y.cols(), noise_radar, rng);
  }
  return Y;
}

CMatrix radar_echo(const CMatrix& X, const PointTarget& t, const ArrayGeometry& g, double noise_radar,
                   std::uint64_t seed) {
  return radar_echo(X, response_point(t, g), noise_radar, seed);
}

namespace {

struct Likelihood {
  CMatrix YX;   // Y X^H
  CMatrix XX;   // X X^H
  const ArrayGeometry* g;

  // returns |b^H Y X^H a|^2 / (||b||^2 a^H X X^H a) and the matching alpha
  double eval(double theta, Complex* alpha = nullptr) const {
    const CVector a = steering(theta, g->n_tx);
    const CVector b = steering(theta, g->n_rx);
    const double den = g->n_rx * a.dot(XX * a).real();
    if (!(den > 0.0)) return -1.0;
    const Complex num = b.dot(YX * a);
    if (alpha) *alpha = num / den;
    return std::norm(num) / den;
  }
};

}  // namespace

PointEstimate mle_point(const CMatrix& Y, const CMatrix& X, const GridSpec& grid, const ArrayGeometry& g) {
  if (Y.rows() != g.n_rx || X.rows() != g.n_tx || Y.cols() != X.cols())
    throw Error(ErrorCode::DimensionMismatch, "echo/transmit sizes disagree with geometry");
  if (!(grid.step > 0.0) || !(grid.half_width >= 0.0)) throw Error(ErrorCode::InvalidArgument, "bad grid");
  Likelihood lk{Y * X.adjoint(), X * X.adjoint(), &g};

  const int n = static_cast<int>(std::floor(2.0 * grid.half_width / grid.step + 1e-9)) + 1;
  const double start = grid.center - grid.half_width;
  int best = -1;
  double best_val = -1.0;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    vals[i] = lk.eval(start + i * grid.step);
    if (vals[i] > best_val) {
      best_val = vals[i];
      best = i;
    }
  }
  if (best < 0 || best_val < 0.0) throw Error(ErrorCode::DegenerateSignal, "no transmit energy towards any grid angle");

  double theta = start + best * grid.step;
  double h = grid.step;
  const double lo = start, hi = start + (n - 1) * grid.step;
  for (int it = 0; it < 100 && h > 1e-12; ++it) {
    const double jm = lk.eval(theta - h), j0 = lk.eval(theta), jp = lk.eval(theta + h);
    const double curv = jm - 2.0 * j0 + jp;
    if (!(curv < 0.0)) {
      // not locally concave at this spacing: move uphill or shrink
      if (jp > j0 && jp >= jm) theta += h;
      else if (jm > j0) theta -= h;
      else h *= 0.5;
      theta = std::clamp(theta, lo, hi);
      continue;
    }
    double delta = std::clamp(0.5 * h * (jm - jp) / curv, -h, h);
    theta = std::clamp(theta + delta, lo, hi);
    h = std::clamp(2.0 * std::abs(delta), 1e-3 * h, 0.5 * h);
  }
  PointEstimate est;
  est.theta = theta;
  lk.eval(theta, &est.alpha);
  return est;
}

CMatrix mle_extended(const CMatrix& Y, const CMatrix& X) {
  if (Y.cols() != X.cols()) throw Error(ErrorCode::DimensionMismatch, "echo and transmit lengths differ");
  const CMatrix gram = X * X.adjoint();
  RVector ev = herm_eigenvalues(gram);
  if (ev.size() == 0 || !(ev(0) > 1e-10 * ev(ev.size() - 1)))
    throw Error(ErrorCode::SingularGram, "transmit Gram matrix is singular; too few independent streams");
  Eigen::LLT<CMatrix> llt(gram);
  // G_hat = Y X^H gram^{-1}  <=>  gram G_hat^H = X Y^H
  return llt.solve(X * Y.adjoint()).adjoint();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

double alpha_for_snr(double snr_db, const Scenario& s) {
  return std::sqrt(db_to_linear(snr_db) * s.noise_radar / (s.frame_len * s.power_budget));
}

std::vector<McRow> monte_carlo_point(const Scenario& s, const CMatrix& W, const std::vector<double>& snr_db,
                                     const GridSpec& grid, const McConfig& cfg) {
  if (W.rows() != s.geometry.n_tx) throw Error(ErrorCode::DimensionMismatch, "beamformers must have N_t rows");
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  const CMatrix R = W * W.adjoint();
  std::vector<McRow> rows;
  for (std::size_t j = 0; j < snr_db.size(); ++j) {
    PointTarget tgt = s.point;
    tgt.alpha = alpha_for_snr(snr_db[j], s) * (std::abs(s.point.alpha) > 0.0 ? s.point.alpha / std::abs(s.point.alpha)
                                                                             : Complex(1.0, 0.0));
    const double crb = crb_point_theta(R, tgt.theta, tgt.alpha, s);
    std::vector<double> err2(cfg.trials);
    parallel_for(
        static_cast<std::size_t>(cfg.trials),
        [&](std::size_t i) {
          // common random numbers: trial i draws the same streams and noise at every SNR
          const std::uint64_t ts = derive_seed(cfg.seed, i);
          CMatrix S = gen_streams(static_cast<int>(W.cols()), s.frame_len, derive_seed(ts, 1));
          CMatrix X = synth_tx(W, S);
          CMatrix Y = radar_echo(X, tgt, s.geometry, s.noise_radar, derive_seed(ts, 2));
          GridSpec gs = grid;
          gs.center = tgt.theta;
          PointEstimate e = mle_point(Y, X, gs, s.geometry);
          err2[i] = (e.theta - tgt.theta) * (e.theta - tgt.theta);
        },
        cfg.threads);
    double sum = 0.0;
    for (double e : err2) sum += e;  // fixed order keeps results bit-identical
    McRow row;
    row.parameter = snr_db[j];
    row.empirical = std::sqrt(sum / cfg.trials);
    row.bound = std::sqrt(crb);
    row.trials = cfg.trials;
    row.seed = cfg.seed;
    rows.push_back(row);
  }
  return rows;
}

McRow monte_carlo_extended(const Scenario& s, const CMatrix& W, const McConfig& cfg, std::uint64_t sweep_index) {
  if (W.rows() != s.geometry.n_tx) throw Error(ErrorCode::DimensionMismatch, "beamformers must have N_t rows");
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  CMatrix G;
  if (s.extended_response) {
    G = *s.extended_response;
  } else {
    Rng rng(derive_seed(cfg.seed, sweep_index, 0xC0FFEE));
    G = random_extended_response(s.geometry, rng);
  }
  const double crb = crb_extended(W * W.adjoint(), s);
  std::vector<double> err2(cfg.trials);
  parallel_for(
      static_cast<std::size_t>(cfg.trials),
      [&](std::size_t i) {
        const std::uint64_t ts = derive_seed(cfg.seed, sweep_index, i);
        CMatrix S = gen_streams(static_cast<int>(W.cols()), s.frame_len, derive_seed(ts, 1));
        CMatrix X = synth_tx(W, S);
        CMatrix Y = radar_echo(X, G, s.noise_radar, derive_seed(ts, 2));
        err2[i] = (mle_extended(Y, X) - G).squaredNorm();
      },
      cfg.threads);
  double sum = 0.0;
  for (double e : err2) sum += e;
  McRow row;
  row.parameter = static_cast<double>(sweep_index);
  row.empirical = sum / cfg.trials;
  row.bound = crb;
  row.trials = cfg.trials;
  row.seed = cfg.seed;
  return row;
}

}  // namespace dfrc
