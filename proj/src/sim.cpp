#include "ecspade/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ecspade {

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidScenario, msg); };
  if (d < 1) fail("d must be >= 1");
  if (!(nu > 2.0)) fail("nu must be > 2");
  if (!std::isfinite(mu_fill) || !std::isfinite(target_T)) fail("mu_fill and target_T must be finite");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
  if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0, 1]");
  if (n_pairs < 1) fail("n_pairs must be >= 1");
  if (n_trials < 1) fail("n_trials must be >= 1");
  if (detectors.empty()) fail("no detectors requested");
}

BackgroundModel Scenario::background() const {
  return make_background(Vector::Constant(d, mu_fill), Matrix::Identity(d, d), nu);
}

Vector Scenario::target() const {
  Vector t = Vector::Constant(d, mu_fill);
  t(0) += target_T;
  return t;
}

std::uint64_t fingerprint(const Scenario& s) {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << s.d << ";nu=" << s.nu << ";mu_fill=" << s.mu_fill << ";T=" << s.target_T << ";alpha=" << s.alpha
     << ";beta=" << s.beta << ";n_pairs=" << s.n_pairs << ";n_trials=" << s.n_trials << ";seed=" << s.seed
     << ";constrained=" << s.constrained_alpha << ";detectors=";
  for (DetectorId id : s.detectors) os << to_string(id) << ',';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const DetectorScores& ScorePairs::of(DetectorId id) const {
  for (const auto& s : scores) {
    if (s.detector == id) return s;
  }
  throw Error(ErrorCode::OutOfRange, std::string("detector not in score set: ") + std::string(to_string(id)));
}

ScorePairs run_trial(const Scenario& scenario, int trial_index, std::uint64_t stream) {
  scenario.validate();
  if (trial_index < 0 || trial_index >= scenario.n_trials) {
    throw Error(ErrorCode::OutOfRange, "trial index outside [0, n_trials)");
  }
  const BackgroundModel model = scenario.background();
  const TargetContext ctx = make_target_context(model, scenario.target());
  GlrtOptions opts;
  opts.constrained_alpha = scenario.constrained_alpha;
  const DetectorBank bank(model, ctx, scenario.alpha, scenario.beta, opts);

  StreamGenerator gen(scenario.seed, stream);
  const SampleBatch batch = sample(model, scenario.n_pairs, gen);

  ScorePairs out;
  out.beta = scenario.beta;
  out.trial = trial_index;
  out.stream = stream;
  out.fingerprint = fingerprint(scenario);
  for (DetectorId id : scenario.detectors) {
    DetectorScores ds{id, {}, {}};
    ds.h0.reserve(static_cast<std::size_t>(scenario.n_pairs));
    ds.h1.reserve(static_cast<std::size_t>(scenario.n_pairs));
    out.scores.push_back(std::move(ds));
  }

  const Vector implant = scenario.alpha * ctx.target();
  Vector x1(model.dim());
  for (Eigen::Index i = 0; i < batch.rows.rows(); ++i) {
    const Vector z = batch.rows.row(i).transpose();
    x1 = scenario.beta * z + implant;
    for (auto& ds : out.scores) {
      try {
        ds.h0.push_back(bank.score(ds.detector, z));
        ds.h1.push_back(bank.score(ds.detector, x1));
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (pair " + std::to_string(i) + ", beta " +
                                  std::to_string(scenario.beta) + ", trial " + std::to_string(trial_index) + ")");
      }
    }
  }
  return out;
}

ScorePairs run_trial(const Scenario& scenario, int trial_index) {
  return run_trial(scenario, trial_index, static_cast<std::uint64_t>(trial_index));
}

std::uint64_t sweep_stream(std::size_t beta_index, int trial) {
  return (static_cast<std::uint64_t>(beta_index + 1) << 32) | static_cast<std::uint32_t>(trial);
}

std::vector<BetaSweep> sweep(const Scenario& scenario_template, const std::vector<double>& beta_values,
                             unsigned threads) {
  if (beta_values.empty()) throw Error(ErrorCode::InvalidScenario, "beta list is empty");
  std::vector<Scenario> per_beta;
  for (double b : beta_values) {
    Scenario s = scenario_template;
    s.beta = b;
    s.validate();
    per_beta.push_back(std::move(s));
  }

  const int n_trials = scenario_template.n_trials;
  std::vector<BetaSweep> out(beta_values.size());
  for (std::size_t i = 0; i < beta_values.size(); ++i) {
    out[i].beta = beta_values[i];
    out[i].trials.resize(static_cast<std::size_t>(n_trials));
  }

  const std::size_t n_jobs = beta_values.size() * static_cast<std::size_t>(n_trials);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_jobs));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t bi = job / static_cast<std::size_t>(n_trials);
      const int trial = static_cast<int>(job % static_cast<std::size_t>(n_trials));
      try {
        out[bi].trials[static_cast<std::size_t>(trial)] = run_trial(per_beta[bi], trial, sweep_stream(bi, trial));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_jobs;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace ecspade
