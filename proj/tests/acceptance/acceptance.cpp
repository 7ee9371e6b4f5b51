// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. `--n-pairs N` overrides the simulation size.
// `--expected-failures 5,7` instead exits zero only when exactly the listed
// criteria fail, so known failures stay visible without masking regressions.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ecspade/report.hpp"
#include "ecspade/roc.hpp"
#include "ecspade/scenario_io.hpp"
#include "ecspade/sim.hpp"
#include "ecspade/verify.hpp"

namespace {

using namespace ecspade;

constexpr double kPfa = 1e-2;
constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_double(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

Outcome combine(const std::vector<verify::CheckResult>& checks) {
  Outcome out{true, ""};
  for (const auto& c : checks) {
    out.passed = out.passed && c.passed;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += c.name + (c.passed ? " ok" : " FAILED") + " [" + c.detail + "]";
  }
  return out;
}

/// pD at kPfa and AUC per (beta, trial, detector).
class Table {
 public:
  explicit Table(const std::vector<BetaSweep>& sweep) {
    for (const BetaSweep& b : sweep) {
      betas_.push_back(b.beta);
      for (const ScorePairs& trial : b.trials) {
        for (const DetectorScores& d : trial.scores) {
          const RocCurve curve = roc(d.h0, d.h1);
          auto& cell = cells_[{b.beta, d.detector}];
          cell.pd.push_back(pd_at_pfa(curve, kPfa));
          cell.auc.push_back(curve.auc);
        }
      }
    }
  }

  const std::vector<double>& pd(double beta, DetectorId id) const { return cell(beta, id).pd; }
  const std::vector<double>& auc(double beta, DetectorId id) const { return cell(beta, id).auc; }
  double mean_pd(double beta, DetectorId id) const { return mean(pd(beta, id)); }
  double mean_auc(double beta, DetectorId id) const { return mean(auc(beta, id)); }
  const std::vector<double>& betas() const { return betas_; }

  void print(std::ostream& os, std::string_view label) const {
    os << "# " << label << ": trial-mean pD@" << kPfa << " / AUC\n#   beta";
    for (DetectorId id : kAllDetectors) os << "  " << to_string(id);
    os << '\n';
    for (double beta : betas_) {
      os << "#   " << fmt_double(beta, 2);
      for (DetectorId id : kAllDetectors) {
        os << "  " << fmt_double(mean_pd(beta, id)) << '/' << fmt_double(mean_auc(beta, id));
      }
      os << '\n';
    }
  }

 private:
  struct Cell {
    std::vector<double> pd;
    std::vector<double> auc;
  };
  static double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }
  const Cell& cell(double beta, DetectorId id) const {
    for (const auto& [key, value] : cells_) {
      if (std::abs(key.first - beta) < 1e-9 && key.second == id) return value;
    }
    throw std::out_of_range("no cell for beta " + fmt_double(beta) + " " + std::string(to_string(id)));
  }
  std::vector<double> betas_;
  std::map<std::pair<double, DetectorId>, Cell> cells_;
};

const std::vector<DetectorId> kNonClairvoyant = {DetectorId::Amf,  DetectorId::EcAmf,  DetectorId::Ftmf,
                                                 DetectorId::EcFtmf, DetectorId::Spade2, DetectorId::EcSpade2};

/// Counts the trials in which `holds(trial)` is true; the ordering passes when
/// it holds in at least two of three (a strict majority in general).
struct Ordering {
  std::string label;
  int held = 0;
  int trials = 0;
  bool passed() const { return 2 * held > trials; }
  std::string describe() const {
    return label + " " + std::to_string(held) + "/" + std::to_string(trials) + (passed() ? "" : " FAILED");
  }
};

Ordering ordering(const Table& t, double beta, std::string label, const std::function<bool(std::size_t)>& holds) {
  Ordering o{std::move(label), 0, static_cast<int>(t.pd(beta, DetectorId::EcSpade2).size())};
  for (std::size_t k = 0; k < static_cast<std::size_t>(o.trials); ++k) o.held += holds(k);
  return o;
}

Outcome summarize(const std::vector<Ordering>& parts) {
  Outcome out{true, ""};
  for (const auto& p : parts) {
    out.passed = out.passed && p.passed();
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += p.describe();
  }
  return out;
}

Outcome figure1_ordering(const Table& t) {
  auto pd = [&](double beta, DetectorId id, std::size_t k) { return t.pd(beta, id)[k]; };
  std::vector<Ordering> parts;
  parts.push_back(ordering(t, 0.3, "(a) beta=0.3 2SPADE pair best", [&](std::size_t k) {
    const double ec = pd(0.3, DetectorId::EcSpade2, k);
    const double g = pd(0.3, DetectorId::Spade2, k);
    double others = 0.0;
    for (DetectorId id : {DetectorId::Amf, DetectorId::EcAmf, DetectorId::Ftmf, DetectorId::EcFtmf}) {
      others = std::max(others, pd(0.3, id, k));
    }
    return ec >= g && g > others;
  }));
  parts.push_back(ordering(t, 0.8, "(b) beta=0.8 ec-ftmf >= ftmf, ec-2spade", [&](std::size_t k) {
    const double ec = pd(0.8, DetectorId::EcFtmf, k);
    return ec >= pd(0.8, DetectorId::Ftmf, k) && ec >= pd(0.8, DetectorId::EcSpade2, k);
  }));
  parts.push_back(ordering(t, 1.0, "(c) beta=1.0 ec-amf top", [&](std::size_t k) {
    const double ec = pd(1.0, DetectorId::EcAmf, k);
    return std::ranges::all_of(kNonClairvoyant, [&](DetectorId id) { return ec >= pd(1.0, id, k); });
  }));
  return summarize(parts);
}

Outcome figure2_ordering(const Table& t) {
  auto pd = [&](double beta, DetectorId id, std::size_t k) { return t.pd(beta, id)[k]; };
  std::vector<Ordering> parts;
  for (double beta : t.betas()) {
    const std::string b = fmt_double(beta, 2);
    if (beta < 0.55) {
      parts.push_back(ordering(t, beta, "beta=" + b + " ec-ftmf >= ec-2spade", [&, beta](std::size_t k) {
        return pd(beta, DetectorId::EcFtmf, k) >= pd(beta, DetectorId::EcSpade2, k);
      }));
    } else if (beta < 0.65) {
      parts.push_back(ordering(t, beta, "beta=" + b + " ec-2spade top", [&, beta](std::size_t k) {
        const double ec = pd(beta, DetectorId::EcSpade2, k);
        return std::ranges::all_of(kNonClairvoyant, [&](DetectorId id) { return ec >= pd(beta, id, k); });
      }));
    } else {
      parts.push_back(ordering(t, beta, "beta=" + b + " ec-amf >= ec-2spade", [&, beta](std::size_t k) {
        return pd(beta, DetectorId::EcAmf, k) >= pd(beta, DetectorId::EcSpade2, k);
      }));
    }
    parts.push_back(ordering(t, beta, "beta=" + b + " ec-2spade not worst", [&, beta](std::size_t k) {
      const double ec = pd(beta, DetectorId::EcSpade2, k);
      return std::ranges::any_of(kNonClairvoyant, [&](DetectorId id) { return pd(beta, id, k) < ec; });
    }));
  }
  return summarize(parts);
}

Outcome clairvoyant_gap(const Table& t) {
  Outcome out{true, ""};
  auto check = [&](double beta, DetectorId near) {
    const double clair = t.mean_pd(beta, DetectorId::Clairvoyant);
    const double gap = clair - t.mean_pd(beta, near);
    const double spade_gap = clair - t.mean_pd(beta, DetectorId::EcSpade2);
    const bool close = gap <= 0.02;
    const bool trails = spade_gap > gap;
    out.passed = out.passed && close && trails;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += "beta=" + fmt_double(beta, 2) + " " + std::string(to_string(near)) + " gap " + fmt_double(gap) +
                  (close ? "" : " (> 0.02)") + ", ec-2spade gap " + fmt_double(spade_gap) +
                  (trails ? "" : " (not larger)");
  };
  check(0.8, DetectorId::EcFtmf);
  check(1.0, DetectorId::EcAmf);
  return out;
}

Outcome ec_over_gaussian(const Table& t) {
  const std::vector<std::pair<DetectorId, DetectorId>> pairs = {{DetectorId::EcAmf, DetectorId::Amf},
                                                                {DetectorId::EcFtmf, DetectorId::Ftmf},
                                                                {DetectorId::EcSpade2, DetectorId::Spade2},
                                                                {DetectorId::Clairvoyant, DetectorId::ClairvoyantGauss}};
  Outcome out{true, ""};
  double worst = 1.0;
  std::string worst_where;
  for (double beta : t.betas()) {
    for (const auto& [ec, g] : pairs) {
      const double margin = t.mean_auc(beta, ec) - t.mean_auc(beta, g);
      if (margin < -0.005) {
        out.passed = false;
        if (!out.detail.empty()) out.detail += "; ";
        out.detail += "beta=" + fmt_double(beta, 2) + " " + std::string(to_string(ec)) + " " +
                      fmt_double(t.mean_auc(beta, ec)) + " < " + std::string(to_string(g)) + " " +
                      fmt_double(t.mean_auc(beta, g));
      }
      if (margin < worst) {
        worst = margin;
        worst_where = "beta=" + fmt_double(beta, 2) + " " + std::string(to_string(ec));
      }
    }
  }
  if (out.passed) out.detail = "smallest EC-minus-Gaussian AUC " + fmt_double(worst) + " at " + worst_where;
  return out;
}

std::string render_csv(const std::vector<BetaSweep>& results) {
  const auto curves = build_curves(results);
  std::ostringstream os;
  write_roc_csv(os, curves, 256);
  write_summary_csv(os, curves);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n_pairs = 100'000;
  std::set<int> expected;
  bool have_expected = false;
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--n-pairs" && i + 1 < argc) {
      n_pairs = std::strtoll(argv[++i], nullptr, 10);
    } else if (arg == "--expected-failures" && i + 1 < argc) {
      have_expected = true;
      std::istringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) {
        if (!item.empty()) expected.insert(std::stoi(item));
      }
    } else {
      std::cerr << "usage: ecspade_acceptance [--n-pairs N] [--expected-failures i,j,...]\n";
      return 2;
    }
  }
  if (n_pairs < 1) {
    std::cerr << "--n-pairs must be positive\n";
    return 2;
  }

  std::set<int> failed;
  auto report = [&](int id, std::string_view name, const Outcome& o, double secs) {
    if (!o.passed) failed.insert(id);
    std::cout << (o.passed ? "PASS" : "FAIL") << "  " << id << ". " << name << "  (" << o.detail << "; "
              << fmt_double(secs, 3) << " s)" << std::endl;
  };

  auto t0 = std::chrono::steady_clock::now();
  {
    Outcome o = combine({verify::glrt_oracle(Likelihood::StudentT, 200, kSeed),
                         verify::glrt_oracle(Likelihood::Gaussian, 200, kSeed + 1)});
    const double secs = seconds_since(t0);
    if (secs >= 60.0) {
      o.passed = false;
      o.detail += "; runtime over one minute";
    }
    report(1, "oracle equivalence", o, secs);
  }

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = combine({verify::projector_identities(10'000, kSeed), verify::beta_stationarity(10'000, kSeed),
                               verify::clamp_and_positivity(10'000, kSeed)});
    report(2, "closed-form checks", o, seconds_since(t0));
  }

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = combine({verify::gaussian_limit(1'000, kSeed)});
    report(3, "gaussian-limit convergence", o, seconds_since(t0));
  }

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = combine({verify::glrt_dominance(10'000, kSeed)});
    report(4, "glrt dominance", o, seconds_since(t0));
  }

  RunSpec fig1 = preset("fig1");
  fig1.scenario.n_pairs = n_pairs;
  RunSpec fig2 = preset("fig2");
  fig2.scenario.n_pairs = n_pairs;

  t0 = std::chrono::steady_clock::now();
  const auto fig1_results = sweep(fig1.scenario, fig1.betas);
  const double fig1_secs = seconds_since(t0);
  const Table fig1_table(fig1_results);
  fig1_table.print(std::cout, "fig1 n_pairs=" + std::to_string(n_pairs));

  t0 = std::chrono::steady_clock::now();
  const auto fig2_results = sweep(fig2.scenario, fig2.betas);
  const double fig2_secs = seconds_since(t0);
  const Table fig2_table(fig2_results);
  fig2_table.print(std::cout, "fig2 n_pairs=" + std::to_string(n_pairs));

  report(5, "fig1 ordering", figure1_ordering(fig1_table), fig1_secs);
  report(6, "fig2 ordering", figure2_ordering(fig2_table), fig2_secs);
  report(7, "clairvoyant near-optimality", clairvoyant_gap(fig1_table), 0.0);
  report(8, "ec over gaussian", ec_over_gaussian(fig1_table), 0.0);

  t0 = std::chrono::steady_clock::now();
  {
    const Outcome o = combine({verify::auc_oracle(1'000, kSeed), verify::roc_monotone_invariance(1'000, kSeed)});
    report(9, "evaluation correctness", o, seconds_since(t0));
  }

  t0 = std::chrono::steady_clock::now();
  {
    const std::string first = render_csv(fig1_results);
    const std::string second = render_csv(sweep(fig1.scenario, fig1.betas, 1));
    const bool same = first == second;
    const double secs = seconds_since(t0);
    report(10, "determinism",
           {same, "fig1 csv " + std::to_string(first.size()) + " bytes, rerun on one worker " +
                      (same ? "identical" : "differs")},
           secs);
  }

  auto join = [](const std::set<int>& ids) {
    std::string out;
    for (int id : ids) out += (out.empty() ? "" : ",") + std::to_string(id);
    return out.empty() ? std::string("none") : out;
  };
  std::cout << "acceptance: " << failed.size() << " of 10 criteria failed (" << join(failed) << ")";
  if (!have_expected) {
    std::cout << std::endl;
    return failed.empty() ? 0 : 1;
  }
  const bool as_expected = failed == expected;
  std::cout << "; expected failures (" << join(expected) << ") "
            << (as_expected ? "match" : "do not match") << std::endl;
  return as_expected ? 0 : 1;
}
