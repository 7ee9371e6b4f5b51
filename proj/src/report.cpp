#include "ecspade/report.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace ecspade {
namespace {

constexpr const char* kNumber = "{}";

const char* colour(DetectorId id) {
  switch (id) {
    case DetectorId::Amf:
    case DetectorId::EcAmf: return "#1f77b4";
    case DetectorId::Ftmf:
    case DetectorId::EcFtmf: return "#2ca02c";
    case DetectorId::Spade2:
    case DetectorId::EcSpade2: return "#d62728";
    case DetectorId::Clairvoyant:
    case DetectorId::ClairvoyantGauss: return "#555555";
  }
  return "#000000";
}

// Gaussian-background detectors are dashed, EC ones solid.
bool dashed(DetectorId id) {
  return id == DetectorId::Amf || id == DetectorId::Ftmf || id == DetectorId::Spade2 ||
         id == DetectorId::ClairvoyantGauss;
}

}  // namespace

std::vector<CurveRecord> build_curves(const std::vector<BetaSweep>& results) {
  std::vector<CurveRecord> out;
  for (const auto& b : results) {
    for (const auto& trial : b.trials) {
      for (const auto& s : trial.scores) out.push_back({s.detector, b.beta, trial.trial, roc(s.h0, s.h1)});
    }
  }
  return out;
}

void write_roc_csv(std::ostream& os, const std::vector<CurveRecord>& curves, std::size_t roc_points) {
  os << "detector,beta,trial,pfa,pd\n";
  for (const auto& rec : curves) {
    const std::vector<RocPoint> pts =
        roc_points == 0 ? rec.curve.points
                        : resample(rec.curve, default_pfa_grid(roc_points, 1.0 / static_cast<double>(rec.curve.n0)));
    const std::string prefix = fmt::format("{},{},{},", to_string(rec.detector), rec.beta, rec.trial);
    for (const auto& p : pts) {
      os << prefix << fmt::format(kNumber, p.pfa) << ',' << fmt::format(kNumber, p.pd) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& os, const std::vector<CurveRecord>& curves) {
  os << "detector,beta,trial,auc";
  for (double p : kSummaryPfa) os << ",pd@" << fmt::format("{:g}", p);
  os << '\n';
  for (const auto& rec : curves) {
    os << fmt::format("{},{},{},{}", to_string(rec.detector), rec.beta, rec.trial, rec.curve.auc);
    for (double p : kSummaryPfa) os << ',' << fmt::format(kNumber, pd_at_pfa(rec.curve, p));
    os << '\n';
  }
}

void write_scores_csv(std::ostream& os, const std::vector<BetaSweep>& results) {
  os << "detector,beta,trial,pair,h0,h1\n";
  for (const auto& b : results) {
    for (const auto& trial : b.trials) {
      for (const auto& s : trial.scores) {
        for (std::size_t i = 0; i < s.h0.size(); ++i) {
          os << fmt::format("{},{},{},{},{},{}\n", to_string(s.detector), b.beta, trial.trial, i,
                            s.h0[i], s.h1[i]);
        }
      }
    }
  }
}

void write_svg_panel(std::ostream& os, const std::vector<CurveRecord>& curves, double beta, double alpha,
                     const SvgOptions& opts) {
  constexpr double kWidth = 480, kHeight = 420;
  constexpr double kLeft = 60, kRight = 150, kTop = 36, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::vector<const CurveRecord*> panel;
  for (const auto& c : curves) {
    if (c.beta == beta) panel.push_back(&c);
  }
  double floor = 1e-4;
  for (const auto* c : panel) floor = std::min(floor, 1.0 / static_cast<double>(c->curve.n0));
  const double log_floor = std::log10(floor);

  auto px = [&](double pfa) {
    if (!opts.log_pfa) return kLeft + pfa * plot_w;
    const double lp = std::log10(std::max(pfa, floor));
    return kLeft + (lp - log_floor) / (0.0 - log_floor) * plot_w;
  };
  auto py = [&](double pd) { return kTop + (1.0 - pd) * plot_h; };

  auto out = std::ostreambuf_iterator<char>(os);
  fmt::format_to(out,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
                 "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
                 kWidth, kHeight, kWidth, kHeight);
  fmt::format_to(out, "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">alpha={:g} beta={:g}</text>\n",
                 kLeft, alpha, beta);
  fmt::format_to(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                 kTop, plot_w, plot_h);

  // Axis ticks.
  if (opts.log_pfa) {
    for (int e = static_cast<int>(std::ceil(log_floor)); e <= 0; ++e) {
      const double x = px(std::pow(10.0, e));
      fmt::format_to(out,
                     "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ccc\"/>"
                     "<text x=\"{0:.2f}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"middle\">1e{4}</text>\n",
                     x, kTop, kTop + plot_h, kTop + plot_h + 14, e);
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double x = px(i / 5.0);
      fmt::format_to(out,
                     "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ccc\"/>"
                     "<text x=\"{0:.2f}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"middle\">{4:g}</text>\n",
                     x, kTop, kTop + plot_h, kTop + plot_h + 14, i / 5.0);
    }
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = py(i / 5.0);
    fmt::format_to(out,
                   "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ccc\"/>"
                   "<text x=\"{3}\" y=\"{4:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
                   "text-anchor=\"end\">{5:g}</text>\n",
                   kLeft, y, kLeft + plot_w, kLeft - 4, y + 3, i / 5.0);
  }
  fmt::format_to(out,
                 "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
                 "false alarm rate</text>\n",
                 kLeft + plot_w / 2, kHeight - 12);
  fmt::format_to(out,
                 "<text x=\"14\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                 "transform=\"rotate(-90 14 {})\">detection rate</text>\n",
                 kTop + plot_h / 2, kTop + plot_h / 2);

  std::vector<DetectorId> legend;
  for (const auto* c : panel) {
    const std::vector<RocPoint> pts =
        resample(c->curve, default_pfa_grid(opts.points, 1.0 / static_cast<double>(c->curve.n0)));
    fmt::format_to(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"{} points=\"", colour(c->detector),
                   dashed(c->detector) ? " stroke-dasharray=\"5,3\"" : "");
    for (const auto& p : pts) fmt::format_to(out, "{:.2f},{:.2f} ", px(p.pfa), py(p.pd));
    os << "\"/>\n";
    if (std::ranges::find(legend, c->detector) == legend.end()) legend.push_back(c->detector);
  }
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double y = kTop + 14 + 18.0 * static_cast<double>(i);
    const double x = kLeft + plot_w + 10;
    fmt::format_to(out,
                   "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>"
                   "<text x=\"{5}\" y=\"{6}\" font-family=\"sans-serif\" font-size=\"11\">{7}</text>\n",
                   x, y, x + 24, colour(legend[i]), dashed(legend[i]) ? " stroke-dasharray=\"5,3\"" : "", x + 30,
                   y + 4, to_string(legend[i]));
  }
  os << "</svg>\n";
}

}  // namespace ecspade
