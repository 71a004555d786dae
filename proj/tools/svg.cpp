#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace seqsync::app {

namespace {

constexpr const char* kColors[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts, const char* color,
              bool dashed, bool closed)
{
    if (pts.empty()) return;
    os << "<" << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (const auto& [x, y] : pts) os << num(x) << ',' << num(y) << ' ';
    os << "\"/>\n";
}

} // namespace

std::string region_svg(const std::vector<RegionBoundary>& regions, const std::vector<std::string>& labels)
{
    const double size = 480.0;
    const double c = size / 2.0;
    double r_max = 0.0;
    for (const auto& reg : regions) {
        for (const auto& s : reg.samples) {
            if (std::isfinite(s.i_limit)) r_max = std::max(r_max, s.i_limit);
        }
    }
    if (!(r_max > 0.0)) r_max = 1.0;
    const double r_plot = std::ceil(r_max * 5.0) / 5.0;
    const double scale = (c - 30.0) / r_plot;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int i = 1; i <= 5; ++i) {
        const double r = r_plot * i / 5.0;
        os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << num(r * scale)
           << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
        os << "<text x=\"" << num(c + r * scale + 2) << "\" y=\"" << num(c - 2) << "\" font-size=\"10\">" << num(r)
           << "</text>\n";
    }
    os << "<line x1=\"10\" y1=\"" << c << "\" x2=\"" << size - 10 << "\" y2=\"" << c << "\" stroke=\"#999\"/>\n";
    os << "<line x1=\"" << c << "\" y1=\"10\" x2=\"" << c << "\" y2=\"" << size - 10 << "\" stroke=\"#999\"/>\n";

    for (std::size_t n = 0; n < regions.size(); ++n) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : regions[n].samples) {
            const double r = std::min(std::isfinite(s.i_limit) ? s.i_limit : r_plot, r_plot);
            pts.emplace_back(c + r * scale * std::cos(s.theta_i), c - r * scale * std::sin(s.theta_i));
        }
        const char* color = kColors[n % 4];
        polyline(os, pts, color, n > 0, true);
        if (n < labels.size()) {
            os << "<text x=\"12\" y=\"" << 18 + 14 * n << "\" font-size=\"12\" fill=\"" << color << "\">"
               << labels[n] << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string trace_svg(const Trace& tr)
{
    const double w = 720.0;
    const double panel = 200.0;
    const double left = 50.0;
    const double top = 20.0;
    const double gap = 40.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
       << num(2 * panel + gap + 2 * top) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (tr.size() < 2) {
        os << "</svg>\n";
        return os.str();
    }
    const double t0 = tr.t.front();
    const double t1 = tr.t.back();
    auto x_of = [&](double t) { return left + (w - left - 10.0) * (t - t0) / std::max(t1 - t0, 1e-12); };

    auto draw_panel = [&](double y0, const std::vector<const std::vector<double>*>& series,
                          const std::vector<std::string>& names) {
        double lo = 1e300;
        double hi = -1e300;
        for (const auto* s : series) {
            for (double v : *s) {
                if (std::isfinite(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        auto y_of = [&](double v) { return y0 + panel - panel * (v - lo) / (hi - lo); };
        os << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << w - left - 10.0 << "\" height=\"" << panel
           << "\" fill=\"none\" stroke=\"#999\"/>\n";
        os << "<text x=\"2\" y=\"" << num(y0 + 10) << "\" font-size=\"10\">" << num(hi) << "</text>\n";
        os << "<text x=\"2\" y=\"" << num(y0 + panel) << "\" font-size=\"10\">" << num(lo) << "</text>\n";
        for (std::size_t n = 0; n < series.size(); ++n) {
            std::vector<std::pair<double, double>> pts;
            const std::size_t stride = std::max<std::size_t>(1, tr.size() / 2000);
            for (std::size_t i = 0; i < tr.size(); i += stride) {
                const double v = (*series[n])[i];
                if (std::isfinite(v)) pts.emplace_back(x_of(tr.t[i]), y_of(std::clamp(v, lo, hi)));
            }
            polyline(os, pts, kColors[n % 4], false, false);
            os << "<text x=\"" << num(left + 8 + 90 * n) << "\" y=\"" << num(y0 + 14) << "\" font-size=\"12\" fill=\""
               << kColors[n % 4] << "\">" << names[n] << "</text>\n";
        }
    };
    draw_panel(top, {&tr.f_pos_hz, &tr.f_neg_hz}, {"f+ (Hz)", "f- (Hz)"});
    draw_panel(top + panel + gap, {&tr.ud_pos, &tr.ud_neg}, {"ud+ (p.u.)", "ud- (p.u.)"});
    os << "<text x=\"" << num(w / 2) << "\" y=\"" << num(2 * panel + gap + 2 * top - 4)
       << "\" font-size=\"11\">t (s)</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace seqsync::app
