#include "optstop/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "optstop/diagnostics.hpp"
#include "optstop/smoothfit.hpp"

namespace optstop {
namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

void write_line_plot_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<SvgSeries>& series, int width,
                         int height) {
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x1 = x0 + 1;
    if (y1 - y0 <= 0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    const auto prec = out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        out << "<text x=\"" << px(fx) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << fmt(fx)
            << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << fmt(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + ph / 2 << ")\">" << escape(y_label) << "</text>\n";

    double legend_y = top + 10;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"/>\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\""
                    << s.color << "\"/>\n";
            }
        }
        out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << legend_y << "\" x2=\"" << left + pw + 30
            << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + pw + 34 << "\" y=\"" << legend_y + 4 << "\">" << escape(s.label)
            << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
    out.precision(prec);
}

void write_smoothfit_csv(std::ostream& out, const std::vector<LimitEstimate>& limits) {
    const auto prec = out.precision(12);
    out << "t,kind,n,x_n,estimate,extrapolated,target,discrepancy\n";
    for (const auto& e : limits) {
        for (std::size_t i = 0; i < e.estimates.size(); ++i) {
            out << e.t << ',' << e.kind << ',' << i + 1 << ',' << e.x_n[i] << ',' << e.estimates[i] << ','
                << e.extrapolated << ',' << e.target << ',' << e.discrepancy << '\n';
        }
    }
    out.precision(prec);
}

void write_smoothfit_svg(std::ostream& out, const std::vector<LimitEstimate>& limits) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::vector<SvgSeries> series;
    std::size_t max_terms = 0;
    for (std::size_t k = 0; k < limits.size(); ++k) {
        const auto& e = limits[k];
        if (e.kind != "space") continue;
        SvgSeries s;
        s.label = "V_x, t=" + fmt(e.t);
        s.color = palette[k % 10];
        for (std::size_t i = 0; i < e.estimates.size(); ++i) {
            s.x.push_back(static_cast<double>(i + 1));
            s.y.push_back(e.estimates[i]);
        }
        max_terms = std::max(max_terms, e.estimates.size());
        series.push_back(std::move(s));
    }
    if (max_terms > 0) {
        SvgSeries target{"target -1", {1.0, static_cast<double>(max_terms)}, {-1.0, -1.0}, "#000000", true, false};
        series.push_back(target);
    }
    write_line_plot_svg(out, "Space derivative along the approach sequence", "approach index n",
                        "V_x(t, x_n)", series);
}

void write_lagrange_csv(std::ostream& out, const std::vector<LagrangeReport>& rows,
                        const std::vector<double>& c_values) {
    const auto prec = out.precision(12);
    out << "t,x,lhs,rhs,se,z,c\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << r.t << ',' << r.x << ',' << r.lhs << ',' << r.rhs << ',' << r.se << ',' << r.z << ','
            << (i < c_values.size() ? c_values[i] : 0.0) << '\n';
    }
    out.precision(prec);
}

}  // namespace optstop
