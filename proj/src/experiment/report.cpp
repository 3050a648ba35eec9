#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "traj/experiment/experiment.hpp"

namespace traj {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << std::setprecision(17);
    return out;
}

std::string css_color(double t) {
    // blue (low) -> red (high)
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(40 + 205 * t);
    const int g = static_cast<int>(60 + 40 * (1.0 - std::abs(2 * t - 1.0)));
    const int b = static_cast<int>(40 + 205 * (1.0 - t));
    std::ostringstream s;
    s << "rgb(" << r << "," << g << "," << b << ")";
    return s.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_hash(buf.str());
}

void ReportManifest::add(const std::string& path) { files_.push_back(path); }

void ReportManifest::write(const std::string& out_dir,
                           const nlohmann::json& config) const {
    nlohmann::json j;
    j["config"] = config;
    {
        std::ostringstream h;
        h << std::hex << std::setw(16) << std::setfill('0')
          << fnv1a_hash(config.dump());
        j["config_hash"] = h.str();
    }
    nlohmann::json files = nlohmann::json::object();
    for (const auto& path : files_) {
        const auto rel =
            std::filesystem::proximate(path, out_dir).generic_string();
        std::ostringstream h;
        h << std::hex << std::setw(16) << std::setfill('0')
          << file_checksum(path);
        files[rel] = h.str();
    }
    j["files"] = files;
    auto out = open_out((std::filesystem::path(out_dir) / "manifest.json").string());
    out << j.dump(2) << "\n";
}

void write_matrix_csv(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& matrix,
                      const std::string& path) {
    auto out = open_out(path);
    out << "train_dataset";
    for (const auto& n : names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << names[i];
        for (double v : matrix[i]) out << "," << v;
        out << "\n";
    }
}

void write_window_metrics_csv(const std::vector<WindowMetrics>& rows,
                              const std::string& path) {
    auto out = open_out(path);
    out << "window_id,ade_ensemble,fde_ensemble,ade_member1,ape,fpe\n";
    for (const auto& r : rows)
        out << r.window_id << "," << r.ade_ensemble << "," << r.fde_ensemble
            << "," << r.ade_member1 << "," << r.ape << "," << r.fpe << "\n";
}

std::vector<WindowMetrics> read_window_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty metrics file: " + path);
    std::vector<WindowMetrics> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream s(line);
        WindowMetrics m;
        std::string field;
        std::getline(s, m.window_id, ',');
        std::getline(s, field, ',');
        m.ade_ensemble = std::stod(field);
        std::getline(s, field, ',');
        m.fde_ensemble = std::stod(field);
        std::getline(s, field, ',');
        m.ade_member1 = std::stod(field);
        std::getline(s, field, ',');
        m.ape = std::stod(field);
        std::getline(s, field, ',');
        m.fpe = std::stod(field);
        rows.push_back(std::move(m));
    }
    return rows;
}

void write_curves_csv(const std::vector<RetentionCurve>& curves,
                      const std::string& path) {
    if (curves.empty())
        throw std::invalid_argument("write_curves_csv: no curves");
    auto out = open_out(path);
    out << "fraction";
    for (const auto& c : curves) out << "," << to_string(c.mode);
    out << "\n";
    for (std::size_t i = 0; i < curves.front().fractions.size(); ++i) {
        out << curves.front().fractions[i];
        for (const auto& c : curves) out << "," << c.values[i];
        out << "\n";
    }
}

void write_scores_csv(const std::vector<double>& fractions,
                      const std::vector<double>& scores,
                      const std::string& path) {
    auto out = open_out(path);
    out << "fraction,score\n";
    for (std::size_t i = 0; i < fractions.size(); ++i)
        out << fractions[i] << "," << scores[i] << "\n";
}

void write_auc_csv(const std::vector<std::pair<std::string, double>>& aucs,
                   const std::string& path) {
    auto out = open_out(path);
    out << "curve,auc\n";
    for (const auto& [name, auc] : aucs) out << name << "," << auc << "\n";
}

void write_correlation_csv(const CorrelationReport& report,
                           const std::string& path) {
    auto out = open_out(path);
    out << "feature";
    for (const auto& m : report.metric_names) out << "," << m;
    out << "\n";
    for (std::size_t f = 0; f < report.feature_names.size(); ++f) {
        out << report.feature_names[f];
        for (double v : report.rho[f]) {
            if (std::isnan(v))
                out << ",nan";
            else
                out << "," << v;
        }
        out << "\n";
    }
}

void write_importance_csv(const std::vector<std::string>& names,
                          const std::vector<double>& vim,
                          const std::string& path) {
    auto out = open_out(path);
    out << "feature,importance\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        out << names[i] << "," << vim[i] << "\n";
}

void write_category_summary_csv(const CategorySummary& summary,
                                const std::string& path) {
    auto out = open_out(path);
    out << "category,metric,mean,median,count\n";
    for (const auto& [label, metrics] : summary.stats)
        for (const auto& [metric, stats] : metrics)
            out << label << "," << metric << "," << stats[0] << "," << stats[1]
                << "," << stats[2] << "\n";
}

void write_svg_lines(const std::vector<std::string>& labels,
                     const std::vector<std::vector<double>>& xs,
                     const std::vector<std::vector<double>>& ys,
                     const std::string& title, const std::string& path) {
    if (labels.size() != xs.size() || xs.size() != ys.size())
        throw std::invalid_argument("write_svg_lines: series count mismatch");
    const double width = 640, height = 420;
    const double ml = 60, mr = 140, mt = 40, mb = 40;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t s = 0; s < xs.size(); ++s)
        for (std::size_t i = 0; i < xs[s].size(); ++i) {
            xmin = std::min(xmin, xs[s][i]);
            xmax = std::max(xmax, xs[s][i]);
            ymin = std::min(ymin, ys[s][i]);
            ymax = std::max(ymax, ys[s][i]);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    const auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
        << width - mr << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4.0;
        const double fy = ymin + (ymax - ymin) * k / 4.0;
        out << "<text x=\"" << px(fx) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"10\">"
            << fmt(fx) << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"10\">"
            << fmt(fy) << "</text>\n";
    }
    for (std::size_t s = 0; s < xs.size(); ++s) {
        const char* color = kPalette[s % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs[s].size(); ++i)
            out << px(xs[s][i]) << "," << py(ys[s][i]) << " ";
        out << "\"/>\n";
        const double ly = mt + 16.0 * static_cast<double>(s);
        out << "<line x1=\"" << width - mr + 8 << "\" y1=\"" << ly
            << "\" x2=\"" << width - mr + 28 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr + 34 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << labels[s]
            << "</text>\n";
    }
    out << "</svg>\n";
}

void write_svg_heatmap(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& matrix,
                       const std::string& title, const std::string& path) {
    const std::size_t n = matrix.size();
    if (n == 0 || names.size() != n)
        throw std::invalid_argument("write_svg_heatmap: bad matrix");
    const double cell = 70, ml = 110, mt = 70;
    const double width = ml + cell * static_cast<double>(n) + 20;
    const double height = mt + cell * static_cast<double>(n) + 20;
    double vmin = 1e300, vmax = -1e300;
    for (const auto& row : matrix)
        for (double v : row) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    const double span = (vmax > vmin) ? vmax - vmin : 1.0;

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
    for (std::size_t j = 0; j < n; ++j)
        out << "<text x=\"" << ml + cell * (static_cast<double>(j) + 0.5)
            << "\" y=\"" << mt - 10
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << names[j] << "</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << "<text x=\"" << ml - 8 << "\" y=\""
            << mt + cell * (static_cast<double>(i) + 0.5) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << names[i] << "</text>\n";
        for (std::size_t j = 0; j < n; ++j) {
            const double v = matrix[i][j];
            const double x = ml + cell * static_cast<double>(j);
            const double y = mt + cell * static_cast<double>(i);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\""
                << css_color((v - vmin) / span)
                << "\" stroke=\"white\"/>\n";
            out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"11\" fill=\"white\">"
                << fmt(v) << "</text>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace traj
