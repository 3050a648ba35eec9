#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "traj/dataset/dataset.hpp"

namespace traj {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw DatasetError("missing column: " + name);
    return static_cast<int>(it - header.begin());
}

}  // namespace

Scene load_tracks(const std::string& path, const ColumnSchema& schema,
                  const std::string& map_path, const std::string& signal_path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open track file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DatasetError("empty track file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);

    const int ci_id = find_column(header, schema.track_id);
    const int ci_t = find_column(header, schema.t);
    const int ci_type = find_column(header, schema.agent_type);
    const int ci_x = find_column(header, schema.x);
    const int ci_y = find_column(header, schema.y);

    // preserve first-appearance order of tracks
    std::vector<std::string> order;
    std::map<std::string, Track> tracks;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const int needed = std::max({ci_id, ci_t, ci_type, ci_x, ci_y});
        if (static_cast<int>(cells.size()) <= needed)
            throw DatasetError("short row at line " + std::to_string(line_no));
        const std::string& id = cells[ci_id];
        TrackPoint p;
        p.t = std::stod(cells[ci_t]);
        p.x = std::stod(cells[ci_x]);
        p.y = std::stod(cells[ci_y]);
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t))
            throw DatasetError("non-finite value at line " + std::to_string(line_no));
        auto [it, inserted] = tracks.try_emplace(id);
        if (inserted) {
            it->second.track_id = id;
            it->second.agent_type = agent_type_from_string(cells[ci_type]);
            order.push_back(id);
        }
        it->second.points.push_back(p);
    }

    Scene scene;
    scene.scene_id = path;
    for (const auto& id : order) {
        Track& tr = tracks.at(id);
        std::stable_sort(tr.points.begin(), tr.points.end(),
                         [](const TrackPoint& a, const TrackPoint& b) {
                             return a.t < b.t;
                         });
        for (std::size_t i = 1; i < tr.points.size(); ++i)
            if (tr.points[i].t <= tr.points[i - 1].t)
                throw DatasetError("non-monotone timestamps in track " + id);
        if (tr.points.size() < 2)
            throw DatasetError("track " + id + " has fewer than 2 points");
        scene.tracks.push_back(std::move(tr));
    }

    if (!map_path.empty()) scene.map = load_map(map_path);
    if (!signal_path.empty()) scene.signals = load_signals(signal_path);
    return scene;
}

void save_tracks(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write track file: " + path);
    out << "track_id,t,agent_type,x,y\n";
    out << std::setprecision(17);
    for (const auto& tr : scene.tracks)
        for (const auto& p : tr.points)
            out << tr.track_id << ',' << p.t << ',' << to_string(tr.agent_type)
                << ',' << p.x << ',' << p.y << '\n';
}

void save_map(const MapSpec& map, const std::string& path) {
    nlohmann::json j;
    j["regions"] = nlohmann::json::array();
    for (const auto& r : map.regions) {
        nlohmann::json poly = nlohmann::json::array();
        for (const auto& [x, y] : r.polygon) poly.push_back({x, y});
        j["regions"].push_back({{"label", r.label},
                                {"approach_id", r.approach_id},
                                {"polygon", poly}});
    }
    j["stop_lines"] = nlohmann::json::array();
    for (const auto& s : map.stop_lines)
        j["stop_lines"].push_back({{"approach_id", s.approach_id},
                                   {"p1", {s.x1, s.y1}},
                                   {"p2", {s.x2, s.y2}}});
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write map file: " + path);
    out << j.dump(2) << '\n';
}

MapSpec load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open map file: " + path);
    nlohmann::json j;
    in >> j;
    MapSpec map;
    for (const auto& rj : j.at("regions")) {
        StageRegion r;
        r.label = rj.at("label").get<int>();
        if (r.label < 1 || r.label > 6)
            throw DatasetError("stage label out of range 1..6");
        r.approach_id = rj.at("approach_id").get<std::string>();
        for (const auto& pj : rj.at("polygon"))
            r.polygon.emplace_back(pj.at(0).get<double>(), pj.at(1).get<double>());
        map.regions.push_back(std::move(r));
    }
    for (const auto& sj : j.value("stop_lines", nlohmann::json::array())) {
        StopLine s;
        s.approach_id = sj.at("approach_id").get<std::string>();
        s.x1 = sj.at("p1").at(0).get<double>();
        s.y1 = sj.at("p1").at(1).get<double>();
        s.x2 = sj.at("p2").at(0).get<double>();
        s.y2 = sj.at("p2").at(1).get<double>();
        map.stop_lines.push_back(s);
    }
    return map;
}

void save_signals(const SignalTimeline& signals, const std::string& path) {
    nlohmann::json j;
    for (const auto& [approach, ivs] : signals.phases) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& iv : ivs)
            arr.push_back({{"phase", to_string(iv.phase)},
                           {"start", iv.start_s},
                           {"end", iv.end_s}});
        j["approaches"][approach] = arr;
    }
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write signal file: " + path);
    out << j.dump(2) << '\n';
}

SignalTimeline load_signals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open signal file: " + path);
    nlohmann::json j;
    in >> j;
    SignalTimeline tl;
    for (const auto& [approach, arr] : j.at("approaches").items()) {
        std::vector<SignalInterval> ivs;
        for (const auto& ij : arr) {
            SignalInterval iv;
            iv.phase = phase_from_string(ij.at("phase").get<std::string>());
            iv.start_s = ij.at("start").get<double>();
            iv.end_s = ij.at("end").get<double>();
            ivs.push_back(iv);
        }
        for (std::size_t i = 1; i < ivs.size(); ++i)
            if (ivs[i].start_s < ivs[i - 1].end_s)
                throw DatasetError("overlapping signal intervals for " + approach);
        tl.phases[approach] = std::move(ivs);
    }
    return tl;
}

}  // namespace traj
