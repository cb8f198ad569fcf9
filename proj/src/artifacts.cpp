#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swarm/errors.hpp"
#include "swarm/harness.hpp"

namespace swarm::harness {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader = "instance_id,method,uavs,interval,seed,time_s,return,collisions";

std::string fmt_time(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_val(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }

}  // namespace

void export_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.instance_id) + "," + r.method + "," + std::to_string(r.uavs) + "," +
           std::to_string(r.interval) + "," + std::to_string(r.seed) + "," + fmt_time(r.time_s) +
           "," + fmt_val(r.episode_return) + "," + std::to_string(r.collisions) + "\n";
  }
  write_file(path, out);
}

void export_json(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"instance_id", r.instance_id},
                   {"method", r.method},
                   {"uavs", r.uavs},
                   {"interval", r.interval},
                   {"seed", r.seed},
                   {"time_s", r.time_s},
                   {"return", r.episode_return},
                   {"collisions", r.collisions}});
  }
  write_file(path, arr.dump(2) + "\n");
}

std::vector<MetricsRow> parse_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError("bad metrics csv header in " + path.string());
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) parts.push_back(field);
    if (parts.size() != 8) throw IoError("bad metrics csv row: " + line);
    MetricsRow r;
    r.instance_id = std::stoi(parts[0]);
    r.method = parts[1];
    r.uavs = std::stoi(parts[2]);
    r.interval = std::stoi(parts[3]);
    r.seed = std::stoull(parts[4]);
    r.time_s = std::stod(parts[5]);
    r.episode_return = std::stod(parts[6]);
    r.collisions = std::stoll(parts[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsRow> parse_json(const std::filesystem::path& path) {
  const json arr = json::parse(read_file(path));
  std::vector<MetricsRow> rows;
  for (const auto& j : arr) {
    MetricsRow r;
    r.instance_id = j.at("instance_id");
    r.method = j.at("method");
    r.uavs = j.at("uavs");
    r.interval = j.at("interval");
    r.seed = j.at("seed");
    r.time_s = j.at("time_s");
    r.episode_return = j.at("return");
    r.collisions = j.at("collisions");
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_trajectory(const TrajectoryLog& log, const std::filesystem::path& path) {
  json root;
  root["uavs"] = json::array();
  for (const auto& u : log.uavs) {
    json positions = json::array();
    for (const auto& p : u.positions) positions.push_back(vec_json(p));
    json rewards = json::array();
    for (const auto& r : u.rewards)
      rewards.push_back(json::array({r.intrinsic, r.avoidance, r.constraint, r.total}));
    root["uavs"].push_back({{"id", u.id},
                            {"start", vec_json(u.start)},
                            {"target", vec_json(u.target)},
                            {"positions", positions},
                            {"rewards", rewards}});
  }
  root["epochs"] = json::array();
  for (const auto& e : log.epochs) {
    json hz = json::array();
    for (const auto& h : e.hazards) hz.push_back({{"c", vec_json(h.p)}, {"r", h.radius}});
    root["epochs"].push_back({{"t", e.t}, {"hazards", hz}});
  }
  write_file(path, root.dump(2) + "\n");
}

TrajectoryLog load_trajectory(const std::filesystem::path& path) {
  const json root = json::parse(read_file(path));
  TrajectoryLog log;
  for (const auto& ju : root.at("uavs")) {
    TrajectoryLog::UavTrack u;
    u.id = ju.at("id");
    u.start = vec_from(ju.at("start"));
    u.target = vec_from(ju.at("target"));
    for (const auto& jp : ju.at("positions")) u.positions.push_back(vec_from(jp));
    for (const auto& jr : ju.at("rewards"))
      u.rewards.push_back({jr.at(0), jr.at(1), jr.at(2), jr.at(3)});
    log.uavs.push_back(std::move(u));
  }
  for (const auto& je : root.at("epochs")) {
    TrajectoryLog::HazardEpoch e;
    e.t = je.at("t");
    for (const auto& jh : je.at("hazards"))
      e.hazards.push_back({vec_from(jh.at("c")), jh.at("r")});
    log.epochs.push_back(std::move(e));
  }
  return log;
}

Projection projection_from_name(const std::string& name) {
  if (name == "top") return Projection::top;
  if (name == "iso") return Projection::iso;
  throw ConfigError("unknown projection: " + name);
}

namespace {

struct Planar {
  double u = 0.0;
  double v = 0.0;
};

Planar project(const Vec3& p, Projection proj) {
  if (proj == Projection::top) return {p.x, p.y};
  // Simple isometric view.
  constexpr double c = 0.8660254037844387;  // cos(pi/6)
  constexpr double s = 0.5;                 // sin(pi/6)
  return {(p.x - p.y) * c, (p.x + p.y) * s + p.z};
}

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf", "#393b79", "#ad494a"};

}  // namespace

std::string render_trajectory_svg(const TrajectoryLog& log, Projection projection) {
  if (log.uavs.empty()) throw DimensionError("render: empty trajectory log");

  double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
  auto grow = [&](const Planar& q, double pad) {
    ulo = std::min(ulo, q.u - pad);
    uhi = std::max(uhi, q.u + pad);
    vlo = std::min(vlo, q.v - pad);
    vhi = std::max(vhi, q.v + pad);
  };
  for (const auto& u : log.uavs) {
    for (const auto& p : u.positions) grow(project(p, projection), 0.05);
    grow(project(u.start, projection), 0.1);
    grow(project(u.target, projection), 0.1);
  }
  for (const auto& e : log.epochs)
    for (const auto& h : e.hazards) grow(project(h.p, projection), h.radius);
  if (ulo > uhi) { ulo = vlo = 0.0; uhi = vhi = 1.0; }

  const double width = 800.0;
  const double margin = 20.0;
  const double span_u = std::max(uhi - ulo, 1e-6);
  const double span_v = std::max(vhi - vlo, 1e-6);
  const double scale = (width - 2.0 * margin) / span_u;
  const double height = span_v * scale + 2.0 * margin;
  auto sx = [&](double u) { return margin + (u - ulo) * scale; };
  auto sy = [&](double v) { return height - margin - (v - vlo) * scale; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(width) + "\" height=\"" +
         f2(height) + "\" viewBox=\"0 0 " + f2(width) + " " + f2(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + f2(width) + "\" height=\"" + f2(height) +
         "\" fill=\"white\"/>\n";

  // Hazard snapshots; later epochs drawn more opaque.
  const size_t epochs = log.epochs.size();
  for (size_t e = 0; e < epochs; ++e) {
    const double opacity = epochs == 1 ? 0.35 : 0.15 + 0.25 * (static_cast<double>(e) / (epochs - 1));
    for (const auto& h : log.epochs[e].hazards) {
      const auto q = project(h.p, projection);
      svg += "<circle class=\"hazard epoch" + std::to_string(e) + "\" cx=\"" + f2(sx(q.u)) +
             "\" cy=\"" + f2(sy(q.v)) + "\" r=\"" + f2(h.radius * scale) +
             "\" fill=\"#d62728\" fill-opacity=\"" + f2(opacity) + "\"/>\n";
    }
  }

  for (size_t i = 0; i < log.uavs.size(); ++i) {
    const auto& u = log.uavs[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (const auto& p : u.positions) {
      const auto q = project(p, projection);
      points += f2(sx(q.u)) + "," + f2(sy(q.v)) + " ";
    }
    if (!points.empty()) points.pop_back();
    svg += "<polyline class=\"uav" + std::to_string(u.id) + "\" points=\"" + points +
           "\" fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"/>\n";

    const auto qs = project(u.start, projection);
    svg += "<circle class=\"start\" cx=\"" + f2(sx(qs.u)) + "\" cy=\"" + f2(sy(qs.v)) +
           "\" r=\"4\" fill=\"" + std::string(color) + "\"/>\n";
    const auto qt = project(u.target, projection);
    svg += "<rect class=\"target\" x=\"" + f2(sx(qt.u) - 4.0) + "\" y=\"" + f2(sy(qt.v) - 4.0) +
           "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace swarm::harness
