#include "rfsim/io.hpp"

#include "rfsim/errors.hpp"

#include <iomanip>
#include <sstream>

namespace rfsim {

namespace {

std::ostream& fmt(std::ostream& os) { return os << std::setprecision(17); }

}  // namespace

const std::vector<double>& Snapshot::scalar(const std::string& name) const {
  for (const auto& [k, v] : scalars)
    if (k == name) return v;
  throw IoError("snapshot has no scalar field '" + name + "'");
}

const std::vector<std::array<double, 3>>& Snapshot::vector(const std::string& name) const {
  for (const auto& [k, v] : vectors)
    if (k == name) return v;
  throw IoError("snapshot has no vector field '" + name + "'");
}

void write_snapshot(const std::string& path, const Grid& grid, const FlowState& state, const SpeciesField& Y) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fmt(out);
  const int cells = grid.cells();
  out << "# vtk DataFile Version 3.0\n";
  out << "rfsim snapshot\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << grid.nx() << " " << grid.nz() << " 1\n";
  out << "ORIGIN " << 0.5 * grid.dx() << " " << 0.5 * grid.dz() << " 0\n";
  out << "SPACING " << grid.dx() << " " << grid.dz() << " 1\n";
  out << "POINT_DATA " << cells << "\n";

  auto scalar = [&](const std::string& name, auto&& value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < cells; ++c) out << value(c) << "\n";
  };
  scalar("theta", [&](int c) { return state.theta.size() ? state.theta(c) : 0.0; });
  scalar("p", [&](int c) { return state.p.size() ? state.p(c) : 0.0; });
  const Eigen::MatrixXd vc = cell_velocity(grid, state.v);
  out << "VECTORS velocity double\n";
  for (int c = 0; c < cells; ++c) out << vc(0, c) << " " << vc(1, c) << " 0\n";
  for (int s = 0; s < Y.species(); ++s) scalar("Y_" + std::to_string(s + 1), [&](int c) { return Y.Y(s, c); });
  if (!out) throw IoError("write to '" + path + "' failed");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Snapshot snap;
  std::string line;
  for (int i = 0; i < 3; ++i)
    if (!std::getline(in, line)) throw IoError("'" + path + "': truncated header");
  if (line != "ASCII") throw IoError("'" + path + "': only ASCII files are supported");

  std::string word;
  long points = -1;
  auto number = [&](auto& x) {
    if (!(in >> x)) throw IoError("'" + path + "': malformed number");
  };
  auto need_points = [&] {
    if (points < 0) throw IoError("'" + path + "': data before POINT_DATA");
  };
  while (in >> word) {
    if (word == "DATASET") {
      in >> word;
      if (word != "STRUCTURED_POINTS") throw IoError("'" + path + "': not a structured-points dataset");
    } else if (word == "DIMENSIONS") {
      int one = 0;
      number(snap.nx);
      number(snap.nz);
      number(one);
    } else if (word == "ORIGIN" || word == "SPACING") {
      auto& dst = word == "ORIGIN" ? snap.origin : snap.spacing;
      double third = 0.0;
      number(dst[0]);
      number(dst[1]);
      number(third);
    } else if (word == "POINT_DATA") {
      number(points);
      if (points < 0) throw IoError("'" + path + "': negative POINT_DATA");
    } else if (word == "SCALARS") {
      need_points();
      std::string name, type;
      int comps = 1;
      in >> name >> type;
      // optional component count, then LOOKUP_TABLE
      std::string next;
      in >> next;
      if (next != "LOOKUP_TABLE") {
        comps = std::stoi(next);
        in >> next;
      }
      if (comps != 1) throw IoError("'" + path + "': multi-component scalars are not supported");
      in >> next;  // table name
      std::vector<double> v(static_cast<std::size_t>(points));
      for (auto& x : v) number(x);
      snap.scalars.emplace_back(name, std::move(v));
    } else if (word == "VECTORS") {
      need_points();
      std::string name, type;
      in >> name >> type;
      std::vector<std::array<double, 3>> v(static_cast<std::size_t>(points));
      for (auto& x : v) {
        number(x[0]);
        number(x[1]);
        number(x[2]);
      }
      snap.vectors.emplace_back(name, std::move(v));
    } else {
      throw IoError("'" + path + "': unexpected token '" + word + "'");
    }
  }
  return snap;
}

std::string csv_header() {
  std::string h;
  for (const auto& name : InvariantReport::field_names()) {
    if (!h.empty()) h += ',';
    h += name;
  }
  return h;
}

std::string csv_row(const InvariantReport& r) {
  std::ostringstream os;
  fmt(os);
  os << r.step << ',' << r.time << ',' << r.minY << ',' << r.maxY << ',' << r.maxSumDeviation << ',' << r.minTheta
     << ',' << r.maxDivV << ',' << r.gibbsEnergy << ',' << r.dissipationIntegral << ',' << (r.stepAccepted ? 1 : 0);
  return os.str();
}

TimeSeriesWriter::TimeSeriesWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
  out_ << csv_header() << "\n";
}

void TimeSeriesWriter::append(const InvariantReport& r) {
  out_ << csv_row(r) << "\n";
  out_.flush();
  if (!out_) throw IoError("write to '" + path_ + "' failed");
}

}  // namespace rfsim
