// slamarm - plot bundle generated purely from a trace file
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_PLOTS_HPP
#define SLAMARM_PLOTS_HPP

#include <string>
#include <vector>

#include "slamarm/svgplot.hpp"
#include "slamarm/trace_io.hpp"

namespace slamarm {

/// Writes the four standard figures next to `prefix`: the 3D path (isometric
/// projection), estimation errors, tracking error and torque channels.
/// Pure function of the trace file; returns the written paths.
inline std::vector<std::string> emit_plots(const TraceTable& trace, const std::string& prefix) {
  std::vector<std::string> written;
  const auto& t = trace.col("t");

  {
    // isometric projection of the true / desired / estimated paths
    auto iso = [](double x, double y, double z) {
      return std::make_pair((x - y) * 0.8660254037844386, (x + y) * 0.5 + z);
    };
    SvgPlot p("end-effector path (isometric projection)", "u", "v");
    for (const char* base : {"true", "des", "est"}) {
      const auto& x = trace.col(std::string(base) + "_px");
      const auto& y = trace.col(std::string(base) + "_py");
      const auto& z = trace.col(std::string(base) + "_pz");
      std::vector<double> u(x.size()), v(x.size());
      for (size_t i = 0; i < x.size(); ++i) std::tie(u[i], v[i]) = iso(x[i], y[i], z[i]);
      p.add_series(base, u, v);
    }
    const std::string path = prefix + "_path3d.svg";
    write_file(path, p.render());
    written.push_back(path);
  }
  {
    SvgPlot p("pose estimation error", "t [s]", "error");
    p.add_series("|p - p_est| [m]", t, trace.col("est_pos_err"));
    p.add_series("|R - R_est|_F", t, trace.col("est_att_err"));
    const std::string path = prefix + "_estimation_error.svg";
    write_file(path, p.render());
    written.push_back(path);
  }
  {
    SvgPlot p("tracking error", "t [s]", "error");
    p.add_series("|p - p_des| [m]", t, trace.col("trk_pos_err"));
    p.add_series("|R - R_des|_F", t, trace.col("trk_att_err"));
    const std::string path = prefix + "_tracking_error.svg";
    write_file(path, p.render());
    written.push_back(path);
  }
  {
    SvgPlot p("control torque", "t [s]", "tau [N m]");
    for (int i = 1; i <= 6; ++i) {
      p.add_series("joint " + std::to_string(i), t, trace.col("tau" + std::to_string(i)));
    }
    const std::string path = prefix + "_torque.svg";
    write_file(path, p.render());
    written.push_back(path);
  }
  return written;
}

}  // namespace slamarm

#endif  // SLAMARM_PLOTS_HPP
