// slamarm - trace CSV and report serialization (17-significant-digit floats)
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_TRACE_IO_HPP
#define SLAMARM_TRACE_IO_HPP

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slamarm/hybrid_sim.hpp"

namespace slamarm {

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

inline void append_pose(std::string& out, const RigidPose& x) {
  const Matrix3d& r = x.rot.matrix();
  for (int c = 0; c < 3; ++c) {
    for (int rr = 0; rr < 3; ++rr) {
      append_number(out, r(rr, c));
      out += ',';
    }
  }
  for (int i = 0; i < 3; ++i) {
    append_number(out, x.pos(i));
    if (i < 2) out += ',';
  }
}

}  // namespace detail

/// Fixed trace column order. Poses are written rotation-column-major then
/// position; the header names every column.
inline std::string trace_header() {
  std::string h = "t,j";
  auto six = [&](const std::string& base) {
    for (int i = 1; i <= 6; ++i) h += "," + base + std::to_string(i);
  };
  six("q");
  six("qd");
  six("tau");
  auto pose = [&](const std::string& base) {
    for (int c = 1; c <= 3; ++c) {
      for (int r = 1; r <= 3; ++r) h += "," + base + "_r" + std::to_string(r) + std::to_string(c);
    }
    h += "," + base + "_px," + base + "_py," + base + "_pz";
  };
  pose("true");
  pose("est");
  pose("des");
  pose("xe");
  six("y");
  h += ",u_obs,u_ctl,kinetic,v,vdot_num,vdot_closed,obs_q,h,cond_j,residual";
  h += ",est_pos_err,est_att_err,trk_pos_err,trk_att_err,err_norm,dual_path_gap,meas_equiv_gap";
  h += ",events";
  return h;
}

inline std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::string out = trace_header();
  out += '\n';
  for (const auto& r : rows) {
    detail::append_number(out, r.t);
    out += ',';
    out += std::to_string(r.j);
    auto six = [&](const Vector6d& v) {
      for (int i = 0; i < 6; ++i) {
        out += ',';
        detail::append_number(out, v(i));
      }
    };
    six(r.q);
    six(r.qd);
    six(r.tau);
    for (const RigidPose* p : {&r.pose_true, &r.pose_est, &r.pose_des, &r.pose_err}) {
      out += ',';
      detail::append_pose(out, *p);
    }
    six(r.vel_err);
    for (double v : {r.u_obs, r.u_ctl, r.kinetic, r.v, r.vdot_numeric, r.vdot_closed}) {
      out += ',';
      detail::append_number(out, v);
    }
    out += ',';
    out += std::to_string(r.obs_q);
    out += ',';
    detail::append_number(out, r.h);
    for (double v : {r.cond_j, r.residual, r.est_pos_err, r.est_att_err, r.trk_pos_err,
                     r.trk_att_err, r.err_norm, r.dual_path_gap, r.meas_equiv_gap}) {
      out += ',';
      detail::append_number(out, v);
    }
    out += ',';
    out += r.events.empty() ? "-" : r.events;
    out += '\n';
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

/// Minimal trace reader for offline plotting: returns the named columns as
/// vectors keyed by header name (the events column is skipped).
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[col][row]
  std::vector<std::string> events;

  int rows() const { return columns.empty() ? 0 : static_cast<int>(data[0].size()); }

  const std::vector<double>& col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return data[i];
    }
    throw std::runtime_error("trace is missing column '" + name + "'");
  }
};

inline TraceTable read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace: " + path);
  TraceTable t;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty trace: " + path);
  {
    std::istringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ',')) t.columns.push_back(name);
  }
  if (t.columns.empty() || t.columns.back() != "events") {
    throw std::runtime_error("malformed trace header: " + path);
  }
  t.columns.pop_back();
  t.data.resize(t.columns.size());
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    for (size_t c = 0; c < t.columns.size(); ++c) {
      if (!std::getline(ls, tok, ',')) {
        throw std::runtime_error("trace row " + std::to_string(lineno) + ": too few columns");
      }
      double v = 0.0;
      if (tok == "nan" || tok == "-nan" || tok == "nan(ind)") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else {
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc()) {
          throw std::runtime_error("trace row " + std::to_string(lineno) + ": bad number '" +
                                   tok + "'");
        }
      }
      t.data[c].push_back(v);
    }
    if (!std::getline(ls, tok)) {
      throw std::runtime_error("trace row " + std::to_string(lineno) + ": missing events column");
    }
    t.events.push_back(tok);
  }
  return t;
}

/// Report as ordered key = value text.
inline std::string report_to_text(const LyapunovReport& rep) {
  std::string out;
  auto num = [&](const std::string& key, double v) {
    out += key;
    out += " = ";
    detail::append_number(out, v);
    out += '\n';
  };
  auto boolean = [&](const std::string& key, bool v) {
    out += key;
    out += v ? " = pass\n" : " = FAIL\n";
  };
  out += std::string("certificate_mode = ") + (rep.certificate_mode ? "true" : "false") + "\n";
  num("max_flow_vdot", rep.max_flow_vdot);
  num("max_flow_v_increase", rep.max_flow_v_increase);
  num("max_vdot_mismatch_rel", rep.max_vdot_mismatch_rel);
  out += "observer_jumps = " + std::to_string(rep.observer_jumps) + "\n";
  out += "controller_jumps = " + std::to_string(rep.controller_jumps) + "\n";
  num("min_flow_between_jumps", rep.min_flow_between_jumps);
  num("final_error_norm", rep.final_error_norm);
  num("final_trk_pos_err", rep.final_trk_pos_err);
  num("final_trk_att_err", rep.final_trk_att_err);
  num("steady_trk_pos_err", rep.steady_trk_pos_err);
  num("steady_est_pos_err", rep.steady_est_pos_err);
  num("max_residual", rep.max_residual);
  num("max_dual_path_gap", rep.max_dual_path_gap);
  num("max_meas_equiv_gap", rep.max_meas_equiv_gap);
  out += "singularity_events = " + std::to_string(rep.singularity_events) + "\n";
  for (size_t i = 0; i < rep.jumps.size(); ++i) {
    const auto& jr = rep.jumps[i];
    out += "jump" + std::to_string(i + 1) + " = " + jr.kind + " t ";
    detail::append_number(out, jr.t);
    out += " j " + std::to_string(jr.j) + " dV ";
    detail::append_number(out, jr.dv);
    out += " dpot ";
    detail::append_number(out, jr.dpot);
    out += '\n';
  }
  boolean("monitor.v_nonnegative", rep.pass_v_nonnegative);
  boolean("monitor.jump_potential_drop", rep.pass_jump_potential_drop);
  boolean("monitor.non_zeno", rep.pass_non_zeno);
  boolean("monitor.flow_monotone", rep.pass_flow_monotone);
  boolean("monitor.jump_v_decrease", rep.pass_jump_v_decrease);
  boolean("monitor.vdot_match", rep.pass_vdot_match);
  boolean("monitor.overall", rep.all_pass());
  return out;
}

}  // namespace slamarm

#endif  // SLAMARM_TRACE_IO_HPP
